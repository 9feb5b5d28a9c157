#include "io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace convec::io {

using spectral::FieldKind;
using spectral::ModeIndex;
using spectral::SpectralField;

Json field_to_json(const SpectralField& f) {
  Json coeffs = Json::array();
  for (int m = 0; m <= f.m_max(); ++m)
    for (int n = 0; n <= f.n_max(); ++n)
      for (int parity : {-1, 1}) {
        const ModeIndex idx{m, n, parity};
        if (f.contains(idx)) coeffs.push_back({m, n, parity, f[idx]});
      }
  return Json{{"kind", spectral::to_string(f.kind())}, {"m_max", f.m_max()}, {"n_max", f.n_max()}, {"coeffs", coeffs}};
}

SpectralField field_from_json(const Json& j) {
  try {
    SpectralField f(spectral::kind_from_string(j.at("kind").get<std::string>()), j.at("m_max").get<int>(),
                    j.at("n_max").get<int>());
    for (const auto& c : j.at("coeffs")) {
      if (!c.is_array() || c.size() != 4) throw ConfigError("coefficient entries must be [m, n, parity, value]");
      f.set({c[0].get<int>(), c[1].get<int>(), c[2].get<int>()}, c[3].get<double>());
    }
    return f;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed field snapshot: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("malformed field snapshot: ") + e.what());
  }
}

Json state_to_json(const benard::OBState& s) {
  return Json{{"t", s.t}, {"phi", field_to_json(s.phi)}, {"tau", field_to_json(s.tau)}};
}

benard::OBState state_from_json(const Json& j) {
  benard::OBState s;
  try {
    s.phi = field_from_json(j.at("phi"));
    s.tau = field_from_json(j.at("tau"));
    s.t = j.value("t", 0.0);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed state snapshot: ") + e.what());
  }
  if (s.phi.kind() != FieldKind::StreamLike || s.tau.kind() != FieldKind::StreamLike)
    throw ConfigError("state snapshots hold two stream-like fields");
  if (s.phi.m_max() != s.tau.m_max() || s.phi.n_max() != s.tau.n_max())
    throw ConfigError("phi and tau truncations differ");
  return s;
}

Json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& p, const Json& j) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

// ---- CSV ----

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

std::string CsvWriter::quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string CsvWriter::num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw InvalidArgument("CSV row width differs from the header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += quote(fields[i]);
  }
  out_ += "\r\n";
  return *this;
}

void CsvWriter::save(const std::filesystem::path& p) const {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << out_;
}

// ---- config ----

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!c.values_.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }
  return c;
}

Config Config::load(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::real(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v = 0;
  const auto& s = it->second;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("'" + key + "' is not a number: " + s);
  return v;
}

int Config::integer(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  int v = 0;
  const auto& s = it->second;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("'" + key + "' is not an integer: " + s);
  return v;
}

void Config::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [k, v] : values_)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) throw UsageError("unknown config key '" + k + "'");
}

// ---- workers ----

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CONVEC_SYM_THREADS")) {
    int v = 0;
    const std::string s(env);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || v < 1)
      throw ConfigError("CONVEC_SYM_THREADS must be a positive integer");
    n = v;
  }
  return std::max(n, 1);
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), std::max(n, 1));
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace convec::io
