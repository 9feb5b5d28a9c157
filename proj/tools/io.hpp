#pragma once

// Artifact plumbing for the command-line driver: snapshots, CSV tables,
// key = value configs, exit codes and a small worker pool.

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "convec/ob_state.hpp"

namespace convec::io {

using Json = nlohmann::json;  // std::map objects: keys come out sorted

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kConfig = 3,
  kDivergence = 4,
  kCheckFailed = 5,
};

/// Unknown or malformed command-line input or config key.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or inconsistent configuration / input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {kind, m_max, n_max, coeffs: [[m, n, parity, value], ...]} with the
/// coefficients sorted by (m, n, parity).
Json field_to_json(const spectral::SpectralField& f);
spectral::SpectralField field_from_json(const Json& j);

/// {t, phi: <field>, tau: <field>}
Json state_to_json(const benard::OBState& s);
benard::OBState state_from_json(const Json& j);

Json read_json(const std::filesystem::path& p);
void write_json(const std::filesystem::path& p, const Json& j);

/// RFC-4180 table: CRLF line ends, fields with commas, quotes or line breaks
/// are quoted with doubled inner quotes.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& fields);
  std::string str() const { return out_; }
  void save(const std::filesystem::path& p) const;

  static std::string quote(const std::string& field);
  static std::string num(double v);  // shortest round-trip form
  static std::string num(long long v) { return std::to_string(v); }
  static std::string num(int v) { return std::to_string(v); }

 private:
  std::size_t width_;
  std::string out_;
};

/// Plain-text `key = value` lines with `#` comments.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& p);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string str(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  /// Throws UsageError naming the first key not in `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Worker count from CONVEC_SYM_THREADS (default: hardware concurrency).
int worker_count();
/// Runs body(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace convec::io
