#pragma once

#include <string>
#include <vector>

namespace convec::acceptance {

struct Row {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;  // the numbers the verdict was taken from
  double seconds = 0;
};

/// Evaluates every acceptance criterion in order. Exceptions inside a
/// criterion turn into a failed row carrying the message.
std::vector<Row> run_all();

/// One criterion by its number (1-based).
Row run_one(int id);
int count();

std::string format_row(const Row& r);

}  // namespace convec::acceptance
