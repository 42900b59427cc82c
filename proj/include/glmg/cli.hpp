#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace glmg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResourceLimit = 3;

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// %.{digits}g, used where a fixed number of significant digits is required.
std::string format_double(double v, int digits);

using Cell = std::variant<double, long long, std::string>;

/// A named-column result. CSV writes a header row; JSON writes
/// {"command", "columns", "rows": [{column: value}]}.
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  int digits = 0;  // 0: shortest round trip

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

/// Runs one command. args excludes the program name. Normal output goes to
/// `out` unless --out is given; diagnostics go to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace glmg::cli
