#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mtl/config.hpp"

namespace mtl {

enum class CheckStatus { Pass, Fail, Info };
std::string to_string(CheckStatus s);

struct CheckRow {
  CheckStatus status = CheckStatus::Info;
  std::string name;
  std::string detail;
};

struct CheckReport {
  std::string title;
  std::vector<CheckRow> rows;
  double seconds = 0.0;

  /// True when no row failed (informational rows never fail).
  bool passed() const;
  void pass_if(bool ok, std::string name, std::string detail);
  void info(std::string name, std::string detail);
};

void print_report(std::ostream& out, const CheckReport& report);

/// Names of the configs compiled into the library.
std::vector<std::string> builtin_config_names();
RunConfig builtin_config(std::string_view name, const std::vector<std::string>& overrides = {});

namespace acceptance {

constexpr int kCriteria = 10;
/// Runs acceptance criterion n (1..10); progress goes to `log`.
CheckReport criterion(int n, std::ostream& log);

}  // namespace acceptance

std::vector<std::string> reproduce_cases();
/// Runs one reproduction case, writing artifacts under `out`.
std::vector<CheckReport> reproduce(const std::string& name, const std::filesystem::path& out, std::ostream& log);
/// Prints the table; returns 0 when every row passed and 5 otherwise.
int cmd_reproduce(const std::string& name, const std::filesystem::path& out, std::ostream& os);

}  // namespace mtl
