#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace projrigid {

inline constexpr const char* kToolName = "projrigid";
inline constexpr const char* kToolVersion = "0.1.0";

/// One check or finding inside a report. `ok == false` drives exit code 1;
/// `undetermined` drives exit code 3. Verdict-style findings (rigid /
/// non-rigid, member / non-member) are reported with ok == true: they are
/// answers, not failures.
struct CheckRecord {
  std::string id;
  std::string anchor;   // stable semantic identifier of the checked statement
  std::string verdict;
  bool ok = true;
  bool undetermined = false;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

struct Report {
  std::string command;
  std::string scene_hash;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> records;

  void add(CheckRecord r) { records.push_back(std::move(r)); }

  /// 0 all pass, 1 any failed, 3 undetermined results present.
  int exit_code() const;

  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

}  // namespace projrigid
