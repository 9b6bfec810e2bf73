#include "projrigid/report.hpp"

#include <sstream>

namespace projrigid {

int Report::exit_code() const {
  bool undet = false;
  for (const CheckRecord& r : records) {
    if (!r.ok) return 1;
    undet = undet || r.undetermined;
  }
  return undet ? 3 : 0;
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["scene_hash"] = scene_hash;
  j["seed"] = seed;
  j["records"] = nlohmann::ordered_json::array();
  for (const CheckRecord& r : records) {
    nlohmann::ordered_json rj;
    rj["id"] = r.id;
    rj["anchor"] = r.anchor;
    rj["verdict"] = r.verdict;
    rj["ok"] = r.ok;
    rj["undetermined"] = r.undetermined;
    rj["details"] = r.details;
    j["records"].push_back(rj);
  }
  j["exit_code"] = exit_code();
  return j;
}

std::string Report::to_text() const {
  std::ostringstream os;
  os << kToolName << " " << kToolVersion << " | " << command << " | scene " << scene_hash
     << " | seed " << seed << "\n";
  for (const CheckRecord& r : records) {
    const char* mark = !r.ok ? "FAIL" : (r.undetermined ? "UNDT" : " ok ");
    os << "[" << mark << "] " << r.id << " (" << r.anchor << "): " << r.verdict << "\n";
    if (!r.details.empty()) {
      for (const auto& [key, value] : r.details.items())
        os << "        " << key << ": " << value.dump() << "\n";
    }
  }
  int code = exit_code();
  os << (code == 0 ? "all checks passed" : code == 1 ? "CHECKS FAILED" : "undetermined results present")
     << "\n";
  return os.str();
}

}  // namespace projrigid
