#include "sep/oracle/report.hpp"

namespace sep::oracle {

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j{{"check", r.check},         {"lattice", r.lattice}, {"t", r.t},
                   {"statistic", r.statistic}, {"tolerance", r.tolerance}, {"pass", r.pass}};
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

}  // namespace sep::oracle
