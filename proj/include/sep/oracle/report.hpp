#pragma once

#include <string>

#include "json.hpp"

namespace sep::oracle {

/// One line of an oracle/validation report.
struct CheckReport {
  std::string check;
  std::string lattice;
  double t = 0.0;
  double statistic = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const CheckReport& r);

}  // namespace sep::oracle
