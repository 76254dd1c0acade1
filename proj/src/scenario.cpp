#include "gridres/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gridres/common.hpp"

namespace gridres {

namespace {

double require_number(const nlohmann::json& j, const char* key,
                      const char* where) {
  input_check(j.contains(key) && j[key].is_number(),
              std::string("scenario: missing numeric '") + key + "' in " + where);
  return j[key].get<double>();
}

int require_int(const nlohmann::json& j, const char* key, const char* where) {
  input_check(j.contains(key) && j[key].is_number_integer(),
              std::string("scenario: missing integer '") + key + "' in " + where);
  return j[key].get<int>();
}

}  // namespace

const std::vector<AtRiskLine>& Scenario::risks_at(int t) const {
  static const std::vector<AtRiskLine> empty;
  input_check(t >= 1, "risks_at: period must be >= 1");
  if (t > horizon) return empty;
  return at_risk[static_cast<size_t>(t - 1)];
}

int Scenario::repair_duration(int line_id) const {
  auto it = repair.find(line_id);
  if (it == repair.end()) return 1 << 20;  // beyond any horizon: never repaired
  return it->second;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  Scenario s;
  s.horizon = require_int(j, "horizon", "scenario");
  input_check(s.horizon >= 1, "scenario: horizon must be >= 1");
  s.dt = require_number(j, "dt", "scenario");
  if (j.contains("seed")) {
    input_check(j["seed"].is_number_unsigned() || j["seed"].is_number_integer(),
                "scenario: seed must be an integer");
    s.seed = j["seed"].get<uint64_t>();
  }

  input_check(j.contains("eta"), "scenario: missing 'eta'");
  const auto& eta = j["eta"];
  if (eta.is_number()) {
    s.eta.assign(static_cast<size_t>(s.horizon), eta.get<double>());
  } else if (eta.is_array()) {
    input_check(static_cast<int>(eta.size()) == s.horizon,
                "scenario: eta array length must equal horizon");
    for (const auto& v : eta) {
      input_check(v.is_number(), "scenario: eta entries must be numbers");
      s.eta.push_back(v.get<double>());
    }
  } else {
    throw InputError("scenario: eta must be a number or an array");
  }

  s.at_risk.assign(static_cast<size_t>(s.horizon), {});
  if (j.contains("at_risk")) {
    input_check(j["at_risk"].is_array(), "scenario: at_risk must be an array");
    for (const auto& block : j["at_risk"]) {
      int period = require_int(block, "period", "at_risk block");
      input_check(period >= 1 && period <= s.horizon,
                  "scenario: at_risk period outside horizon");
      auto& slot = s.at_risk[static_cast<size_t>(period - 1)];
      input_check(slot.empty(), "scenario: duplicate at_risk block for period " +
                                    std::to_string(period));
      input_check(block.contains("lines") && block["lines"].is_array(),
                  "scenario: at_risk block needs a 'lines' array");
      for (const auto& entry : block["lines"]) {
        AtRiskLine a;
        a.line = require_int(entry, "line", "at_risk line entry");
        a.p = require_number(entry, "p", "at_risk line entry");
        slot.push_back(a);
      }
      std::sort(slot.begin(), slot.end(),
                [](const AtRiskLine& a, const AtRiskLine& b) {
                  return a.line < b.line;
                });
      for (size_t i = 1; i < slot.size(); ++i)
        input_check(slot[i - 1].line != slot[i].line,
                    "scenario: line listed twice in one at_risk period");
    }
  }

  if (j.contains("repair")) {
    input_check(j["repair"].is_array(), "scenario: repair must be an array");
    for (const auto& entry : j["repair"]) {
      int line = require_int(entry, "line", "repair entry");
      int periods = require_int(entry, "periods", "repair entry");
      input_check(s.repair.emplace(line, periods).second,
                  "scenario: duplicate repair entry for line " +
                      std::to_string(line));
    }
  }
  return s;
}

nlohmann::json Scenario::to_json() const {
  nlohmann::json j;
  j["horizon"] = horizon;
  j["dt"] = dt;
  j["eta"] = eta;
  j["seed"] = seed;
  j["at_risk"] = nlohmann::json::array();
  for (int t = 1; t <= horizon; ++t) {
    const auto& slot = at_risk[static_cast<size_t>(t - 1)];
    if (slot.empty()) continue;
    nlohmann::json block;
    block["period"] = t;
    block["lines"] = nlohmann::json::array();
    for (const AtRiskLine& a : slot)
      block["lines"].push_back({{"line", a.line}, {"p", a.p}});
    j["at_risk"].push_back(std::move(block));
  }
  j["repair"] = nlohmann::json::array();
  for (const auto& [line, periods] : repair)
    j["repair"].push_back({{"line", line}, {"periods", periods}});
  return j;
}

void Scenario::validate(const Network& net) const {
  input_check(horizon >= 1, "scenario: horizon must be >= 1");
  input_check(dt > 0 && std::isfinite(dt), "scenario: dt must be positive");
  input_check(static_cast<int>(eta.size()) == horizon,
              "scenario: eta schedule length must equal horizon");
  for (double e : eta)
    input_check(e > 0 && std::isfinite(e),
                "scenario: shedding penalty must be positive");
  input_check(static_cast<int>(at_risk.size()) == horizon,
              "scenario: at_risk table length must equal horizon");
  for (const auto& slot : at_risk) {
    for (const AtRiskLine& a : slot) {
      net.line_index(a.line);  // throws if the id is unknown
      input_check(a.p >= 0.0 && a.p <= 1.0,
                  "scenario: failure probability outside [0,1] for line " +
                      std::to_string(a.line));
    }
  }
  for (const auto& [line, periods] : repair) {
    net.line_index(line);
    input_check(periods >= 1, "scenario: repair duration must be >= 1");
  }
}

uint64_t Scenario::content_hash() const {
  return fnv1a(to_json().dump());
}

Scenario load_scenario(const std::string& path, const Network& net) {
  std::ifstream in(path);
  input_check(in.good(), "cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("scenario file " + path + ": " + e.what());
  }
  Scenario s = Scenario::from_json(j);
  s.validate(net);
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  input_check(out.good(), "cannot write scenario file: " + path);
  out << s.to_json().dump(2) << "\n";
}

}  // namespace gridres
