#include "gridres/value_table.hpp"

#include <cmath>
#include <fstream>

#include "gridres/common.hpp"

namespace gridres {

ValueTable::Entry& ValueTable::touch(const PostDecisionState& pds) {
  auto [it, inserted] = entries_.try_emplace(pds);
  if (inserted) it->second.value = default_value;
  return it->second;
}

ValueTable::Entry value_update(ValueTable& vt, const PostDecisionState& pds,
                               double observed, double epsilon) {
  input_check(epsilon > 0.0 && epsilon <= 1.0,
              "value_update: epsilon must lie in (0, 1]");
  input_check(std::isfinite(observed), "value_update: observed value not finite");
  ValueTable::Entry& e = vt.touch(pds);
  e.value = (1.0 - epsilon) * e.value + epsilon * observed;
  ++e.visits;
  return e;
}

nlohmann::json ValueTable::to_json(const Header& header) const {
  nlohmann::json j;
  j["network_hash"] = header.network_hash;
  j["scenario_hash"] = header.scenario_hash;
  j["config"] = header.config;
  j["default_value"] = default_value;
  j["entries"] = nlohmann::json::array();
  for (const auto& [pds, e] : entries_) {
    j["entries"].push_back(
        {{"pds", pds.encode()}, {"value", e.value}, {"visits", e.visits}});
  }
  return j;
}

ValueTable ValueTable::from_json(const nlohmann::json& j, Header* header) {
  ValueTable vt;
  if (header) {
    header->network_hash = j.value("network_hash", uint64_t{0});
    header->scenario_hash = j.value("scenario_hash", uint64_t{0});
    header->config = j.value("config", nlohmann::json::object());
  }
  vt.default_value = j.value("default_value", 0.0);
  input_check(j.contains("entries") && j["entries"].is_array(),
              "value table: missing 'entries' array");
  for (const auto& row : j["entries"]) {
    input_check(row.contains("pds") && row["pds"].is_string() &&
                    row.contains("value") && row["value"].is_number(),
                "value table: entry needs 'pds' and numeric 'value'");
    PostDecisionState pds = PostDecisionState::decode(row["pds"].get<std::string>());
    Entry& e = vt.entries_[pds];
    e.value = row["value"].get<double>();
    e.visits = row.value("visits", uint64_t{0});
  }
  return vt;
}

void save_value_table(const ValueTable& vt, const ValueTable::Header& header,
                      const std::string& path) {
  std::ofstream out(path);
  input_check(out.good(), "cannot write value table: " + path);
  out << vt.to_json(header).dump(2) << "\n";
}

ValueTable load_value_table(const std::string& path,
                            ValueTable::Header* header) {
  std::ifstream in(path);
  input_check(in.good(), "cannot open value table: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("value table " + path + ": " + e.what());
  }
  return ValueTable::from_json(j, header);
}

}  // namespace gridres
