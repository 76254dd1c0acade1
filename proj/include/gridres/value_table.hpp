#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "gridres/state.hpp"

namespace gridres {

// Estimated expected cost-to-go per post-decision state, refined by
// exponential smoothing. Ordered map => deterministic iteration and
// serialization order.
class ValueTable {
 public:
  struct Entry {
    double value = 0.0;
    uint64_t visits = 0;
  };

  double default_value = 0.0;

  double value(const PostDecisionState& pds) const {
    auto it = entries_.find(pds);
    return it == entries_.end() ? default_value : it->second.value;
  }
  const Entry* find(const PostDecisionState& pds) const {
    auto it = entries_.find(pds);
    return it == entries_.end() ? nullptr : &it->second;
  }
  Entry& touch(const PostDecisionState& pds);  // inserts default on first use

  size_t size() const { return entries_.size(); }
  const std::map<PostDecisionState, Entry>& entries() const { return entries_; }

  // File header fields; stamped by train()/CLI so artifacts are reproducible.
  struct Header {
    uint64_t network_hash = 0;
    uint64_t scenario_hash = 0;
    nlohmann::json config;  // echo of the training configuration
  };

  nlohmann::json to_json(const Header& header) const;
  static ValueTable from_json(const nlohmann::json& j, Header* header = nullptr);

 private:
  std::map<PostDecisionState, Entry> entries_;
};

// Exponential smoothing: new = (1-ε)·old + ε·observed; increments the
// visit count; unseen states initialize at the table default first. Returns
// the updated entry.
ValueTable::Entry value_update(ValueTable& vt, const PostDecisionState& pds,
                               double observed, double epsilon);

void save_value_table(const ValueTable& vt, const ValueTable::Header& header,
                      const std::string& path);
ValueTable load_value_table(const std::string& path,
                            ValueTable::Header* header = nullptr);

}  // namespace gridres
