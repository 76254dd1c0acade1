#include "gridres/state.hpp"

#include <algorithm>
#include <sstream>

namespace gridres {
namespace {

void append_ids(std::string& out, const std::vector<int>& ids) {
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(ids[i]);
  }
}

std::vector<int> parse_dot_ids(const std::string& text,
                               const std::string& ctx) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, '.')) {
    if (tok.empty()) continue;
    size_t pos = 0;
    int v;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      throw InputError(ctx + ": bad id '" + tok + "'");
    }
    if (pos != tok.size()) throw InputError(ctx + ": bad id '" + tok + "'");
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string MarkovState::encode() const {
  std::string out = "t" + std::to_string(t) + "|f";
  for (size_t i = 0; i < failed.size(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(failed[i].first) + "@" +
           std::to_string(failed[i].second);
  }
  out += "|o";
  append_ids(out, open_dispatchable);
  return out;
}

std::string PostDecisionState::encode() const {
  std::string out = "t" + std::to_string(t) + "|f";
  append_ids(out, failed);
  out += "|o";
  append_ids(out, open);
  return out;
}

PostDecisionState PostDecisionState::decode(const std::string& text) {
  const std::string ctx = "post-decision state '" + text + "'";
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, '|')) parts.push_back(tok);
  if (parts.size() != 3 || parts[0].size() < 2 || parts[0][0] != 't' ||
      parts[1].empty() || parts[1][0] != 'f' || parts[2].empty() ||
      parts[2][0] != 'o')
    throw InputError(ctx + ": expected t<period>|f<ids>|o<ids>");
  PostDecisionState pds;
  try {
    pds.t = std::stoi(parts[0].substr(1));
  } catch (const std::exception&) {
    throw InputError(ctx + ": bad period");
  }
  pds.failed = parse_dot_ids(parts[1].substr(1), ctx);
  pds.open = parse_dot_ids(parts[2].substr(1), ctx);
  return pds;
}

MarkovState initial_state(const Network& net) {
  MarkovState s;
  s.t = 1;
  s.open_dispatchable = net.initial_open_dispatchable();
  return s;
}

PostDecisionState post_decision(const MarkovState& state,
                                const SwitchConfig& action) {
  PostDecisionState pds;
  pds.t = state.t;
  pds.failed = state.failed_ids();
  pds.open = action.open_lines;
  return pds;
}

std::vector<int> effective_closed_ids(const Network& net,
                                      const MarkovState& state,
                                      const SwitchConfig& action) {
  std::vector<int> closed;
  closed.reserve(net.lines.size());
  for (const Line& l : net.lines) {
    if (state.is_failed(l.id)) continue;
    if (l.dispatchable) {
      if (!std::binary_search(action.open_lines.begin(),
                              action.open_lines.end(), l.id))
        closed.push_back(l.id);
    } else if (l.initially_closed) {
      closed.push_back(l.id);
    }
  }
  return closed;
}

}  // namespace gridres
