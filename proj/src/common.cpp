#include "gridres/common.hpp"

#include <algorithm>
#include <sstream>

namespace gridres {

std::string join_ids(const std::vector<int>& ids, char sep) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(sep);
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t pos = 0;
    int v;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      throw InputError("invalid id '" + tok + "' in list '" + text + "'");
    }
    if (pos != tok.size())
      throw InputError("invalid id '" + tok + "' in list '" + text + "'");
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace gridres
