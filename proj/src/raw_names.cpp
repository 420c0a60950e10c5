#include "raw_names.hpp"

#include <map>

#include "ubar/normalize.hpp"

namespace ubar::detail {

std::string canonical_slot_name(std::string_view raw, bool in_act) {
  static const std::map<std::string, std::string, std::less<>> kNames{
      {"addr", "address"},     {"arriveby", "arrive"},   {"car type", "car"},
      {"depart", "departure"},
      {"dest", "destination"}, {"entrance fee", "price"}, {"fee", "price"},
      {"leaveat", "leave"},    {"none", ""},             {"post", "postcode"},
      {"price range", "pricerange"}, {"ref", "reference"}, {"ticket", "price"},
      {"trainid", "id"},
  };
  std::string key = normalize_text(raw);
  if (in_act && key == "price") return "pricerange";
  if (auto it = kNames.find(key); it != kNames.end()) return it->second;
  return key;
}

}  // namespace ubar::detail
