#include "ubar/schema.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace ubar {
namespace {

using namespace std::string_view_literals;

constexpr std::array<std::pair<ActType, std::string_view>, 13> kActNames{{
    {ActType::kInform, "inform"},
    {ActType::kRequest, "request"},
    {ActType::kRecommend, "recommend"},
    {ActType::kSelect, "select"},
    {ActType::kBook, "book"},
    {ActType::kOfferbook, "offerbook"},
    {ActType::kOfferbooked, "offerbooked"},
    {ActType::kNooffer, "nooffer"},
    {ActType::kNobook, "nobook"},
    {ActType::kReqmore, "reqmore"},
    {ActType::kBye, "bye"},
    {ActType::kGreet, "greet"},
    {ActType::kWelcome, "welcome"},
}};

constexpr std::array<ActType, 13> kActs{
    ActType::kInform,  ActType::kRequest,     ActType::kRecommend, ActType::kSelect,
    ActType::kBook,    ActType::kOfferbook,   ActType::kOfferbooked,
    ActType::kNooffer, ActType::kNobook,      ActType::kReqmore,   ActType::kBye,
    ActType::kGreet,   ActType::kWelcome};

constexpr std::array kDomains{"attraction"sv, "hospital"sv, "hotel"sv, "police"sv,
                              "restaurant"sv, "taxi"sv,     "train"sv};
constexpr std::array kActDomains{"attraction"sv, "general"sv, "hospital"sv, "hotel"sv,
                                 "police"sv,     "restaurant"sv, "taxi"sv,  "train"sv};
constexpr std::array kEvalDomains{"attraction"sv, "hotel"sv, "restaurant"sv, "taxi"sv,
                                  "train"sv};
constexpr std::array kEntityDomains{"attraction"sv, "hotel"sv, "restaurant"sv, "train"sv};

constexpr std::array kAttractionBelief{"area"sv, "name"sv, "type"sv};
constexpr std::array kHospitalBelief{"department"sv};
constexpr std::array kHotelBelief{"area"sv,   "day"sv,    "internet"sv,  "name"sv, "parking"sv,
                                  "people"sv, "pricerange"sv, "stars"sv, "stay"sv, "type"sv};
constexpr std::array kRestaurantBelief{"area"sv, "day"sv,        "food"sv, "name"sv,
                                       "people"sv, "pricerange"sv, "time"sv};
constexpr std::array kTaxiBelief{"arrive"sv, "departure"sv, "destination"sv, "leave"sv};
constexpr std::array kTrainBelief{"arrive"sv, "day"sv,   "departure"sv,
                                  "destination"sv, "leave"sv, "people"sv};

constexpr std::array kHotelSearch{"area"sv,    "internet"sv, "name"sv, "parking"sv,
                                  "pricerange"sv, "stars"sv, "type"sv};
constexpr std::array kRestaurantSearch{"area"sv, "food"sv, "name"sv, "pricerange"sv};
constexpr std::array kTrainSearch{"arrive"sv, "day"sv, "departure"sv, "destination"sv,
                                  "leave"sv};

constexpr std::array kAttractionReq{"address"sv, "area"sv,  "name"sv,
                                    "phone"sv,   "postcode"sv, "price"sv, "type"sv};
constexpr std::array kHospitalReq{"address"sv, "phone"sv, "postcode"sv};
constexpr std::array kHotelReq{"address"sv,  "area"sv,     "internet"sv,  "name"sv,
                               "parking"sv,  "phone"sv,    "postcode"sv,  "pricerange"sv,
                               "reference"sv, "stars"sv,   "type"sv};
constexpr std::array kPoliceReq{"address"sv, "phone"sv, "postcode"sv};
constexpr std::array kRestaurantReq{"address"sv, "area"sv,     "food"sv,
                                    "name"sv,    "phone"sv,    "postcode"sv,
                                    "pricerange"sv, "reference"sv};
constexpr std::array kTaxiReq{"car"sv, "phone"sv};
constexpr std::array kTrainReq{"arrive"sv, "duration"sv, "id"sv,
                               "leave"sv,  "price"sv,    "reference"sv};

constexpr std::array kPlaceholderSlots{
    "address"sv, "area"sv,  "arrive"sv,    "car"sv,       "choice"sv,   "day"sv,
    "department"sv, "departure"sv, "destination"sv, "duration"sv, "food"sv,
    "id"sv,      "internet"sv, "leave"sv,  "name"sv,      "open"sv,     "parking"sv,
    "people"sv,  "phone"sv, "postcode"sv,  "price"sv,     "pricerange"sv,
    "reference"sv, "stars"sv, "stay"sv,    "time"sv,      "type"sv};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& a, std::string_view v) {
  return std::find(a.begin(), a.end(), v) != a.end();
}

bool contains(std::span<const std::string_view> a, std::string_view v) {
  return std::find(a.begin(), a.end(), v) != a.end();
}

}  // namespace

std::string_view act_name(ActType act) {
  for (const auto& [a, name] : kActNames) {
    if (a == act) return name;
  }
  return {};
}

std::optional<ActType> parse_act_type(std::string_view name) {
  for (const auto& [a, n] : kActNames) {
    if (n == name) return a;
  }
  return std::nullopt;
}

std::span<const ActType> all_act_types() { return kActs; }

namespace schema {

std::span<const std::string_view> domains() { return kDomains; }
std::span<const std::string_view> act_domains() { return kActDomains; }
std::span<const std::string_view> eval_domains() { return kEvalDomains; }
std::span<const std::string_view> entity_domains() { return kEntityDomains; }

bool is_domain(std::string_view d) { return contains(kDomains, d); }
bool is_act_domain(std::string_view d) { return contains(kActDomains, d); }
bool is_eval_domain(std::string_view d) { return contains(kEvalDomains, d); }
bool is_entity_domain(std::string_view d) { return contains(kEntityDomains, d); }

bool has_database(std::string_view d) {
  return is_domain(d) && d != "taxi" && d != "police" && d != "hospital";
}

std::span<const std::string_view> belief_slots(std::string_view domain) {
  if (domain == "attraction") return kAttractionBelief;
  if (domain == "hospital") return kHospitalBelief;
  if (domain == "hotel") return kHotelBelief;
  if (domain == "restaurant") return kRestaurantBelief;
  if (domain == "taxi") return kTaxiBelief;
  if (domain == "train") return kTrainBelief;
  return {};
}

std::span<const std::string_view> searchable_slots(std::string_view domain) {
  if (domain == "attraction") return kAttractionBelief;
  if (domain == "hospital") return kHospitalBelief;
  if (domain == "hotel") return kHotelSearch;
  if (domain == "restaurant") return kRestaurantSearch;
  if (domain == "train") return kTrainSearch;
  return {};
}

std::span<const std::string_view> requestable_slots(std::string_view domain) {
  if (domain == "attraction") return kAttractionReq;
  if (domain == "hospital") return kHospitalReq;
  if (domain == "hotel") return kHotelReq;
  if (domain == "police") return kPoliceReq;
  if (domain == "restaurant") return kRestaurantReq;
  if (domain == "taxi") return kTaxiReq;
  if (domain == "train") return kTrainReq;
  return {};
}

bool is_belief_slot(std::string_view domain, std::string_view slot) {
  return contains(belief_slots(domain), slot);
}
bool is_searchable_slot(std::string_view domain, std::string_view slot) {
  return contains(searchable_slots(domain), slot);
}
bool is_requestable_slot(std::string_view domain, std::string_view slot) {
  return contains(requestable_slots(domain), slot);
}

std::span<const std::string_view> placeholder_slots() { return kPlaceholderSlots; }
bool is_placeholder_slot(std::string_view slot) { return contains(kPlaceholderSlots, slot); }

std::string_view offer_slot(std::string_view domain) {
  return domain == "train" ? "id"sv : "name"sv;
}

}  // namespace schema
}  // namespace ubar
