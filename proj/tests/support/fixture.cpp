#include "fixture.hpp"

#include <set>

#include "ubar/dbquery.hpp"
#include "ubar/schema.hpp"

namespace fixture {
namespace {

using ubar::Entity;

struct HotelRow {
  const char *name, *area, *price, *stars, *parking, *internet, *type, *address, *phone, *postcode;
};
constexpr HotelRow kHotels[] = {
    {"acorn guest house", "north", "moderate", "4", "yes", "yes", "guest house", "154 chesterton road", "01223353888", "cb41da"},
    {"alpha-milton guest house", "north", "moderate", "3", "no", "no", "guest house", "63 milton road", "01223311625", "cb41xa"},
    {"arbury lodge guesthouse", "north", "moderate", "4", "yes", "yes", "guest house", "82 arbury road", "01223364319", "cb42je"},
    {"ashley hotel", "north", "moderate", "2", "yes", "yes", "hotel", "74 chesterton road", "01223350059", "cb41er"},
    {"avalon", "north", "moderate", "4", "no", "yes", "guest house", "62 gilbert road", "01223353071", "cb43hu"},
    {"university arms hotel", "centre", "expensive", "4", "yes", "yes", "hotel", "regent street", "01223351241", "cb21ad"},
};

struct RestaurantRow {
  const char *name, *area, *food, *price, *address, *phone, *postcode;
};
constexpr RestaurantRow kRestaurants[] = {
    {"golden wok", "north", "chinese", "moderate", "191 histon road", "01223350688", "cb43hl"},
    {"nirala", "north", "indian", "moderate", "7 milton road", "01223360966", "cb41uy"},
    {"pizza hut fen ditton", "east", "italian", "moderate", "cambridge retail park", "01223323737", "cb58wr"},
    {"curry garden", "centre", "indian", "expensive", "106 regent street", "01223302330", "cb21dp"},
    {"the varsity restaurant", "centre", "international", "moderate", "35 saint andrews street", "01223356060", "cb23ar"},
};

struct AttractionRow {
  const char *name, *area, *type, *address, *phone, *postcode;
};
constexpr AttractionRow kAttractions[] = {
    {"cambridge museum of technology", "east", "museum", "the old pumping station", "01223368650", "cb58ld"},
    {"kettles yard", "west", "museum", "castle street", "01223748100", "cb30aq"},
    {"all saints church", "centre", "architecture", "jesus lane", "01223452587", "cb58bs"},
    {"the junction", "south", "theatre", "clifton way", "01223511511", "cb17gx"},
};

struct TrainRow {
  const char *id, *departure, *destination, *day, *leave, *arrive, *duration, *price;
};
constexpr TrainRow kTrains[] = {
    {"tr1234", "cambridge", "london kings cross", "monday", "05:00", "05:51", "51 minutes", "23.60 pounds"},
    {"tr2345", "cambridge", "london kings cross", "monday", "07:00", "07:51", "51 minutes", "23.60 pounds"},
    {"tr3456", "cambridge", "norwich", "tuesday", "09:36", "10:55", "79 minutes", "17.60 pounds"},
    {"tr4567", "norwich", "cambridge", "friday", "16:16", "17:35", "79 minutes", "17.60 pounds"},
    {"tr5678", "cambridge", "ely", "wednesday", "11:50", "12:07", "17 minutes", "4.40 pounds"},
    {"tr6789", "ely", "cambridge", "sunday", "13:35", "13:52", "17 minutes", "4.40 pounds"},
};

struct TaxiRide {
  const char *destination, *leave, *car, *phone;
};
constexpr TaxiRide kTaxis[] = {
    {"cambridge station", "17:15", "black toyota", "07946123456"},
    {"addenbrookes hospital", "09:30", "white skoda", "07712345678"},
    {"the grafton centre", "14:45", "red volvo", "07798765432"},
};

// Columns each table can be filtered on.
const std::map<std::string, std::set<std::string>>& searchable() {
  static const std::map<std::string, std::set<std::string>> kCols = {
      {"hotel", {"area", "internet", "name", "parking", "pricerange", "stars", "type"}},
      {"restaurant", {"area", "food", "name", "pricerange"}},
      {"attraction", {"area", "name", "type"}},
      {"train", {"arrive", "day", "departure", "destination", "leave"}},
  };
  return kCols;
}

std::vector<std::pair<std::string, std::string>> goal_slots(const std::string& domain, const Entity& e) {
  auto v = [&](const char* k) { return std::pair<std::string, std::string>{k, e.at(k)}; };
  if (domain == "hotel") return {v("area"), v("stars"), v("parking")};
  if (domain == "restaurant") return {v("area"), v("food")};
  if (domain == "attraction") return {v("area"), v("type")};
  return {v("departure"), v("destination"), v("day")};
}

std::string fill(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [slot, value] : values) {
    const std::string ph = "[value_" + slot + "]";
    for (std::size_t p = text.find(ph); p != std::string::npos; p = text.find(ph, p + value.size())) {
      text.replace(p, ph.size(), value);
    }
  }
  return text;
}

std::size_t count(const ubar::EntityDb& db, const std::string& domain, const ubar::BeliefState& b) {
  const ubar::SlotMap* s = b.slots(domain);
  return brute_match(db, domain, s ? std::map<std::string, std::string>(s->begin(), s->end())
                                   : std::map<std::string, std::string>{})
      .size();
}

}  // namespace

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ubar::EntityDb database() {
  ubar::EntityDb db;
  for (const auto& h : kHotels) {
    db.add("hotel", {{"name", h.name}, {"area", h.area}, {"pricerange", h.price}, {"stars", h.stars},
                     {"parking", h.parking}, {"internet", h.internet}, {"type", h.type},
                     {"address", h.address}, {"phone", h.phone}, {"postcode", h.postcode}});
  }
  for (const auto& r : kRestaurants) {
    db.add("restaurant", {{"name", r.name}, {"area", r.area}, {"food", r.food}, {"pricerange", r.price},
                          {"address", r.address}, {"phone", r.phone}, {"postcode", r.postcode}});
  }
  for (const auto& a : kAttractions) {
    db.add("attraction", {{"name", a.name}, {"area", a.area}, {"type", a.type}, {"address", a.address},
                          {"phone", a.phone}, {"postcode", a.postcode}});
  }
  for (const auto& t : kTrains) {
    db.add("train", {{"id", t.id}, {"departure", t.departure}, {"destination", t.destination},
                     {"day", t.day}, {"leave", t.leave}, {"arrive", t.arrive}, {"duration", t.duration},
                     {"price", t.price}});
  }
  return db;
}

std::vector<const Entity*> brute_match(const ubar::EntityDb& db, const std::string& domain,
                                       const std::map<std::string, std::string>& constraints) {
  std::vector<const Entity*> out;
  auto cols = searchable().find(domain);
  for (const Entity& e : db.entities(domain)) {
    bool ok = true;
    for (const auto& [slot, value] : constraints) {
      if (value == "dontcare" || cols == searchable().end() || !cols->second.count(slot)) continue;
      auto it = e.find(slot);
      if (it != e.end() && it->second != value) ok = false;
    }
    if (ok) out.push_back(&e);
  }
  return out;
}

ubar::Corpus corpus(const Options& options) {
  static const char* kDomains[] = {"hotel", "restaurant", "attraction", "train"};
  const ubar::EntityDb db = database();
  ubar::Corpus c;
  c.version = "2.0";

  for (std::size_t i = 0; i < options.sessions; ++i) {
    const std::string domain = kDomains[i % 4];
    const auto& entities = db.entities(domain);
    const Entity& e = entities[(i / 4 + i) % entities.size()];
    const bool with_taxi = i % 2 == 1;
    const bool bookable = domain != "attraction";

    ubar::DialogSession s;
    char id[32];
    std::snprintf(id, sizeof id, "fx%04zu", i);
    s.session_id = id;
    if (options.split == "mixed") {
      std::size_t k = i % 10;
      s.split = k < 6 ? "train" : k < 8 ? "dev" : "test";
    } else {
      s.split = options.split;
    }

    auto slots = goal_slots(domain, e);
    ubar::GoalDomain goal{domain, {}, {}, bookable};
    for (const auto& [k, v] : slots) goal.informable[k] = v;
    if (domain == "train") {
      goal.requestable = {"duration", "price"};
    } else {
      goal.requestable = {"address", "phone", "postcode"};
    }
    if (bookable) goal.requestable.push_back("reference");
    s.goal.domains.push_back(goal);

    const std::string offer = domain == "train" ? "id" : "name";
    const std::string people = std::to_string(i % 4 + 1);
    std::map<std::string, std::string> values(e.begin(), e.end());
    values["reference"] = ubar::booking_reference(0, s.session_id, 3);

    ubar::BeliefState b;
    auto turn = [&](std::string user, ubar::ActFrame act, std::string delex) {
      ubar::Turn t;
      t.user = std::move(user);
      t.belief = b;
      auto dom = ubar::active_domain(b, std::nullopt);
      if (dom && ubar::schema::has_database(*dom)) t.db_match = count(db, *dom, b);
      t.act = std::move(act);
      t.response_lex = fill(delex, values);
      t.response_delex = std::move(delex);
      s.turns.push_back(std::move(t));
    };

    // 0: first constraint; the system asks for the next one.
    b.set(domain, slots[0].first, slots[0].second);
    {
      ubar::ActFrame a;
      a.add_slot(domain, ubar::ActType::kRequest, slots[1].first);
      std::string user = domain == "train" ? "i need a train leaving from " + slots[0].second + " ."
                                           : "i am looking for a " + domain + " in the " + slots[0].second + " .";
      turn(user, a, "sure , do you have a preference for " + slots[1].first + " ?");
    }
    // 1: full constraints; the system offers an entity.
    std::string rest;
    for (std::size_t k = 1; k < slots.size(); ++k) {
      b.set(domain, slots[k].first, slots[k].second);
      rest += (k > 1 ? " and " : "") + slots[k].first + " " + slots[k].second;
    }
    {
      ubar::ActFrame a;
      if (domain == "train") {
        a.add_slot(domain, ubar::ActType::kInform, "id");
        a.add_slot(domain, ubar::ActType::kInform, "leave");
        turn("i want " + rest + " please .", a, "[value_id] leaves at [value_leave] .");
      } else {
        a.add_slot(domain, ubar::ActType::kRecommend, offer);
        a.add_slot(domain, ubar::ActType::kRecommend, "area");
        turn("i want " + rest + " please .", a, "i recommend [value_name] in the [value_area] .");
      }
    }
    // 2: requested information.
    {
      ubar::ActFrame a;
      if (domain == "train") {
        a.add_slot(domain, ubar::ActType::kInform, "duration");
        a.add_slot(domain, ubar::ActType::kInform, "price");
        turn("how long is the journey and what does it cost ?", a,
             "the journey takes [value_duration] and costs [value_price] .");
      } else {
        for (const char* slot : {"address", "postcode", "phone"}) a.add_slot(domain, ubar::ActType::kInform, slot);
        turn("can i have the address , postcode and phone number ?", a,
             "the address is [value_address] , the postcode is [value_postcode] and the phone number is "
             "[value_phone] .");
      }
    }
    // 3: booking, or an offer of more help for attractions.
    {
      ubar::ActFrame a;
      if (bookable) {
        b.set(domain, "people", people);
        a.add_slot(domain, ubar::ActType::kOfferbooked, "reference");
        a.add(domain, ubar::ActType::kReqmore);
        turn("please book it for " + people + " people .", a,
             "booking was successful . your reference number is [value_reference] . anything else ?");
      } else {
        a.add("general", ubar::ActType::kReqmore);
        turn("thanks , that is helpful .", a, "is there anything else i can help with ?");
      }
    }
    if (with_taxi) {
      const TaxiRide& ride = kTaxis[i % 3];
      const std::string from = domain == "train" ? "all saints church" : e.at("name");
      b.set("taxi", "departure", from);
      b.set("taxi", "destination", ride.destination);
      b.set("taxi", "leave", ride.leave);
      values["car"] = ride.car;
      values["phone"] = ride.phone;
      ubar::ActFrame a;
      a.add_slot("taxi", ubar::ActType::kInform, "car");
      a.add_slot("taxi", ubar::ActType::kInform, "phone");
      turn("i also need a taxi from " + from + " to " + ride.destination + " leaving at " + ride.leave + " .", a,
           "i have booked a [value_car] for you , the contact number is [value_phone] .");
      ubar::ActFrame bye;
      bye.add("general", ubar::ActType::kBye);
      turn("thanks , that is all i need .", bye, "you are welcome . goodbye .");

      ubar::GoalDomain taxi{"taxi", {}, {"car", "phone"}, false};
      taxi.informable = {{"departure", from}, {"destination", ride.destination}, {"leave", ride.leave}};
      s.goal.domains.push_back(taxi);
    }
    c.sessions.push_back(std::move(s));
  }

  // Ontology: every searchable DB value plus every value used in a belief.
  c.ontology = db.ontology();
  for (const auto& s : c.sessions) {
    for (const auto& t : s.turns) {
      for (const auto& d : t.belief.domains()) {
        for (const auto& [slot, value] : d.slots) c.ontology[d.name][slot].insert(value);
      }
    }
    for (const auto& g : s.goal.domains) {
      for (const auto& [slot, value] : g.informable) c.ontology[g.domain][slot].insert(value);
    }
  }
  return c;
}

ubar::BeliefState random_belief(Rng& rng, const ubar::Ontology& ontology) {
  ubar::BeliefState b;
  std::vector<std::string> domains;
  for (const auto& [d, slots] : ontology) {
    if (ubar::schema::is_domain(d)) domains.push_back(d);
  }
  const std::size_t n_domains = rng.below(4);
  for (std::size_t k = 0; k < n_domains && !domains.empty(); ++k) {
    const std::string& d = rng.pick(domains);
    std::vector<std::string> slots;
    for (const auto& [slot, values] : ontology.at(d)) {
      if (ubar::schema::is_belief_slot(d, slot) && !values.empty()) slots.push_back(slot);
    }
    if (slots.empty()) continue;
    const std::size_t n_slots = 1 + rng.below(slots.size());
    for (std::size_t j = 0; j < n_slots; ++j) {
      const std::string& slot = rng.pick(slots);
      const auto& values = ontology.at(d).at(slot);
      auto it = values.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng.below(values.size())));
      b.set(d, slot, *it);
    }
  }
  return b;
}

ubar::ActFrame random_act(Rng& rng) {
  ubar::ActFrame a;
  const auto domains = ubar::schema::act_domains();
  const auto acts = ubar::all_act_types();
  const auto slots = ubar::schema::placeholder_slots();
  const std::size_t n_domains = rng.below(4);
  for (std::size_t k = 0; k < n_domains; ++k) {
    const std::string domain(domains[rng.below(domains.size())]);
    const std::size_t n_acts = 1 + rng.below(3);
    for (std::size_t j = 0; j < n_acts; ++j) {
      ubar::ActType type = acts[rng.below(acts.size())];
      a.add(domain, type);
      const std::size_t n_slots = rng.below(4);
      for (std::size_t s = 0; s < n_slots; ++s) a.add_slot(domain, type, std::string(slots[rng.below(slots.size())]));
    }
  }
  return a;
}

}  // namespace fixture
