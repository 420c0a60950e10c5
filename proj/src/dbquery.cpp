#include "ubar/dbquery.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "raw_names.hpp"
#include "ubar/error.hpp"
#include "ubar/hash.hpp"
#include "ubar/normalize.hpp"
#include "ubar/tokens.hpp"

namespace ubar {

std::string_view db_token_surface(DbToken t) {
  switch (t) {
    case DbToken::k0: return tokens::kDb0;
    case DbToken::k1: return tokens::kDb1;
    case DbToken::k2: return tokens::kDb2;
    case DbToken::k3: return tokens::kDb3;
    case DbToken::kNoRes: return tokens::kDbNoRes;
  }
  return {};
}

std::optional<DbToken> parse_db_token(std::string_view surface) {
  for (DbToken t : {DbToken::k0, DbToken::k1, DbToken::k2, DbToken::k3, DbToken::kNoRes}) {
    if (db_token_surface(t) == surface) return t;
  }
  return std::nullopt;
}

void EntityDb::add(const std::string& domain, Entity e) {
  entities_[domain].push_back(std::move(e));
}

const std::vector<Entity>& EntityDb::entities(std::string_view domain) const {
  static const std::vector<Entity> kEmpty;
  auto it = entities_.find(domain);
  return it == entities_.end() ? kEmpty : it->second;
}

std::vector<std::string> EntityDb::domains() const {
  std::vector<std::string> out;
  for (const auto& [d, _] : entities_) out.push_back(d);
  return out;
}

bool EntityDb::has_domain(std::string_view domain) const { return entities_.contains(domain); }

std::size_t EntityDb::size() const {
  std::size_t n = 0;
  for (const auto& [_, v] : entities_) n += v.size();
  return n;
}

Ontology EntityDb::ontology() const {
  Ontology o;
  for (const auto& [domain, list] : entities_) {
    for (const auto& e : list) {
      for (const auto& [slot, value] : e) o[domain][slot].insert(value);
    }
  }
  return o;
}

EntityDb load_db(const std::filesystem::path& path, std::string_view version) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open database file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + " (byte " + std::to_string(e.byte) + ")", e.what());
  }
  if (!doc.is_object()) throw ParseError(path.string(), "expected an object of domain arrays");
  const Normalizer& norm = Normalizer::for_version(version);
  EntityDb db;
  for (const auto& [domain, list] : doc.items()) {
    if (!schema::is_domain(domain)) throw UnknownDomain(domain);
    if (!list.is_array()) throw ParseError(path.string(), "domain '" + domain + "' is not an array");
    for (const auto& item : list) {
      Entity e;
      for (const auto& [key, value] : item.items()) {
        // Nested structures (price tables, coordinates) are not matchable.
        if (!value.is_string() && !value.is_number()) continue;
        std::string slot = detail::canonical_slot_name(key);
        if (slot.empty()) continue;
        std::string raw = value.is_string() ? value.get<std::string>() : value.dump();
        e[slot] = norm.normalize(domain, slot, raw);
      }
      db.add(domain, std::move(e));
    }
  }
  return db;
}

void write_db(const EntityDb& db, const std::filesystem::path& path) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& d : db.domains()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : db.entities(d)) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (const auto& [k, v] : e) obj[k] = v;
      arr.push_back(std::move(obj));
    }
    doc[d] = std::move(arr);
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<const Entity*> query(const EntityDb& db, const BeliefState& belief,
                                 std::string_view domain) {
  if (!schema::is_domain(domain)) throw UnknownDomain(std::string(domain));
  std::vector<std::pair<std::string_view, std::string_view>> constraints;
  if (const SlotMap* slots = belief.slots(domain)) {
    for (const auto& [slot, value] : *slots) {
      if (value == "dontcare" || !schema::is_searchable_slot(domain, slot)) continue;
      constraints.emplace_back(slot, value);
    }
  }
  std::vector<const Entity*> out;
  for (const Entity& e : db.entities(domain)) {
    bool ok = true;
    for (const auto& [slot, value] : constraints) {
      auto it = e.find(slot);
      if (it == e.end() || it->second != value) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(&e);
  }
  return out;
}

DbToken bucket(std::size_t count, std::string_view domain) {
  if (!schema::has_database(domain)) return DbToken::kNoRes;
  if (count == 0) return DbToken::k0;
  if (count == 1) return DbToken::k1;
  if (count <= 3) return DbToken::k2;
  return DbToken::k3;
}

std::optional<Entity> select_entity(const std::vector<const Entity*>& results,
                                    SelectPolicy policy, std::uint64_t seed) {
  if (results.empty()) return std::nullopt;
  if (policy == SelectPolicy::kFirst) return *results.front();
  std::mt19937_64 rng(seed);
  return *results[rng() % results.size()];
}

std::string booking_reference(std::uint64_t seed, std::string_view session_id, std::size_t turn) {
  static constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::uint64_t h = fnv1a64(session_id, fnv1a64(std::to_string(seed)));
  h = fnv1a64(std::to_string(turn), h);
  std::mt19937_64 rng(h);
  std::string ref(8, 'A');
  for (char& c : ref) c = kAlphabet[rng() % kAlphabet.size()];
  return ref;
}

std::optional<std::string> active_domain(const BeliefState& belief,
                                         const std::optional<std::string>& previous) {
  if (!belief.empty()) return belief.domains().back().name;
  return previous;
}

DbResult lookup(const EntityDb& db, const BeliefState& belief,
                const std::optional<std::string>& previous_domain) {
  DbResult r;
  r.domain = active_domain(belief, previous_domain);
  if (!r.domain) return r;
  r.count = schema::has_database(*r.domain) ? query(db, belief, *r.domain).size() : 0;
  r.token = bucket(r.count, *r.domain);
  return r;
}

}  // namespace ubar
