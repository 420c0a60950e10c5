#pragma once

// Entity databases, belief-constrained queries and match-count buckets.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ubar/types.hpp"

namespace ubar {

// One entity: slot -> canonical value.
using Entity = std::map<std::string, std::string, std::less<>>;

// Bucketed match count. The index order (0..3) is the count order; kNoRes is
// used for domains without a database.
enum class DbToken { k0, k1, k2, k3, kNoRes };

std::string_view db_token_surface(DbToken t);
std::optional<DbToken> parse_db_token(std::string_view surface);

class EntityDb {
 public:
  EntityDb() = default;

  // Appends an entity; field values are expected to be canonical already.
  void add(const std::string& domain, Entity e);
  const std::vector<Entity>& entities(std::string_view domain) const;
  std::vector<std::string> domains() const;
  bool has_domain(std::string_view domain) const;
  std::size_t size() const;

  // Builds an ontology (domain -> slot -> values) from every entity field.
  Ontology ontology() const;

 private:
  std::map<std::string, std::vector<Entity>, std::less<>> entities_;
};

// Reads `{domain: [entity, ...]}`, normalizing every field with the table for
// `version`. Train keys in the raw MultiWOZ spelling (trainID, leaveAt, ...)
// are mapped onto canonical slot names.
EntityDb load_db(const std::filesystem::path& path, std::string_view version = "2.0");
void write_db(const EntityDb& db, const std::filesystem::path& path);

// Entities matching every searchable constraint of `belief[domain]`, in
// insertion order. "dontcare" and slots without a database column are
// unconstrained. Throws UnknownDomain if `domain` is not a schema domain.
std::vector<const Entity*> query(const EntityDb& db, const BeliefState& belief,
                                 std::string_view domain);

// 0 -> db_0, 1 -> db_1, 2..3 -> db_2, >=4 -> db_3; no-database domains -> db_nores.
DbToken bucket(std::size_t count, std::string_view domain);

enum class SelectPolicy { kFirst, kSeededRandom };

std::optional<Entity> select_entity(const std::vector<const Entity*>& results,
                                    SelectPolicy policy, std::uint64_t seed = 0);

// Simulated, always-successful booking: 8-character reference derived from
// (seed, session, turn).
std::string booking_reference(std::uint64_t seed, std::string_view session_id, std::size_t turn);

// Domain a turn's DB lookup is made against: the last domain of `belief`, or
// `previous` when the belief is empty.
std::optional<std::string> active_domain(const BeliefState& belief,
                                         const std::optional<std::string>& previous);

// Bucket for the belief's active domain; db_nores when no domain is known.
struct DbResult {
  std::optional<std::string> domain;
  std::size_t count = 0;
  DbToken token = DbToken::kNoRes;
};
DbResult lookup(const EntityDb& db, const BeliefState& belief,
                const std::optional<std::string>& previous_domain);

}  // namespace ubar
