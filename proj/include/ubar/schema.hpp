#pragma once

// Static MultiWOZ schema: domains, system act vocabulary and slot sets.
// Slot names follow the DAMD preprocessing lineage (leave/arrive/id/...).

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ubar {

enum class ActType {
  kInform,
  kRequest,
  kRecommend,
  kSelect,
  kBook,
  kOfferbook,
  kOfferbooked,
  kNooffer,
  kNobook,
  kReqmore,
  kBye,
  kGreet,
  kWelcome,
};

std::string_view act_name(ActType act);
std::optional<ActType> parse_act_type(std::string_view name);
std::span<const ActType> all_act_types();

namespace schema {

// The seven MultiWOZ domains, alphabetical.
std::span<const std::string_view> domains();
// Domains that may appear in an act span: the seven plus "general".
std::span<const std::string_view> act_domains();
// The five domains present in dev/test (no hospital, no police).
std::span<const std::string_view> eval_domains();
// Domains whose goals are satisfied by offering a named entity.
std::span<const std::string_view> entity_domains();

bool is_domain(std::string_view d);
bool is_act_domain(std::string_view d);
bool is_eval_domain(std::string_view d);
bool is_entity_domain(std::string_view d);
// Domains that have an entity database to count matches against.
bool has_database(std::string_view d);

// Slots that may appear in a belief state for `domain`, alphabetical.
std::span<const std::string_view> belief_slots(std::string_view domain);
// Subset of belief slots that constrain a database query.
std::span<const std::string_view> searchable_slots(std::string_view domain);
// Slots a user goal may request for `domain`.
std::span<const std::string_view> requestable_slots(std::string_view domain);

bool is_belief_slot(std::string_view domain, std::string_view slot);
bool is_searchable_slot(std::string_view domain, std::string_view slot);
bool is_requestable_slot(std::string_view domain, std::string_view slot);

// Every slot name that can become a `[value_<slot>]` placeholder.
std::span<const std::string_view> placeholder_slots();
bool is_placeholder_slot(std::string_view slot);

// Slot carrying the offered entity's identity ("id" for train, else "name").
std::string_view offer_slot(std::string_view domain);

}  // namespace schema
}  // namespace ubar
