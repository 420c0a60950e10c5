#pragma once

// Core dialog data model shared by every module.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ubar/schema.hpp"

namespace ubar {

using SlotMap = std::map<std::string, std::string>;  // slot -> value, alphabetical

// Per-domain slot/value constraints. Domains keep first-mention order; slots are
// kept in canonical (alphabetical) order. A domain never has an empty slot map.
class BeliefState {
 public:
  struct Domain {
    std::string name;
    SlotMap slots;
    bool operator==(const Domain&) const = default;
  };

  // Sets `slot` under `domain`, appending the domain if it is new.
  void set(const std::string& domain, const std::string& slot, std::string value);
  // Removes a slot; drops the domain when its last slot goes.
  bool erase(std::string_view domain, std::string_view slot);

  const std::string* get(std::string_view domain, std::string_view slot) const;
  const SlotMap* slots(std::string_view domain) const;
  bool has_domain(std::string_view domain) const { return slots(domain) != nullptr; }

  const std::vector<Domain>& domains() const { return domains_; }
  std::vector<std::string> domain_names() const;
  bool empty() const { return domains_.empty(); }
  std::size_t slot_count() const;

  // Order-sensitive: equal domain order, slots and values.
  bool operator==(const BeliefState&) const = default;

 private:
  std::vector<Domain> domains_;
};

// Order-insensitive comparison over domains (slots are already canonical).
bool equivalent(const BeliefState& a, const BeliefState& b);

// domain -> act type -> ordered slot list. Domains and acts keep first-mention
// order; slot lists are duplicate-free.
class ActFrame {
 public:
  struct Act {
    ActType type;
    std::vector<std::string> slots;
    bool operator==(const Act&) const = default;
  };
  struct Domain {
    std::string name;
    std::vector<Act> acts;
    bool operator==(const Domain&) const = default;
  };

  // Ensures (domain, act) exists; returns its slot list holder.
  Act& add(const std::string& domain, ActType act);
  // Adds a slot unless it is already listed.
  void add_slot(const std::string& domain, ActType act, const std::string& slot);

  const Act* find(std::string_view domain, ActType act) const;
  bool has_act(ActType act) const;

  const std::vector<Domain>& domains() const { return domains_; }
  bool empty() const { return domains_.empty(); }

  bool operator==(const ActFrame&) const = default;

 private:
  std::vector<Domain> domains_;
};

struct GoalDomain {
  std::string domain;
  SlotMap informable;
  std::vector<std::string> requestable;
  bool book = false;
  bool operator==(const GoalDomain&) const = default;
};

struct Goal {
  std::vector<GoalDomain> domains;

  const GoalDomain* find(std::string_view domain) const;
  bool operator==(const Goal&) const = default;
};

struct Turn {
  std::string user;
  BeliefState belief;
  std::optional<std::size_t> db_match;
  ActFrame act;
  std::string response_delex;
  std::string response_lex;
  bool operator==(const Turn&) const = default;
};

struct DialogSession {
  std::string session_id;
  std::string split = "train";  // train | dev | test
  Goal goal;
  std::vector<Turn> turns;

  // Domains named by the goal or by any turn's belief state.
  std::set<std::string> mentioned_domains() const;
  bool mentions(std::string_view domain) const;
  bool operator==(const DialogSession&) const = default;
};

// domain -> slot -> set of canonical values.
using Ontology = std::map<std::string, std::map<std::string, std::set<std::string>>>;

struct Corpus {
  std::string version = "2.0";
  Ontology ontology;
  std::vector<DialogSession> sessions;

  const DialogSession* find(std::string_view session_id) const;
  bool operator==(const Corpus&) const = default;
};

}  // namespace ubar
