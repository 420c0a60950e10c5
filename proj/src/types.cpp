#include "ubar/types.hpp"

#include <algorithm>

namespace ubar {

void BeliefState::set(const std::string& domain, const std::string& slot, std::string value) {
  for (auto& d : domains_) {
    if (d.name == domain) {
      d.slots[slot] = std::move(value);
      return;
    }
  }
  domains_.push_back({domain, {{slot, std::move(value)}}});
}

bool BeliefState::erase(std::string_view domain, std::string_view slot) {
  for (auto it = domains_.begin(); it != domains_.end(); ++it) {
    if (it->name != domain) continue;
    auto s = it->slots.find(std::string(slot));
    if (s == it->slots.end()) return false;
    it->slots.erase(s);
    if (it->slots.empty()) domains_.erase(it);
    return true;
  }
  return false;
}

const std::string* BeliefState::get(std::string_view domain, std::string_view slot) const {
  const SlotMap* s = slots(domain);
  if (!s) return nullptr;
  auto it = s->find(std::string(slot));
  return it == s->end() ? nullptr : &it->second;
}

const SlotMap* BeliefState::slots(std::string_view domain) const {
  for (const auto& d : domains_) {
    if (d.name == domain) return &d.slots;
  }
  return nullptr;
}

std::vector<std::string> BeliefState::domain_names() const {
  std::vector<std::string> out;
  out.reserve(domains_.size());
  for (const auto& d : domains_) out.push_back(d.name);
  return out;
}

std::size_t BeliefState::slot_count() const {
  std::size_t n = 0;
  for (const auto& d : domains_) n += d.slots.size();
  return n;
}

bool equivalent(const BeliefState& a, const BeliefState& b) {
  if (a.domains().size() != b.domains().size()) return false;
  for (const auto& d : a.domains()) {
    const SlotMap* other = b.slots(d.name);
    if (!other || *other != d.slots) return false;
  }
  return true;
}

ActFrame::Act& ActFrame::add(const std::string& domain, ActType act) {
  auto dit = std::find_if(domains_.begin(), domains_.end(),
                          [&](const Domain& d) { return d.name == domain; });
  if (dit == domains_.end()) {
    domains_.push_back({domain, {}});
    dit = std::prev(domains_.end());
  }
  for (auto& a : dit->acts) {
    if (a.type == act) return a;
  }
  dit->acts.push_back({act, {}});
  return dit->acts.back();
}

void ActFrame::add_slot(const std::string& domain, ActType act, const std::string& slot) {
  Act& a = add(domain, act);
  if (std::find(a.slots.begin(), a.slots.end(), slot) == a.slots.end()) a.slots.push_back(slot);
}

const ActFrame::Act* ActFrame::find(std::string_view domain, ActType act) const {
  for (const auto& d : domains_) {
    if (d.name != domain) continue;
    for (const auto& a : d.acts) {
      if (a.type == act) return &a;
    }
  }
  return nullptr;
}

bool ActFrame::has_act(ActType act) const {
  for (const auto& d : domains_) {
    for (const auto& a : d.acts) {
      if (a.type == act) return true;
    }
  }
  return false;
}

const GoalDomain* Goal::find(std::string_view domain) const {
  for (const auto& g : domains) {
    if (g.domain == domain) return &g;
  }
  return nullptr;
}

std::set<std::string> DialogSession::mentioned_domains() const {
  std::set<std::string> out;
  for (const auto& g : goal.domains) out.insert(g.domain);
  for (const auto& t : turns) {
    for (const auto& d : t.belief.domains()) out.insert(d.name);
  }
  return out;
}

bool DialogSession::mentions(std::string_view domain) const {
  if (goal.find(domain)) return true;
  for (const auto& t : turns) {
    if (t.belief.has_domain(domain)) return true;
  }
  return false;
}

const DialogSession* Corpus::find(std::string_view session_id) const {
  for (const auto& s : sessions) {
    if (s.session_id == session_id) return &s;
  }
  return nullptr;
}

}  // namespace ubar
