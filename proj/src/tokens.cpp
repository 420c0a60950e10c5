#include "ubar/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <unordered_map>

#include "ubar/schema.hpp"

namespace ubar {

TokenSeq TokenSeq::from_text(std::string_view text) {
  TokenSeq seq;
  seq.append_words(text);
  return seq;
}

std::string TokenSeq::str() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens_[i];
  }
  return out;
}

void TokenSeq::append(const TokenSeq& other) {
  tokens_.insert(tokens_.end(), other.tokens_.begin(), other.tokens_.end());
}

void TokenSeq::append_words(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens_.emplace_back(text.substr(start, i - start));
  }
}

TokenSeq TokenSeq::slice(std::size_t from, std::size_t to) const {
  to = std::min(to, tokens_.size());
  from = std::min(from, to);
  return TokenSeq(std::vector<std::string>(tokens_.begin() + static_cast<std::ptrdiff_t>(from),
                                           tokens_.begin() + static_cast<std::ptrdiff_t>(to)));
}

std::size_t TokenSeq::count(std::string_view tok) const {
  return static_cast<std::size_t>(std::count(tokens_.begin(), tokens_.end(), tok));
}

std::ostream& operator<<(std::ostream& os, const TokenSeq& seq) { return os << seq.str(); }

std::string_view component_tag(Component c) {
  switch (c) {
    case Component::kUser: return "u";
    case Component::kBelief: return "b";
    case Component::kDb: return "db";
    case Component::kAct: return "a";
    case Component::kResponse: return "r";
  }
  return {};
}

std::string sos(Component c) { return "<sos_" + std::string(component_tag(c)) + ">"; }
std::string eos(Component c) { return "<eos_" + std::string(component_tag(c)) + ">"; }

namespace tokens {
namespace {

constexpr Component kComponents[] = {Component::kUser, Component::kBelief, Component::kDb,
                                     Component::kAct, Component::kResponse};

struct Registry {
  std::vector<std::string> surfaces;
  std::unordered_map<std::string, TokenRole> roles;

  void add(std::string s, TokenRole r) {
    roles.emplace(s, r);
    surfaces.push_back(std::move(s));
  }
};

const Registry& reg() {
  static const Registry r = [] {
    Registry out;
    for (Component c : kComponents) {
      out.add(sos(c), TokenRole::kFraming);
      out.add(eos(c), TokenRole::kFraming);
    }
    for (auto d : schema::act_domains()) out.add(domain_marker(d), TokenRole::kDomain);
    for (ActType a : all_act_types()) out.add(act_marker(act_name(a)), TokenRole::kAct);
    for (auto t : {kDb0, kDb1, kDb2, kDb3, kDbNoRes}) out.add(std::string(t), TokenRole::kDb);
    for (auto s : schema::placeholder_slots()) out.add(placeholder(s), TokenRole::kPlaceholder);
    return out;
  }();
  return r;
}

}  // namespace

const std::vector<std::string>& registry() { return reg().surfaces; }

std::optional<TokenRole> role(std::string_view surface) {
  const auto& roles = reg().roles;
  auto it = roles.find(std::string(surface));
  if (it == roles.end()) return std::nullopt;
  return it->second;
}

bool is_special(std::string_view surface) { return role(surface).has_value(); }

std::optional<std::pair<Component, bool>> framing(std::string_view tok) {
  if (tok.size() < 7 || tok.front() != '<' || tok.back() != '>') return std::nullopt;
  bool open;
  if (tok.starts_with("<sos_")) {
    open = true;
  } else if (tok.starts_with("<eos_")) {
    open = false;
  } else {
    return std::nullopt;
  }
  std::string_view tag = tok.substr(5, tok.size() - 6);
  for (Component c : kComponents) {
    if (component_tag(c) == tag) return std::make_pair(c, open);
  }
  return std::nullopt;
}

std::string domain_marker(std::string_view domain) { return "[" + std::string(domain) + "]"; }
std::string act_marker(std::string_view act) { return "[" + std::string(act) + "]"; }
std::string placeholder(std::string_view slot) { return "[value_" + std::string(slot) + "]"; }

std::optional<std::string_view> unbracket(std::string_view tok) {
  if (tok.size() < 3 || tok.front() != '[' || tok.back() != ']') return std::nullopt;
  return tok.substr(1, tok.size() - 2);
}

std::optional<std::string_view> placeholder_slot(std::string_view tok) {
  auto inner = unbracket(tok);
  if (!inner || !inner->starts_with("value_") || inner->size() <= 6) return std::nullopt;
  std::string_view slot = inner->substr(6);
  for (char c : slot) {
    if (!std::islower(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return slot;
}

void write_registry(std::ostream& os) {
  for (const auto& s : registry()) os << s << '\n';
}

}  // namespace tokens
}  // namespace ubar
