#pragma once

// Whitespace-token sequences and the closed special-token registry.

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ubar {

// Bumped whenever a surface is added, removed or renamed. Consumers that add
// the registry to a vocabulary (the LM service) must match it exactly.
inline constexpr std::string_view kRegistryVersion = "ubar-tokens-1";

// A sequence of primary tokens. The primary unit is the whitespace-delimited
// token; subword budgets are measured elsewhere.
class TokenSeq {
 public:
  TokenSeq() = default;
  explicit TokenSeq(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {}
  TokenSeq(std::initializer_list<std::string> tokens) : tokens_(tokens) {}

  // Splits on ASCII whitespace.
  static TokenSeq from_text(std::string_view text);

  std::string str() const;  // tokens joined by single spaces
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  void push_back(std::string tok) { tokens_.push_back(std::move(tok)); }
  void append(const TokenSeq& other);
  void append_words(std::string_view text);
  void pop_back() { tokens_.pop_back(); }

  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  const std::string& front() const { return tokens_.front(); }
  const std::string& back() const { return tokens_.back(); }
  auto begin() const { return tokens_.begin(); }
  auto end() const { return tokens_.end(); }
  std::span<const std::string> view() const { return tokens_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  TokenSeq slice(std::size_t from, std::size_t to) const;
  std::size_t count(std::string_view tok) const;

  bool operator==(const TokenSeq&) const = default;

 private:
  std::vector<std::string> tokens_;
};

std::ostream& operator<<(std::ostream& os, const TokenSeq& seq);

// Components of one dialog turn, in sequence order.
enum class Component { kUser = 0, kBelief = 1, kDb = 2, kAct = 3, kResponse = 4 };

std::string_view component_tag(Component c);  // u, b, db, a, r
std::string sos(Component c);                 // <sos_u> ...
std::string eos(Component c);                 // <eos_u> ...

enum class TokenRole { kFraming, kDomain, kAct, kDb, kPlaceholder };

namespace tokens {

// The five database-result tokens.
inline constexpr std::string_view kDb0 = "[db_0]";
inline constexpr std::string_view kDb1 = "[db_1]";
inline constexpr std::string_view kDb2 = "[db_2]";
inline constexpr std::string_view kDb3 = "[db_3]";
inline constexpr std::string_view kDbNoRes = "[db_nores]";

// Every registered surface in fixed order: framing, domains, acts, db,
// placeholders.
const std::vector<std::string>& registry();
std::optional<TokenRole> role(std::string_view surface);
bool is_special(std::string_view surface);

// If `tok` frames a component, returns it and whether it is an opener.
std::optional<std::pair<Component, bool>> framing(std::string_view tok);

std::string domain_marker(std::string_view domain);  // [hotel]
std::string act_marker(std::string_view act);        // [inform]
std::string placeholder(std::string_view slot);      // [value_name]

// Strips brackets: "[hotel]" -> "hotel". nullopt if not bracketed.
std::optional<std::string_view> unbracket(std::string_view tok);
// "[value_name]" -> "name"; nullopt if not a well-formed placeholder.
std::optional<std::string_view> placeholder_slot(std::string_view tok);

// Writes the registry, one surface per line.
void write_registry(std::ostream& os);

}  // namespace tokens
}  // namespace ubar
