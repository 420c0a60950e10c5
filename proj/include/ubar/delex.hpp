#pragma once

// Domain-adaptive delexicalization: slot values in a response are replaced by
// `[value_<slot>]` with no domain prefix, and filled back from an entity.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ubar/dbquery.hpp"
#include "ubar/normalize.hpp"
#include "ubar/types.hpp"

namespace ubar {

struct Placeholder {
  std::size_t begin = 0;  // byte span in the lexicalized text
  std::size_t end = 0;
  std::string slot;
  std::string surface;  // original text replaced
  std::string domain;   // empty for regex matches
  bool operator==(const Placeholder&) const = default;
};

using PlaceholderMap = std::vector<Placeholder>;

struct DomainEntity {
  std::string domain;
  Entity fields;
};

struct Delexicalized {
  std::string text;
  PlaceholderMap map;
};

struct DelexOptions {
  // Phone numbers and postcodes not covered by any source value.
  bool regex_fallback = true;
  std::string version = "2.0";
};

// Replaces every word-bounded occurrence of a known value, longest match
// first. Sources, in tie-break priority: entity fields informed by `act`, the
// remaining entity fields, then belief values. Matching is case-insensitive
// and accepts synonym-table surface forms.
Delexicalized delexicalize(std::string_view response_lex, const BeliefState& belief,
                           const ActFrame& act, std::span<const DomainEntity> entities,
                           const DelexOptions& options = {});

struct Lexicalized {
  std::string text;
  std::size_t filled = 0;
  std::size_t unfilled = 0;
  std::vector<std::string> unfilled_slots;
};

// Fills each `[value_<slot>]` from, in order: `entity`, the belief value of
// `domain` (default: the belief's last domain), `booking_ref` for
// `[value_reference]`. Placeholders without a source are left in place.
Lexicalized lexicalize(std::string_view response_delex, const Entity* entity,
                       const BeliefState& belief, const std::optional<std::string>& booking_ref,
                       std::optional<std::string_view> domain = std::nullopt);

// Slots of every `[value_<slot>]` occurrence in `text`, in order.
std::vector<std::string> placeholders_in(std::string_view text);

}  // namespace ubar
