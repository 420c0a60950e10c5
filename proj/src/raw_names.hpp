#pragma once

#include <string>
#include <string_view>

namespace ubar::detail {

// Maps a MultiWOZ annotation or database key (e.g. "leaveAt", "Addr",
// "trainID") onto the canonical slot name. Returns "" for keys with no slot
// ("none"). In dialog-act annotations "Price" names the price range, so
// `in_act` switches that one mapping.
std::string canonical_slot_name(std::string_view raw, bool in_act = false);

}  // namespace ubar::detail
