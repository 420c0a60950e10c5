#pragma once

#include <string_view>

namespace ubar::detail {

// Raw JSON text of the synonym table for `version`; empty if not shipped.
std::string_view embedded_synonym_table(std::string_view version);

}  // namespace ubar::detail
