#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "sep/core/config.hpp"

namespace sep {

using AnyConfig = std::variant<OccupancyConfig, SignedConfig, TwoSpeciesConfig>;

// Text format: a header line "d L kind" (kind is occupancy, signed or
// two_species) followed by L^d symbols in row-major order. Occupancy uses
// 0/1, signed -/0/+, two-species -/0/+/2 where 2 encodes a doubly occupied
// site. Whitespace between symbols is ignored on input; output writes one
// line of L symbols per row.
std::string to_text(const AnyConfig& config);
AnyConfig from_text(std::string_view text);

char symbol_char(ConfigKind kind, Symbol s);
Symbol parse_symbol(ConfigKind kind, char c);

}  // namespace sep
