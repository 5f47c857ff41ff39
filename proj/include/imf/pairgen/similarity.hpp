#pragma once

#include <string_view>

namespace imf::pairgen {

/// Cosine similarity of character-trigram count vectors, after ASCII
/// lowercasing, over Unicode code points. A nonempty string shorter than three
/// code points counts as a single gram of itself. Two empty strings are
/// identical (1); an empty and a nonempty string share nothing (0).
double similarity(std::string_view a, std::string_view b);

}  // namespace imf::pairgen
