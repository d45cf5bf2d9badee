#pragma once

#include <cstddef>
#include <vector>

#include "sgner/corpus.hpp"

namespace sgner {

/// All (i, j) with 0 <= i <= j < n and width <= max_width, ordered by (i, j).
std::vector<Fragment> enumerate_spans(std::size_t n, std::size_t max_width);

/// Closed-form count of enumerate_spans(n, max_width).
std::size_t span_count(std::size_t n, std::size_t max_width);

}  // namespace sgner
