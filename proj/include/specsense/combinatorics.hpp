#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "specsense/errors.hpp"

namespace specsense {

// Hard ceiling on the number of subsets any exhaustive operation will touch.
inline constexpr std::uint64_t kSubsetEnumerationCap = 2'000'000;

// C(n, k), saturating at cap+1 so callers can test "over cap" without
// overflow. Exact whenever the result is <= cap.
inline std::uint64_t binomial_capped(int n, int k,
                                     std::uint64_t cap = kSubsetEnumerationCap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (c > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(c);
}

inline void require_enumerable(int n, int k, const char* what) {
  if (binomial_capped(n, k) > kSubsetEnumerationCap) {
    throw CapacityError(std::string(what) + ": C(" + std::to_string(n) + "," +
                        std::to_string(k) + ") exceeds the enumeration cap of " +
                        std::to_string(kSubsetEnumerationCap) + " subsets");
  }
}

// Visits all k-subsets of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  if (k == 0) {
    fn(std::span<const int>(idx));
    return;
  }
  for (;;) {
    fn(std::span<const int>(idx));
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace specsense
