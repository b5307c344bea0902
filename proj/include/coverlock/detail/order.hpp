#ifndef COVERLOCK_DETAIL_ORDER_HPP
#define COVERLOCK_DETAIL_ORDER_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

namespace coverlock::detail {

// Indices ordered by value/cost ratio descending. Ties break toward the
// higher value, then the lower index, so the LP greedy and the rank-and-cut
// family walk units in the same order.
inline std::vector<std::size_t> ratio_descending_order(const std::vector<double>& values,
                                                       const std::vector<double>& costs) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = values[a] / costs[a];
    const double rb = values[b] / costs[b];
    if (ra != rb) return ra > rb;
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  });
  return order;
}

}  // namespace coverlock::detail

#endif  // COVERLOCK_DETAIL_ORDER_HPP
