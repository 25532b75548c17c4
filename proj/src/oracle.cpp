#include "gdis/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace gdis::oracle {

Solution exact_interval_is(std::vector<Box> items) {
  for (const auto& b : items)
    if (b.dim != 1) throw contract_error("exact_interval_is: intervals only");
  std::sort(items.begin(), items.end(),
            [](const Box& a, const Box& b) { return a.hi[0] < b.hi[0] || (a.hi[0] == b.hi[0] && a.id < b.id); });
  const std::size_t n = items.size();
  std::vector<double> dp(n + 1, 0.0);
  std::vector<std::size_t> pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    // intervals among the first i whose right end is <= this left end
    auto it = std::upper_bound(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(i), items[i].lo[0],
                               [](double x, const Box& b) { return x < b.hi[0]; });
    pred[i] = static_cast<std::size_t>(it - items.begin());
    dp[i + 1] = std::max(dp[i], items[i].weight + dp[pred[i]]);
  }
  Solution s;
  s.weight = dp[n];
  for (std::size_t i = n; i > 0;) {
    if (dp[i] == dp[i - 1]) {
      --i;
    } else {
      s.items.push_back(items[i - 1]);
      i = pred[i - 1];
    }
  }
  std::reverse(s.items.begin(), s.items.end());
  return s;
}

namespace {

struct Bnb {
  std::vector<double> w;
  std::vector<std::uint32_t> adj;
  double best = 0;

  double sum(std::uint32_t mask) const {
    double s = 0;
    for (; mask; mask &= mask - 1) s += w[static_cast<std::size_t>(__builtin_ctz(mask))];
    return s;
  }

  void run(std::uint32_t avail, double cur) {
    if (!avail) {
      best = std::max(best, cur);
      return;
    }
    if (cur + sum(avail) <= best) return;
    int v = -1, deg = -1;
    for (std::uint32_t m = avail; m; m &= m - 1) {
      int u = __builtin_ctz(m);
      int du = __builtin_popcount(adj[static_cast<std::size_t>(u)] & avail);
      if (du > deg) {
        deg = du;
        v = u;
      }
    }
    if (deg == 0) {
      best = std::max(best, cur + sum(avail));
      return;
    }
    std::uint32_t bit = 1u << v;
    run(avail & ~adj[static_cast<std::size_t>(v)] & ~bit, cur + w[static_cast<std::size_t>(v)]);
    run(avail & ~bit, cur);
  }

  double optimum(std::uint32_t avail) {
    best = 0;
    run(avail, 0);
    return best;
  }
};

// Compares the sorted index sequences of two masks lexicographically.
bool lex_less(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t x = a ^ b;
  if (!x) return false;
  const int i = __builtin_ctz(x);
  const std::uint64_t above = ~((std::uint64_t{1} << (i + 1)) - 1);
  if (a >> i & 1u) return (b & above) != 0;
  return (a & above) == 0;
}

}  // namespace

Solution exact_box_is(const std::vector<Box>& input, std::size_t limit) {
  if (input.size() > limit || input.size() > 31) throw contract_error("exact_box_is: instance over size limit");
  std::vector<Box> items = input;
  std::sort(items.begin(), items.end(), [](const Box& a, const Box& b) { return a.id < b.id; });
  const std::size_t n = items.size();
  Bnb bnb;
  bnb.w.resize(n);
  bnb.adj.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    bnb.w[i] = items[i].weight;
    for (std::size_t j = 0; j < i; ++j)
      if (intersects_open(items[i], items[j])) {
        bnb.adj[i] |= 1u << j;
        bnb.adj[j] |= 1u << i;
      }
  }
  std::uint32_t all = n ? static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1) : 0;
  const double target = bnb.optimum(all);
  const double tol = 1e-9 * std::max(1.0, target);

  Solution s;
  std::uint32_t avail = all;
  double cur = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t bit = 1u << i;
    if (!(avail & bit)) continue;
    std::uint32_t rest = avail & ~bnb.adj[i] & ~bit;
    if (cur + bnb.w[i] + bnb.optimum(rest) >= target - tol) {
      cur += bnb.w[i];
      avail = rest;
      s.items.push_back(items[i]);
    } else {
      avail &= ~bit;
    }
  }
  s.weight = cur;
  return s;
}

Solution exhaustive_is(const std::vector<Box>& input, std::size_t max_size) {
  if (input.size() > 24) throw contract_error("exhaustive_is: instance over size limit");
  std::vector<Box> items = input;
  std::sort(items.begin(), items.end(), [](const Box& a, const Box& b) { return a.id < b.id; });
  const std::size_t n = items.size();
  std::vector<std::uint32_t> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (intersects_open(items[i], items[j])) {
        adj[i] |= 1u << j;
        adj[j] |= 1u << i;
      }
  double best = 0;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_size) continue;
    bool ok = true;
    double w = 0;
    for (std::uint32_t m = mask; m && ok; m &= m - 1) {
      auto i = static_cast<std::size_t>(__builtin_ctz(m));
      if (adj[i] & mask) ok = false;
      w += items[i].weight;
    }
    if (!ok) continue;
    const double tol = 1e-9 * std::max(1.0, best);
    if (w > best + tol || (w >= best - tol && lex_less(mask, best_mask))) {
      best = std::max(best, w);
      best_mask = mask;
    }
  }
  Solution s;
  s.weight = best;
  for (std::size_t i = 0; i < n; ++i)
    if (best_mask >> i & 1u) s.items.push_back(items[i]);
  return s;
}

Solution best_bounded_subset(const std::vector<Box>& items, std::size_t k) { return exhaustive_is(items, k); }

}  // namespace gdis::oracle
