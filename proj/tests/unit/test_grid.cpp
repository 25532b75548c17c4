#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "gdis/grid.hpp"
#include "gdis/oracle.hpp"

using namespace gdis;

namespace {

// Independent bracket scan: level l >= 1 holds s in [eps N/(d 2^(l-1)), 2 eps N/(d 2^(l-1))).
int level_scan(double s, double N, int d, double eps) {
  const int log_n = static_cast<int>(std::log2(N));
  if (s >= eps * N / d) return 0;
  for (int l = 1; l <= log_n; ++l) {
    const double lo = eps * N / (d * std::pow(2.0, l - 1));
    if (lo <= s && s < 2 * lo) return l;
  }
  return log_n;
}

Box random_cube(std::mt19937_64& rng, Id id, int d, double N, double max_side) {
  const double s = 1 + std::floor(static_cast<double>(rng() % 1000) / 1000.0 * (max_side - 1));
  std::vector<double> lo;
  for (int j = 0; j < d; ++j) lo.push_back(std::floor(static_cast<double>(rng() % 1000000) / 1000000.0 * (N - s)));
  return make_cube(id, lo, s);
}

}  // namespace

TEST_CASE("config snapping") {
  auto c = GridConfig::make(1000, 2, 0.3);
  CHECK(c.N == 1024);
  CHECK(c.log_n == 10);
  CHECK(c.eps == 0.25);
  CHECK(c.inv_eps == 4);
  CHECK_THROWS_AS(GridConfig::make(16, 4, 0.5), contract_error);
  CHECK_THROWS_AS(c.with_offset(1024), contract_error);
}

TEST_CASE("level_of examples") {
  auto c = GridConfig::make(1024, 1, 0.25);
  CHECK(level_of(10, c) == 6);
  CHECK(level_of(10, c) == level_scan(10, 1024, 1, 0.25));
  CHECK(level_of(300, c) == 0);
  // The bracket formula puts s = 1 at level 9 (1 lies in [1, 2)).
  CHECK(level_scan(1, 1024, 1, 0.25) == 9);
  CHECK(level_of(1, c) == 9);
}

TEST_CASE("level_of agrees with the bracket scan") {
  for (int d = 1; d <= 3; ++d)
    for (double eps : {0.5, 0.25, 0.125}) {
      auto c = GridConfig::make(4096, d, eps);
      for (double s = 1; s <= 4096; s += 0.75) REQUIRE(level_of(s, c) == level_scan(s, 4096, d, eps));
    }
}

TEST_CASE("cell chains") {
  auto c = GridConfig::make(1024, 2, 0.25);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    auto b = random_cube(rng, 1, 2, 1024, 300);
    auto chain = cell_chain(b, c);
    const int l = level_of(b, c);
    auto own = cell_at(b, l, c);
    if (!own) {
      CHECK(chain.empty());
      continue;
    }
    REQUIRE(chain.size() == static_cast<std::size_t>(l + 1));
    for (std::size_t i = 0; i < chain.size(); ++i) {
      CHECK(chain[i].level == l - static_cast<int>(i));
      CHECK(contained_in(b, cell_bounds(chain[i], c)));
    }
  }
  // Level 1 shares its bracket with level 0, which takes precedence.
  CHECK(level_of(128, c) == 0);
  // A level-2 cube straddling N/2 with offset 0 has no cell at its level.
  auto mid = make_cube(2, {500, 10}, 100);
  REQUIRE(level_of(mid, c) == 2);
  CHECK(cell_chain(mid, c).empty());
}

TEST_CASE("parents and children are consistent") {
  for (double a : {0.0, 37.5, 700.0}) {
    auto c = GridConfig::make(1024, 2, 0.25, a);
    std::vector<CellId> frontier{root_cell()};
    int seen = 0;
    while (!frontier.empty() && seen < 3000) {
      auto q = frontier.back();
      frontier.pop_back();
      for (const auto& ch : child_candidates(q, c)) {
        ++seen;
        CHECK(parent_of(ch) == q);
        auto cb = cell_bounds(ch, c), qb = cell_bounds(q, c);
        for (int j = 0; j < 2; ++j) {
          CHECK(qb.lo[j] <= cb.lo[j]);
          CHECK(cb.hi[j] <= qb.hi[j]);
        }
        if (ch.level < 4) frontier.push_back(ch);
      }
    }
  }
}

TEST_CASE("offset ensemble") {
  auto p = offset_params(1, 0.5);
  CHECK(p.K == 2);
  CHECK(p.per_shift == 16);
  for (int s = 0; s < 2; ++s) CHECK(offset_value(1, 0.5, 1024, s, 0) == 0);
  auto offs = build_offsets(1, 0.5, 1024);
  CHECK(offs.size() <= 32);
  CHECK(offs.front() == 0);
  for (double a : offs) {
    CHECK(a >= 0);
    CHECK(a < 1024);
  }
  CHECK_THROWS_AS(build_offsets(2, 0.125, 1024), contract_error);
  auto r = sample_offsets(2, 0.125, 1024, 5, 9);
  CHECK(r.front() == 0);
  CHECK(r == sample_offsets(2, 0.125, 1024, 5, 9));
}

TEST_CASE("weight classes") {
  for (double eps : {0.5, 0.25, 0.125})
    for (double w = 1; w < 5000; w *= 1.37) {
      const int k = weight_class(w, eps);
      CHECK(class_floor(k, eps) <= w);
      CHECK(w < class_floor(k + 1, eps));
    }
  CHECK(weight_class(1, 0.25) == 0);
}

TEST_CASE("update driver keeps the registry consistent") {
  for (int d = 1; d <= 2; ++d) {
    auto cfg = GridConfig::make(1024, d, 0.25, d == 1 ? 0.0 : 100.0);
    Grid<int> g(cfg, IndexNeeds{true, true, true, false});
    std::mt19937_64 rng(20 + d);
    std::map<Id, Box> live;
    std::set<CellId> rebuilt;
    Grid<int>::Hooks hooks;
    hooks.rebuild = [&](Grid<int>::CellT& q) { rebuilt.insert(q.id); };

    auto first = random_cube(rng, 1, d, 1024, 40);
    while (cell_chain(first, cfg).empty()) first = random_cube(rng, 1, d, 1024, 40);
    auto chain = g.update(Action::insert, first, hooks);
    CHECK(g.cells().size() == chain.size());
    g.update(Action::erase, first, hooks);
    CHECK(g.cells().empty());
    CHECK_THROWS_AS(g.update(Action::erase, first, hooks), contract_error);

    Id next = 2;
    for (int step = 0; step < 1000; ++step) {
      std::map<CellId, std::uint64_t> versions;
      for (const auto& [id, q] : g.cells()) versions[id] = q->version;
      rebuilt.clear();
      std::vector<CellId> touched;
      if (live.empty() || rng() % 3) {
        auto b = random_cube(rng, next++, d, 1024, 200);
        touched = g.update(Action::insert, b, hooks);
        live[b.id] = b;
      } else {
        auto it = std::next(live.begin(), static_cast<long>(rng() % live.size()));
        touched = g.update(Action::erase, it->second, hooks);
        live.erase(it);
      }
      std::set<CellId> chain_set(touched.begin(), touched.end());
      for (const auto& [id, q] : g.cells()) {
        auto v = versions.find(id);
        const bool changed = v == versions.end() || v->second != q->version;
        REQUIRE(changed == chain_set.count(id) > 0);
      }
      for (const auto& id : rebuilt) REQUIRE(chain_set.count(id));
    }
    std::map<CellId, std::size_t> pop;
    std::size_t assigned = 0;
    for (const auto& [id, b] : live) {
      auto ch = cell_chain(b, cfg);
      CHECK(ch.size() <= static_cast<std::size_t>(cfg.log_n + 1));
      for (const auto& c : ch) ++pop[c];
      assigned += !ch.empty();
    }
    CHECK(g.pooled() + assigned == live.size());
    REQUIRE(pop.size() == g.cells().size());
    std::size_t own_total = 0;
    for (const auto& [id, q] : g.cells()) {
      CHECK(q->population == pop[id]);
      CHECK(q->all.count() == pop[id]);
      own_total += q->assigned.count();
      q->assigned.for_each_by_size([&](const Box& b) {
        CHECK(level_of(b, cfg) == id.level);
        CHECK(contained_in(b, q->bounds));
        return true;
      });
      // Independent sets among one cell's own cubes are small.
      auto own = q->assigned.by_size();
      if (own.size() <= 20) {
        auto best = oracle::exact_box_is(own);
        CHECK(static_cast<double>(best.items.size()) <= std::pow(d * cfg.inv_eps, d));
      }
    }
    CHECK(own_total == assigned);
  }
}
