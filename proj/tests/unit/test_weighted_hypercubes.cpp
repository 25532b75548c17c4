#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "gdis/oracle.hpp"
#include "gdis/weighted_hypercubes.hpp"

using namespace gdis;

namespace {

Box random_cube(std::mt19937_64& rng, Id id, int d, double N, int max_side, int max_weight) {
  const double s = static_cast<double>(1 + rng() % static_cast<std::uint64_t>(max_side));
  std::vector<double> lo;
  for (int j = 0; j < d; ++j) lo.push_back(static_cast<double>(rng() % static_cast<std::uint64_t>(N - s + 1)));
  return make_cube(id, lo, s, static_cast<double>(1 + rng() % static_cast<std::uint64_t>(max_weight)));
}

std::set<Id> id_set(const std::vector<Box>& v) {
  std::set<Id> out;
  for (const auto& b : v) out.insert(b.id);
  return out;
}

std::map<CellId, std::map<Coords, double>> point_sets(const WeightedHypercubeEngine& e) {
  std::map<CellId, std::map<Coords, double>> out;
  for (const auto& [id, q] : e.grid().cells())
    if (q->alg.points && !q->alg.points->empty())
      for (const auto& [p, w] : q->alg.points->points()) out[id][p] = w;
  return out;
}

}  // namespace

TEST_CASE("aux grid of an empty point set is the cell bounds") {
  WeightedPointIndex p(2);
  auto cell = make_query({{0, 32}, {16, 48}});
  auto g = build_aux_grid(p, cell, 0.0);
  CHECK(g.z[0] == std::vector<double>{0, 32});
  CHECK(g.z[1] == std::vector<double>{16, 48});
  CHECK(g.base_weight == 0);
  CHECK(aux_grid_violations(g, p, cell, 2) == 0);
}

TEST_CASE("aux grid slices respect the cap and are maximal") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 300; ++t) {
    const int d = 1 + static_cast<int>(rng() % 3);
    WeightedPointIndex p(d);
    const double N = 64;
    const int n = static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      Coords c{};
      // some points fall outside the cell and must be ignored
      for (int j = 0; j < d; ++j) c[j] = static_cast<double>(rng() % 70);
      p.add_weight(c, static_cast<double>(1 + rng() % 9));
    }
    QueryBox cell;
    cell.dim = d;
    for (int j = 0; j < d; ++j) {
      cell.lo[j] = 0;
      cell.hi[j] = N;
    }
    const double cap = p.total_weight() * static_cast<double>(rng() % 40) / 100.0;
    auto g = build_aux_grid(p, cell, cap);
    auto bisect = build_aux_grid_bisect(p, cell, cap);
    for (int j = 0; j < d; ++j) CHECK(g.z[j] == bisect.z[j]);
    CHECK(g.base_weight == p.total_weight());
    CHECK(aux_grid_violations(g, p, cell, 1e18) == 0);
    for (int j = 0; j < d; ++j) {
      const auto& z = g.z[j];
      for (std::size_t i = 0; i + 2 < z.size(); ++i) {
        // extending a slice through its right cut would break the cap
        QueryBox s = cell;
        s.lo[j] = z[i];
        s.hi[j] = z[i + 1];
        Openness o;
        o.lo_open[j] = true;
        CHECK(p.range_weight(s, o) > cap);
      }
    }
  }
}

TEST_CASE("aux grid cardinality bound at the engine cap") {
  std::mt19937_64 rng(43);
  for (int d = 1; d <= 3; ++d)
    for (double eps : {0.5, 0.25}) {
      const auto cfg = GridConfig::make(64, d, eps);
      WeightedPointIndex p(d);
      for (int i = 0; i < 500; ++i) {
        Coords c{};
        for (int j = 0; j < d; ++j) c[j] = static_cast<double>(rng() % 65);
        p.add_weight(c, static_cast<double>(1 + rng() % 64));
      }
      const auto cell = cell_bounds(root_cell(), cfg);
      auto g = build_aux_grid(p, cell, whc_aux_cap(cfg, p.total_weight()));
      CHECK(aux_grid_violations(g, p, cell, whc_aux_limit(cfg)) == 0);
    }
}

TEST_CASE("aux grid checker catches broken grids") {
  WeightedPointIndex p(1);
  p.add_weight({5, 0, 0}, 10);
  auto cell = make_query({{0, 16}});
  AuxGrid g;
  g.cap = 4;
  g.z[0] = {0, 16};
  CHECK(aux_grid_violations(g, p, cell, 100) == 1);
  g.z[0] = {0, 5, 16};
  CHECK(aux_grid_violations(g, p, cell, 100) == 0);
  CHECK(aux_grid_violations(g, p, cell, 2) == 1);
  g.z[0] = {1, 5, 16};
  CHECK(aux_grid_violations(g, p, cell, 100) == 1);
}

TEST_CASE("snap_outward") {
  CoordLists z;
  z[0] = {0, 4, 8, 16};
  z[1] = {0, 16};
  auto b = snap_outward(z, make_cube(1, {5, 3}, 2));
  CHECK(b.lo[0] == 4);
  CHECK(b.hi[0] == 8);
  CHECK(b.lo[1] == 0);
  CHECK(b.hi[1] == 16);
  b = snap_outward(z, make_cube(1, {4, 0}, 4));
  CHECK(b.lo[0] == 4);
  CHECK(b.hi[0] == 8);
}

TEST_CASE("wh weight estimate examples") {
  WeightedHypercubeEngine e(GridConfig::make(64, 1, 0.25));
  CHECK(e.weight_estimate() == 0);
  CHECK(e.solution().empty());
  e.insert(make_interval(1, 3, 7, 5));
  CHECK(e.weight_estimate() == 10);
  CHECK(id_set(e.solution()) == std::set<Id>{1});
  CHECK(e.solution_weight() == 5);
}

TEST_CASE("wh addibility") {
  const auto cfg = GridConfig::make(64, 2, 0.25);
  WeightedHypercubeEngine e(cfg);
  Cell<WHPayload> q(root_cell(), cell_bounds(root_cell(), cfg), 2);
  q.alg.points = std::make_unique<WeightedPointIndex>(2);
  q.alg.points->add_weight({10, 10, 0}, 10);
  CoordLists z;
  z[0] = {0, 64};
  z[1] = {0, 64};
  CHECK_FALSE(e.addible(q, z, make_cube(1, {30, 30}, 2, 1)));
  CHECK_FALSE(e.addible(q, z, make_cube(2, {30, 30}, 2, 19)));
  CHECK(e.addible(q, z, make_cube(3, {30, 30}, 2, 25)));
  // a finer grid separates the cube from the heavy point
  z[0] = {0, 20, 64};
  CHECK(e.addible(q, z, make_cube(4, {30, 30}, 2, 1)));
}

TEST_CASE("wh vertex push reaches every ancestor") {
  const auto cfg = GridConfig::make(1024, 2, 0.25);
  double side = 0;
  for (double s = 1; s <= cfg.N; ++s)
    if (level_of(s, cfg) == 5) {
      side = s;
      break;
    }
  REQUIRE(side > 0);
  const auto c = make_cube(1, {1, 1}, side, 3);
  REQUIRE(cell_chain(c, cfg).size() == 6);
  WeightedHypercubeEngine e(cfg);
  e.insert(c);
  auto ps = point_sets(e);
  CHECK(ps.size() == 6);
  for (const auto& [id, pts] : ps) {
    CHECK(pts.size() == 4);
    for (const auto& [p, w] : pts) CHECK(w == 3);
  }
}

TEST_CASE("wh reversal restores point sets exactly") {
  std::mt19937_64 rng(47);
  const auto cfg = GridConfig::make(128, 2, 0.25, 11);
  WeightedHypercubeEngine e(cfg), ref(cfg);
  std::vector<Box> base;
  for (Id id = 1; id <= 60; ++id) {
    auto c = random_cube(rng, id, 2, cfg.N, 20, 64);
    e.insert(c);
    ref.insert(c);
  }
  for (Id id = 100; id < 130; ++id) e.insert(random_cube(rng, id, 2, cfg.N, 20, 64));
  for (Id id = 100; id < 130; ++id) e.erase(id);
  CHECK(point_sets(e) == point_sets(ref));
  CHECK(id_set(e.solution()) == id_set(ref.solution()));
}

TEST_CASE("wh shared vertex carries summed weight") {
  WeightedHypercubeEngine e(GridConfig::make(64, 2, 0.25));
  e.insert(make_cube(1, {0, 0}, 2, 1));
  e.insert(make_cube(2, {2, 2}, 2, 100));
  CHECK(id_set(e.solution()) == std::set<Id>{1, 2});
  const auto* r = e.grid().root();
  REQUIRE(r);
  CHECK(r->alg.points->weight_at({2, 2, 0}) == 101);
  CHECK(r->alg.points->size() == 7);
  CHECK(e.weight_estimate() == 404);
}

TEST_CASE("wh bigger cell wins a conflict") {
  const auto cfg = GridConfig::make(1024, 2, 0.25);
  WeightedHypercubeEngine e(cfg);
  const auto small = make_cube(1, {40, 40}, 2, 1);
  const auto large = make_cube(2, {0, 0}, 100, 64);
  REQUIRE(level_of(large, cfg) < level_of(small, cfg));
  e.insert(small);
  e.insert(large);
  CHECK(e.in_bar(1));
  CHECK(e.in_bar(2));
  CHECK(id_set(e.solution()) == std::set<Id>{2});
  CHECK(e.audit() == 0);
}

TEST_CASE("wh invariants along random streams") {
  for (int d = 1; d <= 3; ++d)
    for (double eps : {0.5, 0.25}) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(d * 100 + 1 / eps));
      const auto cfg = GridConfig::make(128, d, eps, 23);
      EngineOptions opt;
      opt.check_aux = true;
      WeightedHypercubeEngine e(cfg, opt);
      std::map<Id, Box> live;
      Id next = 1;
      const double scale = std::pow(2.0, d + 1);
      for (int step = 0; step < 600; ++step) {
        if (live.size() < 120 && (live.empty() || rng() % 3 != 0)) {
          auto c = random_cube(rng, next++, d, cfg.N, 24, 64);
          e.insert(c);
          live[c.id] = c;
        } else {
          auto it = std::next(live.begin(), static_cast<long>(rng() % live.size()));
          e.erase(it->first);
          live.erase(it);
        }
        auto sol = e.solution();
        REQUIRE(pairwise_independent(sol));
        for (const auto& c : sol) REQUIRE(live.count(c.id));
        REQUIRE(e.weight_estimate() <= scale * total_weight(sol));
        if (step % 40 == 0) REQUIRE(e.audit() == 0);
      }
      CHECK(e.audit() == 0);
      CHECK(e.cap_hits() == 0);
      CHECK(e.class_violations() == 0);
      CHECK(e.aux_checks() > 0);
      CHECK(e.aux_violations() == 0);
    }
}

TEST_CASE("wh enumeration and scan select the same cubes") {
  for (int d = 1; d <= 2; ++d) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(900 + d));
    const auto cfg = GridConfig::make(64, d, 0.25, 3);
    EngineOptions enumerate, scan;
    enumerate.aligned_budget = 1u << 14;
    scan.aligned_budget = 0;
    WeightedHypercubeEngine a(cfg, enumerate), b(cfg, scan);
    std::map<Id, Box> live;
    Id next = 1;
    for (int step = 0; step < 300; ++step) {
      if (live.size() < 30 && (live.empty() || rng() % 3 != 0)) {
        auto c = random_cube(rng, next++, d, cfg.N, 12, 64);
        a.insert(c);
        b.insert(c);
        live[c.id] = c;
      } else {
        auto it = std::next(live.begin(), static_cast<long>(rng() % live.size()));
        a.erase(it->first);
        b.erase(it->first);
        live.erase(it);
      }
      REQUIRE(id_set(a.solution()) == id_set(b.solution()));
      REQUIRE(a.weight_estimate() == b.weight_estimate());
    }
  }
}

TEST_CASE("wh rebuild listeners") {
  WeightedHypercubeEngine e(GridConfig::make(64, 1, 0.25));
  std::vector<CellId> rebuilt, removed;
  e.set_listeners([&](WeightedHypercubeEngine::CellT& q) { rebuilt.push_back(q.id); },
                  [&](WeightedHypercubeEngine::CellT& q) { removed.push_back(q.id); });
  e.insert(make_interval(1, 3, 5, 2));
  CHECK(!rebuilt.empty());
  CHECK(rebuilt.back() == root_cell());
  const auto n = rebuilt.size();
  e.erase(1);
  CHECK(removed.size() == n);
}
