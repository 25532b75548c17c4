#include <map>
#include <random>

#include "doctest.h"
#include "gdis/hyperrectangles.hpp"
#include "gdis/oracle.hpp"

using namespace gdis;

namespace {

Box random_rect(std::mt19937_64& rng, Id id, int d, double N, int max_edge, int max_weight) {
  std::vector<std::pair<double, double>> r;
  for (int j = 0; j < d; ++j) {
    const double e = static_cast<double>(1 + rng() % static_cast<std::uint64_t>(max_edge));
    const double lo = static_cast<double>(rng() % static_cast<std::uint64_t>(N - e + 1));
    r.emplace_back(lo, lo + e);
  }
  return make_box(id, r, static_cast<double>(1 + rng() % static_cast<std::uint64_t>(max_weight)));
}

}  // namespace

TEST_CASE("classify_rect examples") {
  CHECK(classify_rect(3, 5, 16) == ClassGroupKey{2, 1});
  CHECK(classify_rect(7, 9, 16) == ClassGroupKey{1, 1});
  CHECK(classify_rect(0.5, 1.2, 16) == ClassGroupKey{4, 1});
  CHECK(classify_rect(8, 12, 16) == ClassGroupKey{1, 1});
  CHECK(classify_rect(4, 8, 16) == ClassGroupKey{2, 1});
  CHECK(classify_rect(12, 16, 16) == ClassGroupKey{2, 3});
  CHECK(classify_rect(0, 1, 16) == ClassGroupKey{0, 0});
}

TEST_CASE("classify_rect matches the scan and yields odd groups") {
  std::mt19937_64 rng(53);
  for (double N : {16.0, 256.0, 1024.0})
    for (int t = 0; t < 20000; ++t) {
      const double len = 1 + static_cast<double>(rng() % static_cast<std::uint64_t>(4 * N / 8)) / 4;
      const double x = static_cast<double>(rng() % static_cast<std::uint64_t>(4 * (N - len) + 1)) / 4;
      const double y = x + len;
      if (y > N) continue;
      const auto a = classify_rect(x, y, N);
      REQUIRE(a == classify_rect_scan(x, y, N));
      if (a.c > 0) CHECK(a.k % 2 == 1);
    }
}

TEST_CASE("project_tail drops the first axis") {
  auto r = make_box(9, {{1, 2}, {3, 5}, {6, 9}}, 4);
  auto p = project_tail(r);
  CHECK(p.id == 9);
  CHECK(p.dim == 2);
  CHECK(p.weight == 4);
  CHECK(p.lo[0] == 3);
  CHECK(p.hi[1] == 9);
}

TEST_CASE("hr construction and contract checks") {
  CHECK_THROWS_AS(HyperrectangleEngine(GridConfig::make(64, 1, 0.25)), contract_error);
  CHECK_NOTHROW(HyperrectangleEngine(GridConfig::make(64, 3, 0.25)));
  HyperrectangleEngine e(GridConfig::make(64, 2, 0.25));
  CHECK_THROWS_AS(e.erase(1), contract_error);
  e.insert(make_box(1, {{3, 9}, {4, 6}}, 5));
  CHECK_THROWS_AS(e.insert(make_box(1, {{3, 9}, {4, 6}}, 5)), contract_error);
  REQUIRE(e.solution().size() == 1);
  CHECK(e.solution()[0].id == 1);
  CHECK(e.solution()[0].dim == 2);
  CHECK(e.solution_weight() == 5);
}

TEST_CASE("hr groups appear and disappear with their members") {
  HyperrectangleEngine e(GridConfig::make(16, 2, 0.25));
  e.insert(make_box(1, {{7, 9}, {0, 2}}));
  e.insert(make_box(2, {{6, 10}, {4, 5}}));
  e.insert(make_box(3, {{3, 5}, {0, 2}}));
  CHECK(e.group_count() == 2);
  CHECK(e.class_weights().size() == 2);
  CHECK(e.best_class() == 1);
  CHECK(e.solution_weight() == 2);
  e.erase(1);
  e.erase(2);
  CHECK(e.group_count() == 1);
  CHECK(e.best_class() == 2);
  e.erase(3);
  CHECK(e.group_count() == 0);
  CHECK(e.best_class() == -1);
  CHECK(e.solution().empty());
  CHECK(e.audit() == 0);
}

TEST_CASE("hr single class reports its group sum") {
  HyperrectangleEngine e(GridConfig::make(16, 2, 0.25));
  // class 2 groups k=1 (contains 4) and k=3 (contains 12)
  e.insert(make_box(1, {{3, 5}, {0, 4}}, 3));
  e.insert(make_box(2, {{11, 13}, {0, 4}}, 4));
  CHECK(e.group_count() == 2);
  CHECK(e.best_class() == 2);
  CHECK(e.solution_weight() == 7);
}

TEST_CASE("hr invariants along random streams") {
  for (int d = 2; d <= 3; ++d) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(61 + d));
    const auto cfg = GridConfig::make(64, d, 0.25);
    EngineOptions opt;
    opt.inner_offsets = {0.0, 17.0};
    HyperrectangleEngine e(cfg, opt);
    std::map<Id, Box> live;
    Id next = 1;
    for (int step = 0; step < 300; ++step) {
      if (live.size() < 40 && (live.empty() || rng() % 3 != 0)) {
        auto r = random_rect(rng, next++, d, cfg.N, 20, 64);
        e.insert(r);
        live[r.id] = r;
      } else {
        auto it = std::next(live.begin(), static_cast<long>(rng() % live.size()));
        e.erase(it->first);
        live.erase(it);
      }
      auto sol = e.solution();
      REQUIRE(pairwise_independent(sol));
      for (const auto& r : sol) REQUIRE(live.at(r.id).hi == r.hi);
      REQUIRE(total_weight(sol) == doctest::Approx(e.solution_weight()).epsilon(1e-12));
      REQUIRE(e.cross_group_violations() == 0);
      REQUIRE(e.live() == live.size());
      if (step % 20 == 0) REQUIRE(e.audit() == 0);
    }
  }
}
