#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "gdis/range_index.hpp"

using namespace gdis;

namespace {

struct Shadow {
  int d;
  std::map<Coords, double> pts;

  double range(const QueryBox& b, const Openness& o) const {
    double s = 0;
    for (const auto& [p, w] : pts) {
      bool in = true;
      for (int j = 0; j < d; ++j) {
        in = in && (o.lo_open[j] ? p[j] > b.lo[j] : p[j] >= b.lo[j]);
        in = in && (o.hi_open[j] ? p[j] < b.hi[j] : p[j] <= b.hi[j]);
      }
      if (in) s += w;
    }
    return s;
  }
  std::size_t count(int j, double x, double z) const {
    std::size_t c = 0;
    for (const auto& [p, w] : pts) c += x <= p[j] && p[j] <= z;
    return c;
  }
  std::size_t strictly(int j, double a, double b) const {
    std::size_t c = 0;
    for (const auto& [p, w] : pts) c += a < p[j] && p[j] < b;
    return c;
  }
};

Coords point(std::mt19937_64& rng, int d, int span) {
  Coords p{};
  for (int j = 0; j < d; ++j) p[j] = static_cast<double>(rng() % span);
  return p;
}

}  // namespace

TEST_CASE("point edits") {
  WeightedPointIndex idx(2);
  idx.insert({1, 1, 0}, 2);
  idx.add_weight({1, 1, 0}, 5);
  CHECK(idx.weight_at({1, 1, 0}) == 7);
  CHECK(idx.size() == 1);
  const double before = idx.total_weight();
  idx.insert({3, 4, 0}, 1.5);
  idx.erase({3, 4, 0}, 1.5);
  CHECK(idx.total_weight() == before);
  CHECK_THROWS_AS(idx.erase({1, 1, 0}, 8), contract_error);
  CHECK_THROWS_AS(idx.erase({9, 9, 0}, 1), contract_error);
}

TEST_CASE("range_weight examples") {
  WeightedPointIndex empty(2);
  CHECK(empty.range_weight(make_query({{0, 10}, {0, 10}})) == 0);
  WeightedPointIndex idx(2);
  idx.insert({1, 1, 0}, 2);
  idx.insert({3, 4, 0}, 5);
  CHECK(idx.range_weight(make_query({{0, 2}, {0, 2}})) == 2);
  WeightedPointIndex line(1);
  line.insert({2, 0, 0}, 3);
  CHECK(line.range_weight(make_query({{2, 5}}), Openness::open()) == 0);
  CHECK(line.range_weight(make_query({{2, 5}})) == 3);
}

TEST_CASE("median_split examples") {
  WeightedPointIndex idx(1);
  for (double x : {1.0, 2.0, 3.0}) idx.insert({x, 0, 0}, 1);
  CHECK(idx.median_split(0, 1, 3) == 2);
  WeightedPointIndex one(1);
  one.insert({7, 0, 0}, 1);
  CHECK(one.median_split(0, 0, 10) == 7);
  WeightedPointIndex four(1);
  for (double x : {1.0, 2.0, 3.0, 4.0}) four.insert({x, 0, 0}, 1);
  const double y = four.median_split(0, 1, 4);
  CHECK((y == 2 || y == 3));
  CHECK(four.median_split(0, 5, 9) == 5);
}

TEST_CASE("weighted point index matches a naive shadow") {
  for (int d = 1; d <= 3; ++d)
    for (bool integral : {true, false}) {
      std::mt19937_64 rng(100 + d * 2 + integral);
      WeightedPointIndex idx(d);
      Shadow sh{d, {}};
      double running = 0;
      for (int step = 0; step < 10000; ++step) {
        const int op = static_cast<int>(rng() % 10);
        if (op < 4 || sh.pts.empty()) {
          Coords p = point(rng, d, 24);
          double w = integral ? static_cast<double>(1 + rng() % 9) : 1 + static_cast<double>(rng() % 1000) / 7.0;
          idx.add_weight(p, w);
          sh.pts[p] += w;
          running += w;
        } else if (op < 6) {
          auto it = std::next(sh.pts.begin(), static_cast<long>(rng() % sh.pts.size()));
          const double w = it->second;
          idx.erase(it->first, w);
          running -= w;
          sh.pts.erase(it);
        } else if (op < 8) {
          QueryBox b;
          b.dim = d;
          Openness o;
          for (int j = 0; j < d; ++j) {
            double a = static_cast<double>(rng() % 26) - 1, c = static_cast<double>(rng() % 26) - 1;
            b.lo[j] = std::min(a, c);
            b.hi[j] = std::max(a, c);
            o.lo_open[j] = rng() & 1;
            o.hi_open[j] = rng() & 1;
          }
          const double got = idx.range_weight(b, o), want = sh.range(b, o);
          if (integral)
            REQUIRE(got == want);
          else
            REQUIRE(std::abs(got - want) <= 1e-9 * std::max(1.0, want));
        } else {
          const int j = static_cast<int>(rng() % d);
          double x = static_cast<double>(rng() % 26) - 1, z = static_cast<double>(rng() % 26) - 1;
          if (z < x) std::swap(x, z);
          const std::size_t m = sh.count(j, x, z);
          REQUIRE(idx.count_in(j, x, z) == m);
          const double y = idx.median_split(j, x, z);
          if (m == 0) {
            REQUIRE(y == x);
          } else {
            REQUIRE(2 * sh.strictly(j, x, y) <= m);
            REQUIRE(2 * sh.strictly(j, y, z) <= m);
          }
        }
        if (step % 997 == 0) REQUIRE(idx.check());
      }
      REQUIRE(idx.size() == sh.pts.size());
      if (integral)
        CHECK(idx.total_weight() == running);
      else
        CHECK(std::abs(idx.total_weight() - running) <= 1e-9 * std::max(1.0, running));
    }
}

TEST_CASE("box edits and counts") {
  BoxIndex idx(2);
  idx.insert(make_cube(1, {0, 0}, 2));
  idx.insert(make_cube(2, {3, 3}, 2));
  idx.insert(make_cube(3, {5, 0}, 4));
  idx.erase(2);
  CHECK(idx.count() == 2);
  CHECK_THROWS_AS(idx.insert(make_cube(1, {0, 0}, 2)), contract_error);
  CHECK_THROWS_AS(idx.erase(2), contract_error);
  idx.erase(1);
  idx.erase(3);
  CHECK(idx.is_empty());
}

TEST_CASE("smallest_contained examples") {
  BoxIndex idx(2);
  idx.insert(make_cube(5, {1, 1}, 4));
  idx.insert(make_cube(6, {0, 0}, 2));
  auto b = make_query({{0, 6}, {0, 6}});
  REQUIRE(idx.smallest_contained(b));
  CHECK(idx.smallest_contained(b)->id == 6);
  CHECK_FALSE(idx.smallest_contained(make_query({{10, 12}, {10, 12}})));
  idx.insert(make_cube(3, {3, 3}, 2));
  CHECK(idx.smallest_contained(b)->id == 3);
}

TEST_CASE("successor_interval examples") {
  BoxIndex idx(1);
  idx.insert(make_interval(1, 1, 2));
  idx.insert(make_interval(2, 3, 5));
  idx.insert(make_interval(3, 4, 6));
  CHECK(idx.successor_interval(2)->id == 2);
  CHECK_FALSE(idx.successor_interval(10));
  CHECK(idx.successor_interval(0)->id == 1);
  BoxIndex sq(2);
  CHECK_THROWS_AS(sq.successor_interval(0), contract_error);
}

namespace {

void box_shadow(int d, std::size_t tree_threshold, int steps) {
  {
    std::mt19937_64 rng(500 + d);
    BoxIndex idx(d, tree_threshold);
    std::map<Id, Box> sh;
    Id next = 1;
    for (int step = 0; step < steps; ++step) {
      const int op = static_cast<int>(rng() % 10);
      if (op < 4 || sh.empty()) {
        std::vector<double> lo;
        for (int j = 0; j < d; ++j) lo.push_back(static_cast<double>(rng() % 30));
        auto c = make_cube(next++, lo, static_cast<double>(1 + rng() % 6));
        idx.insert(c);
        sh[c.id] = c;
      } else if (op < 6) {
        auto it = std::next(sh.begin(), static_cast<long>(rng() % sh.size()));
        idx.erase(it->first);
        sh.erase(it);
      } else if (op < 9 || d > 1) {
        QueryBox q;
        q.dim = d;
        for (int j = 0; j < d; ++j) {
          double a = static_cast<double>(rng() % 37), c = static_cast<double>(rng() % 37);
          q.lo[j] = std::min(a, c);
          q.hi[j] = std::max(a, c);
        }
        std::optional<Box> want;
        for (const auto& [id, c] : sh)
          if (contained_in(c, q) && (!want || c.size() < want->size() || (c.size() == want->size() && id < want->id)))
            want = c;
        auto got = idx.smallest_contained(q);
        REQUIRE(got.has_value() == want.has_value());
        if (want) REQUIRE(got->id == want->id);
        auto any = idx.any_contained(q);
        REQUIRE(any.has_value() == want.has_value());
        if (any) REQUIRE(contained_in(*any, q));
      } else {
        const double t = static_cast<double>(rng() % 37);
        std::optional<Box> want;
        for (const auto& [id, c] : sh)
          if (c.lo[0] >= t && (!want || c.hi[0] < want->hi[0] || (c.hi[0] == want->hi[0] && id < want->id)))
            want = c;
        auto got = idx.successor_interval(t);
        REQUIRE(got.has_value() == want.has_value());
        if (want) REQUIRE(got->id == want->id);
      }
      REQUIRE(idx.count() == sh.size());
    }
    auto order = idx.by_size();
    REQUIRE(order.size() == sh.size());
    for (std::size_t i = 1; i < order.size(); ++i)
      CHECK(std::make_pair(order[i - 1].size(), order[i - 1].id) < std::make_pair(order[i].size(), order[i].id));
  }
}

}  // namespace

TEST_CASE("box index matches a naive shadow") {
  for (int d = 1; d <= 3; ++d) box_shadow(d, BoxIndex::kTreeThreshold, 10000);
}

TEST_CASE("box index tree path matches a naive shadow") {
  const int steps[] = {3000, 1500, 600};
  for (int d = 1; d <= 3; ++d) box_shadow(d, 0, steps[d - 1]);
  // switches to the tree mid-run
  box_shadow(2, 60, 1500);
}
