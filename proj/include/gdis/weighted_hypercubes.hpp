#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gdis/engine.hpp"
#include "gdis/grid.hpp"
#include "gdis/unweighted_hypercubes.hpp"

namespace gdis {

struct AuxGrid {
  CoordLists z;
  double base_weight = 0;
  double cap = 0;
};

// Per dimension, cuts [lo, hi] at point coordinates so that every open slice
// between consecutive cuts carries P-weight at most cap; each cut is the first
// point coordinate at which the slice would exceed the cap. Sweeps the points
// of the cell in coordinate order.
AuxGrid build_aux_grid(const WeightedPointIndex& p, const QueryBox& cell, double cap);
// The same cuts found by median-guided binary search over range queries.
AuxGrid build_aux_grid_bisect(const WeightedPointIndex& p, const QueryBox& cell, double cap);
// eps^(d+2) W / (d^(d+1) log N)
double whc_aux_cap(const GridConfig& cfg, double base_weight);
// d^(d+1) log N / eps^(d+2) + 1
double whc_aux_limit(const GridConfig& cfg);
// Counts failed checks: bounds at both ends, sorted coordinates, open-slice
// weights against the cap, and per-dimension size against the limit.
std::size_t aux_grid_violations(const AuxGrid& g, const WeightedPointIndex& p, const QueryBox& cell, double limit);
// Smallest box spanned by z that contains c (bounds snapped outward).
QueryBox snap_outward(const CoordLists& z, const Box& c);

struct WHPayload {
  std::vector<Box> bar;
  std::vector<Box> tilde;
  std::unique_ptr<WeightedPointIndex> points;
  // (weight class, cube) of every addition in the last rebuild.
  std::vector<std::pair<int, Box>> added;
  std::size_t subtree_bar = 0;
};

class WeightedHypercubeEngine : public DynamicEngine {
 public:
  using CellT = Grid<WHPayload>::CellT;

  WeightedHypercubeEngine(const GridConfig& cfg, const EngineOptions& opt = {});

  void insert(const Box& c) override;
  void erase(Id id) override;
  std::size_t solution_size() const override { return solution().size(); }
  double solution_weight() const override { return total_weight(solution()); }
  std::vector<Box> solution() const override;
  bool weighted() const override { return true; }
  std::size_t audit() const override;

  // w(P(Q*))
  double weight_estimate() const;
  const Grid<WHPayload>& grid() const { return grid_; }
  Grid<WHPayload>& grid() { return grid_; }
  const GridConfig& config() const { return grid_.config(); }
  bool in_bar(Id id) const { return bar_ids_.count(id) != 0; }

  // Invoked after each cell rebuild, and when a cell leaves the registry.
  void set_listeners(std::function<void(CellT&)> rebuilt, std::function<void(CellT&)> removed);

  std::size_t iteration_cap() const;
  std::size_t cap_hits() const { return cap_hits_; }
  std::size_t class_violations() const { return class_violations_; }
  std::size_t aux_checks() const { return aux_checks_; }
  std::size_t aux_violations() const { return aux_violations_; }

  // Smallest (size, id) assigned cube whose class floor is at least twice the
  // P-weight of some aligned box containing it.
  std::optional<Box> select(const CellT& q, const CoordLists& z) const;
  bool addible(const CellT& q, const CoordLists& z, const Box& c) const;

 private:
  void before(const std::vector<CellId>& chain);
  void rebuild(CellT& q);
  void push_vertices(const CellId& origin, const Box& c, double sign);
  WeightedPointIndex& points(CellT& q);
  void emit(const CellT& q, const std::vector<Box>& blockers, std::vector<Box>& out) const;

  EngineOptions opt_;
  Grid<WHPayload> grid_;
  Grid<WHPayload>::Hooks hooks_;
  std::function<void(CellT&)> rebuilt_;
  std::function<void(CellT&)> removed_;
  std::unordered_set<Id> bar_ids_;
  std::size_t cap_hits_ = 0;
  std::size_t class_violations_ = 0;
  std::size_t aux_checks_ = 0;
  std::size_t aux_violations_ = 0;
};

}  // namespace gdis
