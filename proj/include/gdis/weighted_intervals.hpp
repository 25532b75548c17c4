#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "gdis/engine.hpp"
#include "gdis/weighted_hypercubes.hpp"

namespace gdis {

// Best chains of at most max_count intervals built by per-class successor
// steps, for every start position and a common right limit.
class SparseSolver {
 public:
  SparseSolver(const std::map<int, BoxIndex>& classes, const std::vector<double>& starts, int max_count);

  // Restricts chains to intervals ending at or before t2.
  void solve(double t2);
  // Start must be one of the positions given at construction.
  double value(double t1) const;
  std::vector<Box> chain(double t1) const;
  std::size_t index(double t) const;
  double value_at(std::size_t p) const { return f_[p * (r_ + 1) + r_]; }

 private:
  struct Cand {
    double hi;
    double w;
    std::size_t next;
    Box box;
  };

  int r_;
  std::vector<double> pos_;
  std::vector<std::vector<Cand>> cands_;
  std::vector<double> f_;
  std::vector<std::int32_t> arg_;
  double t2_ = 0;
};

// Heaviest successor chain of at most max_count intervals inside [t1, t2].
std::vector<Box> sparse_candidate(const std::map<int, BoxIndex>& classes, double t1, double t2, int max_count);

struct SegmentState {
  std::vector<double> z;
  std::vector<double> zall;
  // ALG(Q,T) for T = [zall[i], zall[j]], row-major over zall.
  std::vector<double> val;
  // -1 empty, 0 sparse, r+1 dense from child r.
  std::vector<std::int8_t> src;
  std::vector<CellId> kids;
  // Combine rows, one per coordinate of z.
  std::vector<std::size_t> row_start;
  std::vector<double> g;
  std::vector<std::int32_t> back;
};

class WeightedIntervalEngine : public DynamicEngine {
 public:
  WeightedIntervalEngine(const GridConfig& cfg, const EngineOptions& opt = {});

  void insert(const Box& c) override;
  void erase(Id id) override;
  std::size_t solution_size() const override { return solution().size(); }
  double solution_weight() const override;
  std::vector<Box> solution() const override;
  bool weighted() const override { return true; }
  std::size_t audit() const override;

  // eps^(3+1/eps) w(P) / log N
  double segment_cap(double base_weight) const;
  const WeightedHypercubeEngine& points_engine() const { return whc_; }
  const SegmentState* segments(const CellId& id) const;
  // Weight of ALG(Q, [t1, t2]) when it is a maintained segment of Q.
  std::optional<double> segment_weight(const CellId& id, double t1, double t2) const;
  std::vector<Box> segment_solution(const CellId& id, double t1, double t2) const;
  std::size_t broken_links() const { return broken_; }
  // Z(Q): cell bounds, auxiliary cuts of P(Q) and multiples of eps times the cell side.
  std::vector<double> coordinates(const WeightedHypercubeEngine::CellT& q) const;

 private:
  void rebuild(WeightedHypercubeEngine::CellT& q);
  void expand(const CellId& id, const SegmentState& s, std::size_t row, std::size_t col, std::vector<Box>& out) const;
  void expand_part(const CellId& id, const SegmentState& s, std::size_t i, std::size_t j, std::vector<Box>& out) const;

  WeightedHypercubeEngine whc_;
  std::map<CellId, SegmentState> seg_;
  mutable std::size_t broken_ = 0;
};

}  // namespace gdis
