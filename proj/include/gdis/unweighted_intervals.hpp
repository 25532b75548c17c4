#pragma once

#include <vector>

#include "gdis/engine.hpp"
#include "gdis/grid.hpp"

namespace gdis {

struct UIPayload {
  bool linked = false;
  std::vector<Box> explicit_list;
  std::vector<CellId> links;
  std::size_t cardinality = 0;
};

// Earliest-finishing chain over the index, starting at coordinate `from`.
std::vector<Box> greedy_exact_sub(const BoxIndex& idx, double from);

class UnweightedIntervalEngine : public DynamicEngine {
 public:
  explicit UnweightedIntervalEngine(const GridConfig& cfg);

  void insert(const Box& c) override;
  void erase(Id id) override;
  std::size_t solution_size() const override;
  double solution_weight() const override { return static_cast<double>(solution_size()); }
  std::vector<Box> solution() const override;
  bool weighted() const override { return false; }
  std::size_t audit() const override;

  // Union size above which a cell links to its children: (1/eps^2) log N.
  double threshold() const;
  const Grid<UIPayload>& grid() const { return grid_; }
  std::vector<Box> expand(const CellId& id) const;

 private:
  void rebuild(Grid<UIPayload>::CellT& q);
  void expand_into(const Grid<UIPayload>::CellT& q, std::vector<Box>& out) const;

  Grid<UIPayload> grid_;
  Grid<UIPayload>::Hooks hooks_;
};

}  // namespace gdis
