#pragma once

#include <array>
#include <vector>

#include "gdis/engine.hpp"
#include "gdis/grid.hpp"

namespace gdis {

using CoordLists = std::array<std::vector<double>, kMaxDim>;

// Every box spanned by two coordinates per dimension, as closed bounds.
std::vector<QueryBox> aligned_boxes(const CoordLists& z, int d);
// prod_j C(|Z_j|, 2), saturating.
std::size_t aligned_box_count(const CoordLists& z, int d);
// Sorted, deduplicated cell bounds plus the coordinates of the given boxes.
CoordLists aligned_coords(const QueryBox& cell, const std::vector<Box>& boxes, int d);

struct UHPayload {
  bool linked = false;
  std::vector<Box> explicit_list;
  std::vector<CellId> links;
  std::size_t cardinality = 0;
  // Sizes of the cubes added by the last sparse rebuild, in order.
  std::vector<double> added_sizes;
};

class UnweightedHypercubeEngine : public DynamicEngine {
 public:
  UnweightedHypercubeEngine(const GridConfig& cfg, const EngineOptions& opt = {});

  void insert(const Box& c) override;
  void erase(Id id) override;
  std::size_t solution_size() const override;
  double solution_weight() const override { return static_cast<double>(solution_size()); }
  std::vector<Box> solution() const override;
  bool weighted() const override { return false; }
  std::size_t audit() const override;

  // d^d log N / eps^(d+1)
  double threshold() const;
  // (d/eps)^d
  std::size_t addition_cap() const;
  std::size_t cap_hits() const { return cap_hits_; }
  const Grid<UHPayload>& grid() const { return grid_; }
  std::vector<Box> expand(const CellId& id) const;
  // Smallest (size, id) assigned cube of q independent of every member of bar.
  std::optional<Box> select(const Grid<UHPayload>::CellT& q, const std::vector<Box>& bar) const;

 private:
  void rebuild(Grid<UHPayload>::CellT& q);
  void expand_into(const Grid<UHPayload>::CellT& q, std::vector<Box>& out) const;

  EngineOptions opt_;
  Grid<UHPayload> grid_;
  Grid<UHPayload>::Hooks hooks_;
  std::size_t cap_hits_ = 0;
};

}  // namespace gdis
