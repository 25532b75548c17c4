#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gdis/engine.hpp"

namespace gdis {

struct ClassGroupKey {
  int c = 0;
  std::int64_t k = 0;

  auto operator<=>(const ClassGroupKey&) const = default;
};

// Coarsest class c whose grid N/2^c has a positive multiple k N/2^c in [x, y).
// [0, 1) has none and maps to the special key (0, 0).
ClassGroupKey classify_rect(double x, double y, double N);
// Reference version scanning c = 1..log N.
ClassGroupKey classify_rect_scan(double x, double y, double N);

// Drops the first coordinate.
Box project_tail(const Box& r);

class HyperrectangleEngine : public DynamicEngine {
 public:
  HyperrectangleEngine(const GridConfig& cfg, const EngineOptions& opt = {});

  void insert(const Box& r) override;
  void erase(Id id) override;
  std::size_t solution_size() const override { return solution().size(); }
  double solution_weight() const override;
  std::vector<Box> solution() const override;
  bool weighted() const override { return true; }
  std::size_t audit() const override;

  int best_class() const;
  std::size_t group_count() const;
  std::size_t live() const { return rects_.size(); }
  // Pairs in different groups of one class that open-intersect.
  std::size_t cross_group_violations() const;
  std::map<int, double> class_weights() const { return class_weight_; }

 private:
  struct Group {
    std::unique_ptr<DynamicEngine> inner;
    std::unordered_set<Id> members;
  };
  void refresh(int c);

  GridConfig cfg_;
  EngineOptions opt_;
  std::map<int, std::map<std::int64_t, Group>> classes_;
  std::map<int, double> class_weight_;
  std::unordered_map<Id, Box> rects_;
  std::unordered_map<Id, ClassGroupKey> keys_;
};

}  // namespace gdis
