#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gdis/geometry.hpp"

namespace gdis::detail {

inline constexpr int kMaxKeyDim = 2 * kMaxDim + 1;
using Key = std::array<double, kMaxKeyDim>;

// Inclusive bound on the lexicographic pair (coordinate, tag).
struct KeyBound {
  double v;
  Id tag;
};

struct KeyRange {
  std::array<KeyBound, kMaxKeyDim> lo;
  std::array<KeyBound, kMaxKeyDim> hi;

  static KeyRange everything();
  void closed(int j, double a, double b);
  void at_least(int j, double a, bool open = false);
  void at_most(int j, double b, bool open = false);
};

// Dynamic multi-level range tree over tagged weighted points. Each level is a
// weight-balanced search tree on one coordinate whose nodes carry an
// associated structure for the remaining coordinates. Unbalanced subtrees are
// rebuilt in place; erased records stay as zero-weight tombstones until a
// global rebuild purges them.
class RangeTree {
 public:
  explicit RangeTree(int dims);
  ~RangeTree();
  RangeTree(RangeTree&&) noexcept;
  RangeTree& operator=(RangeTree&&) noexcept;

  int dims() const { return dims_; }
  std::size_t live() const { return live_; }
  bool has(Id tag) const { return by_tag_.count(tag) != 0; }
  double weight(Id tag) const;

  void insert(const Key& key, Id tag, double w);
  void add_weight(Id tag, double dw);
  void erase(Id tag);

  double sum(const KeyRange& r) const;
  std::int64_t count(const KeyRange& r) const;
  std::optional<Id> any(const KeyRange& r) const;

  // Structural audit used by tests: sizes, sums and orderings are consistent.
  bool check() const;

 private:
  struct Node;
  struct Rec {
    Key key;
    Id tag;
    double w;
  };

  bool less(std::uint32_t a, std::uint32_t b, int j) const;
  bool ge_lo(std::uint32_t a, int j, const KeyBound& lo) const;
  bool le_hi(std::uint32_t a, int j, const KeyBound& hi) const;
  bool inside_from(std::uint32_t a, int j, const KeyRange& r) const;

  std::unique_ptr<Node> build(std::vector<std::uint32_t>& recs, int j) const;
  std::unique_ptr<Node> build_sorted(const std::vector<std::uint32_t>& recs, std::size_t b, std::size_t e,
                                     int j) const;
  void collect(const Node* t, std::vector<std::uint32_t>& out) const;
  void insert_at(std::unique_ptr<Node>& root, int j, std::uint32_t rec);
  void add_at(Node* t, int j, std::uint32_t rec, double dw, int dcnt);
  void rebuild_all();

  template <class Visit>
  bool walk(const Node* t, int j, const KeyRange& r, Visit& visit) const;
  bool check_node(const Node* t, int j) const;

  int dims_;
  std::vector<Rec> recs_;
  std::unordered_map<Id, std::uint32_t> by_tag_;
  std::unique_ptr<Node> root_;
  std::size_t live_ = 0;
  std::size_t dead_ = 0;
};

}  // namespace gdis::detail
