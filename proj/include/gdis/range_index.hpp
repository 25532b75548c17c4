#pragma once

#include <ext/pb_ds/assoc_container.hpp>
#include <ext/pb_ds/tree_policy.hpp>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gdis/geometry.hpp"
#include "gdis/range_tree.hpp"

namespace gdis {

namespace detail {

template <class K>
using OrderTree =
    __gnu_pbds::tree<K, __gnu_pbds::null_type, std::less<K>, __gnu_pbds::rb_tree_tag,
                     __gnu_pbds::tree_order_statistics_node_update>;

// Treap over intervals keyed by (lo, id) with the subtree minimum of (hi, id),
// answering "earliest-ending interval starting at or after t".
class EndTree {
 public:
  EndTree();
  ~EndTree();

  void insert(double lo, double hi, Id id);
  void erase(double lo, Id id);
  // (hi, id) of the minimum over entries with lo >= t.
  std::optional<std::pair<double, Id>> min_end_from(double t) const;

  struct Node;

 private:
  std::unique_ptr<Node> root_;
  std::uint64_t seed_ = 0x9e3779b97f4a7c15ull;
};

}  // namespace detail

struct Openness {
  std::array<bool, kMaxDim> lo_open{};
  std::array<bool, kMaxDim> hi_open{};

  static Openness closed() { return {}; }
  static Openness open() {
    Openness o;
    o.lo_open.fill(true);
    o.hi_open.fill(true);
    return o;
  }
};

// Dynamic weighted point multiset; coincident points share one entry.
class WeightedPointIndex {
 public:
  explicit WeightedPointIndex(int dim);

  int dim() const { return dim_; }
  void insert(const Coords& p, double w) { add_weight(p, w); }
  // Removes weight w from the entry at p; the entry must hold at least w.
  void erase(const Coords& p, double w);
  // Adds dw (possibly negative) to the entry at p, creating it when absent.
  void add_weight(const Coords& p, double dw);

  double weight_at(const Coords& p) const;
  double total_weight() const { return total_; }
  // Number of entries with positive weight.
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double range_weight(const QueryBox& b, const Openness& o = Openness::closed()) const;
  // 0-based dimension. Returns the left bound x when no point lies in [x, z].
  double median_split(int dim, double x, double z) const;
  // Number of entries whose dim-coordinate lies in [x, z].
  std::size_t count_in(int dim, double x, double z) const;

  std::vector<std::pair<Coords, double>> points() const;
  bool check() const { return tree_.check(); }

 private:
  Coords norm(const Coords& p) const;

  int dim_;
  detail::RangeTree tree_;
  std::map<Coords, Id> entries_;
  std::array<detail::OrderTree<std::pair<double, Id>>, kMaxDim> order_;
  double total_ = 0;
  Id next_tag_ = 1;
};

// Dynamic store of boxes keyed by id, with size ordering, containment queries
// and (for intervals) successor queries.
class BoxIndex {
 public:
  using SizeKey = std::pair<double, Id>;

  // Containment queries scan the size order until the index holds more than
  // tree_threshold entries, then switch to the range tree.
  explicit BoxIndex(int dim, std::size_t tree_threshold = kTreeThreshold);
  static constexpr std::size_t kTreeThreshold = 1 << 14;

  int dim() const { return dim_; }
  void insert(const Box& c);
  void erase(Id id);
  std::size_t count() const { return entries_.size(); }
  bool is_empty() const { return entries_.empty(); }
  bool contains(Id id) const { return entries_.count(id) != 0; }
  const Box& get(Id id) const;

  std::optional<Box> smallest_contained(const QueryBox& b) const;
  std::optional<Box> any_contained(const QueryBox& b) const;
  std::optional<Box> successor_interval(double t) const;

  // Entries in (size, id) order.
  std::vector<Box> by_size() const;
  template <class F>
  void for_each_by_size(F&& f) const {
    for (const auto& k : size_order_)
      if (!f(entries_.at(k.second))) return;
  }
  std::vector<Box> boxes() const { return by_size(); }

 private:
  detail::Key key_of(const Box& c) const;
  detail::KeyRange containment_range(const QueryBox& b) const;
  void ensure_containment() const;

  bool use_tree() const { return entries_.size() > tree_threshold_; }

  int dim_;
  std::size_t tree_threshold_;
  std::unordered_map<Id, Box> entries_;
  detail::OrderTree<SizeKey> size_order_;
  std::unique_ptr<detail::EndTree> end_order_;
  mutable std::unique_ptr<detail::RangeTree> containment_;
};

}  // namespace gdis
