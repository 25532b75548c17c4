#include "gdis/range_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gdis {

namespace detail {

struct EndTree::Node {
  double lo;
  Id id;
  double hi;
  std::uint64_t prio;
  std::pair<double, Id> agg;
  std::unique_ptr<Node> l, r;
};

namespace {

using NodePtr = std::unique_ptr<EndTree::Node>;

}  // namespace

EndTree::EndTree() = default;
EndTree::~EndTree() = default;

namespace {

bool key_less(double alo, Id aid, double blo, Id bid) { return alo < blo || (alo == blo && aid < bid); }

template <class N>
void pull(N* t) {
  t->agg = {t->hi, t->id};
  if (t->l) t->agg = std::min(t->agg, t->l->agg);
  if (t->r) t->agg = std::min(t->agg, t->r->agg);
}

// Splits into keys < (lo, id) and keys >= (lo, id); with inclusive set, the
// left part also receives the key itself.
template <class P>
void split(P t, double lo, Id id, bool inclusive, P& a, P& b) {
  if (!t) {
    a = nullptr;
    b = nullptr;
    return;
  }
  bool go_left = inclusive ? !key_less(lo, id, t->lo, t->id) : key_less(t->lo, t->id, lo, id);
  if (go_left) {
    P rest;
    split(std::move(t->r), lo, id, inclusive, rest, b);
    t->r = std::move(rest);
    pull(t.get());
    a = std::move(t);
  } else {
    P rest;
    split(std::move(t->l), lo, id, inclusive, a, rest);
    t->l = std::move(rest);
    pull(t.get());
    b = std::move(t);
  }
}

template <class P>
P merge(P a, P b) {
  if (!a) return b;
  if (!b) return a;
  if (a->prio > b->prio) {
    a->r = merge(std::move(a->r), std::move(b));
    pull(a.get());
    return a;
  }
  b->l = merge(std::move(a), std::move(b->l));
  pull(b.get());
  return b;
}

}  // namespace

void EndTree::insert(double lo, double hi, Id id) {
  seed_ ^= seed_ << 13;
  seed_ ^= seed_ >> 7;
  seed_ ^= seed_ << 17;
  auto n = std::make_unique<Node>();
  n->lo = lo;
  n->id = id;
  n->hi = hi;
  n->prio = seed_;
  n->agg = {hi, id};
  NodePtr a, b;
  split(std::move(root_), lo, id, false, a, b);
  root_ = merge(merge(std::move(a), std::move(n)), std::move(b));
}

void EndTree::erase(double lo, Id id) {
  NodePtr a, b, m, c;
  split(std::move(root_), lo, id, false, a, b);
  split(std::move(b), lo, id, true, m, c);
  if (!m) throw contract_error("EndTree: erase of missing key");
  root_ = merge(std::move(a), std::move(c));
}

std::optional<std::pair<double, Id>> EndTree::min_end_from(double t) const {
  std::optional<std::pair<double, Id>> best;
  const Node* n = root_.get();
  while (n) {
    if (n->lo >= t) {
      std::pair<double, Id> cand{n->hi, n->id};
      if (n->r) cand = std::min(cand, n->r->agg);
      if (!best || cand < *best) best = cand;
      n = n->l.get();
    } else {
      n = n->r.get();
    }
  }
  return best;
}

}  // namespace detail

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

WeightedPointIndex::WeightedPointIndex(int dim) : dim_(dim), tree_(dim) {
  if (dim < 1 || dim > kMaxDim) throw contract_error("WeightedPointIndex: bad dimension");
}

Coords WeightedPointIndex::norm(const Coords& p) const {
  Coords q{};
  for (int j = 0; j < dim_; ++j) q[j] = p[j];
  return q;
}

void WeightedPointIndex::add_weight(const Coords& raw, double dw) {
  Coords p = norm(raw);
  auto it = entries_.find(p);
  if (it == entries_.end()) {
    if (dw < 0) throw contract_error("WeightedPointIndex: weight underflow on absent point");
    if (dw == 0) return;
    Id tag = next_tag_++;
    detail::Key key{};
    for (int j = 0; j < dim_; ++j) key[j] = p[j];
    tree_.insert(key, tag, dw);
    entries_.emplace(p, tag);
    for (int j = 0; j < dim_; ++j) order_[j].insert({p[j], tag});
    total_ += dw;
    return;
  }
  Id tag = it->second;
  double old = tree_.weight(tag);
  double now = old + dw;
  // Residues of real-valued cancellation are snapped to an exact zero.
  double tol = 1e-12 * std::max(1.0, old + std::abs(dw));
  if (now < -tol) throw contract_error("WeightedPointIndex: weight underflow");
  if (now <= tol) {
    tree_.erase(tag);
    for (int j = 0; j < dim_; ++j) order_[j].erase({p[j], tag});
    entries_.erase(it);
    total_ -= old;
    if (entries_.empty()) total_ = 0;
    return;
  }
  tree_.add_weight(tag, dw);
  total_ += dw;
}

void WeightedPointIndex::erase(const Coords& p, double w) {
  if (w < 0) throw contract_error("WeightedPointIndex: negative erase weight");
  if (!entries_.count(norm(p))) throw contract_error("WeightedPointIndex: erase of absent point");
  add_weight(p, -w);
}

double WeightedPointIndex::weight_at(const Coords& p) const {
  auto it = entries_.find(norm(p));
  return it == entries_.end() ? 0.0 : tree_.weight(it->second);
}

double WeightedPointIndex::range_weight(const QueryBox& b, const Openness& o) const {
  if (b.dim != dim_) throw contract_error("range_weight: dimension mismatch");
  auto r = detail::KeyRange::everything();
  for (int j = 0; j < dim_; ++j) {
    r.at_least(j, b.lo[j], o.lo_open[j]);
    r.at_most(j, b.hi[j], o.hi_open[j]);
  }
  return tree_.sum(r);
}

std::size_t WeightedPointIndex::count_in(int dim, double x, double z) const {
  if (dim < 0 || dim >= dim_) throw contract_error("count_in: bad dimension");
  if (z < x) return 0;
  const auto& ord = order_[dim];
  return ord.order_of_key({std::nextafter(z, kInf), 0}) - ord.order_of_key({x, 0});
}

double WeightedPointIndex::median_split(int dim, double x, double z) const {
  if (dim < 0 || dim >= dim_) throw contract_error("median_split: bad dimension");
  if (z < x) return x;
  const auto& ord = order_[dim];
  std::size_t lo = ord.order_of_key({x, 0});
  std::size_t hi = ord.order_of_key({std::nextafter(z, kInf), 0});
  if (hi <= lo) return x;
  std::size_t m = hi - lo;
  return ord.find_by_order(lo + (m + 1) / 2 - 1)->first;
}

std::vector<std::pair<Coords, double>> WeightedPointIndex::points() const {
  std::vector<std::pair<Coords, double>> out;
  out.reserve(entries_.size());
  for (const auto& [p, tag] : entries_) out.emplace_back(p, tree_.weight(tag));
  return out;
}

BoxIndex::BoxIndex(int dim, std::size_t tree_threshold) : dim_(dim), tree_threshold_(tree_threshold) {
  if (dim < 1 || dim > kMaxDim) throw contract_error("BoxIndex: bad dimension");
  if (dim == 1) end_order_ = std::make_unique<detail::EndTree>();
}

const Box& BoxIndex::get(Id id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw contract_error("BoxIndex: unknown id " + std::to_string(id));
  return it->second;
}

detail::Key BoxIndex::key_of(const Box& c) const {
  detail::Key k{};
  for (int j = 0; j < dim_; ++j) {
    k[2 * j] = c.lo[j];
    k[2 * j + 1] = c.hi[j];
  }
  k[2 * dim_] = c.size();
  return k;
}

void BoxIndex::insert(const Box& c) {
  if (c.dim != dim_) throw contract_error("BoxIndex: dimension mismatch");
  if (!entries_.emplace(c.id, c).second) throw contract_error("BoxIndex: duplicate id " + std::to_string(c.id));
  size_order_.insert({c.size(), c.id});
  if (end_order_) end_order_->insert(c.lo[0], c.hi[0], c.id);
  if (containment_) containment_->insert(key_of(c), c.id, 1.0);
}

void BoxIndex::erase(Id id) {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw contract_error("BoxIndex: erase of unknown id " + std::to_string(id));
  const Box& c = it->second;
  size_order_.erase({c.size(), id});
  if (end_order_) end_order_->erase(c.lo[0], id);
  if (containment_) containment_->erase(id);
  entries_.erase(it);
  if (containment_ && entries_.size() * 2 < tree_threshold_) containment_.reset();
}

void BoxIndex::ensure_containment() const {
  if (containment_) return;
  containment_ = std::make_unique<detail::RangeTree>(2 * dim_ + 1);
  for (const auto& k : size_order_) {
    const Box& c = entries_.at(k.second);
    containment_->insert(key_of(c), c.id, 1.0);
  }
}

detail::KeyRange BoxIndex::containment_range(const QueryBox& b) const {
  if (b.dim != dim_) throw contract_error("BoxIndex: query dimension mismatch");
  auto r = detail::KeyRange::everything();
  for (int j = 0; j < dim_; ++j) {
    r.at_least(2 * j, b.lo[j]);
    r.at_most(2 * j + 1, b.hi[j]);
  }
  return r;
}

std::optional<Box> BoxIndex::smallest_contained(const QueryBox& b) const {
  if (b.dim != dim_) throw contract_error("BoxIndex: query dimension mismatch");
  if (entries_.empty()) return std::nullopt;
  if (!use_tree()) {
    for (const auto& k : size_order_) {
      const Box& c = entries_.at(k.second);
      if (contained_in(c, b)) return c;
    }
    return std::nullopt;
  }
  ensure_containment();
  auto r = containment_range(b);
  if (containment_->count(r) == 0) return std::nullopt;
  // Smallest position in size order whose prefix already holds a contained box.
  std::size_t lo = 0, hi = size_order_.size() - 1;
  const int sd = 2 * dim_;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    auto key = *size_order_.find_by_order(mid);
    r.hi[sd] = {key.first, key.second};
    if (containment_->count(r) > 0)
      hi = mid;
    else
      lo = mid + 1;
  }
  return entries_.at(size_order_.find_by_order(lo)->second);
}

std::optional<Box> BoxIndex::any_contained(const QueryBox& b) const {
  if (b.dim != dim_) throw contract_error("BoxIndex: query dimension mismatch");
  if (entries_.empty()) return std::nullopt;
  if (!use_tree()) {
    for (const auto& [id, c] : entries_)
      if (contained_in(c, b)) return c;
    return std::nullopt;
  }
  ensure_containment();
  auto id = containment_->any(containment_range(b));
  if (!id) return std::nullopt;
  return entries_.at(*id);
}

std::optional<Box> BoxIndex::successor_interval(double t) const {
  if (dim_ != 1) throw contract_error("successor_interval: intervals only");
  auto best = end_order_->min_end_from(t);
  if (!best) return std::nullopt;
  return entries_.at(best->second);
}

std::vector<Box> BoxIndex::by_size() const {
  std::vector<Box> out;
  out.reserve(entries_.size());
  for (const auto& k : size_order_) out.push_back(entries_.at(k.second));
  return out;
}

}  // namespace gdis
