#include "gdis/range_tree.hpp"

#include <algorithm>
#include <cmath>

namespace gdis::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Id kMaxTag = std::numeric_limits<Id>::max();
// Subtrees up to this size keep no associated structure and are scanned.
constexpr std::uint32_t kScan = 16;
constexpr double kAlpha = 0.75;

}  // namespace

KeyRange KeyRange::everything() {
  KeyRange r;
  r.lo.fill({-kInf, 0});
  r.hi.fill({kInf, kMaxTag});
  return r;
}

void KeyRange::closed(int j, double a, double b) {
  lo[j] = {a, 0};
  hi[j] = {b, kMaxTag};
}

void KeyRange::at_least(int j, double a, bool open) { lo[j] = {open ? std::nextafter(a, kInf) : a, 0}; }

void KeyRange::at_most(int j, double b, bool open) { hi[j] = {open ? std::nextafter(b, -kInf) : b, kMaxTag}; }

struct RangeTree::Node {
  std::uint32_t rec;
  std::uint32_t size = 1;
  std::int64_t cnt = 0;
  double sum = 0;
  std::uint32_t min_rec;
  std::uint32_t max_rec;
  std::unique_ptr<Node> l, r, assoc;
};

RangeTree::RangeTree(int dims) : dims_(dims) {
  if (dims < 1 || dims > kMaxKeyDim) throw contract_error("RangeTree: bad dimension");
}
RangeTree::~RangeTree() = default;
RangeTree::RangeTree(RangeTree&&) noexcept = default;
RangeTree& RangeTree::operator=(RangeTree&&) noexcept = default;

bool RangeTree::less(std::uint32_t a, std::uint32_t b, int j) const {
  const Rec& x = recs_[a];
  const Rec& y = recs_[b];
  if (x.key[j] != y.key[j]) return x.key[j] < y.key[j];
  if (x.tag != y.tag) return x.tag < y.tag;
  return a < b;
}

bool RangeTree::ge_lo(std::uint32_t a, int j, const KeyBound& lo) const {
  const Rec& x = recs_[a];
  return x.key[j] > lo.v || (x.key[j] == lo.v && x.tag >= lo.tag);
}

bool RangeTree::le_hi(std::uint32_t a, int j, const KeyBound& hi) const {
  const Rec& x = recs_[a];
  return x.key[j] < hi.v || (x.key[j] == hi.v && x.tag <= hi.tag);
}

bool RangeTree::inside_from(std::uint32_t a, int j, const KeyRange& r) const {
  for (int k = j; k < dims_; ++k)
    if (!ge_lo(a, k, r.lo[k]) || !le_hi(a, k, r.hi[k])) return false;
  return true;
}

double RangeTree::weight(Id tag) const {
  auto it = by_tag_.find(tag);
  if (it == by_tag_.end()) throw contract_error("RangeTree: unknown tag");
  return recs_[it->second].w;
}

std::unique_ptr<RangeTree::Node> RangeTree::build(std::vector<std::uint32_t>& recs, int j) const {
  std::sort(recs.begin(), recs.end(), [&](std::uint32_t a, std::uint32_t b) { return less(a, b, j); });
  return build_sorted(recs, 0, recs.size(), j);
}

std::unique_ptr<RangeTree::Node> RangeTree::build_sorted(const std::vector<std::uint32_t>& recs, std::size_t b,
                                                         std::size_t e, int j) const {
  if (b >= e) return nullptr;
  std::size_t m = b + (e - b) / 2;
  auto t = std::make_unique<Node>();
  t->rec = recs[m];
  t->l = build_sorted(recs, b, m, j);
  t->r = build_sorted(recs, m + 1, e, j);
  t->size = static_cast<std::uint32_t>(e - b);
  t->min_rec = recs[b];
  t->max_rec = recs[e - 1];
  t->sum = recs_[t->rec].w;
  t->cnt = recs_[t->rec].w > 0 ? 1 : 0;
  if (t->l) {
    t->sum += t->l->sum;
    t->cnt += t->l->cnt;
  }
  if (t->r) {
    t->sum += t->r->sum;
    t->cnt += t->r->cnt;
  }
  if (j + 1 < dims_ && t->size > kScan) {
    std::vector<std::uint32_t> sub(recs.begin() + static_cast<std::ptrdiff_t>(b),
                                   recs.begin() + static_cast<std::ptrdiff_t>(e));
    t->assoc = build(sub, j + 1);
  }
  return t;
}

void RangeTree::collect(const Node* t, std::vector<std::uint32_t>& out) const {
  if (!t) return;
  collect(t->l.get(), out);
  out.push_back(t->rec);
  collect(t->r.get(), out);
}

void RangeTree::insert_at(std::unique_ptr<Node>& root, int j, std::uint32_t rec) {
  std::vector<std::unique_ptr<Node>*> path;
  std::unique_ptr<Node>* p = &root;
  while (*p) {
    path.push_back(p);
    p = less(rec, (*p)->rec, j) ? &(*p)->l : &(*p)->r;
  }
  *p = std::make_unique<Node>();
  (*p)->rec = rec;
  (*p)->min_rec = (*p)->max_rec = rec;
  (*p)->sum = recs_[rec].w;
  (*p)->cnt = recs_[rec].w > 0 ? 1 : 0;

  const double w = recs_[rec].w;
  for (auto* q : path) {
    Node* t = q->get();
    ++t->size;
    t->sum += w;
    t->cnt += w > 0 ? 1 : 0;
    if (less(rec, t->min_rec, j)) t->min_rec = rec;
    if (less(t->max_rec, rec, j)) t->max_rec = rec;
    if (j + 1 < dims_) {
      if (t->assoc) {
        insert_at(t->assoc, j + 1, rec);
      } else if (t->size > kScan) {
        std::vector<std::uint32_t> sub;
        sub.reserve(t->size);
        collect(t, sub);
        t->assoc = build(sub, j + 1);
      }
    }
  }
  for (auto* q : path) {
    Node* t = q->get();
    std::uint32_t ls = t->l ? t->l->size : 0;
    std::uint32_t rs = t->r ? t->r->size : 0;
    if (static_cast<double>(std::max(ls, rs) + 1) > kAlpha * (t->size + 1)) {
      std::vector<std::uint32_t> sub;
      sub.reserve(t->size);
      collect(t, sub);
      *q = build_sorted(sub, 0, sub.size(), j);
      break;
    }
  }
}

void RangeTree::add_at(Node* t, int j, std::uint32_t rec, double dw, int dcnt) {
  while (t) {
    t->sum += dw;
    t->cnt += dcnt;
    if (t->assoc) add_at(t->assoc.get(), j + 1, rec, dw, dcnt);
    if (t->rec == rec) return;
    t = less(rec, t->rec, j) ? t->l.get() : t->r.get();
  }
  throw contract_error("RangeTree: record not found during weight update");
}

void RangeTree::insert(const Key& key, Id tag, double w) {
  if (by_tag_.count(tag)) throw contract_error("RangeTree: duplicate tag");
  if (!(w >= 0)) throw contract_error("RangeTree: negative weight");
  if (recs_.size() >= std::numeric_limits<std::uint32_t>::max() - 1) rebuild_all();
  auto rec = static_cast<std::uint32_t>(recs_.size());
  recs_.push_back({key, tag, w});
  by_tag_[tag] = rec;
  if (w > 0) ++live_;
  insert_at(root_, 0, rec);
}

void RangeTree::add_weight(Id tag, double dw) {
  auto it = by_tag_.find(tag);
  if (it == by_tag_.end()) throw contract_error("RangeTree: unknown tag");
  std::uint32_t rec = it->second;
  double before = recs_[rec].w;
  double after = before + dw;
  if (after < 0) throw contract_error("RangeTree: weight underflow");
  int dcnt = (after > 0 ? 1 : 0) - (before > 0 ? 1 : 0);
  recs_[rec].w = after;
  live_ = static_cast<std::size_t>(static_cast<std::int64_t>(live_) + dcnt);
  add_at(root_.get(), 0, rec, dw, dcnt);
}

void RangeTree::erase(Id tag) {
  auto it = by_tag_.find(tag);
  if (it == by_tag_.end()) throw contract_error("RangeTree: erase of unknown tag");
  std::uint32_t rec = it->second;
  double w = recs_[rec].w;
  if (w != 0) {
    recs_[rec].w = 0;
    if (w > 0) --live_;
    add_at(root_.get(), 0, rec, -w, w > 0 ? -1 : 0);
  }
  by_tag_.erase(it);
  ++dead_;
  if (dead_ > 64 && dead_ > live_) rebuild_all();
}

void RangeTree::rebuild_all() {
  std::vector<Rec> kept;
  kept.reserve(by_tag_.size());
  for (auto& [tag, rec] : by_tag_) kept.push_back(recs_[rec]);
  std::sort(kept.begin(), kept.end(), [](const Rec& a, const Rec& b) { return a.tag < b.tag; });
  recs_ = std::move(kept);
  by_tag_.clear();
  std::vector<std::uint32_t> all(recs_.size());
  for (std::uint32_t i = 0; i < recs_.size(); ++i) {
    by_tag_[recs_[i].tag] = i;
    all[i] = i;
  }
  dead_ = 0;
  root_ = build(all, 0);
}

template <class Visit>
bool RangeTree::walk(const Node* t, int j, const KeyRange& r, Visit& visit) const {
  if (!t || t->cnt == 0) return false;
  if (!le_hi(t->min_rec, j, r.hi[j]) || !ge_lo(t->max_rec, j, r.lo[j])) return false;
  if (ge_lo(t->min_rec, j, r.lo[j]) && le_hi(t->max_rec, j, r.hi[j])) {
    if (j + 1 == dims_) return visit.whole(t);
    if (t->assoc) return walk(t->assoc.get(), j + 1, r, visit);
    // small subtree, scan remaining coordinates directly
    std::vector<const Node*> stack{t};
    while (!stack.empty()) {
      const Node* u = stack.back();
      stack.pop_back();
      if (recs_[u->rec].w > 0 && inside_from(u->rec, j + 1, r) && visit.one(u->rec)) return true;
      if (u->l) stack.push_back(u->l.get());
      if (u->r) stack.push_back(u->r.get());
    }
    return false;
  }
  if (recs_[t->rec].w > 0 && inside_from(t->rec, j, r) && visit.one(t->rec)) return true;
  if (walk(t->l.get(), j, r, visit)) return true;
  return walk(t->r.get(), j, r, visit);
}

double RangeTree::sum(const KeyRange& r) const {
  struct {
    const RangeTree* self;
    double s = 0;
    bool whole(const Node* t) {
      s += t->sum;
      return false;
    }
    bool one(std::uint32_t rec) {
      s += self->recs_[rec].w;
      return false;
    }
  } v{this};
  walk(root_.get(), 0, r, v);
  return v.s;
}

std::int64_t RangeTree::count(const KeyRange& r) const {
  struct {
    std::int64_t c = 0;
    bool whole(const Node* t) {
      c += t->cnt;
      return false;
    }
    bool one(std::uint32_t) {
      ++c;
      return false;
    }
  } v;
  walk(root_.get(), 0, r, v);
  return v.c;
}

std::optional<Id> RangeTree::any(const KeyRange& r) const {
  struct {
    const RangeTree* self;
    std::optional<Id> found;
    bool whole(const Node* t) {
      while (t) {
        if (self->recs_[t->rec].w > 0) {
          found = self->recs_[t->rec].tag;
          return true;
        }
        t = (t->l && t->l->cnt > 0) ? t->l.get() : t->r.get();
      }
      return false;
    }
    bool one(std::uint32_t rec) {
      found = self->recs_[rec].tag;
      return true;
    }
  } v{this, std::nullopt};
  walk(root_.get(), 0, r, v);
  return v.found;
}

bool RangeTree::check_node(const Node* t, int j) const {
  if (!t) return true;
  std::uint32_t size = 1;
  double sum = recs_[t->rec].w;
  std::int64_t cnt = recs_[t->rec].w > 0 ? 1 : 0;
  std::uint32_t mn = t->rec, mx = t->rec;
  for (const Node* c : {t->l.get(), t->r.get()}) {
    if (!c) continue;
    if (!check_node(c, j)) return false;
    size += c->size;
    sum += c->sum;
    cnt += c->cnt;
    if (less(c->min_rec, mn, j)) mn = c->min_rec;
    if (less(mx, c->max_rec, j)) mx = c->max_rec;
  }
  if (t->l && !less(t->l->max_rec, t->rec, j)) return false;
  if (t->r && !less(t->rec, t->r->min_rec, j)) return false;
  if (size != t->size || cnt != t->cnt || mn != t->min_rec || mx != t->max_rec) return false;
  if (std::abs(sum - t->sum) > 1e-9 * std::max(1.0, std::abs(sum))) return false;
  if (t->assoc) {
    if (t->assoc->size != t->size || !check_node(t->assoc.get(), j + 1)) return false;
  } else if (j + 1 < dims_ && t->size > kScan) {
    return false;
  }
  return true;
}

bool RangeTree::check() const { return check_node(root_.get(), 0); }

}  // namespace gdis::detail
