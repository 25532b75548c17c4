#include "gdis/weighted_hypercubes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gdis {

namespace {

double slab_weight(const WeightedPointIndex& p, const QueryBox& cell, int j, double a, double b, bool a_open,
                   bool b_open) {
  QueryBox q = cell;
  q.lo[j] = a;
  q.hi[j] = b;
  Openness o;
  o.lo_open[j] = a_open;
  o.hi_open[j] = b_open;
  return p.range_weight(q, o);
}

bool smaller(const Box& a, const Box& b) { return a.size() < b.size() || (a.size() == b.size() && a.id < b.id); }

void insert_sorted(std::vector<double>& z, double v) {
  auto it = std::lower_bound(z.begin(), z.end(), v);
  if (it == z.end() || *it != v) z.insert(it, v);
}

}  // namespace

AuxGrid build_aux_grid_bisect(const WeightedPointIndex& p, const QueryBox& cell, double cap) {
  AuxGrid g;
  g.base_weight = p.total_weight();
  g.cap = cap;
  const double inf = std::numeric_limits<double>::infinity();
  for (int j = 0; j < cell.dim; ++j) {
    const double lo = cell.lo[j], hi = cell.hi[j];
    auto& zs = g.z[j];
    zs.push_back(lo);
    double z = lo;
    while (z < hi) {
      if (slab_weight(p, cell, j, z, hi, true, true) <= cap) {
        zs.push_back(hi);
        break;
      }
      // W(z, lb] <= cap < W(z, hb]; the next cut is the first point
      // coordinate where the half-open weight exceeds the cap.
      double lb = z, hb = hi;
      while (true) {
        const double a = std::nextafter(lb, inf), b = std::nextafter(hb, -inf);
        if (a > b || p.count_in(j, a, b) == 0) break;
        const double m = p.median_split(j, a, b);
        if (slab_weight(p, cell, j, z, m, true, false) > cap)
          hb = m;
        else
          lb = m;
      }
      zs.push_back(hb);
      z = hb;
    }
  }
  return g;
}

AuxGrid build_aux_grid(const WeightedPointIndex& p, const QueryBox& cell, double cap) {
  AuxGrid g;
  g.base_weight = p.total_weight();
  g.cap = cap;
  const auto pts = p.points();
  for (int j = 0; j < cell.dim; ++j) {
    const double lo = cell.lo[j], hi = cell.hi[j];
    std::vector<std::pair<double, double>> proj;
    for (const auto& [c, w] : pts) {
      bool in = true;
      for (int i = 0; i < cell.dim && in; ++i) in = cell.lo[i] <= c[i] && c[i] <= cell.hi[i];
      if (in) proj.emplace_back(c[j], w);
    }
    std::sort(proj.begin(), proj.end());
    // coordinates strictly inside (lo, hi) with their summed weights
    std::vector<double> xs, pre{0.0};
    for (const auto& [x, w] : proj) {
      if (x <= lo || x >= hi) continue;
      if (xs.empty() || xs.back() != x) {
        xs.push_back(x);
        pre.push_back(pre.back());
      }
      pre.back() += w;
    }
    auto& zs = g.z[j];
    zs.push_back(lo);
    std::size_t start = 0;  // first coordinate above the last cut
    while (true) {
      if (pre.back() - pre[start] <= cap) {
        zs.push_back(hi);
        break;
      }
      std::size_t k = start;
      while (pre[k + 1] - pre[start] <= cap) ++k;
      zs.push_back(xs[k]);
      start = k + 1;
    }
  }
  return g;
}

double whc_aux_cap(const GridConfig& cfg, double base_weight) {
  return std::pow(cfg.eps, cfg.d + 2) * base_weight / (std::pow(cfg.d, cfg.d + 1) * cfg.log_n);
}

double whc_aux_limit(const GridConfig& cfg) {
  return std::pow(cfg.d, cfg.d + 1) * cfg.log_n * std::pow(cfg.inv_eps, cfg.d + 2) + 1;
}

std::size_t aux_grid_violations(const AuxGrid& g, const WeightedPointIndex& p, const QueryBox& cell, double limit) {
  std::size_t bad = 0;
  const double tol = 1e-9 * std::max(1.0, g.cap);
  for (int j = 0; j < cell.dim; ++j) {
    const auto& z = g.z[j];
    if (z.size() < 2 || z.front() != cell.lo[j] || z.back() != cell.hi[j]) {
      ++bad;
      continue;
    }
    if (static_cast<double>(z.size()) > limit) ++bad;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
      if (!(z[i] < z[i + 1])) ++bad;
      if (slab_weight(p, cell, j, z[i], z[i + 1], true, true) > g.cap + tol) ++bad;
    }
  }
  return bad;
}

QueryBox snap_outward(const CoordLists& z, const Box& c) {
  QueryBox b;
  b.dim = c.dim;
  for (int j = 0; j < c.dim; ++j) {
    auto up = std::upper_bound(z[j].begin(), z[j].end(), c.lo[j]);
    b.lo[j] = up == z[j].begin() ? c.lo[j] : *std::prev(up);
    auto dn = std::lower_bound(z[j].begin(), z[j].end(), c.hi[j]);
    b.hi[j] = dn == z[j].end() ? c.hi[j] : *dn;
  }
  return b;
}

WeightedHypercubeEngine::WeightedHypercubeEngine(const GridConfig& cfg, const EngineOptions& opt)
    : opt_(opt), grid_(cfg, IndexNeeds{true, true, true, true}) {
  hooks_.before = [this](const std::vector<CellId>& chain) { before(chain); };
  hooks_.rebuild = [this](CellT& q) { rebuild(q); };
  hooks_.removed = [this](CellT& q) {
    if (removed_) removed_(q);
  };
}

void WeightedHypercubeEngine::set_listeners(std::function<void(CellT&)> rebuilt, std::function<void(CellT&)> removed) {
  rebuilt_ = std::move(rebuilt);
  removed_ = std::move(removed);
}

std::size_t WeightedHypercubeEngine::iteration_cap() const {
  const auto& c = grid_.config();
  const double per_class = std::pow(static_cast<double>(c.d) * c.inv_eps, c.d);
  return static_cast<std::size_t>(per_class * (weight_class(grid_.max_weight(), c.eps) + 1));
}

void WeightedHypercubeEngine::insert(const Box& c) {
  validate(c, grid_.config().N, true);
  grid_.update(Action::insert, c, hooks_);
}

void WeightedHypercubeEngine::erase(Id id) {
  if (!grid_.has(id)) throw contract_error("delete of unknown id " + std::to_string(id));
  grid_.update(Action::erase, grid_.object(id), hooks_);
}

WeightedPointIndex& WeightedHypercubeEngine::points(CellT& q) {
  if (!q.alg.points) q.alg.points = std::make_unique<WeightedPointIndex>(grid_.config().d);
  return *q.alg.points;
}

void WeightedHypercubeEngine::push_vertices(const CellId& origin, const Box& c, double sign) {
  const auto vs = vertices(c);
  for (auto* q : grid_.ancestry(origin)) {
    auto& p = points(*q);
    for (const auto& v : vs) p.add_weight(v, sign * c.weight);
  }
}

void WeightedHypercubeEngine::before(const std::vector<CellId>& chain) {
  for (const auto& id : chain) {
    CellT* q = grid_.find(id);
    if (!q) continue;
    for (const auto& c : q->alg.tilde) push_vertices(id, c, -1.0);
    for (const auto& c : q->alg.bar) bar_ids_.erase(c.id);
    q->alg.tilde.clear();
    q->alg.bar.clear();
    q->alg.added.clear();
  }
}

bool WeightedHypercubeEngine::addible(const CellT& q, const CoordLists& z, const Box& c) const {
  const int k = weight_class(c.weight, grid_.config().eps);
  const double w = q.alg.points ? q.alg.points->range_weight(snap_outward(z, c)) : 0.0;
  return class_floor(k, grid_.config().eps) >= 2 * w;
}

std::optional<Box> WeightedHypercubeEngine::select(const CellT& q, const CoordLists& z) const {
  const int d = grid_.config().d;
  const double eps = grid_.config().eps;
  std::optional<Box> best;
  if (aligned_box_count(z, d) <= opt_.aligned_budget) {
    for (const auto& a : aligned_boxes(z, d)) {
      const double wa = q.alg.points ? q.alg.points->range_weight(a) : 0.0;
      for (auto it = q.assigned_by_class.rbegin(); it != q.assigned_by_class.rend(); ++it) {
        if (class_floor(it->first, eps) < 2 * wa) break;
        if (auto c = it->second.smallest_contained(a))
          if (!best || smaller(*c, *best)) best = c;
      }
    }
    return best;
  }
  // Containment in some qualifying aligned box is decided by the smallest
  // aligned box around the cube.
  q.assigned.for_each_by_size([&](const Box& c) {
    if (!addible(q, z, c)) return true;
    best = c;
    return false;
  });
  return best;
}

void WeightedHypercubeEngine::rebuild(CellT& q) {
  const auto& cfg = grid_.config();
  auto& pl = q.alg;
  auto& p = points(q);
  pl.added.clear();
  AuxGrid aux = build_aux_grid(p, q.bounds, whc_aux_cap(cfg, p.total_weight()));
  if (opt_.check_aux) {
    ++aux_checks_;
    aux_violations_ += aux_grid_violations(aux, p, q.bounds, whc_aux_limit(cfg));
  }
  CoordLists z = std::move(aux.z);
  const std::size_t cap = iteration_cap();
  while (auto c = select(q, z)) {
    if (pl.added.size() >= cap) {
      ++cap_hits_;
      break;
    }
    std::erase_if(pl.bar, [&](const Box& m) {
      if (!intersects_open(m, *c)) return false;
      bar_ids_.erase(m.id);
      return true;
    });
    const int k = weight_class(c->weight, cfg.eps);
    for (const auto& [k2, prev] : pl.added)
      if (k2 == k && intersects_open(prev, *c)) ++class_violations_;
    pl.bar.push_back(*c);
    pl.tilde.push_back(*c);
    pl.added.emplace_back(k, *c);
    bar_ids_.insert(c->id);
    push_vertices(q.id, *c, 1.0);
    for (int j = 0; j < cfg.d; ++j) {
      insert_sorted(z[j], c->lo[j]);
      insert_sorted(z[j], c->hi[j]);
    }
  }
  pl.subtree_bar = pl.bar.size();
  for (const auto* ch : grid_.children(q)) pl.subtree_bar += ch->alg.subtree_bar;
  if (rebuilt_) rebuilt_(q);
}

double WeightedHypercubeEngine::weight_estimate() const {
  const auto* r = grid_.root();
  return r && r->alg.points ? r->alg.points->total_weight() : 0.0;
}

void WeightedHypercubeEngine::emit(const CellT& q, const std::vector<Box>& blockers, std::vector<Box>& out) const {
  std::vector<Box> next;
  for (const auto& b : blockers)
    if (intersects_open(b, q.bounds)) next.push_back(b);
  const std::size_t inherited = next.size();
  for (const auto& c : q.alg.bar) {
    bool blocked = false;
    for (std::size_t i = 0; i < inherited && !blocked; ++i) blocked = intersects_open(next[i], c);
    if (blocked) continue;
    out.push_back(c);
    next.push_back(c);
  }
  for (const auto* ch : grid_.children(q))
    if (ch->alg.subtree_bar > 0) emit(*ch, next, out);
}

std::vector<Box> WeightedHypercubeEngine::solution() const {
  std::vector<Box> out;
  if (const auto* r = grid_.root()) emit(*r, {}, out);
  return out;
}

std::size_t WeightedHypercubeEngine::audit() const {
  std::size_t bad = cap_hits_ + class_violations_;
  std::map<CellId, std::map<Coords, double>> expected;
  for (const auto& [id, q] : grid_.cells()) {
    const auto& pl = q->alg;
    if (!pairwise_independent(pl.bar)) ++bad;
    for (const auto& c : pl.bar) {
      if (std::none_of(pl.tilde.begin(), pl.tilde.end(), [&](const Box& t) { return t.id == c.id; })) ++bad;
      if (!bar_ids_.count(c.id)) ++bad;
    }
    for (const auto& c : pl.tilde) {
      if (!q->assigned.contains(c.id)) ++bad;
      CellId cur = id;
      while (true) {
        for (const auto& v : vertices(c)) expected[cur][v] += c.weight;
        if (cur.level == 0) break;
        cur = parent_of(cur);
      }
    }
    std::size_t sub = pl.bar.size();
    for (const auto* ch : grid_.children(*q)) sub += ch->alg.subtree_bar;
    if (sub != pl.subtree_bar) ++bad;
  }
  for (const auto& [id, q] : grid_.cells()) {
    const auto& want = expected[id];
    std::map<Coords, double> have;
    if (q->alg.points)
      for (const auto& [pt, w] : q->alg.points->points()) have[pt] = w;
    if (have.size() != want.size()) {
      ++bad;
      continue;
    }
    for (const auto& [pt, w] : want) {
      auto it = have.find(pt);
      if (it == have.end() || std::abs(it->second - w) > 1e-9 * std::max(1.0, w)) ++bad;
    }
  }
  return bad;
}

}  // namespace gdis
