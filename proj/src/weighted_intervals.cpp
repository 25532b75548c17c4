#include "gdis/weighted_intervals.hpp"

#include <algorithm>
#include <cmath>

namespace gdis {

SparseSolver::SparseSolver(const std::map<int, BoxIndex>& classes, const std::vector<double>& starts, int max_count)
    : r_(max_count), pos_(starts) {
  for (const auto& [k, idx] : classes)
    idx.for_each_by_size([&](const Box& b) {
      pos_.push_back(b.hi[0]);
      return true;
    });
  std::sort(pos_.begin(), pos_.end());
  pos_.erase(std::unique(pos_.begin(), pos_.end()), pos_.end());
  cands_.resize(pos_.size());
  for (std::size_t p = 0; p < pos_.size(); ++p) {
    std::vector<Cand> raw;
    for (const auto& [k, idx] : classes)
      if (auto c = idx.successor_interval(pos_[p])) raw.push_back({c->hi[0], c->weight, index(c->hi[0]), *c});
    std::sort(raw.begin(), raw.end(), [](const Cand& a, const Cand& b) {
      if (a.hi != b.hi) return a.hi < b.hi;
      if (a.w != b.w) return a.w > b.w;
      return a.box.id < b.box.id;
    });
    // A candidate ending later is only useful when it is strictly heavier.
    double best = -1;
    for (auto& c : raw)
      if (c.w > best) {
        best = c.w;
        cands_[p].push_back(std::move(c));
      }
  }
  f_.assign(pos_.size() * (r_ + 1), 0.0);
  arg_.assign(pos_.size() * (r_ + 1), -1);
}

std::size_t SparseSolver::index(double t) const {
  auto it = std::lower_bound(pos_.begin(), pos_.end(), t);
  if (it == pos_.end() || *it != t) throw contract_error("sparse solver: unknown position");
  return static_cast<std::size_t>(it - pos_.begin());
}

void SparseSolver::solve(double t2) {
  t2_ = t2;
  const std::size_t w = r_ + 1;
  const auto end = static_cast<std::size_t>(std::lower_bound(pos_.begin(), pos_.end(), t2) - pos_.begin());
  // positions at or beyond t2 start empty chains
  std::fill(f_.begin() + static_cast<std::ptrdiff_t>(end * w), f_.end(), 0.0);
  std::fill(arg_.begin() + static_cast<std::ptrdiff_t>(end * w), arg_.end(), -1);
  for (std::size_t p = end; p-- > 0;) {
    const auto& cs = cands_[p];
    double* row = &f_[p * w];
    std::int32_t* arow = &arg_[p * w];
    std::fill(row + 1, row + w, 0.0);
    std::fill(arow + 1, arow + w, -1);
    for (std::size_t i = 0; i < cs.size() && cs[i].hi <= t2; ++i) {
      const double* next = &f_[cs[i].next * w];
      for (int r = 1; r <= r_; ++r) {
        const double v = cs[i].w + next[r - 1];
        if (v > row[r]) {
          row[r] = v;
          arow[r] = static_cast<std::int32_t>(i);
        }
      }
    }
  }
}

double SparseSolver::value(double t1) const { return f_[index(t1) * (r_ + 1) + r_]; }

std::vector<Box> SparseSolver::chain(double t1) const {
  std::vector<Box> out;
  std::size_t p = index(t1);
  for (int r = r_; r > 0; --r) {
    const auto a = arg_[p * (r_ + 1) + r];
    if (a < 0) break;
    const auto& c = cands_[p][a];
    out.push_back(c.box);
    p = c.next;
  }
  return out;
}

std::vector<Box> sparse_candidate(const std::map<int, BoxIndex>& classes, double t1, double t2, int max_count) {
  SparseSolver s(classes, {t1}, max_count);
  s.solve(t2);
  return s.chain(t1);
}

namespace {

std::optional<std::size_t> find_pos(const std::vector<double>& v, double t) {
  auto it = std::lower_bound(v.begin(), v.end(), t);
  if (it == v.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

std::optional<std::pair<std::size_t, std::size_t>> locate(const SegmentState& s, double t1, double t2) {
  auto r = find_pos(s.z, t1);
  auto e = find_pos(s.z, t2);
  auto c = find_pos(s.zall, t2);
  if (!r || !e || !c || !(t1 < t2)) return std::nullopt;
  return std::make_pair(*r, *c);
}

}  // namespace

WeightedIntervalEngine::WeightedIntervalEngine(const GridConfig& cfg, const EngineOptions& opt) : whc_(cfg, opt) {
  if (cfg.d != 1) throw contract_error("weighted intervals need d = 1");
  if (cfg.inv_eps > 8) throw contract_error("weighted intervals need epsilon >= 1/8");
  whc_.set_listeners([this](WeightedHypercubeEngine::CellT& q) { rebuild(q); },
                     [this](WeightedHypercubeEngine::CellT& q) { seg_.erase(q.id); });
}

void WeightedIntervalEngine::insert(const Box& c) { whc_.insert(c); }

void WeightedIntervalEngine::erase(Id id) { whc_.erase(id); }

double WeightedIntervalEngine::segment_cap(double base_weight) const {
  const auto& c = whc_.config();
  return std::pow(c.eps, 3 + c.inv_eps) * base_weight / c.log_n;
}

std::vector<double> WeightedIntervalEngine::coordinates(const WeightedHypercubeEngine::CellT& q) const {
  const auto& cfg = whc_.config();
  std::vector<double> z{q.bounds.lo[0], q.bounds.hi[0]};
  if (q.alg.points) {
    auto aux = build_aux_grid(*q.alg.points, q.bounds, segment_cap(q.alg.points->total_weight()));
    z.insert(z.end(), aux.z[0].begin(), aux.z[0].end());
  }
  const double step = cfg.eps * cell_side(q.id.level, cfg);
  const double base = q.id.level == 0 ? 0.0 : cfg.offset;
  for (auto k = static_cast<std::int64_t>(std::ceil((q.bounds.lo[0] - base) / step));; ++k) {
    const double v = base + static_cast<double>(k) * step;
    if (v > q.bounds.hi[0]) break;
    if (v >= q.bounds.lo[0]) z.push_back(v);
  }
  std::sort(z.begin(), z.end());
  z.erase(std::unique(z.begin(), z.end()), z.end());
  return z;
}

void WeightedIntervalEngine::rebuild(WeightedHypercubeEngine::CellT& q) {
  SegmentState s;
  s.z = coordinates(q);
  s.zall = s.z;
  std::vector<const SegmentState*> child_state;
  for (const auto* ch : whc_.grid().children(q)) {
    auto it = seg_.find(ch->id);
    if (it == seg_.end()) continue;
    s.kids.push_back(ch->id);
    child_state.push_back(&it->second);
    s.zall.insert(s.zall.end(), it->second.z.begin(), it->second.z.end());
  }
  std::sort(s.zall.begin(), s.zall.end());
  s.zall.erase(std::unique(s.zall.begin(), s.zall.end()), s.zall.end());
  const std::size_t n = s.zall.size();
  s.val.assign(n * n, 0.0);
  s.src.assign(n * n, -1);

  SparseSolver solver(q.all_by_class, s.zall, whc_.config().inv_eps);
  std::vector<std::size_t> at(n);
  for (std::size_t i = 0; i < n; ++i) at[i] = solver.index(s.zall[i]);
  // positions of every coordinate in each child's z and zall, or -1
  std::vector<std::vector<std::int32_t>> child_z, child_all;
  for (const auto* cs : child_state) {
    auto& cz = child_z.emplace_back(n, -1);
    auto& ca = child_all.emplace_back(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      if (auto k = find_pos(cs->z, s.zall[i])) cz[i] = static_cast<std::int32_t>(*k);
      if (auto k = find_pos(cs->zall, s.zall[i])) ca[i] = static_cast<std::int32_t>(*k);
    }
  }
  for (std::size_t j = 1; j < n; ++j) {
    solver.solve(s.zall[j]);
    for (std::size_t i = 0; i < j; ++i) {
      double v = solver.value_at(at[i]);
      std::int8_t src = v > 0 ? 0 : -1;
      for (std::size_t r = 0; r < child_state.size(); ++r) {
        const auto zi = child_z[r][i], zj = child_z[r][j];
        if (zi < 0 || zj < 0) continue;
        const auto& cs = *child_state[r];
        const double dv = cs.g[static_cast<std::size_t>(zi) * cs.zall.size() + static_cast<std::size_t>(child_all[r][j])];
        if (dv > 0 && dv >= v) {
          v = dv;
          src = static_cast<std::int8_t>(r + 1);
        }
      }
      s.val[i * n + j] = v;
      s.src[i * n + j] = src;
    }
  }

  // Exact heaviest set of non-overlapping subsegments, one row per left end.
  s.row_start.resize(s.z.size());
  s.g.assign(s.z.size() * n, 0.0);
  s.back.assign(s.z.size() * n, -3);
  for (std::size_t rr = 0; rr < s.z.size(); ++rr) {
    const std::size_t s1 = *find_pos(s.zall, s.z[rr]);
    s.row_start[rr] = s1;
    double* g = &s.g[rr * n];
    std::int32_t* back = &s.back[rr * n];
    back[s1] = -2;
    for (std::size_t j = s1 + 1; j < n; ++j) {
      g[j] = g[j - 1];
      back[j] = -2;
      for (std::size_t u = s1; u < j; ++u) {
        const double v = g[u] + s.val[u * n + j];
        if (v > g[j]) {
          g[j] = v;
          back[j] = static_cast<std::int32_t>(u);
        }
      }
    }
  }
  seg_[q.id] = std::move(s);
}

const SegmentState* WeightedIntervalEngine::segments(const CellId& id) const {
  auto it = seg_.find(id);
  return it == seg_.end() ? nullptr : &it->second;
}

std::optional<double> WeightedIntervalEngine::segment_weight(const CellId& id, double t1, double t2) const {
  const auto* s = segments(id);
  if (!s) return std::nullopt;
  auto loc = locate(*s, t1, t2);
  if (!loc) return std::nullopt;
  return s->g[loc->first * s->zall.size() + loc->second];
}

void WeightedIntervalEngine::expand_part(const CellId& id, const SegmentState& s, std::size_t i, std::size_t j,
                                         std::vector<Box>& out) const {
  const std::size_t n = s.zall.size();
  const auto src = s.src[i * n + j];
  if (src < 0) return;
  if (src == 0) {
    const auto* q = whc_.grid().find(id);
    auto part = sparse_candidate(q->all_by_class, s.zall[i], s.zall[j], whc_.config().inv_eps);
    out.insert(out.end(), part.begin(), part.end());
    return;
  }
  const CellId& kid = s.kids[src - 1];
  const auto* cs = segments(kid);
  auto loc = cs ? locate(*cs, s.zall[i], s.zall[j]) : std::nullopt;
  if (!loc) {
    ++broken_;
    return;
  }
  expand(kid, *cs, loc->first, loc->second, out);
}

void WeightedIntervalEngine::expand(const CellId& id, const SegmentState& s, std::size_t row, std::size_t col,
                                    std::vector<Box>& out) const {
  const std::size_t n = s.zall.size();
  std::size_t j = col;
  while (j > s.row_start[row]) {
    const auto b = s.back[row * n + j];
    if (b == -2) {
      --j;
      continue;
    }
    expand_part(id, s, static_cast<std::size_t>(b), j, out);
    j = static_cast<std::size_t>(b);
  }
}

std::vector<Box> WeightedIntervalEngine::segment_solution(const CellId& id, double t1, double t2) const {
  std::vector<Box> out;
  const auto* s = segments(id);
  if (!s) return out;
  auto loc = locate(*s, t1, t2);
  if (loc) expand(id, *s, loc->first, loc->second, out);
  return out;
}

double WeightedIntervalEngine::solution_weight() const {
  return segment_weight(root_cell(), 0, whc_.config().N).value_or(0.0);
}

std::vector<Box> WeightedIntervalEngine::solution() const { return segment_solution(root_cell(), 0, whc_.config().N); }

std::size_t WeightedIntervalEngine::audit() const {
  std::size_t bad = whc_.audit();
  const std::size_t before = broken_;
  auto sol = solution();
  bad += broken_ - before;
  if (!pairwise_independent(sol)) ++bad;
  const double w = solution_weight();
  if (std::abs(total_weight(sol) - w) > 1e-9 * std::max(1.0, w)) ++bad;
  if (seg_.size() != whc_.grid().cells().size()) ++bad;
  for (const auto& [id, q] : whc_.grid().cells()) {
    const auto* s = segments(id);
    if (!s) {
      ++bad;
      continue;
    }
    if (s->z.front() != q->bounds.lo[0] || s->z.back() != q->bounds.hi[0]) ++bad;
  }
  return bad;
}

}  // namespace gdis
