#include "gdis/hyperrectangles.hpp"

#include <cmath>

namespace gdis {

namespace {

bool has_multiple(double x, double y, double step) {
  double m = std::ceil(x / step);
  if (m < 1) m = 1;
  return m * step < y;
}

}  // namespace

ClassGroupKey classify_rect(double x, double y, double N) {
  const int log_n = static_cast<int>(std::llround(std::log2(N)));
  if (!has_multiple(x, y, std::ldexp(N, -log_n))) return {};
  int lo = 1, hi = log_n;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (has_multiple(x, y, std::ldexp(N, -mid)))
      hi = mid;
    else
      lo = mid + 1;
  }
  const double step = std::ldexp(N, -lo);
  return {lo, static_cast<std::int64_t>(std::max(1.0, std::ceil(x / step)))};
}

ClassGroupKey classify_rect_scan(double x, double y, double N) {
  const int log_n = static_cast<int>(std::llround(std::log2(N)));
  for (int c = 1; c <= log_n; ++c) {
    const double step = std::ldexp(N, -c);
    for (std::int64_t k = 1; static_cast<double>(k) * step < N; ++k) {
      const double v = static_cast<double>(k) * step;
      if (x <= v && v < y) return {c, k};
    }
  }
  return {};
}

Box project_tail(const Box& r) {
  Box b;
  b.id = r.id;
  b.dim = r.dim - 1;
  b.weight = r.weight;
  for (int j = 1; j < r.dim; ++j) {
    b.lo[j - 1] = r.lo[j];
    b.hi[j - 1] = r.hi[j];
  }
  return b;
}

HyperrectangleEngine::HyperrectangleEngine(const GridConfig& cfg, const EngineOptions& opt) : cfg_(cfg), opt_(opt) {
  if (cfg.d < 2 || cfg.d > 3) throw contract_error("rectangle engine needs d in {2,3}");
}

void HyperrectangleEngine::insert(const Box& r) {
  validate(r, cfg_.N, false);
  if (rects_.count(r.id)) throw contract_error("insert of live id " + std::to_string(r.id));
  const auto key = classify_rect(r.lo[0], r.hi[0], cfg_.N);
  auto& g = classes_[key.c][key.k];
  if (!g.inner) {
    GridConfig inner = GridConfig::make(cfg_.N, cfg_.d - 1, cfg_.eps);
    g.inner = cfg_.d == 2 ? std::unique_ptr<DynamicEngine>(make_ensemble(Algo::wint, inner, opt_.inner_offsets, opt_))
                          : std::make_unique<HyperrectangleEngine>(inner, opt_);
  }
  g.inner->insert(project_tail(r));
  g.members.insert(r.id);
  rects_.emplace(r.id, r);
  keys_.emplace(r.id, key);
  refresh(key.c);
}

void HyperrectangleEngine::erase(Id id) {
  auto it = keys_.find(id);
  if (it == keys_.end()) throw contract_error("delete of unknown id " + std::to_string(id));
  const auto key = it->second;
  auto& groups = classes_.at(key.c);
  auto& g = groups.at(key.k);
  g.inner->erase(id);
  g.members.erase(id);
  if (g.members.empty()) groups.erase(key.k);
  if (groups.empty()) classes_.erase(key.c);
  rects_.erase(id);
  keys_.erase(it);
  refresh(key.c);
}

void HyperrectangleEngine::refresh(int c) {
  auto it = classes_.find(c);
  if (it == classes_.end()) {
    class_weight_.erase(c);
    return;
  }
  double w = 0;
  for (const auto& [k, g] : it->second) w += g.inner->solution_weight();
  class_weight_[c] = w;
}

int HyperrectangleEngine::best_class() const {
  int best = -1;
  double bw = -1;
  for (const auto& [c, w] : class_weight_)
    if (w > bw) {
      bw = w;
      best = c;
    }
  return best;
}

double HyperrectangleEngine::solution_weight() const {
  const int c = best_class();
  return c < 0 ? 0.0 : class_weight_.at(c);
}

std::vector<Box> HyperrectangleEngine::solution() const {
  std::vector<Box> out;
  const int c = best_class();
  if (c < 0) return out;
  for (const auto& [k, g] : classes_.at(c))
    for (const auto& b : g.inner->solution()) out.push_back(rects_.at(b.id));
  return out;
}

std::size_t HyperrectangleEngine::group_count() const {
  std::size_t n = 0;
  for (const auto& [c, groups] : classes_) n += groups.size();
  return n;
}

std::size_t HyperrectangleEngine::cross_group_violations() const {
  std::size_t bad = 0;
  for (const auto& [c, groups] : classes_)
    for (auto a = groups.begin(); a != groups.end(); ++a)
      for (auto b = std::next(a); b != groups.end(); ++b)
        for (Id x : a->second.members)
          for (Id y : b->second.members)
            if (intersects_open(rects_.at(x), rects_.at(y))) ++bad;
  return bad;
}

std::size_t HyperrectangleEngine::audit() const {
  std::size_t bad = cross_group_violations();
  for (const auto& [c, groups] : classes_) {
    double w = 0;
    for (const auto& [k, g] : groups) {
      w += g.inner->solution_weight();
      bad += g.inner->audit();
      for (Id id : g.members) {
        const auto& r = rects_.at(id);
        if (classify_rect(r.lo[0], r.hi[0], cfg_.N) != ClassGroupKey{c, k}) ++bad;
      }
    }
    auto it = class_weight_.find(c);
    if (it == class_weight_.end() || it->second != w) ++bad;
  }
  if (class_weight_.size() != classes_.size()) ++bad;
  auto sol = solution();
  if (!pairwise_independent(sol)) ++bad;
  return bad;
}

}  // namespace gdis
