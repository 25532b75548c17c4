#include "gdis/grid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace gdis {

namespace {

std::int64_t floor_div2(std::int64_t k) { return k >= 0 ? k / 2 : -((-k + 1) / 2); }

}  // namespace

GridConfig GridConfig::make(double n, int d, double eps, double offset) {
  if (!(n >= 1)) throw contract_error("N must be at least 1");
  if (d < 1 || d > kMaxDim) throw contract_error("dimension must be in [1," + std::to_string(kMaxDim) + "]");
  if (!(eps > 0 && eps <= 1)) throw contract_error("epsilon must be in (0,1]");
  GridConfig c;
  c.log_n = 0;
  while (std::ldexp(1.0, c.log_n) < n) ++c.log_n;
  if (c.log_n < 1) c.log_n = 1;
  c.N = std::ldexp(1.0, c.log_n);
  int t = 0;
  while (std::ldexp(1.0, -t) > eps) ++t;
  c.inv_eps = 1 << t;
  c.eps = std::ldexp(1.0, -t);
  c.d = d;
  return c.with_offset(offset);
}

GridConfig GridConfig::with_offset(double a) const {
  if (!(a >= 0 && a < N)) throw contract_error("offset must lie in [0,N)");
  GridConfig c = *this;
  c.offset = a;
  return c;
}

std::string to_string(const CellId& c) {
  std::ostringstream os;
  os << "L" << c.level << "(";
  for (int j = 0; j < kMaxDim; ++j) os << (j ? "," : "") << c.k[j];
  os << ")";
  return os.str();
}

double class_floor(int k, double eps) { return std::pow(1.0 + eps, k); }

int weight_class(double w, double eps) {
  if (!(w > 0)) throw contract_error("weight_class: weight must be positive");
  int k = static_cast<int>(std::floor(std::log(w) / std::log1p(eps)));
  while (class_floor(k, eps) > w) --k;
  while (class_floor(k + 1, eps) <= w) ++k;
  return k;
}

int level_of(double s, const GridConfig& cfg) {
  const double top = cfg.eps * cfg.N / cfg.d;
  if (s >= top) return 0;
  for (int l = 1; l <= cfg.log_n; ++l)
    if (s >= std::ldexp(top, -(l - 1))) return l;
  return cfg.log_n;
}

int level_of(const Box& c, const GridConfig& cfg) { return level_of(c.size(), cfg); }

double cell_side(int level, const GridConfig& cfg) { return level == 0 ? cfg.N : std::ldexp(cfg.N, -(level - 1)); }

CellId root_cell() { return CellId{}; }

QueryBox cell_bounds(const CellId& id, const GridConfig& cfg) {
  QueryBox q;
  q.dim = cfg.d;
  const double side = cell_side(id.level, cfg);
  for (int j = 0; j < cfg.d; ++j) {
    if (id.level == 0) {
      q.lo[j] = 0;
      q.hi[j] = cfg.N;
    } else {
      q.lo[j] = std::max(0.0, cfg.offset + static_cast<double>(id.k[j]) * side);
      q.hi[j] = std::min(cfg.N, cfg.offset + static_cast<double>(id.k[j] + 1) * side);
    }
  }
  return q;
}

bool cell_degenerate(const CellId& id, const GridConfig& cfg) {
  QueryBox q = cell_bounds(id, cfg);
  for (int j = 0; j < cfg.d; ++j)
    if (!(q.lo[j] < q.hi[j])) return true;
  return false;
}

CellId parent_of(const CellId& id) {
  if (id.level <= 1) return root_cell();
  CellId p;
  p.level = id.level - 1;
  for (int j = 0; j < kMaxDim; ++j) p.k[j] = floor_div2(id.k[j]);
  return p;
}

std::vector<CellId> child_candidates(const CellId& id, const GridConfig& cfg) {
  std::vector<CellId> out;
  if (id.level >= cfg.log_n) return out;
  for (unsigned mask = 0; mask < (1u << cfg.d); ++mask) {
    CellId c;
    c.level = id.level + 1;
    for (int j = 0; j < cfg.d; ++j) {
      int bit = (mask >> j) & 1u;
      c.k[j] = id.level == 0 ? bit - 1 : 2 * id.k[j] + bit;
    }
    if (!cell_degenerate(c, cfg)) out.push_back(c);
  }
  return out;
}

std::optional<CellId> cell_at(const Box& c, int level, const GridConfig& cfg) {
  if (level == 0) return root_cell();
  CellId id;
  id.level = level;
  const double side = cell_side(level, cfg);
  for (int j = 0; j < cfg.d; ++j) {
    auto k = static_cast<std::int64_t>(std::floor((c.lo[j] - cfg.offset) / side));
    while (cfg.offset + static_cast<double>(k + 1) * side <= c.lo[j]) ++k;
    while (cfg.offset + static_cast<double>(k) * side > c.lo[j]) --k;
    id.k[j] = k;
  }
  if (!contained_in(c, cell_bounds(id, cfg))) return std::nullopt;
  return id;
}

std::vector<CellId> cell_chain(const Box& c, const GridConfig& cfg) {
  std::vector<CellId> chain;
  const int l = level_of(c, cfg);
  auto q = cell_at(c, l, cfg);
  if (!q) return chain;
  CellId cur = *q;
  chain.push_back(cur);
  while (cur.level > 0) {
    cur = parent_of(cur);
    chain.push_back(cur);
  }
  return chain;
}

OffsetParams offset_params(int d, double eps) {
  OffsetParams p;
  const double ratio = 2.0 * d / eps;
  p.K = 0;
  while (std::ldexp(1.0, p.K) < ratio) ++p.K;
  const auto inv_eps = static_cast<std::int64_t>(std::llround(1.0 / eps));
  const std::int64_t e = p.K * inv_eps - p.K + 1;
  const double count = std::ldexp(static_cast<double>(d) * static_cast<double>(inv_eps), static_cast<int>(e));
  p.per_shift = count >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(count);
  return p;
}

double offset_value(int d, double eps, double N, int shift, std::uint64_t r) {
  const OffsetParams p = offset_params(d, eps);
  const auto inv_eps = static_cast<long>(std::llround(1.0 / eps));
  const int log_n = static_cast<int>(std::llround(std::log2(N)));
  const long double base = static_cast<long double>(eps) * N / d;
  const long double n = N;
  long double total = 0;
  for (int j = -1; j <= log_n; ++j) {
    const long e = static_cast<long>(shift) * p.K + static_cast<long>(j + 1) * p.K * inv_eps - p.K + 1;
    if (e > 16000) break;
    const long double delta = std::ldexp(base, static_cast<int>(-e));
    total += std::fmod(static_cast<long double>(r) * delta, n);
  }
  return static_cast<double>(std::fmod(total, n));
}

std::vector<double> build_offsets(int d, double eps, double N, std::size_t max_count) {
  const OffsetParams p = offset_params(d, eps);
  const auto inv_eps = static_cast<std::uint64_t>(std::llround(1.0 / eps));
  if (p.per_shift > max_count || p.per_shift * inv_eps > max_count)
    throw contract_error("deterministic offset ensemble too large (" + std::to_string(inv_eps) + " x " +
                         std::to_string(p.per_shift) + "); use randomized offsets");
  std::vector<double> out;
  for (std::uint64_t s = 0; s < inv_eps; ++s)
    for (std::uint64_t r = 0; r < p.per_shift; ++r) out.push_back(offset_value(d, eps, N, static_cast<int>(s), r));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> sample_offsets(int d, double eps, double N, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw contract_error("offset count must be positive");
  const OffsetParams p = offset_params(d, eps);
  const auto inv_eps = static_cast<std::uint64_t>(std::llround(1.0 / eps));
  std::mt19937_64 rng(seed);
  std::vector<double> out{0.0};
  for (std::size_t i = 1; i < count; ++i) {
    auto s = static_cast<int>(rng() % inv_eps);
    std::uint64_t r = rng() % p.per_shift;
    double a = offset_value(d, eps, N, s, r);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

}  // namespace gdis
