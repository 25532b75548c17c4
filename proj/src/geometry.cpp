#include "gdis/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace gdis {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) throw contract_error("dimension out of range: " + std::to_string(d));
}

}  // namespace

bool Box::is_cube() const {
  for (int j = 1; j < dim; ++j)
    if (edge(j) != edge(0)) return false;
  return true;
}

Box make_interval(Id id, double lo, double hi, double weight) {
  Box b;
  b.id = id;
  b.dim = 1;
  b.lo[0] = lo;
  b.hi[0] = hi;
  b.weight = weight;
  return b;
}

Box make_box(Id id, const std::vector<std::pair<double, double>>& ranges, double weight) {
  check_dim(static_cast<int>(ranges.size()));
  Box b;
  b.id = id;
  b.dim = static_cast<int>(ranges.size());
  for (int j = 0; j < b.dim; ++j) {
    b.lo[j] = ranges[j].first;
    b.hi[j] = ranges[j].second;
  }
  b.weight = weight;
  return b;
}

Box make_cube(Id id, const std::vector<double>& lo, double side, double weight) {
  check_dim(static_cast<int>(lo.size()));
  Box b;
  b.id = id;
  b.dim = static_cast<int>(lo.size());
  for (int j = 0; j < b.dim; ++j) {
    b.lo[j] = lo[j];
    b.hi[j] = lo[j] + side;
  }
  b.weight = weight;
  return b;
}

QueryBox make_query(const std::vector<std::pair<double, double>>& ranges) {
  check_dim(static_cast<int>(ranges.size()));
  QueryBox q;
  q.dim = static_cast<int>(ranges.size());
  for (int j = 0; j < q.dim; ++j) {
    q.lo[j] = ranges[j].first;
    q.hi[j] = ranges[j].second;
  }
  return q;
}

QueryBox closure(const Box& b) {
  QueryBox q;
  q.dim = b.dim;
  q.lo = b.lo;
  q.hi = b.hi;
  return q;
}

bool intersects_open(const Box& a, const Box& b) {
  if (a.dim != b.dim) throw contract_error("intersects_open: dimension mismatch");
  for (int j = 0; j < a.dim; ++j)
    if (!(a.lo[j] < b.hi[j] && b.lo[j] < a.hi[j])) return false;
  return true;
}

bool intersects_open(const Box& a, const QueryBox& q) {
  if (a.dim != q.dim) throw contract_error("intersects_open: dimension mismatch");
  for (int j = 0; j < a.dim; ++j)
    if (!(a.lo[j] < q.hi[j] && q.lo[j] < a.hi[j])) return false;
  return true;
}

bool contained_in(const Box& c, const QueryBox& q) {
  if (c.dim != q.dim) throw contract_error("contained_in: dimension mismatch");
  for (int j = 0; j < c.dim; ++j)
    if (!(q.lo[j] <= c.lo[j] && c.hi[j] <= q.hi[j])) return false;
  return true;
}

std::vector<Coords> vertices(const Box& c) {
  std::vector<Coords> out;
  out.reserve(std::size_t{1} << c.dim);
  for (unsigned mask = 0; mask < (1u << c.dim); ++mask) {
    Coords v{};
    for (int j = 0; j < c.dim; ++j) v[j] = (mask >> j) & 1u ? c.hi[j] : c.lo[j];
    out.push_back(v);
  }
  return out;
}

void validate(const Box& b, double N, bool require_cube) {
  check_dim(b.dim);
  for (int j = 0; j < b.dim; ++j) {
    if (!(b.lo[j] >= 0 && b.lo[j] < b.hi[j] && b.hi[j] <= N))
      throw contract_error("box outside [0,N]: " + to_string(b));
    if (!(b.edge(j) >= 1 && b.edge(j) <= N)) throw contract_error("edge length outside [1,N]: " + to_string(b));
  }
  if (!(b.weight >= 1)) throw contract_error("weight below 1: " + to_string(b));
  if (require_cube && !b.is_cube()) throw contract_error("not a hypercube: " + to_string(b));
}

bool pairwise_independent(const std::vector<Box>& boxes) {
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j)
      if (intersects_open(boxes[i], boxes[j])) return false;
  return true;
}

double total_weight(const std::vector<Box>& boxes) {
  double w = 0;
  for (const auto& b : boxes) w += b.weight;
  return w;
}

std::string to_string(const Box& b) {
  std::ostringstream os;
  os << '#' << b.id << ' ';
  for (int j = 0; j < b.dim; ++j) os << (j ? "x" : "") << '(' << b.lo[j] << ',' << b.hi[j] << ')';
  os << " w=" << b.weight;
  return os.str();
}

}  // namespace gdis
