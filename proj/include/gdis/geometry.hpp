#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdis {

inline constexpr int kMaxDim = 3;

using Id = std::uint64_t;
using Coords = std::array<double, kMaxDim>;

// Raised when a caller breaks an operation's precondition.
class contract_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Open axis-parallel box (lo, hi) with a weight.
struct Box {
  Id id = 0;
  int dim = 1;
  Coords lo{};
  Coords hi{};
  double weight = 1.0;

  double edge(int j) const { return hi[j] - lo[j]; }
  // Edge length along the first axis; the side length for hypercubes.
  double size() const { return hi[0] - lo[0]; }
  bool is_cube() const;
};

// Closed per-dimension bounds [lo, hi].
struct QueryBox {
  int dim = 1;
  Coords lo{};
  Coords hi{};
};

Box make_interval(Id id, double lo, double hi, double weight = 1.0);
Box make_box(Id id, const std::vector<std::pair<double, double>>& ranges, double weight = 1.0);
Box make_cube(Id id, const std::vector<double>& lo, double side, double weight = 1.0);
QueryBox make_query(const std::vector<std::pair<double, double>>& ranges);
QueryBox closure(const Box& b);

bool intersects_open(const Box& a, const Box& b);
// Open box a against closed query region q viewed as its open interior.
bool intersects_open(const Box& a, const QueryBox& q);
bool contained_in(const Box& c, const QueryBox& q);
std::vector<Coords> vertices(const Box& c);

// Throws contract_error unless 1 <= edge <= N, 0 <= lo < hi <= N, weight >= 1.
void validate(const Box& b, double N, bool require_cube);

bool pairwise_independent(const std::vector<Box>& boxes);
double total_weight(const std::vector<Box>& boxes);

std::string to_string(const Box& b);

}  // namespace gdis
