#include "gdis/unweighted_hypercubes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gdis {

std::size_t aligned_box_count(const CoordLists& z, int d) {
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    const std::size_t m = z[j].size();
    const std::size_t pairs = m < 2 ? 0 : m * (m - 1) / 2;
    if (pairs != 0 && total > std::numeric_limits<std::size_t>::max() / pairs)
      return std::numeric_limits<std::size_t>::max();
    total *= pairs;
  }
  return total;
}

std::vector<QueryBox> aligned_boxes(const CoordLists& z, int d) {
  std::vector<QueryBox> out;
  QueryBox cur;
  cur.dim = d;
  auto rec = [&](auto&& self, int j) -> void {
    if (j == d) {
      out.push_back(cur);
      return;
    }
    const auto& zj = z[j];
    for (std::size_t a = 0; a < zj.size(); ++a)
      for (std::size_t b = a + 1; b < zj.size(); ++b) {
        cur.lo[j] = zj[a];
        cur.hi[j] = zj[b];
        self(self, j + 1);
      }
  };
  rec(rec, 0);
  return out;
}

CoordLists aligned_coords(const QueryBox& cell, const std::vector<Box>& boxes, int d) {
  CoordLists z;
  for (int j = 0; j < d; ++j) {
    z[j].push_back(cell.lo[j]);
    z[j].push_back(cell.hi[j]);
    for (const auto& b : boxes) {
      z[j].push_back(std::clamp(b.lo[j], cell.lo[j], cell.hi[j]));
      z[j].push_back(std::clamp(b.hi[j], cell.lo[j], cell.hi[j]));
    }
    std::sort(z[j].begin(), z[j].end());
    z[j].erase(std::unique(z[j].begin(), z[j].end()), z[j].end());
  }
  return z;
}

UnweightedHypercubeEngine::UnweightedHypercubeEngine(const GridConfig& cfg, const EngineOptions& opt)
    : opt_(opt), grid_(cfg, IndexNeeds{false, true, false, false}) {
  hooks_.rebuild = [this](Grid<UHPayload>::CellT& q) { rebuild(q); };
}

double UnweightedHypercubeEngine::threshold() const {
  const auto& c = grid_.config();
  return std::pow(c.d, c.d) * c.log_n * std::pow(c.inv_eps, c.d + 1);
}

std::size_t UnweightedHypercubeEngine::addition_cap() const {
  const auto& c = grid_.config();
  return static_cast<std::size_t>(std::pow(static_cast<double>(c.d) * c.inv_eps, c.d));
}

void UnweightedHypercubeEngine::insert(const Box& c) {
  validate(c, grid_.config().N, true);
  grid_.update(Action::insert, c, hooks_);
}

void UnweightedHypercubeEngine::erase(Id id) {
  if (!grid_.has(id)) throw contract_error("delete of unknown id " + std::to_string(id));
  grid_.update(Action::erase, grid_.object(id), hooks_);
}

std::optional<Box> UnweightedHypercubeEngine::select(const Grid<UHPayload>::CellT& q,
                                                     const std::vector<Box>& bar) const {
  const int d = grid_.config().d;
  auto z = aligned_coords(q.bounds, bar, d);
  std::optional<Box> best;
  auto better = [](const Box& a, const Box& b) { return a.size() < b.size() || (a.size() == b.size() && a.id < b.id); };
  if (aligned_box_count(z, d) <= opt_.aligned_budget) {
    for (const auto& box : aligned_boxes(z, d)) {
      bool blocked = false;
      for (const auto& m : bar)
        if (intersects_open(m, box)) {
          blocked = true;
          break;
        }
      if (blocked) continue;
      if (auto c = q.assigned.smallest_contained(box))
        if (!best || better(*c, *best)) best = c;
    }
    return best;
  }
  // Equivalent scan: a cube avoids bar iff the aligned box obtained by
  // snapping its bounds outward to z avoids bar.
  q.assigned.for_each_by_size([&](const Box& c) {
    for (const auto& m : bar)
      if (intersects_open(m, c)) return true;
    best = c;
    return false;
  });
  return best;
}

void UnweightedHypercubeEngine::rebuild(Grid<UHPayload>::CellT& q) {
  UHPayload p;
  std::size_t child_union = 0;
  auto kids = grid_.children(q);
  for (auto* ch : kids) child_union += ch->alg.cardinality;
  if (static_cast<double>(child_union) > threshold()) {
    p.linked = true;
    for (auto* ch : kids) p.links.push_back(ch->id);
    p.cardinality = child_union;
    q.alg = std::move(p);
    return;
  }
  for (auto* ch : kids) expand_into(*ch, p.explicit_list);
  const std::size_t cap = addition_cap();
  const int d = grid_.config().d;
  auto add = [&](const Box& c) {
    if (p.added_sizes.size() >= cap) {
      ++cap_hits_;
      return false;
    }
    p.explicit_list.push_back(c);
    p.added_sizes.push_back(c.size());
    return true;
  };
  bool scan = false;
  while (true) {
    if (aligned_box_count(aligned_coords(q.bounds, p.explicit_list, d), d) > opt_.aligned_budget) {
      scan = true;
      break;
    }
    auto c = select(q, p.explicit_list);
    if (!c || !add(*c)) break;
  }
  if (scan) {
    // The coordinate lists only grow, so the remaining selections are the
    // size-ordered cubes avoiding everything chosen before them.
    q.assigned.for_each_by_size([&](const Box& c) {
      for (const auto& m : p.explicit_list)
        if (intersects_open(m, c)) return true;
      return add(c);
    });
  }
  p.cardinality = p.explicit_list.size();
  q.alg = std::move(p);
}

std::size_t UnweightedHypercubeEngine::solution_size() const {
  const auto* r = grid_.root();
  return r ? r->alg.cardinality : 0;
}

void UnweightedHypercubeEngine::expand_into(const Grid<UHPayload>::CellT& q, std::vector<Box>& out) const {
  if (!q.alg.linked) {
    out.insert(out.end(), q.alg.explicit_list.begin(), q.alg.explicit_list.end());
    return;
  }
  for (const auto& id : q.alg.links)
    if (const auto* ch = grid_.find(id)) expand_into(*ch, out);
}

std::vector<Box> UnweightedHypercubeEngine::expand(const CellId& id) const {
  std::vector<Box> out;
  if (const auto* q = grid_.find(id)) expand_into(*q, out);
  return out;
}

std::vector<Box> UnweightedHypercubeEngine::solution() const { return expand(root_cell()); }

std::size_t UnweightedHypercubeEngine::audit() const {
  std::size_t bad = cap_hits_;
  for (const auto& [id, q] : grid_.cells()) {
    if (expand(id).size() != q->alg.cardinality) ++bad;
    if (!q->alg.linked && !pairwise_independent(q->alg.explicit_list)) ++bad;
    if (!std::is_sorted(q->alg.added_sizes.begin(), q->alg.added_sizes.end())) ++bad;
  }
  return bad;
}

}  // namespace gdis
