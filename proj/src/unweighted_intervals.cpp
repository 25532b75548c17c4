#include "gdis/unweighted_intervals.hpp"

namespace gdis {

std::vector<Box> greedy_exact_sub(const BoxIndex& idx, double from) {
  std::vector<Box> out;
  double t = from;
  while (auto c = idx.successor_interval(t)) {
    out.push_back(*c);
    t = c->hi[0];
  }
  return out;
}

UnweightedIntervalEngine::UnweightedIntervalEngine(const GridConfig& cfg)
    : grid_(cfg, IndexNeeds{true, false, false, false}) {
  if (cfg.d != 1) throw contract_error("unweighted intervals need d = 1");
  hooks_.rebuild = [this](Grid<UIPayload>::CellT& q) { rebuild(q); };
}

double UnweightedIntervalEngine::threshold() const {
  const auto& c = grid_.config();
  return static_cast<double>(c.inv_eps) * c.inv_eps * c.log_n;
}

void UnweightedIntervalEngine::insert(const Box& c) {
  validate(c, grid_.config().N, false);
  grid_.update(Action::insert, c, hooks_);
}

void UnweightedIntervalEngine::erase(Id id) {
  if (!grid_.has(id)) throw contract_error("delete of unknown id " + std::to_string(id));
  grid_.update(Action::erase, grid_.object(id), hooks_);
}

void UnweightedIntervalEngine::rebuild(Grid<UIPayload>::CellT& q) {
  UIPayload p;
  std::size_t child_union = 0;
  auto kids = grid_.children(q);
  for (auto* ch : kids) child_union += ch->alg.cardinality;
  if (static_cast<double>(child_union) > threshold()) {
    p.linked = true;
    for (auto* ch : kids) p.links.push_back(ch->id);
    p.cardinality = child_union;
  } else {
    p.explicit_list = greedy_exact_sub(q.all, q.bounds.lo[0]);
    p.cardinality = p.explicit_list.size();
  }
  q.alg = std::move(p);
}

std::size_t UnweightedIntervalEngine::solution_size() const {
  const auto* r = grid_.root();
  return r ? r->alg.cardinality : 0;
}

void UnweightedIntervalEngine::expand_into(const Grid<UIPayload>::CellT& q, std::vector<Box>& out) const {
  if (!q.alg.linked) {
    out.insert(out.end(), q.alg.explicit_list.begin(), q.alg.explicit_list.end());
    return;
  }
  for (const auto& id : q.alg.links)
    if (const auto* ch = grid_.find(id)) expand_into(*ch, out);
}

std::vector<Box> UnweightedIntervalEngine::expand(const CellId& id) const {
  std::vector<Box> out;
  if (const auto* q = grid_.find(id)) expand_into(*q, out);
  return out;
}

std::vector<Box> UnweightedIntervalEngine::solution() const { return expand(root_cell()); }

std::size_t UnweightedIntervalEngine::audit() const {
  std::size_t bad = 0;
  for (const auto& [id, q] : grid_.cells()) {
    auto sol = expand(id);
    if (sol.size() != q->alg.cardinality) ++bad;
    if (!q->alg.linked && !pairwise_independent(q->alg.explicit_list)) ++bad;
    if (q->alg.linked)
      for (const auto& l : q->alg.links)
        if (!grid_.find(l)) ++bad;
  }
  return bad;
}

}  // namespace gdis
