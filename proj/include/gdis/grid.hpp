#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gdis/geometry.hpp"
#include "gdis/range_index.hpp"

namespace gdis {

enum class Action { insert, erase };

struct GridConfig {
  double N = 1;
  int log_n = 0;
  int d = 1;
  double eps = 0.5;
  int inv_eps = 2;
  double offset = 0;

  // Rounds N up to a power of two and eps down to 1/2^t.
  static GridConfig make(double n, int d, double eps, double offset = 0);
  GridConfig with_offset(double a) const;
};

struct CellId {
  int level = 0;
  std::array<std::int64_t, kMaxDim> k{};

  auto operator<=>(const CellId&) const = default;
  bool operator==(const CellId&) const = default;
};

std::string to_string(const CellId& c);

// (1+eps)^k
double class_floor(int k, double eps);
// k with (1+eps)^k <= w < (1+eps)^(k+1)
int weight_class(double w, double eps);

int level_of(double s, const GridConfig& cfg);
int level_of(const Box& c, const GridConfig& cfg);
double cell_side(int level, const GridConfig& cfg);
// Closed bounds of a cell after clipping to [0,N]^d.
QueryBox cell_bounds(const CellId& id, const GridConfig& cfg);
bool cell_degenerate(const CellId& id, const GridConfig& cfg);
CellId root_cell();
CellId parent_of(const CellId& id);
std::vector<CellId> child_candidates(const CellId& id, const GridConfig& cfg);
// Cell of the given level holding c, if c lies inside one.
std::optional<CellId> cell_at(const Box& c, int level, const GridConfig& cfg);
// Q_l ... Q_0 for the object's level l, or empty when c straddles a level-l boundary.
std::vector<CellId> cell_chain(const Box& c, const GridConfig& cfg);

struct OffsetParams {
  int K = 0;
  std::uint64_t per_shift = 0;
};
OffsetParams offset_params(int d, double eps);
// a_r for level shift a' and index r, reduced modulo N.
double offset_value(int d, double eps, double N, int shift, std::uint64_t r);
// Full deterministic ensemble, deduplicated; throws when larger than max_count.
std::vector<double> build_offsets(int d, double eps, double N, std::size_t max_count = 256);
// 0 followed by count-1 uniform draws from the ensemble.
std::vector<double> sample_offsets(int d, double eps, double N, std::size_t count, std::uint64_t seed);

struct IndexNeeds {
  bool all = true;
  bool assigned = true;
  bool all_by_class = false;
  bool assigned_by_class = false;
};

template <class Payload>
struct Cell {
  CellId id;
  QueryBox bounds;
  BoxIndex all;
  BoxIndex assigned;
  std::map<int, BoxIndex> all_by_class;
  std::map<int, BoxIndex> assigned_by_class;
  std::size_t population = 0;  // |C(Q)|
  std::uint64_t version = 0;
  Payload alg;

  Cell(const CellId& c, const QueryBox& b, int d) : id(c), bounds(b), all(d), assigned(d) {}
};

// One offset instance of the hierarchical grid with its cell registry and the
// bottom-up update driver.
template <class Payload>
class Grid {
 public:
  using CellT = Cell<Payload>;

  Grid(GridConfig cfg, IndexNeeds needs) : cfg_(cfg), needs_(needs) {}

  const GridConfig& config() const { return cfg_; }
  double max_weight() const { return max_weight_; }
  std::size_t live() const { return objects_.size(); }
  std::size_t pooled() const { return pool_.size(); }
  bool has(Id id) const { return objects_.count(id) != 0; }
  const Box& object(Id id) const { return objects_.at(id); }
  const std::unordered_map<Id, Box>& objects() const { return objects_; }

  CellT* find(const CellId& id) {
    auto it = cells_.find(id);
    return it == cells_.end() ? nullptr : it->second.get();
  }
  const CellT* find(const CellId& id) const {
    auto it = cells_.find(id);
    return it == cells_.end() ? nullptr : it->second.get();
  }
  CellT* root() { return find(root_cell()); }
  const CellT* root() const { return find(root_cell()); }
  const std::map<CellId, std::unique_ptr<CellT>>& cells() const { return cells_; }

  std::vector<CellT*> children(const CellT& c) {
    std::vector<CellT*> out;
    for (const auto& k : child_candidates(c.id, cfg_))
      if (auto* ch = find(k)) out.push_back(ch);
    return out;
  }
  std::vector<const CellT*> children(const CellT& c) const {
    std::vector<const CellT*> out;
    for (const auto& k : child_candidates(c.id, cfg_))
      if (auto* ch = find(k)) out.push_back(ch);
    return out;
  }
  // Cells from c up to the root, c first.
  std::vector<CellT*> ancestry(const CellId& c) {
    std::vector<CellT*> out;
    CellId cur = c;
    while (true) {
      if (auto* q = find(cur)) out.push_back(q);
      if (cur.level == 0) break;
      cur = parent_of(cur);
    }
    return out;
  }

  struct Hooks {
    // Called with the chain before any index changes.
    std::function<void(const std::vector<CellId>&)> before;
    std::function<void(CellT&)> rebuild;
    std::function<void(CellT&)> removed;
  };

  // Applies the update to the registry, then rebuilds the chain bottom-up.
  // Returns the chain (empty when the object is pooled).
  std::vector<CellId> update(Action action, const Box& c, const Hooks& hooks) {
    if (action == Action::insert) {
      if (c.dim != cfg_.d) throw contract_error("update: dimension mismatch");
      if (objects_.count(c.id)) throw contract_error("insert of live id " + std::to_string(c.id));
      objects_.emplace(c.id, c);
      max_weight_ = std::max(max_weight_, c.weight);
    } else {
      auto it = objects_.find(c.id);
      if (it == objects_.end()) throw contract_error("delete of unknown id " + std::to_string(c.id));
    }
    const Box obj = objects_.at(c.id);
    auto chain = cell_chain(obj, cfg_);
    if (chain.empty()) {
      if (action == Action::insert) {
        pool_.insert(obj.id);
      } else {
        pool_.erase(obj.id);
        objects_.erase(obj.id);
      }
      return chain;
    }
    if (hooks.before) hooks.before(chain);
    const int k = weight_class(obj.weight, cfg_.eps);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const bool own = i == 0;
      if (action == Action::insert) {
        auto& slot = cells_[chain[i]];
        if (!slot) slot = std::make_unique<CellT>(chain[i], cell_bounds(chain[i], cfg_), cfg_.d);
        CellT& q = *slot;
        ++q.population;
        if (needs_.all) q.all.insert(obj);
        if (needs_.all_by_class) class_index(q.all_by_class, k).insert(obj);
        if (own && needs_.assigned) q.assigned.insert(obj);
        if (own && needs_.assigned_by_class) class_index(q.assigned_by_class, k).insert(obj);
      } else {
        CellT& q = *cells_.at(chain[i]);
        --q.population;
        if (needs_.all) q.all.erase(obj.id);
        if (needs_.all_by_class) drop(q.all_by_class, k, obj.id);
        if (own && needs_.assigned) q.assigned.erase(obj.id);
        if (own && needs_.assigned_by_class) drop(q.assigned_by_class, k, obj.id);
      }
    }
    if (action == Action::erase) {
      objects_.erase(obj.id);
      for (const auto& id : chain) {
        auto it = cells_.find(id);
        if (it->second->population == 0) {
          if (hooks.removed) hooks.removed(*it->second);
          cells_.erase(it);
        }
      }
    }
    for (const auto& id : chain) {
      if (CellT* q = find(id)) {
        if (hooks.rebuild) hooks.rebuild(*q);
        ++q->version;
      }
    }
    return chain;
  }

 private:
  BoxIndex& class_index(std::map<int, BoxIndex>& m, int k) {
    auto it = m.find(k);
    if (it == m.end()) it = m.try_emplace(k, cfg_.d).first;
    return it->second;
  }
  void drop(std::map<int, BoxIndex>& m, int k, Id id) {
    auto it = m.find(k);
    it->second.erase(id);
    if (it->second.is_empty()) m.erase(it);
  }

  GridConfig cfg_;
  IndexNeeds needs_;
  std::map<CellId, std::unique_ptr<CellT>> cells_;
  std::unordered_map<Id, Box> objects_;
  std::unordered_set<Id> pool_;
  double max_weight_ = 1;
};

}  // namespace gdis
