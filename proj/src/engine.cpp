#include "gdis/engine.hpp"

#include "gdis/hyperrectangles.hpp"
#include "gdis/unweighted_hypercubes.hpp"
#include "gdis/unweighted_intervals.hpp"
#include "gdis/weighted_hypercubes.hpp"
#include "gdis/weighted_intervals.hpp"

namespace gdis {

Algo parse_algo(const std::string& s) {
  if (s == "uint") return Algo::uint;
  if (s == "uhc") return Algo::uhc;
  if (s == "whc") return Algo::whc;
  if (s == "wint") return Algo::wint;
  if (s == "wrect") return Algo::wrect;
  throw contract_error("unknown algorithm '" + s + "'");
}

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::uint: return "uint";
    case Algo::uhc: return "uhc";
    case Algo::whc: return "whc";
    case Algo::wint: return "wint";
    case Algo::wrect: return "wrect";
  }
  return "?";
}

bool algo_requires_cubes(Algo a) { return a == Algo::uhc || a == Algo::whc; }

Ensemble::Ensemble(std::vector<std::unique_ptr<DynamicEngine>> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw contract_error("ensemble needs at least one instance");
}

void Ensemble::insert(const Box& c) {
  for (auto& p : parts_) p->insert(c);
}

void Ensemble::erase(Id id) {
  for (auto& p : parts_) p->erase(id);
}

std::size_t Ensemble::best() const {
  std::size_t b = 0;
  double bw = parts_[0]->solution_weight();
  for (std::size_t i = 1; i < parts_.size(); ++i) {
    const double w = parts_[i]->solution_weight();
    if (w > bw) {
      bw = w;
      b = i;
    }
  }
  return b;
}

std::size_t Ensemble::solution_size() const { return parts_[best()]->solution_size(); }
double Ensemble::solution_weight() const { return parts_[best()]->solution_weight(); }
std::vector<Box> Ensemble::solution() const { return parts_[best()]->solution(); }
bool Ensemble::weighted() const { return parts_[0]->weighted(); }

std::size_t Ensemble::audit() const {
  std::size_t bad = 0;
  for (const auto& p : parts_) bad += p->audit();
  return bad;
}

std::unique_ptr<DynamicEngine> make_instance(Algo algo, const GridConfig& cfg, const EngineOptions& opt) {
  switch (algo) {
    case Algo::uint: return std::make_unique<UnweightedIntervalEngine>(cfg);
    case Algo::uhc: return std::make_unique<UnweightedHypercubeEngine>(cfg, opt);
    case Algo::whc: return std::make_unique<WeightedHypercubeEngine>(cfg, opt);
    case Algo::wint: return std::make_unique<WeightedIntervalEngine>(cfg, opt);
    case Algo::wrect:
      if (cfg.d == 1) return std::make_unique<WeightedIntervalEngine>(cfg, opt);
      return std::make_unique<HyperrectangleEngine>(cfg, opt);
  }
  throw contract_error("unknown algorithm");
}

std::unique_ptr<Ensemble> make_ensemble(Algo algo, const GridConfig& base, const std::vector<double>& offsets,
                                        const EngineOptions& opt) {
  std::vector<std::unique_ptr<DynamicEngine>> parts;
  if (algo == Algo::wrect && base.d > 1) {
    // The rectangle decomposition has no grid of its own; the offsets go to
    // the interval engines at the bottom of the recursion.
    EngineOptions o = opt;
    o.inner_offsets = offsets;
    parts.push_back(make_instance(algo, base, o));
  } else {
    for (double a : offsets) parts.push_back(make_instance(algo, base.with_offset(a), opt));
  }
  return std::make_unique<Ensemble>(std::move(parts));
}

}  // namespace gdis
