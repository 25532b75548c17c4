#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gdis/geometry.hpp"
#include "gdis/grid.hpp"

namespace gdis {

// One dynamic independent-set engine (a single offset instance, or an
// ensemble of them).
class DynamicEngine {
 public:
  virtual ~DynamicEngine() = default;
  virtual void insert(const Box& c) = 0;
  virtual void erase(Id id) = 0;
  virtual std::size_t solution_size() const = 0;
  virtual double solution_weight() const = 0;
  virtual std::vector<Box> solution() const = 0;
  virtual bool weighted() const = 0;
  // Re-derives cached values and structural invariants; returns the number of failures.
  virtual std::size_t audit() const { return 0; }
};

enum class Algo { uint, uhc, whc, wint, wrect };

Algo parse_algo(const std::string& s);
std::string algo_name(Algo a);
bool algo_requires_cubes(Algo a);

struct EngineOptions {
  // Aligned boxes enumerated per selection before switching to the
  // equivalent direct scan over the assigned cubes.
  std::size_t aligned_budget = 256;
  // Re-check every auxiliary grid right after construction.
  bool check_aux = false;
  // Offsets used by the inner interval engines of the rectangle engine.
  std::vector<double> inner_offsets{0.0};
};

// Max-over-instances wrapper; every instance sees the same updates.
class Ensemble : public DynamicEngine {
 public:
  explicit Ensemble(std::vector<std::unique_ptr<DynamicEngine>> parts);

  void insert(const Box& c) override;
  void erase(Id id) override;
  std::size_t solution_size() const override;
  double solution_weight() const override;
  std::vector<Box> solution() const override;
  bool weighted() const override;
  std::size_t audit() const override;

  std::size_t instances() const { return parts_.size(); }
  const DynamicEngine& instance(std::size_t i) const { return *parts_[i]; }
  DynamicEngine& instance(std::size_t i) { return *parts_[i]; }
  // Index of the instance currently reported.
  std::size_t best() const;

 private:
  std::vector<std::unique_ptr<DynamicEngine>> parts_;
};

std::unique_ptr<DynamicEngine> make_instance(Algo algo, const GridConfig& cfg, const EngineOptions& opt = {});
std::unique_ptr<Ensemble> make_ensemble(Algo algo, const GridConfig& base, const std::vector<double>& offsets,
                                        const EngineOptions& opt = {});

}  // namespace gdis
