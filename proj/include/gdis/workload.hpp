#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gdis/engine.hpp"

namespace gdis {

// Bad flags, malformed workloads, or events that do not fit the run.
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Op { insert, erase, query_size, query_weight, query_solution };

struct Event {
  Op op = Op::insert;
  Id id = 0;
  std::vector<std::pair<double, double>> coords;
  double weight = 1;

  bool operator==(const Event&) const = default;
};

std::string op_name(Op op);
Event parse_event(const std::string& line);
std::string format_event(const Event& e);
std::vector<Event> read_workload(std::istream& in);
void write_workload(std::ostream& out, const std::vector<Event>& events);

struct GenSpec {
  std::size_t events = 1000;  // updates; queries come on top
  int dim = 1;
  double space = 1024;
  double min_size = 1;
  double max_size = 64;
  std::string size_dist = "uniform";  // uniform | loguniform
  double max_weight = 1;
  bool integer_weights = false;
  double churn = 0;
  std::size_t max_live = 0;  // 0 = unbounded
  std::size_t query_every = 0;
  std::string shape = "cube";  // cube | rect
  std::uint64_t seed = 1;
};

std::vector<Event> gen_workload(const GenSpec& spec);

struct RunConfig {
  Algo algo = Algo::uint;
  int dim = 1;
  double space = 1024;
  double epsilon = 0.25;
  double max_weight = 0;  // 0 = no bound on input weights
  std::string offsets = "random:4";
  std::uint64_t seed = 1;
  bool oracle = false;
  EngineOptions engine;
};

struct LatencyStats {
  std::size_t count = 0;
  double p50 = 0;
  double p95 = 0;
  double max = 0;
  double mean = 0;
};

LatencyStats summarize(std::vector<double> ns);

struct QueryRecord {
  std::size_t event = 0;
  Op op = Op::query_size;
  std::size_t size = 0;
  double weight = 0;
  std::vector<Id> ids;
  std::optional<double> oracle_weight;
  std::optional<double> ratio;
};

struct RunReport {
  RunConfig config;
  double N = 0;
  double eps = 0;
  std::vector<double> offsets;
  LatencyStats insert_latency;
  LatencyStats delete_latency;
  std::vector<QueryRecord> queries;
  std::size_t oracle_skipped = 0;
  std::size_t violations = 0;
  std::vector<std::string> violation_notes;

  std::string to_json(bool with_latency = true) const;
};

std::vector<double> resolve_offsets(const std::string& mode, int d, double eps, double N, std::uint64_t seed);
RunReport run_workload(const RunConfig& cfg, const std::vector<Event>& events);

}  // namespace gdis
