#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gdis/workload.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kViolation = 2;

int run_gen(const gdis::GenSpec& spec, const std::string& out) {
  auto events = gdis::gen_workload(spec);
  if (out.empty() || out == "-") {
    gdis::write_workload(std::cout, events);
    return 0;
  }
  std::ofstream f(out);
  if (!f) throw gdis::usage_error("cannot write " + out);
  gdis::write_workload(f, events);
  return 0;
}

int run_replay(const gdis::RunConfig& cfg, const std::string& workload, const std::string& out) {
  std::vector<gdis::Event> events;
  if (workload.empty() || workload == "-") {
    events = gdis::read_workload(std::cin);
  } else {
    std::ifstream f(workload);
    if (!f) throw gdis::usage_error("cannot read " + workload);
    events = gdis::read_workload(f);
  }
  auto rep = gdis::run_workload(cfg, events);
  const std::string doc = rep.to_json();
  if (out.empty() || out == "-") {
    std::cout << doc << '\n';
  } else {
    std::ofstream f(out);
    if (!f) throw gdis::usage_error("cannot write " + out);
    f << doc << '\n';
  }
  if (rep.violations) {
    std::cerr << "invariant violations: " << rep.violations << '\n';
    for (const auto& n : rep.violation_notes) std::cerr << "  " << n << '\n';
    return kViolation;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic geometric independent set engines: workload generation and replay"};
  app.require_subcommand(1);

  gdis::GenSpec gen;
  std::string gen_out;
  auto* g = app.add_subcommand("gen", "Generate a JSON Lines workload");
  g->add_option("--events", gen.events, "Number of insert/delete events")->check(CLI::PositiveNumber);
  g->add_option("--dim", gen.dim, "Dimension")->check(CLI::Range(1, 3));
  g->add_option("--space", gen.space, "Space bound N");
  g->add_option("--min-size", gen.min_size, "Smallest edge length");
  g->add_option("--max-size", gen.max_size, "Largest edge length");
  g->add_option("--size-dist", gen.size_dist, "uniform | loguniform");
  g->add_option("--weights", gen.max_weight, "Largest weight W (1 = unit weights)");
  g->add_flag("--integer-weights", gen.integer_weights, "Draw integer weights in [1, W]");
  g->add_option("--churn", gen.churn, "Probability that an event deletes a live object");
  g->add_option("--max-live", gen.max_live, "Cap on live objects (0 = none)");
  g->add_option("--query-every", gen.query_every, "Emit a solution query after every k updates");
  g->add_option("--shape", gen.shape, "cube | rect");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen_out, "Output path (default stdout)");

  gdis::RunConfig run;
  std::string algo = "uint", workload, run_out;
  auto* r = app.add_subcommand("run", "Replay a workload and write a JSON report");
  r->add_option("workload", workload, "Workload path (default stdin)");
  r->add_option("--algo", algo, "uint | uhc | whc | wint | wrect");
  r->add_option("--dim", run.dim, "Dimension")->check(CLI::Range(1, 3));
  r->add_option("--space", run.space, "Space bound N");
  r->add_option("--epsilon", run.epsilon, "Approximation parameter");
  r->add_option("--weights", run.max_weight, "Reject weights above W (0 = no bound)");
  r->add_option("--offsets", run.offsets, "ensemble | random:<count>");
  r->add_option("--seed", run.seed, "Seed for randomized offsets");
  r->add_flag("--oracle", run.oracle, "Check every query against the exact oracle");
  r->add_option("--aligned-budget", run.engine.aligned_budget, "Aligned boxes enumerated before the direct scan");
  r->add_option("--out", run_out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (g->parsed()) return run_gen(gen, gen_out);
    try {
      run.algo = gdis::parse_algo(algo);
    } catch (const gdis::contract_error& e) {
      throw gdis::usage_error(e.what());
    }
    return run_replay(run, workload, run_out);
  } catch (const gdis::usage_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const gdis::contract_error& e) {
    // Inputs are validated before they reach an engine.
    std::cerr << "internal invariant failed: " << e.what() << '\n';
    return kViolation;
  }
}
