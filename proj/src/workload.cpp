#include "gdis/workload.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

#include "gdis/oracle.hpp"
#include "gdis/weighted_hypercubes.hpp"
#include "json.hpp"

namespace gdis {

using nlohmann::json;

std::string op_name(Op op) {
  switch (op) {
    case Op::insert: return "insert";
    case Op::erase: return "delete";
    case Op::query_size: return "query_size";
    case Op::query_weight: return "query_weight";
    case Op::query_solution: return "query_solution";
  }
  return "?";
}

namespace {

Op parse_op(const std::string& s) {
  for (Op op : {Op::insert, Op::erase, Op::query_size, Op::query_weight, Op::query_solution})
    if (op_name(op) == s) return op;
  throw usage_error("unknown op '" + s + "'");
}

}  // namespace

Event parse_event(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw usage_error(std::string("malformed event: ") + e.what());
  }
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) throw usage_error("event needs a string 'op'");
  Event e;
  e.op = parse_op(j["op"].get<std::string>());
  std::set<std::string> allowed{"op"};
  if (e.op == Op::insert) allowed = {"op", "id", "coords", "weight"};
  if (e.op == Op::erase) allowed = {"op", "id"};
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw usage_error("unexpected field '" + k + "' in " + op_name(e.op) + " event");
  try {
    if (e.op == Op::insert || e.op == Op::erase) {
      if (!j.contains("id") || !j["id"].is_number_unsigned()) throw usage_error("event needs an unsigned 'id'");
      e.id = j["id"].get<Id>();
    }
    if (e.op == Op::insert) {
      if (!j.contains("coords") || !j["coords"].is_array()) throw usage_error("insert needs 'coords'");
      for (const auto& pr : j["coords"]) {
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number())
          throw usage_error("coords must be [lo, hi] pairs");
        e.coords.emplace_back(pr[0].get<double>(), pr[1].get<double>());
      }
      if (e.coords.empty()) throw usage_error("insert needs at least one coordinate pair");
      if (j.contains("weight")) {
        if (!j["weight"].is_number()) throw usage_error("weight must be a number");
        e.weight = j["weight"].get<double>();
      }
    }
  } catch (const json::exception& ex) {
    throw usage_error(std::string("malformed event: ") + ex.what());
  }
  return e;
}

std::string format_event(const Event& e) {
  json j;
  j["op"] = op_name(e.op);
  if (e.op == Op::insert || e.op == Op::erase) j["id"] = e.id;
  if (e.op == Op::insert) {
    json cs = json::array();
    for (const auto& [lo, hi] : e.coords) cs.push_back({lo, hi});
    j["coords"] = cs;
    j["weight"] = e.weight;
  }
  return j.dump();
}

std::vector<Event> read_workload(std::istream& in) {
  std::vector<Event> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_event(line));
    } catch (const usage_error& e) {
      throw usage_error("line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_workload(std::ostream& out, const std::vector<Event>& events) {
  for (const auto& e : events) out << format_event(e) << '\n';
}

namespace {

// Portable uniform draws on top of the engine's raw 64-bit output.
struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  double unit() { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * unit(); }
  std::uint64_t below(std::uint64_t n) { return g() % n; }
};

double snap16(double v) { return std::floor(v * 16.0) / 16.0; }

}  // namespace

std::vector<Event> gen_workload(const GenSpec& s) {
  if (s.dim < 1 || s.dim > kMaxDim) throw usage_error("--dim must be in [1,3]");
  if (!(s.space >= 1)) throw usage_error("--space must be at least 1");
  if (!(s.min_size >= 1) || !(s.max_size >= s.min_size) || s.max_size > s.space)
    throw usage_error("sizes must satisfy 1 <= min <= max <= space");
  if (s.size_dist != "uniform" && s.size_dist != "loguniform") throw usage_error("--size-dist must be uniform|loguniform");
  if (s.shape != "cube" && s.shape != "rect") throw usage_error("--shape must be cube|rect");
  if (!(s.max_weight >= 1)) throw usage_error("--weights must be at least 1");
  if (!(s.churn >= 0 && s.churn < 1)) throw usage_error("--churn must be in [0,1)");

  Rng rng(s.seed);
  auto draw_size = [&] {
    double v = s.size_dist == "uniform" ? rng.uniform(s.min_size, s.max_size)
                                        : std::exp(rng.uniform(std::log(s.min_size), std::log(s.max_size)));
    return std::clamp(snap16(v), s.min_size, s.max_size);
  };
  auto draw_weight = [&] {
    if (s.max_weight <= 1) return 1.0;
    if (s.integer_weights) return 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(s.max_weight)));
    return rng.uniform(1.0, s.max_weight);
  };

  std::vector<Event> out;
  std::vector<Id> live;
  Id next = 1;
  for (std::size_t u = 0; u < s.events; ++u) {
    const bool full = s.max_live != 0 && live.size() >= s.max_live;
    if (!live.empty() && (full || rng.unit() < s.churn)) {
      const std::size_t i = rng.below(live.size());
      out.push_back(Event{Op::erase, live[i], {}, 1});
      live[i] = live.back();
      live.pop_back();
    } else {
      Event e;
      e.op = Op::insert;
      e.id = next++;
      const double cube = draw_size();
      for (int j = 0; j < s.dim; ++j) {
        const double side = s.shape == "cube" ? cube : draw_size();
        const double lo = snap16(rng.uniform(0, s.space - side));
        e.coords.emplace_back(lo, lo + side);
      }
      e.weight = draw_weight();
      live.push_back(e.id);
      out.push_back(std::move(e));
    }
    if (s.query_every != 0 && (u + 1) % s.query_every == 0) out.push_back(Event{Op::query_solution, 0, {}, 1});
  }
  return out;
}

LatencyStats summarize(std::vector<double> ns) {
  LatencyStats st;
  st.count = ns.size();
  if (ns.empty()) return st;
  std::sort(ns.begin(), ns.end());
  auto pct = [&](double p) {
    const auto i = static_cast<std::size_t>(std::ceil(p * static_cast<double>(ns.size()))) - 1;
    return ns[std::min(i, ns.size() - 1)];
  };
  st.p50 = pct(0.5);
  st.p95 = pct(0.95);
  st.max = ns.back();
  double sum = 0;
  for (double v : ns) sum += v;
  st.mean = sum / static_cast<double>(ns.size());
  return st;
}

std::vector<double> resolve_offsets(const std::string& mode, int d, double eps, double N, std::uint64_t seed) {
  if (mode == "ensemble") {
    try {
      return build_offsets(d, eps, N);
    } catch (const contract_error& e) {
      throw usage_error(e.what());
    }
  }
  const std::string prefix = "random:";
  if (mode.rfind(prefix, 0) == 0) {
    std::size_t count = 0;
    try {
      std::size_t used = 0;
      count = std::stoul(mode.substr(prefix.size()), &used);
      if (used != mode.size() - prefix.size()) count = 0;
    } catch (const std::exception&) {
      count = 0;
    }
    if (count == 0) throw usage_error("--offsets random:<count> needs a positive count");
    return sample_offsets(d, eps, N, count, seed);
  }
  throw usage_error("--offsets must be 'ensemble' or 'random:<count>'");
}

namespace {

Box to_box(const Event& e, int dim, bool cubes) {
  if (static_cast<int>(e.coords.size()) != dim)
    throw usage_error("event id " + std::to_string(e.id) + " has " + std::to_string(e.coords.size()) +
                      " coordinate pairs, expected " + std::to_string(dim));
  Box b = make_box(e.id, e.coords, e.weight);
  if (cubes && !b.is_cube()) throw usage_error("event id " + std::to_string(e.id) + " is not a hypercube");
  return b;
}

}  // namespace

RunReport run_workload(const RunConfig& cfg, const std::vector<Event>& events) {
  RunReport rep;
  rep.config = cfg;
  GridConfig base;
  try {
    base = GridConfig::make(cfg.space, cfg.dim, cfg.epsilon);
  } catch (const contract_error& e) {
    throw usage_error(e.what());
  }
  rep.N = base.N;
  rep.eps = base.eps;
  rep.offsets = resolve_offsets(cfg.offsets, base.d, base.eps, base.N, cfg.seed);
  std::unique_ptr<Ensemble> engine;
  try {
    engine = make_ensemble(cfg.algo, base, rep.offsets, cfg.engine);
  } catch (const contract_error& e) {
    throw usage_error(e.what());
  }
  const bool weighted = engine->weighted();
  std::unordered_map<Id, Box> live;
  std::vector<double> ins_ns, del_ns;
  auto violation = [&](const std::string& note) {
    ++rep.violations;
    if (rep.violation_notes.size() < 32) rep.violation_notes.push_back(note);
  };

  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.op == Op::insert) {
      Box b = to_box(e, base.d, algo_requires_cubes(cfg.algo));
      if (!(b.weight >= 1) || (cfg.max_weight > 0 && b.weight > cfg.max_weight))
        throw usage_error("event id " + std::to_string(e.id) + " has a weight outside [1, --weights]");
      if (live.count(b.id)) throw usage_error("event id " + std::to_string(e.id) + " is already live");
      try {
        validate(b, base.N, algo_requires_cubes(cfg.algo));
      } catch (const contract_error& ex) {
        throw usage_error(ex.what());
      }
      const auto t0 = std::chrono::steady_clock::now();
      engine->insert(b);
      const auto t1 = std::chrono::steady_clock::now();
      ins_ns.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
      live.emplace(b.id, b);
      continue;
    }
    if (e.op == Op::erase) {
      if (!live.count(e.id)) throw usage_error("delete of unknown id " + std::to_string(e.id));
      const auto t0 = std::chrono::steady_clock::now();
      engine->erase(e.id);
      const auto t1 = std::chrono::steady_clock::now();
      del_ns.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
      live.erase(e.id);
      continue;
    }
    QueryRecord q;
    q.event = i;
    q.op = e.op;
    q.size = engine->solution_size();
    q.weight = weighted ? engine->solution_weight() : static_cast<double>(q.size);
    if (e.op == Op::query_solution || cfg.oracle) {
      auto sol = engine->solution();
      if (e.op == Op::query_solution)
        for (const auto& b : sol) q.ids.push_back(b.id);
      if (!pairwise_independent(sol)) violation("event " + std::to_string(i) + ": solution not independent");
      std::set<Id> seen;
      for (const auto& b : sol) {
        auto it = live.find(b.id);
        if (it == live.end() || it->second.lo != b.lo || it->second.hi != b.hi)
          violation("event " + std::to_string(i) + ": solution holds a non-live object " + std::to_string(b.id));
        if (!seen.insert(b.id).second) violation("event " + std::to_string(i) + ": duplicate id in solution");
      }
      if (sol.size() != q.size) violation("event " + std::to_string(i) + ": size query disagrees with solution");
      const double sw = weighted ? total_weight(sol) : static_cast<double>(sol.size());
      if (std::abs(sw - q.weight) > 1e-9 * std::max(1.0, sw))
        violation("event " + std::to_string(i) + ": weight query disagrees with solution");
    }
    if (cfg.algo == Algo::whc) {
      for (std::size_t k = 0; k < engine->instances(); ++k) {
        const auto* w = dynamic_cast<const WeightedHypercubeEngine*>(&engine->instance(k));
        if (w && w->weight_estimate() > std::ldexp(w->solution_weight(), base.d + 1) * (1 + 1e-12))
          violation("event " + std::to_string(i) + ": point weight exceeds 2^(d+1) times the solution");
      }
    }
    if (cfg.oracle) {
      std::vector<Box> items;
      for (const auto& [id, b] : live) {
        Box c = b;
        if (!weighted) c.weight = 1;
        items.push_back(c);
      }
      std::sort(items.begin(), items.end(), [](const Box& a, const Box& b) { return a.id < b.id; });
      std::optional<oracle::Solution> opt;
      if (base.d == 1)
        opt = oracle::exact_interval_is(items);
      else if (items.size() <= oracle::kBoxLimit)
        opt = oracle::exact_box_is(items);
      if (opt) {
        q.oracle_weight = opt->weight;
        if (q.weight > opt->weight * (1 + 1e-9) + 1e-9)
          violation("event " + std::to_string(i) + ": solution heavier than the exact optimum");
        if (q.weight > 0) q.ratio = opt->weight / q.weight;
      } else {
        ++rep.oracle_skipped;
      }
    }
    rep.queries.push_back(std::move(q));
  }
  if (cfg.oracle) {
    const std::size_t bad = engine->audit();
    if (bad) violation("final audit found " + std::to_string(bad) + " inconsistencies");
  }
  rep.insert_latency = summarize(ins_ns);
  rep.delete_latency = summarize(del_ns);
  return rep;
}

std::string RunReport::to_json(bool with_latency) const {
  json j;
  j["schema"] = "geo-dynis/1";
  j["config"] = {{"algo", algo_name(config.algo)}, {"dim", config.dim},         {"N", N},
                 {"epsilon", eps},                 {"weights", config.max_weight}, {"offsets", config.offsets},
                 {"offset_count", offsets.size()}, {"seed", config.seed},       {"oracle", config.oracle}};
  if (with_latency) {
    auto lat = [](const LatencyStats& s) {
      return json{{"count", s.count}, {"p50", s.p50}, {"p95", s.p95}, {"max", s.max}, {"mean", s.mean}};
    };
    j["latency_ns"] = {{"insert", lat(insert_latency)}, {"delete", lat(delete_latency)}};
  }
  json qs = json::array();
  double max_ratio = 0;
  std::size_t ratios = 0;
  for (const auto& q : queries) {
    json r{{"event", q.event}, {"op", op_name(q.op)}, {"size", q.size}, {"weight", q.weight}};
    if (q.op == Op::query_solution) r["ids"] = q.ids;
    if (q.oracle_weight) r["oracle_weight"] = *q.oracle_weight;
    if (q.ratio) {
      r["ratio"] = *q.ratio;
      max_ratio = std::max(max_ratio, *q.ratio);
      ++ratios;
    }
    qs.push_back(std::move(r));
  }
  j["queries"] = qs;
  j["oracle"] = {{"enabled", config.oracle}, {"samples", ratios}, {"max_ratio", max_ratio}, {"skipped", oracle_skipped}};
  j["violations"] = violations;
  j["violation_notes"] = violation_notes;
  return j.dump(2);
}

}  // namespace gdis
