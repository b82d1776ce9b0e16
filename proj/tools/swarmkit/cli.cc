#include "cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "batch.h"
#include "json.hpp"
#include "swarmkit/burst_predictor.h"
#include "swarmkit/rate_model.h"
#include "swarmkit/scenario.h"
#include "swarmkit/validation.h"
#include "swarmkit/version.h"

namespace swarmkit::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Raised for problems with user input rather than with a run.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) { return format_double(v); }

// ---- rates ---------------------------------------------------------------

struct RatesArgs {
  double cs = 0.0;
  std::vector<double> cl;
  std::vector<std::int64_t> b;
  bool seed_absent = false;
  std::string state_file;
  bool json = false;
};

SwarmState rates_state(const RatesArgs& a) {
  SwarmState s;
  if (!a.state_file.empty()) {
    const auto j = ordered_json::parse(read_file(a.state_file), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw UsageError("state file is not a JSON object");
    try {
      s.seed_capacity = j.at("seed_capacity").get<double>();
      s.piece_counts = j.at("piece_counts").get<std::vector<std::int64_t>>();
      const auto& cl = j.at("leecher_capacities");
      s.leecher_capacities = cl.is_array() ? cl.get<std::vector<double>>()
                                           : std::vector<double>(s.piece_counts.size(),
                                                                 cl.get<double>());
      s.seed_present = j.value("seed_present", true);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("bad state file: ") + e.what());
    }
  } else {
    if (a.b.empty()) throw UsageError("rates needs --b or --state");
    s.seed_capacity = a.cs;
    s.piece_counts = a.b;
    s.leecher_capacities = a.cl.size() == 1 ? std::vector<double>(a.b.size(), a.cl[0]) : a.cl;
    s.seed_present = !a.seed_absent;
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return s;
}

int cmd_rates(const RatesArgs& a, std::ostream& out) {
  const auto state = rates_state(a);
  const auto r = compute_rates(state);
  const auto g = compute_interest_bounds(state, r.upload);
  const std::size_t n = state.size();

  if (a.json) {
    ordered_json j;
    j["seed_capacity"] = state.seed_capacity;
    j["seed_present"] = state.seed_present;
    j["piece_counts"] = state.piece_counts;
    j["leecher_capacities"] = state.leecher_capacities;
    j["seed_share"] = r.seed_share;
    j["upload"] = ordered_json::array();
    j["interest_bounds"] = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      ordered_json urow = ordered_json::array();
      ordered_json grow = ordered_json::array();
      for (std::size_t k = 0; k < n; ++k) {
        urow.push_back(r.upload(i, k));
        if (g(i, k).is_unbounded()) {
          grow.push_back(nullptr);
        } else {
          grow.push_back(g(i, k).value());
        }
      }
      j["upload"].push_back(urow);
      j["interest_bounds"].push_back(grow);
    }
    j["download"] = r.download;
    out << j.dump(2) << '\n';
    return kExitOk;
  }

  out << "leechers " << n << ", seed " << (state.seed_present ? "present" : "absent")
      << ", seed share " << fmt(r.seed_share) << " kB/s\n";
  out << "upload matrix U (row uploads to column, kB/s):\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << "  ";
    for (std::size_t k = 0; k < n; ++k) out << std::setw(10) << fmt(r.upload(i, k));
    out << '\n';
  }
  out << "finite interest bounds g(i,j):\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i != k && !g(i, k).is_unbounded()) {
        out << "  g(" << i << ',' << k << ") = " << fmt(g(i, k).value()) << '\n';
      }
    }
  }
  out << "download rates d:";
  for (double d : r.download) out << ' ' << fmt(d);
  out << '\n';
  return kExitOk;
}

// ---- burst-bounds --------------------------------------------------------

struct BurstArgs {
  double arrival_rate = 0.0;
  double interarrival = 0.0;
  double cs = 0.0;
  double cl = 0.0;
  double size = 256000.0;
  double percentile = 0.99;
  bool json = false;
};

int cmd_burst(const BurstArgs& a, std::ostream& out) {
  BurstScenario sc;
  if ((a.arrival_rate > 0.0) == (a.interarrival > 0.0)) {
    throw UsageError("give exactly one of --arrival-rate and --interarrival");
  }
  sc.arrival_rate = a.arrival_rate > 0.0 ? a.arrival_rate : 1.0 / a.interarrival;
  sc.seed_capacity = a.cs;
  sc.leecher_capacity = a.cl;
  sc.content_size = a.size;
  sc.percentile = a.percentile;
  BurstBounds b;
  try {
    b = predict_bounds(sc);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const double en = b.expected_arrivals;
  const double rmin = en > 0.0 ? b.b_min / en : 0.0;
  const double rmax = en > 0.0 ? b.b_max / en : 0.0;

  if (a.json) {
    ordered_json j;
    j["arrival_rate"] = sc.arrival_rate;
    j["seed_capacity"] = sc.seed_capacity;
    j["leecher_capacity"] = sc.leecher_capacity;
    j["content_size"] = sc.content_size;
    j["percentile"] = sc.percentile;
    j["first_download_time"] = b.first_download_time;
    j["expected_arrivals"] = en;
    j["arrivals_quantile"] = b.arrivals_quantile;
    j["burst_possible"] = b.burst_possible;
    j["d_min"] = b.d_min;
    j["d_max"] = b.d_max;
    j["b_min"] = b.b_min;
    j["b_max"] = b.b_max;
    j["b_min_ratio"] = rmin;
    j["b_max_ratio"] = rmax;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << std::fixed << std::setprecision(3);
  out << "lambda " << sc.arrival_rate << " /s, c_s " << sc.seed_capacity << " kB/s, c_l "
      << sc.leecher_capacity << " kB/s, S " << sc.content_size << " kB\n";
  out << "T = S/c_s          " << b.first_download_time << " s\n";
  out << "E[N]               " << en << '\n';
  out << "n at p=" << sc.percentile << "       " << b.arrivals_quantile << '\n';
  out << "burst possible     " << (b.burst_possible ? "yes" : "no") << '\n';
  out << "d_min / d_max      " << b.d_min << " / " << b.d_max << " kB/s\n";
  out << "B_min / B_max      " << b.b_min << " / " << b.b_max << '\n';
  out << "B_min/E[N] B_max/E[N] " << rmin << ' ' << rmax << '\n';
  out << std::defaultfloat;
  return kExitOk;
}

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  int replications = 1;
  int jobs = 0;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::vector<double> sweep_interarrival;
  std::string quantifier = "for-all";
  std::int64_t threshold = 50;
  double burst_gap = 10.0;
  bool json = false;
};

SyncQuantifier parse_quantifier(const std::string& q) {
  if (q == "for-all") return SyncQuantifier::ForAllOthers;
  if (q == "exists") return SyncQuantifier::ExistsPartner;
  throw UsageError("unknown quantifier '" + q + "' (for-all or exists)");
}

ordered_json batch_json(const BatchResult& b) {
  ordered_json j;
  j["scenario"] = b.scenario;
  j["dir"] = b.dir.string();
  j["replications"] = ordered_json::array();
  for (const auto& r : b.replications) {
    j["replications"].push_back({{"replication", r.replication},
                                 {"rng_seed", r.seed},
                                 {"arrivals", r.arrivals},
                                 {"completed", r.completed},
                                 {"end_time", r.end_time}});
  }
  const auto& p = b.metrics.rows.back();
  j["pooled"] = {{"completed", p.completed},
                 {"mean_download_time", p.mean_download},
                 {"stddev_download_time", p.stddev_download},
                 {"avg_leechers", p.avg_leechers},
                 {"avg_synchronized", p.avg_synchronized},
                 {"gaps", p.gaps},
                 {"frac_gaps_below", p.frac_gaps_below}};
  return j;
}

void print_batch(const BatchResult& b, std::ostream& out) {
  const auto& p = b.metrics.rows.back();
  out << b.scenario << ": " << b.replications.size() << " replication(s) -> "
      << b.dir.string() << '\n';
  out << "  completed " << p.completed << ", mean download " << fmt(p.mean_download)
      << " s, avg leechers " << fmt(p.avg_leechers) << ", avg synchronized "
      << fmt(p.avg_synchronized) << ", short gaps " << fmt(p.frac_gaps_below) << " of "
      << p.gaps << '\n';
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const std::string text = read_file(a.config);
  ScenarioConfig config;
  std::vector<std::uint64_t> seeds;
  try {
    const auto j = ordered_json::parse(text, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("scenario") &&
        j.contains("rng_seed")) {
      // A replication manifest: rerun exactly that replication.
      config = parse_scenario(j.at("scenario").dump());
      seeds = {j.at("rng_seed").get<std::uint64_t>()};
    } else {
      config = parse_scenario(text);
    }
  } catch (const std::exception& e) {
    throw UsageError(a.config + ": " + e.what());
  }
  if (a.replications < 1) throw UsageError("--replications must be >= 1");
  if (seeds.empty() || a.seed || a.replications > 1) {
    const std::uint64_t base = a.seed.value_or(config.rng_seed);
    seeds.clear();
    for (int r = 0; r < a.replications; ++r) seeds.push_back(replication_seed(base, r));
  }

  BatchOptions opt;
  opt.out_root = a.out;
  opt.seeds = seeds;
  opt.jobs = a.jobs;
  opt.config_path = a.config;
  opt.config_hash = fnv1a64(text);
  opt.metrics.quantifier = parse_quantifier(a.quantifier);
  opt.metrics.sync_threshold = a.threshold;
  opt.metrics.burst_gap = a.burst_gap;

  std::vector<ScenarioConfig> runs;
  if (a.sweep_interarrival.empty()) {
    runs.push_back(config);
  } else {
    if (!std::holds_alternative<PoissonArrivals>(config.arrivals)) {
      throw UsageError("--sweep-interarrival needs Poisson arrivals in the config");
    }
    for (double ia : a.sweep_interarrival) {
      if (!(ia > 0.0)) throw UsageError("sweep interarrival values must be > 0");
      ScenarioConfig c = config;
      std::get<PoissonArrivals>(c.arrivals).rate = 1.0 / ia;
      c.name = config.name + "-ia" + fmt(ia);
      runs.push_back(c);
    }
  }
  for (const auto& c : runs) {
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(a.config + ": " + e.what());
    }
  }

  ordered_json all = ordered_json::array();
  for (const auto& c : runs) {
    const auto result = run_batch(c, opt);
    if (a.json) {
      all.push_back(batch_json(result));
    } else {
      print_batch(result, out);
    }
  }
  if (a.json) out << (all.size() == 1 ? all[0] : all).dump(2) << '\n';
  return kExitOk;
}

// ---- validate ------------------------------------------------------------

struct ValidateArgs {
  std::string protocol = "fixed";
  double tolerance = 0.10;
  int runs = 20;
  int max_leechers = 6;
  std::uint64_t seed = 1;
  double cs = 64.0;
  double cl = 64.0;
  std::string out;
  bool json = false;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  ValidationOptions o;
  if (a.protocol == "fixed") {
    o.protocol = ValidationProtocol::FixedArrivals;
  } else if (a.protocol == "random") {
    o.protocol = ValidationProtocol::Random;
  } else {
    throw UsageError("unknown protocol '" + a.protocol + "' (fixed or random)");
  }
  o.tolerance = a.tolerance;
  o.random_runs = a.runs;
  o.max_leechers = a.max_leechers;
  o.rng_seed = a.seed;
  o.seed_capacity = a.cs;
  o.leecher_capacity = a.cl;
  ValidationReport rep;
  try {
    rep = run_validation(o);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  if (!a.out.empty()) {
    const fs::path path(a.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream csv(path);
    if (!csv) throw UsageError("cannot write " + a.out);
    csv << "run,label,kind,start,end,leecher,pieces,model_rate,measured_rate,relative_error\n";
    for (const auto& p : rep.points) {
      csv << p.run << ',' << p.label << ',' << to_string(p.kind) << ',' << fmt(p.start) << ','
          << fmt(p.end) << ',' << p.leecher << ',' << p.pieces << ',' << fmt(p.model_rate)
          << ',' << fmt(p.measured_rate) << ',' << fmt(p.relative_error) << '\n';
    }
  }

  if (a.json) {
    ordered_json j;
    j["protocol"] = a.protocol;
    j["tolerance"] = a.tolerance;
    j["points"] = rep.points.size();
    j["max_relative_error"] = rep.max_relative_error;
    j["passed"] = rep.passed();
    j["comparisons"] = ordered_json::array();
    for (const auto& p : rep.points) {
      j["comparisons"].push_back({{"run", p.run},
                                  {"label", p.label},
                                  {"kind", to_string(p.kind)},
                                  {"start", p.start},
                                  {"end", p.end},
                                  {"leecher", p.leecher},
                                  {"pieces", p.pieces},
                                  {"model_rate", p.model_rate},
                                  {"measured_rate", p.measured_rate},
                                  {"relative_error", p.relative_error}});
    }
    out << j.dump(2) << '\n';
  } else {
    out << "run label kind     window              leecher  model  measured  error\n";
    for (const auto& p : rep.points) {
      out << std::setw(3) << p.run << std::setw(6) << p.label << ' ' << std::left
          << std::setw(8) << to_string(p.kind) << std::right << " [" << std::setw(8)
          << fmt(std::round(p.start * 100) / 100) << ", " << std::setw(8)
          << fmt(std::round(p.end * 100) / 100) << "] " << std::setw(5) << p.leecher
          << std::setw(8) << fmt(std::round(p.model_rate * 100) / 100) << std::setw(10)
          << fmt(std::round(p.measured_rate * 100) / 100) << std::setw(8)
          << fmt(std::round(p.relative_error * 1000) / 1000) << '\n';
    }
    out << "max relative error " << fmt(rep.max_relative_error) << " over "
        << rep.points.size() << " points, tolerance " << fmt(a.tolerance) << ": "
        << (rep.passed() ? "PASS" : "FAIL") << '\n';
  }
  return rep.passed() ? kExitOk : kExitFailure;
}

// ---- metrics -------------------------------------------------------------

struct MetricsArgs {
  std::vector<std::string> inputs;
  std::optional<std::int64_t> num_pieces;
  std::optional<double> warmup;
  std::optional<double> end;
  std::string quantifier = "for-all";
  std::int64_t threshold = 50;
  double cadence = 10.0;
  double burst_gap = 10.0;
  std::string out;
  bool json = false;
};

std::vector<fs::path> find_traces(const std::vector<std::string>& inputs) {
  std::set<fs::path> found;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && e.path().filename() == "trace.csv") found.insert(e.path());
      }
    } else if (fs::is_regular_file(p)) {
      found.insert(p);
    } else {
      throw UsageError("no such trace or directory: " + in);
    }
  }
  if (found.empty()) throw UsageError("no trace.csv found in the given inputs");
  return {found.begin(), found.end()};
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  AggregateOptions opt;
  opt.quantifier = parse_quantifier(a.quantifier);
  opt.sync_threshold = a.threshold;
  opt.sync_cadence = a.cadence;
  opt.burst_gap = a.burst_gap;

  std::vector<ReplicationMetrics> reps;
  int index = 0;
  for (const auto& path : find_traces(a.inputs)) {
    std::int64_t pieces = a.num_pieces.value_or(0);
    MetricsWindow window;
    const auto manifest = path.parent_path() / "manifest.json";
    std::uint64_t seed = 0;
    if (fs::exists(manifest)) {
      const auto m = ordered_json::parse(read_file(manifest), nullptr, false);
      if (!m.is_discarded() && m.contains("scenario")) {
        const auto c = parse_scenario(m.at("scenario").dump());
        if (!a.num_pieces) pieces = c.num_pieces;
        window.warmup = c.warmup;
        if (c.sim_end > 0.0) window.end = c.sim_end;
        seed = c.rng_seed;
      }
    }
    if (a.warmup) window.warmup = *a.warmup;
    if (a.end) window.end = *a.end;
    if (pieces < 1) throw UsageError(path.string() + ": piece count unknown, pass --num-pieces");

    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    EventTrace trace;
    try {
      trace = read_trace_csv(in);
      check_trace(trace);
    } catch (const std::invalid_argument& e) {
      throw UsageError(path.string() + ": " + e.what());
    }
    auto m = compute_metrics(trace, pieces, window, opt);
    m.replication = index++;
    m.seed = seed;
    reps.push_back(std::move(m));
  }

  const auto agg = aggregate(reps, opt.burst_gap);
  if (!a.out.empty()) write_aggregate(a.out, agg);

  if (a.json) {
    ordered_json j = ordered_json::array();
    for (const auto& r : agg.rows) {
      j.push_back({{"replication", r.label},
                   {"completed", r.completed},
                   {"mean_download_time", r.mean_download},
                   {"stddev_download_time", r.stddev_download},
                   {"p50_download_time", r.p50_download},
                   {"p95_download_time", r.p95_download},
                   {"avg_leechers", r.avg_leechers},
                   {"avg_synchronized", r.avg_synchronized},
                   {"gaps", r.gaps},
                   {"frac_gaps_below", r.frac_gaps_below}});
    }
    out << j.dump(2) << '\n';
  } else {
    out << "replication completed mean_dl  avg_N  avg_sync  gaps  frac<" << fmt(a.burst_gap)
        << "s\n";
    for (const auto& r : agg.rows) {
      out << std::setw(11) << r.label << std::setw(10) << r.completed << std::setw(9)
          << fmt(std::round(r.mean_download * 10) / 10) << std::setw(7)
          << fmt(std::round(r.avg_leechers * 100) / 100) << std::setw(10)
          << fmt(std::round(r.avg_synchronized * 100) / 100) << std::setw(6) << r.gaps
          << std::setw(9) << fmt(std::round(r.frac_gaps_below * 1000) / 1000) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unpopular BitTorrent swarm model, simulator and metrics"};
  app.name("swarmkit");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RatesArgs ra;
  auto* rates = app.add_subcommand("rates", "Rate-model allocation for one swarm state");
  rates->add_option("--cs", ra.cs, "Seed upload capacity (kB/s)");
  rates->add_option("--cl", ra.cl, "Leecher upload capacities, one value or one per leecher")
      ->delimiter(',');
  rates->add_option("--b", ra.b, "Piece counts, one per leecher")->delimiter(',');
  rates->add_flag("--seed-absent", ra.seed_absent, "Evaluate with the seed disconnected");
  rates->add_option("--state", ra.state_file, "JSON state file instead of flags")
      ->check(CLI::ExistingFile);
  rates->add_flag("--json", ra.json, "Machine-readable output");

  BurstArgs ba;
  auto* burst = app.add_subcommand("burst-bounds", "Bounds on the expected burst size");
  burst->add_option("--arrival-rate", ba.arrival_rate, "Leecher arrival rate (1/s)");
  burst->add_option("--interarrival", ba.interarrival, "Mean time between arrivals (s)");
  burst->add_option("--cs", ba.cs, "Seed upload capacity (kB/s)")->required();
  burst->add_option("--cl", ba.cl, "Leecher upload capacity (kB/s)")->required();
  burst->add_option("--size", ba.size, "Content size (kB)")->capture_default_str();
  burst->add_option("--percentile", ba.percentile, "Arrival-count percentile")->capture_default_str();
  burst->add_flag("--json", ba.json, "Machine-readable output");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run scenario replications");
  sim->add_option("--config", sa.config, "Scenario JSON or replication manifest")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--replications", sa.replications, "Number of replications")->capture_default_str();
  sim->add_option("--jobs", sa.jobs, "Parallel replications (0 = all cores)")->capture_default_str();
  sim->add_option("--out", sa.out, "Output root directory")->capture_default_str();
  sim->add_option("--seed", sa.seed, "Base seed overriding the config");
  sim->add_option("--sweep-interarrival", sa.sweep_interarrival,
                  "Mean interarrival times (s) to sweep")
      ->delimiter(',');
  sim->add_option("--quantifier", sa.quantifier, "Synchronization rule: for-all or exists")
                  ->capture_default_str();
  sim->add_option("--sync-threshold", sa.threshold, "Pieces tolerated for synchronization")
                  ->capture_default_str();
  sim->add_option("--burst-gap", sa.burst_gap, "Gap (s) counted as a bursty departure")->capture_default_str();
  sim->add_flag("--json", sa.json, "Machine-readable output");

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "Compare simulated and model download rates");
  val->add_option("--protocol", va.protocol, "fixed or random")->capture_default_str();
  val->add_option("--tolerance", va.tolerance, "Maximum relative error")->capture_default_str();
  val->add_option("--runs", va.runs, "Random protocol: number of swarms")->capture_default_str();
  val->add_option("--max-leechers", va.max_leechers, "Random protocol: largest swarm")->capture_default_str();
  val->add_option("--seed", va.seed, "Random protocol: seed")->capture_default_str();
  val->add_option("--cs", va.cs, "Seed upload capacity (kB/s)")->capture_default_str();
  val->add_option("--cl", va.cl, "Leecher upload capacity (kB/s)")->capture_default_str();
  val->add_option("--out", va.out, "Write per-point comparisons to this CSV");
  val->add_flag("--json", va.json, "Machine-readable output");

  MetricsArgs ma;
  auto* met = app.add_subcommand("metrics", "Recompute metrics from existing traces");
  met->add_option("--input", ma.inputs, "trace.csv files or directories searched for them")
      ->required();
  met->add_option("--num-pieces", ma.num_pieces, "Pieces per content when no manifest");
  met->add_option("--warmup", ma.warmup, "Ignore arrivals before this time (s)");
  met->add_option("--end", ma.end, "Ignore arrivals from this time on (s)");
  met->add_option("--quantifier", ma.quantifier, "for-all or exists")->capture_default_str();
  met->add_option("--sync-threshold", ma.threshold, "Pieces tolerated for synchronization")
                  ->capture_default_str();
  met->add_option("--cadence", ma.cadence, "Synchronization sampling period (s)")->capture_default_str();
  met->add_option("--burst-gap", ma.burst_gap, "Gap (s) counted as a bursty departure")->capture_default_str();
  met->add_option("--out", ma.out, "Directory for aggregated CSVs");
  met->add_flag("--json", ma.json, "Machine-readable output");

  std::vector<const char*> argv{"swarmkit"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rates->parsed()) return cmd_rates(ra, out);
    if (burst->parsed()) return cmd_burst(ba, out);
    if (sim->parsed()) return cmd_simulate(sa, out);
    if (val->parsed()) return cmd_validate(va, out);
    if (met->parsed()) return cmd_metrics(ma, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace swarmkit::cli
