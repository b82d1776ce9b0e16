#include "swarmkit/scenario.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace swarmkit {
namespace {

using nlohmann::json;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(num_pieces >= 1, "num_pieces must be >= 1");
  require(piece_size > 0.0 && std::isfinite(piece_size), "piece_size must be > 0");
  require(seed_capacity >= 0.0 && std::isfinite(seed_capacity),
          "seed_capacity must be >= 0");
  require(leecher_capacity.mean >= 0.0, "leecher capacity must be >= 0");
  require(leecher_capacity.spread >= 0.0 && leecher_capacity.spread < 1.0,
          "leecher capacity spread must lie in [0, 1)");
  if (download_cap) require(*download_cap > 0.0, "download_cap must be > 0");
  require(seeding_time >= 0.0, "seeding_time must be >= 0");
  require(sim_end >= 0.0, "sim_end must be >= 0");
  require(warmup >= 0.0, "warmup must be >= 0");
  require(sim_end == 0.0 || warmup < sim_end, "warmup must end before sim_end");

  if (const auto* ex = std::get_if<ExplicitArrivals>(&arrivals)) {
    for (std::size_t i = 0; i < ex->times.size(); ++i) {
      require(ex->times[i] >= 0.0, "arrival times must be >= 0");
      require(i == 0 || ex->times[i] >= ex->times[i - 1],
              "arrival times must be sorted");
    }
  } else {
    const auto& p = std::get<PoissonArrivals>(arrivals);
    require(p.rate > 0.0, "poisson arrival rate must be > 0");
    require(p.horizon >= 0.0, "poisson horizon must be >= 0");
    require(sim_end > 0.0 || p.horizon > 0.0, "poisson arrivals need a horizon or a sim_end");
  }
  if (const auto* oo = std::get_if<OnOffSeed>(&seed)) {
    require(oo->mean_on > 0.0, "seed mean_on must be > 0");
    require(oo->availability > 0.0 && oo->availability <= 1.0,
            "seed availability must lie in (0, 1]");
  }
}

ScenarioConfig parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "scenario must be a JSON object");

  ScenarioConfig c;
  try {
    c.name = j.value("name", c.name);
    c.num_pieces = j.value("num_pieces", c.num_pieces);
    c.piece_size = j.value("piece_size_kb", c.piece_size);
    c.seed_capacity = j.value("seed_capacity", c.seed_capacity);
    if (j.contains("leecher_capacity")) {
      const auto& lc = j.at("leecher_capacity");
      if (lc.is_number()) {
        c.leecher_capacity = {lc.get<double>(), 0.0};
      } else {
        c.leecher_capacity.mean = lc.at("mean").get<double>();
        c.leecher_capacity.spread = lc.value("spread", 0.0);
      }
    }
    if (j.contains("download_cap") && !j.at("download_cap").is_null()) {
      c.download_cap = j.at("download_cap").get<double>();
    }
    if (j.contains("arrivals")) {
      const auto& a = j.at("arrivals");
      if (a.contains("times")) {
        c.arrivals = ExplicitArrivals{a.at("times").get<std::vector<double>>()};
      } else {
        c.arrivals = PoissonArrivals{a.at("poisson_rate").get<double>(),
                                     a.value("horizon", 0.0)};
      }
    }
    if (j.contains("seed")) {
      const auto& s = j.at("seed");
      const auto mode = s.value("mode", std::string("always_on"));
      if (mode == "always_on") {
        c.seed = AlwaysOnSeed{};
      } else if (mode == "on_off") {
        c.seed = OnOffSeed{s.at("mean_on").get<double>(),
                           s.at("availability").get<double>()};
      } else {
        throw std::invalid_argument("unknown seed mode '" + mode + "'");
      }
    }
    c.seeding_time = j.value("seeding_time", c.seeding_time);
    c.sim_end = j.value("sim_end", c.sim_end);
    c.warmup = j.value("warmup", c.warmup);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.record_progress = j.value("record_progress", c.record_progress);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad scenario field: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["num_pieces"] = c.num_pieces;
  j["piece_size_kb"] = c.piece_size;
  j["seed_capacity"] = c.seed_capacity;
  j["leecher_capacity"] = {{"mean", c.leecher_capacity.mean},
                           {"spread", c.leecher_capacity.spread}};
  j["download_cap"] = c.download_cap ? json(*c.download_cap) : json(nullptr);
  if (const auto* ex = std::get_if<ExplicitArrivals>(&c.arrivals)) {
    j["arrivals"] = {{"times", ex->times}};
  } else {
    const auto& p = std::get<PoissonArrivals>(c.arrivals);
    j["arrivals"] = {{"poisson_rate", p.rate}, {"horizon", p.horizon}};
  }
  if (const auto* oo = std::get_if<OnOffSeed>(&c.seed)) {
    j["seed"] = {{"mode", "on_off"},
                 {"mean_on", oo->mean_on},
                 {"availability", oo->availability}};
  } else {
    j["seed"] = {{"mode", "always_on"}};
  }
  j["seeding_time"] = c.seeding_time;
  j["sim_end"] = c.sim_end;
  j["warmup"] = c.warmup;
  j["rng_seed"] = c.rng_seed;
  j["record_progress"] = c.record_progress;
  return j.dump(2);
}

}  // namespace swarmkit
