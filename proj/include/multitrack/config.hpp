#pragma once

// Flat `key = value` run configuration. '#' starts a comment; lists are
// comma separated. Unknown keys are rejected.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "io.hpp"
#include "scenario.hpp"
#include "swarm.hpp"

namespace multitrack {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class KeyValueConfig {

  public:

    static KeyValueConfig parse(std::istream& in, const std::string& source = "config") {
      KeyValueConfig cfg;
      cfg._source = source;
      std::string line;
      std::size_t lineno = 0;
      while(std::getline(in, line)) {
        ++lineno;
        const std::string body = detail::strip_comment(line);
        if(body.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = body.find('=');
        if(eq == std::string::npos) {
          throw ParseError(source, lineno, "expected 'key = value'");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if(key.empty()) throw ParseError(source, lineno, "empty key");
        if(cfg._entries.count(key)) throw ParseError(source, lineno, "duplicate key '" + key + "'");
        cfg._entries[key] = {value, lineno};
      }
      return cfg;
    }

    static KeyValueConfig load(const std::string& path) {
      auto in = detail::open_in(path);
      return parse(in, path);
    }

    bool has(const std::string& key) const { return _entries.count(key) != 0; }

    void set(const std::string& key, const std::string& value) { _entries[key] = {value, 0}; }

    std::optional<std::string> text(const std::string& key) const {
      auto it = _entries.find(key);
      if(it == _entries.end()) return std::nullopt;
      _used.insert(key);
      return it->second.value;
    }

    double number(const std::string& key, double fallback) const {
      auto t = text(key);
      if(!t) return fallback;
      double v;
      if(!parse_number(*t, v)) fail(key, "'" + *t + "' is not a number");
      return v;
    }

    // Value written in degrees, returned in radians; the fallback is radians.
    double angle(const std::string& key, double fallback) const {
      auto t = text(key);
      if(!t) return fallback;
      double v;
      if(!parse_degrees(*t, v)) fail(key, "'" + *t + "' is not an angle in degrees");
      return v;
    }

    std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) const {
      auto t = text(key);
      if(!t) return fallback;
      return to_unsigned(key, *t);
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
      auto t = text(key);
      if(!t) return fallback;
      std::vector<double> out;
      for(const auto& cell : split_list(*t)) {
        double v;
        if(!parse_number(cell, v)) fail(key, "'" + cell + "' is not a number");
        out.push_back(v);
      }
      return out;
    }

    std::vector<std::uint64_t> unsigned_ints(const std::string& key,
                                             std::vector<std::uint64_t> fallback) const {
      auto t = text(key);
      if(!t) return fallback;
      std::vector<std::uint64_t> out;
      for(const auto& cell : split_list(*t)) out.push_back(to_unsigned(key, cell));
      return out;
    }

    // Throws naming every key that no accessor has read.
    void reject_unused() const {
      std::string unknown;
      for(const auto& [key, entry] : _entries) {
        if(!_used.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
      }
      if(!unknown.empty()) throw ConfigError(_source + ": unknown key(s): " + unknown);
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
      auto it = _entries.find(key);
      std::ostringstream oss;
      oss << _source;
      if(it != _entries.end() && it->second.line) oss << ':' << it->second.line;
      oss << ": " << key << ": " << what;
      throw ConfigError(oss.str());
    }

  private:

    struct Entry {
      std::string value;
      std::size_t line {0};
    };

    static std::string trim(const std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      if(b == std::string::npos) return "";
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split_list(const std::string& s) {
      std::vector<std::string> out;
      std::stringstream ss(s);
      for(std::string cell; std::getline(ss, cell, ','); ) {
        cell = trim(cell);
        if(!cell.empty()) out.push_back(cell);
      }
      return out;
    }

    std::uint64_t to_unsigned(const std::string& key, const std::string& s) const {
      std::uint64_t v = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if(res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        fail(key, "'" + s + "' is not a non-negative integer");
      }
      return v;
    }

    std::string _source {"config"};
    std::map<std::string, Entry> _entries;
    mutable std::set<std::string> _used;
};

struct RunConfig {
  ScenarioConfig scenario;
  SwarmConfig swarm;
  double a_center {kGeoRadius};
  double a_half_width {200.0};
  double e_max {0.1};
  double inc_max {deg2rad(1.5)};
  std::size_t objects {0};              // 0: smallest batch size of the campaign
  std::string out_dir {"."};

  SearchBounds bounds(std::size_t n) const {
    return orbit_search_bounds(n, a_center, a_half_width, e_max, inc_max);
  }
};

// Function: load_run_config
//
// Builds a RunConfig from key-value text. Errors name the offending key.
inline RunConfig run_config_from(const KeyValueConfig& kv) {
  RunConfig rc;
  ScenarioConfig& sc = rc.scenario;
  SwarmConfig& sw = rc.swarm;

  auto as_size = [&](const std::string& key, std::size_t fallback) {
    return static_cast<std::size_t>(kv.unsigned_int(key, fallback));
  };

  // scenario
  sc.seed = kv.unsigned_int("scenario_seed", sc.seed);
  {
    const auto rows = kv.unsigned_ints("truth_objects", {});
    if(!rows.empty()) {
      std::vector<int> r(rows.begin(), rows.end());
      try {
        sc.truth = truth_subset(r);
      }
      catch(const std::exception& ex) {
        kv.fail("truth_objects", ex.what());
      }
    }
  }
  sc.nights = as_size("nights", sc.nights);
  sc.photos_per_night = as_size("photos_per_night", sc.photos_per_night);
  sc.photo_interval = kv.number("photo_interval_s", sc.photo_interval);
  {
    std::vector<double> starts;
    for(std::size_t g = 0; g < sc.nights; ++g) {
      starts.push_back(kDefaultNightOffset + 86400.0 * static_cast<double>(g));
    }
    sc.night_start_offsets = kv.numbers("night_start_s", starts);
    if(sc.night_start_offsets.size() != sc.nights) {
      kv.fail("night_start_s", "needs " + std::to_string(sc.nights) + " entries (one per night)");
    }
  }
  {
    const auto counts = kv.unsigned_ints("fictitious_counts", {});
    if(counts.empty()) {
      sc.fictitious_counts = ScenarioConfig::default_fictitious_counts(sc.date_count());
    }
    else {
      sc.fictitious_counts.assign(counts.begin(), counts.end());
      if(sc.fictitious_counts.size() != sc.date_count()) {
        kv.fail("fictitious_counts", "needs " + std::to_string(sc.date_count()) +
                                     " entries (nights x photos_per_night)");
      }
    }
  }
  sc.station.longitude = kv.angle("station_lon_deg", sc.station.longitude);
  sc.station.latitude = kv.angle("station_lat_deg", sc.station.latitude);
  if(!(std::abs(sc.station.latitude) <= kPi / 2.0)) {
    kv.fail("station_lat_deg", "latitude must lie in [-90, 90]");
  }
  {
    const double sigma = kv.angle("sigma_deg", sc.sigma.elevation);
    if(!(sigma > 0.0)) kv.fail("sigma_deg", "must be > 0");
    sc.sigma = {sigma, sigma};
  }
  sc.measurement_noise_sigma = kv.angle("noise_sigma_deg", 0.0);
  if(!(sc.measurement_noise_sigma >= 0.0)) kv.fail("noise_sigma_deg", "must be >= 0");
  sc.fictitious_margin = kv.angle("fictitious_margin_deg", sc.fictitious_margin);
  sc.min_elevation = kv.angle("min_elevation_deg", sc.min_elevation);
  if(!(sc.photo_interval > 0.0)) kv.fail("photo_interval_s", "must be > 0");
  if(sc.nights == 0) kv.fail("nights", "must be >= 1");
  if(sc.photos_per_night == 0) kv.fail("photos_per_night", "must be >= 1");

  // swarm
  sw.seed = kv.unsigned_int("seed", sw.seed);
  sw.particles = as_size("particles", sw.particles);
  sw.iterations = as_size("iterations", sw.iterations);
  if(const auto budget = kv.unsigned_int("eval_budget", 0); budget > 0) sw.eval_budget = budget;
  sw.neighbors = as_size("neighbors", sw.neighbors);
  if(auto t = kv.text("topology")) {
    try {
      sw.topology = parse_topology(*t);
    }
    catch(const std::exception& ex) {
      kv.fail("topology", ex.what());
    }
  }
  sw.local_search_steps = as_size("local_search_steps", sw.local_search_steps);
  sw.worst_reset = as_size("worst_reset", sw.worst_reset);
  sw.inertia = kv.number("inertia", sw.inertia);
  sw.cognitive = kv.number("cognitive", sw.cognitive);
  sw.social = kv.number("social", sw.social);
  sw.global = kv.number("global", sw.global);
  sw.repulsion = kv.number("repulsion", sw.repulsion);
  sw.v_max_frac = kv.number("v_max_frac", sw.v_max_frac);
  sw.v_init_frac = kv.number("v_init_frac", sw.v_init_frac);
  sw.workers = as_size("workers", sw.workers);
  if(sw.particles < 1) kv.fail("particles", "must be >= 1");
  if(sw.particles > 1 && sw.neighbors >= sw.particles) kv.fail("neighbors", "must be < particles");
  if(sw.worst_reset > 0 && sw.worst_reset >= sw.particles) kv.fail("worst_reset", "must be < particles");
  if(sw.workers < 1) kv.fail("workers", "must be >= 1");

  // search box
  rc.a_center = kv.number("a_center_km", rc.a_center);
  rc.a_half_width = kv.number("a_half_width_km", rc.a_half_width);
  rc.e_max = kv.number("e_max", rc.e_max);
  rc.inc_max = kv.angle("inc_max_deg", rc.inc_max);
  if(!(rc.a_half_width > 0.0) || !(rc.a_center - rc.a_half_width > 0.0)) {
    kv.fail("a_half_width_km", "semi-major axis box must be positive and non-empty");
  }
  if(!(rc.e_max > 0.0 && rc.e_max < 1.0)) kv.fail("e_max", "must lie in (0, 1)");
  if(!(rc.inc_max > 0.0 && rc.inc_max <= kPi)) kv.fail("inc_max_deg", "must lie in (0, 180]");

  rc.objects = as_size("objects", 0);
  if(auto out = kv.text("out")) rc.out_dir = *out;

  kv.reject_unused();
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  return run_config_from(KeyValueConfig::load(path));
}

}  // end of namespace multitrack -------------------------------------------
