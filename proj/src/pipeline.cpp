#include "rangewalk/pipeline.hpp"

#include <algorithm>
#include <boost/crc.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "rangewalk/cut_structure.hpp"
#include "rangewalk/range_graph.hpp"
#include "rangewalk/resistance_metrics.hpp"
#include "rangewalk/scaling_lab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rangewalk {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_integer(const std::string& text) {
  const std::string s = trim(text);
  if (const auto caret = s.find('^'); caret != std::string::npos) {
    const auto base = parse_integer<T>(s.substr(0, caret));
    const auto exp = parse_integer<int>(s.substr(caret + 1));
    if (exp < 0 || exp > 62) throw ConfigError("exponent out of range in '" + s + "'");
    T v = 1;
    for (int i = 0; i < exp; ++i) v *= base;
    return v;
  }
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw ConfigError("expected an integer, got '" + s + "'");
  return v;
}

double parse_real(const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string format_real(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + f(v[i]);
  return out;
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field integer(std::string key, T ExperimentConfig::*m) {
  return {std::move(key), [m](ExperimentConfig& c, const std::string& v) { c.*m = parse_integer<T>(v); },
          [m](const ExperimentConfig& c) { return std::to_string(c.*m); }};
}

Field real(std::string key, double ExperimentConfig::*m) {
  return {std::move(key), [m](ExperimentConfig& c, const std::string& v) { c.*m = parse_real(v); },
          [m](const ExperimentConfig& c) { return format_real(c.*m); }};
}

Field text(std::string key, std::string ExperimentConfig::*m) {
  return {std::move(key), [m](ExperimentConfig& c, const std::string& v) { c.*m = trim(v); },
          [m](const ExperimentConfig& c) { return c.*m; }};
}

Field time_list(std::string key, std::vector<Time> ExperimentConfig::*m) {
  return {std::move(key),
          [m](ExperimentConfig& c, const std::string& v) {
            (c.*m).clear();
            for (const auto& item : split_list(v)) (c.*m).push_back(parse_integer<Time>(item));
          },
          [m](const ExperimentConfig& c) { return join(c.*m, [](Time t) { return std::to_string(t); }); }};
}

Field real_list(std::string key, std::vector<double> ExperimentConfig::*m) {
  return {std::move(key),
          [m](ExperimentConfig& c, const std::string& v) {
            (c.*m).clear();
            for (const auto& item : split_list(v)) (c.*m).push_back(parse_real(item));
          },
          [m](const ExperimentConfig& c) { return join(c.*m, format_real); }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table{
      integer("dimension", &C::dimension),
      time_list("n_grid", &C::n_grid),
      integer("seeds", &C::seeds),
      integer("master_seed", &C::master_seed),
      real("horizon_margin", &C::horizon_margin),
      text("cut_buffer", &C::cut_buffer),
      text("solver", &C::solver),
      real("solver_tolerance", &C::solver_tolerance),
      integer("oracle_cap", &C::oracle_cap),
      integer("min_replicas", &C::min_replicas),
      integer("bootstrap_resamples", &C::bootstrap_resamples),
      integer("bootstrap_seed", &C::bootstrap_seed),
      integer("two_sided_pairs", &C::two_sided_pairs),
      integer("two_sided_steps", &C::two_sided_steps),
      integer("two_sided_truncation", &C::two_sided_truncation),
      real_list("t_grid", &C::t_grid),
      integer("process_n", &C::process_n),
      integer("process_environments", &C::process_environments),
      real("process_margin", &C::process_margin),
      real("max_walk_steps", &C::max_walk_steps),
      integer("heat_kernel_n", &C::heat_kernel_n),
      real_list("heat_kernel_x", &C::heat_kernel_x),
      integer("heat_kernel_environments", &C::heat_kernel_environments),
      integer("heat_kernel_replicas", &C::heat_kernel_replicas),
      real_list("exit_radii", &C::exit_radii),
      integer("exit_environments", &C::exit_environments),
      integer("exit_walks", &C::exit_walks),
      real_list("cover_radii", &C::cover_radii),
      real("cover_bound", &C::cover_bound),
      real("exponent_band_low", &C::exponent_band_low),
      real("exponent_band_high", &C::exponent_band_high),
      real("exit_band", &C::exit_band),
      integer("verify_seeds", &C::verify_seeds),
      integer("verify_horizon", &C::verify_horizon),
      text("output_dir", &C::output_dir),
  };
  return table;
}

template <class T>
void require_increasing(const std::vector<T>& v, const std::string& key, bool allow_empty) {
  if (v.empty() && !allow_empty) throw ConfigError(key + " must not be empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i - 1] < v[i])) throw ConfigError(key + " must be strictly increasing");
  }
}

std::string hex32(std::uint32_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(8) << std::setfill('0') << v;
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      try {
        f.set(*this, value);
      } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
      }
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    try {
      c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in);
}

void ExperimentConfig::validate() const {
  if (dimension < 1 || dimension > 32) throw ConfigError("dimension must lie in [1, 32]");
  require_increasing(n_grid, "n_grid", false);
  if (n_grid.front() < 1) throw ConfigError("n_grid entries must be positive");
  if (seeds < 1) throw ConfigError("seeds must be at least 1");
  if (horizon_margin < 1.0) throw ConfigError("horizon_margin must be at least 1");
  if (cut_buffer != "log6" && cut_buffer != "none") throw ConfigError("cut_buffer must be log6 or none");
  try {
    parse_solver_method(solver);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(solver_tolerance > 0)) throw ConfigError("solver_tolerance must be positive");
  if (oracle_cap < 2) throw ConfigError("oracle_cap must be at least 2");
  if (bootstrap_resamples < 10) throw ConfigError("bootstrap_resamples must be at least 10");
  if (two_sided_truncation < 0 || two_sided_truncation > two_sided_steps)
    throw ConfigError("two_sided_truncation must lie in [0, two_sided_steps]");
  require_increasing(t_grid, "t_grid", false);
  if (t_grid.front() < 0) throw ConfigError("t_grid entries must be nonnegative");
  if (process_n < 0 || heat_kernel_n < 0) throw ConfigError("walk sizes must be nonnegative");
  if (process_n > 0 && process_environments < 500)
    throw ConfigError("process_environments must be at least 500 (KS sample floor)");
  if (!(max_walk_steps > 0)) throw ConfigError("max_walk_steps must be positive");
  require_increasing(heat_kernel_x, "heat_kernel_x", false);
  if (heat_kernel_x.front() < 0) throw ConfigError("heat_kernel_x entries must be nonnegative");
  if (heat_kernel_environments < 1 || heat_kernel_replicas < 1) throw ConfigError("heat kernel counts must be positive");
  require_increasing(exit_radii, "exit_radii", true);
  if (!exit_radii.empty() && exit_radii.front() <= 0) throw ConfigError("exit_radii must be positive");
  require_increasing(cover_radii, "cover_radii", true);
  if (!cover_radii.empty() && cover_radii.front() <= 0) throw ConfigError("cover_radii must be positive");
  if (!(exponent_band_low < exponent_band_high)) throw ConfigError("exponent band is empty");
  if (!(exit_band >= 1)) throw ConfigError("exit_band must be at least 1");
  if (verify_horizon < 1) throw ConfigError("verify_horizon must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

std::string ExperimentConfig::echo_text() const {
  std::string out;
  for (const auto& [k, v] : echo()) out += k + " = " + v + "\n";
  return out;
}

std::string ExperimentConfig::hash() const {
  boost::crc_32_type crc;
  for (const auto& [k, v] : echo()) {
    if (k == "output_dir") continue;
    const std::string line = k + "=" + v + "\n";
    crc.process_bytes(line.data(), line.size());
  }
  return hex32(crc.checksum());
}

json ExperimentConfig::to_json() const {
  json j = json::object();
  for (const auto& [k, v] : echo()) j[k] = v;
  return j;
}

SolverOptions ExperimentConfig::solver_options() const {
  SolverOptions o;
  o.method = parse_solver_method(solver);
  o.tolerance = solver_tolerance;
  return o;
}

VerifyOptions ExperimentConfig::verify_options() const {
  VerifyOptions o;
  o.dimension = dimension;
  o.seeds = verify_seeds;
  o.horizon = verify_horizon;
  o.master_seed = master_seed;
  o.solver = solver_options();
  o.oracle.cap = oracle_cap;
  o.invariant_horizon = std::min<Time>(verify_horizon, 400);
  return o;
}

// ---------------------------------------------------------------------------
// manifest and cache

bool RunManifest::ok() const {
  return std::none_of(stages.begin(), stages.end(), [](const StageStatus& s) { return s.status == "failed"; });
}

json RunManifest::to_json() const {
  json st = json::array();
  for (const auto& s : stages) st.push_back({{"stage", s.name}, {"status", s.status}, {"message", s.message}});
  json fl = json::array();
  for (const auto& f : files) fl.push_back({{"name", f.name}, {"bytes", f.bytes}, {"crc32", hex32(f.crc32)}});
  return {{"config_hash", config_hash}, {"version", version},     {"stages", st},
          {"files", fl},                {"cache_hits", cache_hits}, {"cache_misses", cache_misses},
          {"cache_dir", cache_dir.string()}, {"config", config},   {"ok", ok()}};
}

fs::path default_cache_dir() {
  if (const char* env = std::getenv("RANGEWALK_CACHE_DIR"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "rangewalk";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "rangewalk";
  return fs::temp_directory_path() / "rangewalk-cache";
}

std::uint32_t file_crc32(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  boost::crc_32_type crc;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    crc.process_bytes(buf, static_cast<std::size_t>(in.gcount()));
  }
  return crc.checksum();
}

namespace {

/// Files under one config hash, with a checksum index so corrupt entries are detected.
class Cache {
 public:
  Cache(fs::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {
    fs::create_directories(dir_);
    if (std::ifstream in(dir_ / "checksums.json"); in) index_ = json::parse(in, nullptr, false);
    if (!index_.is_object()) index_ = json::object();
  }

  /// Path of a verified entry, or nullopt on a miss. Throws CacheError on a checksum mismatch.
  std::optional<fs::path> find(const std::string& name) {
    const fs::path p = dir_ / name;
    if (!fs::exists(p) || !index_.contains(name)) {
      ++manifest_.cache_misses;
      return std::nullopt;
    }
    if (hex32(file_crc32(p)) != index_[name].get<std::string>())
      throw CacheError("checksum mismatch in cache file " + p.string());
    ++manifest_.cache_hits;
    return p;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void record(const std::string& name) {
    index_[name] = hex32(file_crc32(dir_ / name));
    std::ofstream out(dir_ / "checksums.json");
    out << index_.dump(1) << '\n';
  }

 private:
  fs::path dir_;
  RunManifest& manifest_;
  json index_;
};

json to_json(const TableEntry& t) {
  return {{"n", t.n}, {"mean", t.mean}, {"standard_error", t.standard_error}, {"count", t.count}};
}

json to_json(const std::vector<TableEntry>& table) {
  json j = json::array();
  for (const auto& t : table) j.push_back(to_json(t));
  return j;
}

json to_json(const ScalarEstimate& e) {
  return {{"value", e.value},
          {"standard_error", e.standard_error},
          {"lower", e.lower},
          {"upper", e.upper},
          {"samples", e.samples}};
}

json to_json(const LinearFit& fit, const Interval& ci, double low, double high) {
  return {{"slope", fit.slope},         {"slope_se", fit.slope_se}, {"intercept", fit.intercept},
          {"points", fit.points},       {"lower", ci.lower},        {"upper", ci.upper},
          {"band", {low, high}},        {"within_band", fit.slope >= low && fit.slope <= high}};
}

json sample_json(const EnvironmentSample& s) {
  return {{"seed", s.seed},           {"horizon", s.horizon},   {"mu", s.mu},
          {"resistance", s.resistance}, {"distance", s.distance}, {"cut_count", s.cut_count},
          {"provisional", s.provisional}};
}

EnvironmentSample sample_from_json(const json& j) {
  EnvironmentSample s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.horizon = j.at("horizon").get<Time>();
  s.mu = j.at("mu").get<std::vector<std::int64_t>>();
  s.resistance = j.at("resistance").get<std::vector<double>>();
  s.distance = j.at("distance").get<std::vector<std::int64_t>>();
  s.cut_count = j.at("cut_count").get<std::vector<Time>>();
  s.provisional = j.at("provisional").get<std::vector<bool>>();
  return s;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

class Run {
 public:
  Run(const ExperimentConfig& config, const PipelineOptions& options)
      : cfg_(config), out_(config.output_dir) {
    manifest_.config_hash = cfg_.hash();
    manifest_.version = RANGEWALK_VERSION;
    manifest_.config = cfg_.to_json();
    manifest_.cache_dir = (options.cache_dir ? *options.cache_dir : default_cache_dir()) / manifest_.config_hash;
    horizon_ = static_cast<Time>(std::ceil(cfg_.horizon_margin * static_cast<double>(cfg_.n_grid.back())));
    estimator_.min_replicas = cfg_.min_replicas;
    estimator_.bootstrap_seed = cfg_.bootstrap_seed;
    estimator_.resamples = cfg_.bootstrap_resamples;
  }

  RunManifest execute(const std::optional<std::string>& stop_after) {
    if (stop_after && std::find(std::begin(kStages), std::end(kStages), *stop_after) == std::end(kStages))
      throw ConfigError("unknown stage '" + *stop_after + "'");
    fs::create_directories(out_);
    write_text(out_ / "config.txt", cfg_.echo_text());
    const std::vector<std::pair<std::string, std::function<void()>>> stages{
        {"generate", [&] { generate(); }}, {"graph", [&] { graph(); }},       {"cuts", [&] { cuts(); }},
        {"metrics", [&] { metrics(); }},   {"walk", [&] { walk(); }},         {"estimate", [&] { estimate(); }},
        {"report", [&] { report(); }}};
    bool halted = false;
    for (const auto& [name, body] : stages) {
      if (halted) {
        manifest_.stages.push_back({name, "skipped", ""});
        continue;
      }
      try {
        body();
        manifest_.stages.push_back({name, "ok", ""});
      } catch (const std::exception& e) {
        manifest_.stages.push_back({name, "failed", e.what()});
        halted = true;
      }
      if (stop_after && name == *stop_after) halted = true;
    }
    inventory();
    return manifest_;
  }

 private:
  std::string seed_tag(std::size_t i) const { return std::to_string(i); }

  void generate() {
    Cache cache(manifest_.cache_dir, manifest_);
    trajectories_.clear();
    for (std::size_t i = 0; i < cfg_.seeds; ++i) {
      const std::string name = "trajectory_" + seed_tag(i) + ".rwr";
      if (auto p = cache.find(name)) {
        trajectories_.push_back(load_trajectory(*p));
      } else {
        trajectories_.push_back(
            generate_trajectory(cfg_.dimension, horizon_, environment_seed(cfg_.master_seed, i)));
        save_trajectory(trajectories_.back(), cache.path(name));
        cache.record(name);
      }
      if (trajectories_.back().horizon() != horizon_ || trajectories_.back().dimension() != cfg_.dimension)
        throw CacheError("cache file " + cache.path(name).string() + " does not match the config");
    }
  }

  void graph() {
    std::ostringstream csv;
    csv << "seed_index,seed,horizon,vertices,edges,canonical_hash\n";
    for (std::size_t i = 0; i < trajectories_.size(); ++i) {
      const RangeGraph g = build_range_graph(trajectories_[i]);
      csv << i << ',' << trajectories_[i].seed() << ',' << trajectories_[i].horizon() << ',' << g.num_vertices()
          << ',' << g.num_edges() << ',' << hex32(g.canonical_hash()) << '\n';
    }
    write_text(out_ / "graphs.csv", csv.str());
  }

  void cuts() {
    std::ostringstream csv;
    csv << "seed_index,n,cut_count,provisional\n";
    for (std::size_t i = 0; i < trajectories_.size(); ++i) {
      const RangeGraph g = build_range_graph(trajectories_[i]);
      const CutTimeSet c = cfg_.cut_buffer == "none" ? find_cut_times(g, 0) : find_cut_times(g);
      for (Time n : cfg_.n_grid) {
        const CutCount k = count_cut_times(c, n);
        csv << i << ',' << n << ',' << k.count << ',' << k.provisional << '\n';
      }
    }
    write_text(out_ / "cuts.csv", csv.str());
  }

  void metrics() {
    Cache cache(manifest_.cache_dir, manifest_);
    ensemble_ = Ensemble{cfg_.dimension, cfg_.n_grid, {}};
    std::ostringstream csv, cover;
    csv.precision(17);
    csv << "seed_index,n,mu,resistance,distance,cut_count,provisional\n";
    cover << "seed_index,radius,covering_number\n";
    covering_.clear();
    for (std::size_t i = 0; i < trajectories_.size(); ++i) {
      const std::string name = "sample_" + seed_tag(i) + ".json";
      std::optional<Environment> env;
      auto environment = [&]() -> const Environment& {
        if (!env) env.emplace(trajectories_[i], cfg_.cut_buffer != "none");
        return *env;
      };
      if (auto p = cache.find(name)) {
        std::ifstream in(*p);
        ensemble_.samples.push_back(sample_from_json(json::parse(in)));
      } else {
        ensemble_.samples.push_back(measure_environment(environment(), cfg_.n_grid, cfg_.solver_options()));
        write_text(cache.path(name), sample_json(ensemble_.samples.back()).dump());
        cache.record(name);
      }
      const auto& s = ensemble_.samples.back();
      for (std::size_t k = 0; k < cfg_.n_grid.size(); ++k)
        csv << i << ',' << cfg_.n_grid[k] << ',' << s.mu[k] << ',' << s.resistance[k] << ',' << s.distance[k] << ','
            << s.cut_count[k] << ',' << s.provisional[k] << '\n';
      for (double r : cfg_.cover_radii) {
        const std::size_t m = covering_number(environment().graph, environment().cuts, r, cfg_.solver_options());
        covering_.push_back({i, r, m});
        cover << i << ',' << format_real(r) << ',' << m << '\n';
      }
    }
    write_text(out_ / "profiles.csv", csv.str());
    if (!cfg_.cover_radii.empty()) write_text(out_ / "covering.csv", cover.str());
  }

  // lambda_hat, psi_tilde_hat(n), phi_hat(n) at a walk size n
  struct Normalization {
    double lambda, psi_tilde, phi;
  };

  Normalization normalization(Time n) {
    EnsembleConfig c;
    c.dimension = cfg_.dimension;
    c.n_grid = {n};
    c.seeds = cfg_.seeds;
    c.master_seed = cfg_.master_seed;
    c.horizon_margin = cfg_.horizon_margin;
    c.solver = cfg_.solver_options();
    c.buffered = cfg_.cut_buffer != "none";
    const Ensemble e = run_ensemble(c);
    std::vector<double> mu, psi, phi;
    for (const auto& s : e.samples) {
      if (s.provisional[0]) continue;
      mu.push_back(static_cast<double>(s.mu[0]) / static_cast<double>(n));
      psi.push_back(s.resistance[0] / static_cast<double>(n));
      phi.push_back(static_cast<double>(s.distance[0]) / static_cast<double>(n));
    }
    if (mu.empty()) throw std::runtime_error("no settled environments at walk size n = " + std::to_string(n));
    Normalization out{mean_se(mu).mean, mean_se(psi).mean, mean_se(phi).mean};
    try {
      out.lambda = estimate_lambda_prefix(ensemble_, estimator_).value;
    } catch (const std::invalid_argument&) {
      // fall back to the walk-size ensemble
    }
    return out;
  }

  void walk() {
    if (cfg_.process_n > 0) {
      const Normalization nz = normalization(cfg_.process_n);
      ProcessConfig pc;
      pc.dimension = cfg_.dimension;
      pc.n = cfg_.process_n;
      pc.t_grid = cfg_.t_grid;
      pc.psi = nz.lambda * nz.psi_tilde;
      pc.phi = nz.phi;
      pc.environments = cfg_.process_environments;
      pc.master_seed = cfg_.master_seed;
      pc.horizon_margin = cfg_.process_margin;
      pc.max_total_steps = cfg_.max_walk_steps;
      process_ = compare_to_limit(rescaled_process_samples(pc), cfg_.bootstrap_seed,
                                  std::min<std::size_t>(cfg_.bootstrap_resamples, 500));
      std::ostringstream csv;
      csv.precision(17);
      csv << "t,samples,ks,ks_lower,ks_upper,ks_critical,radial_second_moment,radial_reference,kurtosis,"
             "kurtosis_reference,isotropy_spread\n";
      for (const auto& r : process_->rows)
        csv << r.t << ',' << r.samples << ',' << r.ks << ',' << r.ks_lower << ',' << r.ks_upper << ','
            << r.ks_critical << ',' << r.radial_second_moment << ',' << r.radial_reference << ',' << r.kurtosis
            << ',' << r.kurtosis_reference << ',' << r.isotropy_spread << '\n';
      write_text(out_ / "ks.csv", csv.str());
    }
    if (cfg_.heat_kernel_n > 0) {
      const Normalization nz = normalization(cfg_.heat_kernel_n);
      HeatKernelProfileConfig hc;
      hc.dimension = cfg_.dimension;
      hc.n = cfg_.heat_kernel_n;
      hc.t = 1.0;
      hc.psi = nz.lambda * nz.psi_tilde;
      hc.lambda = nz.lambda;
      hc.x_grid = cfg_.heat_kernel_x;
      hc.environments = cfg_.heat_kernel_environments;
      hc.replicas = cfg_.heat_kernel_replicas;
      hc.master_seed = cfg_.master_seed;
      hc.horizon_margin = cfg_.process_margin;
      heat_ = heat_kernel_profile(hc);
      std::ostringstream csv;
      csv.precision(17);
      csv << "x,mean,standard_error,target\n";
      for (const auto& r : heat_->rows) csv << r.x << ',' << r.mean << ',' << r.standard_error << ',' << r.target << '\n';
      write_text(out_ / "heat_kernel.csv", csv.str());
    }
    if (!cfg_.exit_radii.empty()) {
      ExitConfig ec;
      ec.dimension = cfg_.dimension;
      ec.radii = cfg_.exit_radii;
      ec.environments = cfg_.exit_environments;
      ec.walks_per_environment = cfg_.exit_walks;
      ec.master_seed = cfg_.master_seed;
      ec.band = cfg_.exit_band;
      exit_ = exit_time_scaling(ec);
      std::ostringstream csv;
      csv.precision(17);
      csv << "r,samples,censored,mean_tau,standard_error,psi_tilde,phi,ratio\n";
      for (const auto& r : exit_->rows)
        csv << r.r << ',' << r.samples << ',' << r.censored << ',' << r.mean_tau << ',' << r.standard_error << ','
            << r.psi_tilde << ',' << r.phi << ',' << r.ratio << '\n';
      write_text(out_ / "exit_times.csv", csv.str());
    }
  }

  template <class F>
  void attempt(const std::string& what, F&& f) {
    try {
      f();
    } catch (const std::invalid_argument& e) {
      notes_.push_back(what + " unavailable: " + e.what());
    }
  }

  void estimate() {
    attempt("lambda", [&] { lambda_ = estimate_lambda_prefix(ensemble_, estimator_); });
    attempt("two-sided lambda", [&] {
      TwoSidedConfig tc;
      tc.dimension = cfg_.dimension;
      tc.pairs = cfg_.two_sided_pairs;
      tc.steps_each_side = cfg_.two_sided_steps;
      tc.truncation = cfg_.two_sided_truncation;
      tc.master_seed = cfg_.master_seed;
      two_sided_ = estimate_lambda_two_sided(tc, estimator_);
    });
    attempt("slowly varying tables", [&] { slowly_ = estimate_slowly_varying(ensemble_, estimator_); });
    attempt("alpha", [&] { alpha_ = estimate_alpha_tau(ensemble_, estimator_); });
    std::ostringstream csv;
    csv.precision(17);
    csv << "n,psi_tilde,psi_tilde_se,phi,phi_se,psi,cut_density,normalized_cut_count\n";
    if (slowly_) {
      const auto psi = psi_table(lambda_ ? lambda_->value : 0.0, slowly_->psi_tilde);
      for (std::size_t i = 0; i < psi.size(); ++i) {
        csv << psi[i].n << ',' << slowly_->psi_tilde[i].mean << ',' << slowly_->psi_tilde[i].standard_error << ','
            << slowly_->phi[i].mean << ',' << slowly_->phi[i].standard_error << ',' << (lambda_ ? psi[i].mean : NAN)
            << ',' << slowly_->cut_density[i].mean << ','
            << (alpha_ ? alpha_->normalized_counts[i].mean : NAN) << '\n';
      }
    }
    write_text(out_ / "tables.csv", csv.str());
  }

  void report() {
    json constants = {{"lambda", nullptr}, {"lambda_two_sided", nullptr}, {"alpha", nullptr}, {"tau", nullptr}};
    json tables = json::object();
    json exponents = json::object();
    if (lambda_) {
      constants["lambda"] = to_json(*lambda_);
      tables["lambda_per_n"] = to_json(lambda_->per_n);
    }
    if (two_sided_) constants["lambda_two_sided"] = to_json(*two_sided_);
    if (alpha_) {
      constants["alpha"] = {{"value", alpha_->alpha},
                            {"standard_error", alpha_->alpha_standard_error},
                            {"lower", alpha_->alpha_lower},
                            {"upper", alpha_->alpha_upper}};
      constants["tau"] = alpha_->tau;
      tables["normalized_cut_counts"] = to_json(alpha_->normalized_counts);
    }
    if (slowly_) {
      tables["psi_tilde"] = to_json(slowly_->psi_tilde);
      tables["phi"] = to_json(slowly_->phi);
      tables["cut_density"] = to_json(slowly_->cut_density);
      if (lambda_) tables["psi"] = to_json(psi_table(lambda_->value, slowly_->psi_tilde));
      const double lo = cfg_.exponent_band_low, hi = cfg_.exponent_band_high;
      exponents["psi_tilde"] = to_json(slowly_->psi_fit, slowly_->psi_slope, lo, hi);
      exponents["phi"] = to_json(slowly_->phi_fit, slowly_->phi_slope, lo, hi);
      exponents["cut_density"] = to_json(slowly_->cut_fit, slowly_->cut_slope, lo, hi);
    }
    json ks = json::array();
    if (process_) {
      for (const auto& r : process_->rows)
        ks.push_back({{"n", process_->n},
                      {"t", r.t},
                      {"samples", r.samples},
                      {"ks", r.ks},
                      {"ks_lower", r.ks_lower},
                      {"ks_upper", r.ks_upper},
                      {"ks_critical", r.ks_critical},
                      {"component_mean", r.component_mean},
                      {"component_mean_se", r.component_mean_se},
                      {"component_variance", r.component_variance},
                      {"isotropy_spread", r.isotropy_spread},
                      {"radial_second_moment", r.radial_second_moment},
                      {"radial_reference", r.radial_reference},
                      {"kurtosis", r.kurtosis},
                      {"kurtosis_reference", r.kurtosis_reference}});
    }
    json heat = json::array();
    if (heat_) {
      for (const auto& r : heat_->rows)
        heat.push_back({{"n", heat_->n},
                        {"walk_time", heat_->walk_time},
                        {"x", r.x},
                        {"mean", r.mean},
                        {"standard_error", r.standard_error},
                        {"target", r.target}});
    }
    json exits = nullptr;
    if (exit_) {
      exits = {{"spread", exit_->spread}, {"band", exit_->band}, {"within_band", exit_->within_band}};
      json rows = json::array();
      for (const auto& r : exit_->rows)
        rows.push_back({{"r", r.r},
                        {"samples", r.samples},
                        {"censored", r.censored},
                        {"mean_tau", r.mean_tau},
                        {"standard_error", r.standard_error},
                        {"psi_tilde", r.psi_tilde},
                        {"phi", r.phi},
                        {"ratio", r.ratio}});
      exits["rows"] = rows;
    }
    json cover = nullptr;
    if (!covering_.empty()) {
      std::size_t worst = 0;
      for (const auto& c : covering_) worst = std::max(worst, c.count);
      cover = {{"max_covering_number", worst},
               {"bound", cfg_.cover_bound},
               {"within_bound", static_cast<double>(worst) <= cfg_.cover_bound}};
    }
    const json report = {{"version", RANGEWALK_VERSION},
                         {"master_seed", cfg_.master_seed},
                         {"config_hash", manifest_.config_hash},
                         {"config", result_config()},
                         {"constants", constants},
                         {"tables", tables},
                         {"exponents", exponents},
                         {"ks", ks},
                         {"heat_kernel", heat},
                         {"heat_kernel_sup_deviation", heat_ ? json(heat_->sup_deviation) : json(nullptr)},
                         {"exit_times", exits},
                         {"covering", cover},
                         {"notes", notes_}};
    write_text(out_ / "report.json", report.dump(2) + "\n");
  }

  // output_dir has no bearing on the results, so it stays in the manifest only
  json result_config() const {
    json j = cfg_.to_json();
    j.erase("output_dir");
    return j;
  }

  void inventory() {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(out_)) {
      if (entry.is_regular_file() && entry.path().filename() != "manifest.json") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths)
      manifest_.files.push_back({p.filename().string(), fs::file_size(p), file_crc32(p)});
    write_text(out_ / "manifest.json", manifest_.to_json().dump(2) + "\n");
  }

  struct Cover {
    std::size_t seed_index;
    double radius;
    std::size_t count;
  };

  const ExperimentConfig& cfg_;
  fs::path out_;
  RunManifest manifest_;
  Time horizon_ = 0;
  EstimatorOptions estimator_;
  std::vector<Trajectory> trajectories_;
  Ensemble ensemble_;
  std::vector<Cover> covering_;
  std::optional<ScalarEstimate> lambda_, two_sided_;
  std::optional<SlowlyVaryingEstimate> slowly_;
  std::optional<AlphaTauEstimate> alpha_;
  std::optional<ProcessComparisonReport> process_;
  std::optional<HeatKernelProfile> heat_;
  std::optional<ExitScaling> exit_;
  std::vector<std::string> notes_;
};

}  // namespace

RunManifest run_pipeline(const ExperimentConfig& config, const PipelineOptions& options) {
  config.validate();
  return Run(config, options).execute(options.stop_after);
}

json verify_report(const ExperimentConfig& config) {
  config.validate();
  json j = verify_suite(config.verify_options());
  j["config"] = config.to_json();
  j["config_hash"] = config.hash();
  return j;
}

}  // namespace rangewalk
