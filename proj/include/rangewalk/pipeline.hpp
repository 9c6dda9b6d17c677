#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rangewalk/laplacian.hpp"
#include "rangewalk/lattice_walk.hpp"
#include "rangewalk/verify.hpp"

namespace rangewalk {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a cache file does not match its recorded checksum.
class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key = value experiment description. Every key has a default; lists
/// are comma separated and accept 2^k for integers.
struct ExperimentConfig {
  int dimension = 4;
  std::vector<Time> n_grid{1024};
  std::size_t seeds = 30;
  std::uint64_t master_seed = 1;
  double horizon_margin = 1.25;
  std::string cut_buffer = "log6";  ///< log6 | none
  std::string solver = "auto";      ///< auto | dense | sparse | cg
  double solver_tolerance = 1e-10;
  std::uint32_t oracle_cap = 4000;
  std::size_t min_replicas = 30;
  std::size_t bootstrap_resamples = 1000;
  std::uint64_t bootstrap_seed = 0x5eed;

  std::size_t two_sided_pairs = 2000;
  Time two_sided_steps = 4096;
  Time two_sided_truncation = 64;

  std::vector<double> t_grid{1.0};
  Time process_n = 0;  ///< 0 skips the rescaled-process stage
  std::size_t process_environments = 500;
  double process_margin = 16.0;
  double max_walk_steps = 2e10;

  Time heat_kernel_n = 0;  ///< 0 skips the heat-kernel profile
  std::vector<double> heat_kernel_x{0.0, 0.5, 1.0};
  std::size_t heat_kernel_environments = 100;
  std::size_t heat_kernel_replicas = 10000;

  std::vector<double> exit_radii;  ///< empty skips exit times
  std::size_t exit_environments = 200;
  std::size_t exit_walks = 10;

  std::vector<double> cover_radii;  ///< empty skips the covering check
  double cover_bound = 8.0;

  double exponent_band_low = -0.8;
  double exponent_band_high = -0.25;
  double exit_band = 3.0;

  std::size_t verify_seeds = 20;
  Time verify_horizon = 2000;

  std::string output_dir = "rangewalk-out";

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError on empty or unsorted grids, zero seeds, nonpositive tolerances.
  void validate() const;
  /// All keys with their resolved values, in a fixed order.
  std::vector<std::pair<std::string, std::string>> echo() const;
  std::string echo_text() const;
  /// crc32 of the echo without output_dir, as 8 hex digits.
  std::string hash() const;
  nlohmann::json to_json() const;

  SolverOptions solver_options() const;
  VerifyOptions verify_options() const;
};

inline constexpr const char* kStages[] = {"generate", "graph", "cuts", "metrics", "walk", "estimate", "report"};

struct StageStatus {
  std::string name;
  std::string status;  ///< ok | failed | skipped
  std::string message;
};

struct FileEntry {
  std::string name;
  std::uintmax_t bytes = 0;
  std::uint32_t crc32 = 0;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::vector<StageStatus> stages;
  std::vector<FileEntry> files;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::filesystem::path cache_dir;
  nlohmann::json config;

  bool ok() const;
  nlohmann::json to_json() const;
};

struct PipelineOptions {
  std::optional<std::string> stop_after;  ///< last stage to run
  std::optional<std::filesystem::path> cache_dir;
  unsigned threads = 1;
};

/// RANGEWALK_CACHE_DIR, else $XDG_CACHE_HOME/rangewalk, else ~/.cache/rangewalk.
std::filesystem::path default_cache_dir();

std::uint32_t file_crc32(const std::filesystem::path& path);

/// generate -> graph -> cuts -> metrics -> walk -> estimate -> report. Writes
/// CSVs, report.json and manifest.json into config.output_dir. A failing stage
/// is recorded and the remaining stages are skipped.
RunManifest run_pipeline(const ExperimentConfig& config, const PipelineOptions& options = {});

/// verify_suite at the config's verify sizes and solver settings, with the config echo attached.
nlohmann::json verify_report(const ExperimentConfig& config);

}  // namespace rangewalk
