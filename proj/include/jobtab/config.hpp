#pragma once

// Run and world configuration, loaded from a JSON config file. CLI flags
// override file values; all validation happens up front so a bad config
// fails before any work starts.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jobtab/types.hpp"

namespace jobtab {

struct RampParams {
  // Proportional distortion bounds: every noise factor satisfies
  // a <= |delta - 1| <= b. Stand-ins for the confidential production values.
  double a = 0.01;
  double b = 0.10;

  void validate() const;  // throws std::invalid_argument
};

struct WorldConfig {
  std::vector<std::string> states{"AA"};
  int n_employers = 50;
  int n_quarters = 8;
  int base_year = 2010;
  int n_counties = 4;
  int n_industries = 4;
  double public_share = 0.15;

  // Employer size (jobs per employer): lognormal, rounded up, capped.
  double size_log_mean = 1.6;
  double size_log_sd = 1.0;
  int size_max = 2000;

  // Per-sector probability that an employer-quarter's UI records are missing
  // (the 1-f target). MCAR within sector.
  std::array<double, kNumSectors> record_missing{0.02, 0.02};

  // Probability that a QCEW month value is individually absent, and that an
  // employer-quarter has no QCEW report at all.
  double qcew_month_missing = 0.05;
  double qcew_quarter_missing = 0.05;
  // Fraction of employers that never appear in QCEW (excluded from frame).
  double qcew_never_fraction = 0.0;

  // Item missingness per worker characteristic slot.
  std::array<double, kNumWorkerItems> item_missing{0.07, 0.07, 0.18, 0.18, 0.87};

  // Quarterly earnings: lognormal, rounded to whole dollars, floored at $1.
  double earnings_log_mean = 8.0;
  double earnings_log_sd = 0.7;

  // Probability a match that is active in quarter t stays active in t+1,
  // and the share of matches already active at the first quarter.
  double continuation = 0.90;
  double initial_active = 0.60;

  void validate() const;
};

struct TableSpec {
  std::string name;
  std::vector<Item> dims;
};

enum class VarianceMode : std::uint8_t { TextTables = 0, Supplemental = 1 };

inline const char* variance_mode_name(VarianceMode m) {
  return m == VarianceMode::TextTables ? "text_tables" : "supplemental";
}

struct RunConfig {
  std::uint64_t seed = 1;
  int L = 10;  // implicates
  int G = 10;  // SDL simulation draws
  RampParams ramp;
  // When false, every production and simulation noise factor is exactly 1
  // (used by degenerate-exactness checks and for unprotected internal runs).
  bool sdl_enabled = true;
  VarianceMode mode = VarianceMode::TextTables;
  // Frame window [first, last] quarter indices; empty = full data span.
  std::optional<std::pair<int, int>> frame_window;
  std::vector<TableSpec> tables;
  std::vector<std::string> stats{"M", "B", "F", "ZW3", "W1"};
  int threads = 0;  // 0 = hardware concurrency
  std::string world_dir = "world";
  std::string out_dir = "out";
  std::string format = "csv";  // csv | jsonl

  void validate() const;
};

struct Config {
  WorldConfig world;
  RunConfig run;
};

Config load_config(const std::string& path);
std::string config_to_json(const Config& cfg);
Config config_from_json(const std::string& text);

// Stable hash of the canonical config serialization, recorded in output
// manifests so any file can be traced to the exact run that made it.
std::string config_hash(const Config& cfg);

extern const char* const kJobtabVersion;

}  // namespace jobtab
