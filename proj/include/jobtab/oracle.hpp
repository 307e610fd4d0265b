#pragma once

// Independent brute-force validation: exact enumeration on tiny worlds,
// Monte Carlo on small worlds, and negative controls that must trip.
// Every variance formula in the variance module is covered by at least one
// registered check; the suite refuses to run if a formula is uncovered.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "jobtab/config.hpp"
#include "jobtab/indicators.hpp"
#include "jobtab/microdata.hpp"
#include "jobtab/variance.hpp"

namespace jobtab {

struct OracleReport {
  std::string check;
  std::string detail;
  long long replications = 0;
  double formula_value = 0;
  double empirical_value = 0;
  double standard_error = 0;
  std::string tolerance;  // human-readable pass rule
  bool hard = true;       // hard checks gate the exit status
  bool pass = true;
};

// --- Replication engine -----------------------------------------------------
//
// Re-draws the random layers (record missingness, item missingness,
// imputation, employer noise) on a fixed ground-truth world. Per-replication
// streams are keyed by (seed, purpose, replication index), so replications
// are independent and safe to run in parallel.

struct RepPlan {
  std::array<double, kNumSectors> record_missing{0.0, 0.0};
  std::array<double, kNumWorkerItems> item_missing{};
  // >= 0: draw exactly this many reporting employers per replication
  // (simple random sample without replacement); -1: Bernoulli per employer.
  int fixed_sample_n = -1;
  bool impute = true;       // false: implicates hold ground truth
  bool sdl_enabled = true;  // false: production and simulated noise all 1
  bool want_sim_draws = true;

  // Negative-control hooks.
  bool shared_stream = false;  // noise factor reuses the reporting draw
  int shared_stream_quarter = 1;
  double ramp_bias = 0.0;  // additive shift of every production noise factor
};

struct RepDraw {
  std::uint64_t rep_seed = 0;
  World world;  // ground truth with re-drawn missingness
  FrameTable frame;
  WeightTable weights;
  ImplicateTable implicates;
  NoiseAssignment noise;
  std::vector<NoiseAssignment> sim_draws;
};

class Replicator {
 public:
  Replicator(const World& world, const RunConfig& run, RepPlan plan);

  RepDraw draw(std::uint64_t rep) const;

  // Decomposition of one cell under one replication draw.
  CellDecomposition eval_cell(const RepDraw& d, const CellCodec& codec,
                              std::size_t cell, int state, int quarter,
                              Stat stat) const;

  const JobFlags& flags() const { return flags_; }
  const World& world() const { return world_; }
  const RunConfig& run() const { return run_; }
  const RepPlan& plan() const { return plan_; }

 private:
  World world_;
  RunConfig run_;
  RepPlan plan_;
  JobFlags flags_;
};

// --- Spec operations --------------------------------------------------------

// Exact enumeration of the sampling variance of the cell proportion under
// "n of N employers observed" with one job per employer, against the
// closed-form finite-population variance at the truth and the subset mean of
// the estimated variance.
struct EnumVariance {
  double enumerated = 0;      // variance of p-hat over all subsets
  double formula = 0;         // closed form at the truth
  double mean_estimator = 0;  // mean of the estimated variance over subsets
  long long n_subsets = 0;
};
EnumVariance enumerate_srs_variance(int n_employers, int cell_count,
                                    int sample_size);

struct CellRef {
  TableSpec spec;
  std::vector<std::int16_t> coords;
  int state = 0;
  int quarter = 1;
};

// Mean of (estimator - estimand) over R full-pipeline replications.
// assert_pass: |mean| <= 3 SE gates the report (the B theorem); otherwise the
// report is informational (no comparable proof for M, F, ZW3, W1).
OracleReport mc_bias(const Replicator& rep, const CellRef& cell, Stat stat,
                     long long R, bool assert_pass, int threads = 0);

enum class VarComponent { V1, VSdl, VT };

// Empirical variance of the relevant estimator component across replications
// vs. the mean of the formula estimator, at `rel_tol` relative tolerance.
OracleReport mc_variance(const Replicator& rep, const CellRef& cell, Stat stat,
                         VarComponent component, long long R, double rel_tol,
                         bool assert_pass, int threads = 0);

// Sample correlation between the no-noise estimator and the noise component
// across replications; pass if |corr| < 0.05 (or > 0.05 for the engineered
// negative control).
OracleReport mc_independence(const Replicator& rep, const CellRef& cell,
                             long long R, bool expect_dependent,
                             int threads = 0);

// --- Registry ---------------------------------------------------------------

struct OracleCheck {
  std::string name;
  std::vector<std::string> formulas;
  std::function<std::vector<OracleReport>(std::uint64_t seed, int threads)> run;
};

std::vector<OracleCheck> oracle_registry();
std::vector<std::string> required_formula_coverage();

// Runs all (or the named subset of) checks, streaming one line per report to
// `os`. Throws if a required formula is uncovered or a name is unknown.
std::vector<OracleReport> run_oracle_suite(const std::vector<std::string>& only,
                                           std::uint64_t seed, int threads,
                                           std::ostream& os);

bool all_hard_checks_pass(const std::vector<OracleReport>& reports);
void write_oracle_csv(std::ostream& os, const std::vector<OracleReport>& reports);

// Small deterministic world for oracle checks: one state, private sector,
// full-span job spells, QCEW always present.
struct OracleWorldSpec {
  int n_employers = 12;
  int jobs_per_employer = 1;
  int n_quarters = 3;
  int n_counties = 1;
  int n_industries = 1;
  double education_missing = 0.0;
  double gender_missing = 0.0;
  double earnings_log_sd = 0.3;
};
World make_oracle_world(const OracleWorldSpec& spec, std::uint64_t seed);

}  // namespace jobtab
