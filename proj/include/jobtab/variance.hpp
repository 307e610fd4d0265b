#pragma once

// Variance decomposition per publication cell: within-sampling variance under
// the MCAR record-missingness model (finite-population forms), noise-infusion
// variance by simulation, between-implicate imputation variance, and the
// combined total with CV, approximate degrees of freedom and margin of error.

#include <cstdint>
#include <vector>

#include "jobtab/indicators.hpp"

namespace jobtab {

// Cell status flags carried through to output.
enum : std::uint32_t {
  kFlagDegenerate = 1u << 0,       // observed support too thin (f*N <= 1 etc.)
  kFlagSuppressedEmpty = 1u << 1,  // ZW3 with no full-quarter jobs
  kFlagSuppressed = 1u << 2,       // publication suppression (count 1-2)
};

// Within-sampling variance of a count estimator: N^2 * p(1-p)(1-f)/(fN-1)
// with p = est1/N. Returns 0 with the degenerate flag when f*N <= 1, and
// exactly 0 when f == 1.
double v1_count(double est1_no_sdl, double n_pop, double f,
                std::uint32_t* flags = nullptr);

// Within-sampling variance of the full-quarter earnings mean, from the
// unweighted sufficient statistics of w1/3 over observed full-quarter jobs in
// the cell and a center value (the cell's per-implicate mean estimate).
double v1_mean_zw3(const CellTable::EarnSuff& suff, double center,
                   double f_hat_no_sdl, double f, std::uint32_t* flags = nullptr);

// Within-sampling variance of the payroll total, same pattern with w1 over
// observed M jobs and the estimated M population.
double v1_total_w1(const CellTable::EarnSuff& suff, double center,
                   double m_hat_no_sdl, double f, std::uint32_t* flags = nullptr);

// Noise-infusion variance from G simulated noise components (each component
// is "estimator with simulated noise minus noise-free estimator"): the sample
// variance of the G values. Throws if G < 2.
double v_sdl(const std::vector<double>& sdl_components);

struct RubinResult {
  double estimate = 0;  // implicate mean
  double v_w = 0;       // average within-implicate variance
  double v_b = 0;       // between-implicate variance
  double v_t = 0;       // v_w + (L+1)/L * (v_b + v_sdl)
};

// Combining rules over L implicates. Throws if L < 2.
RubinResult rubin_combine(const std::vector<double>& per_implicate_estimates,
                          const std::vector<double>& per_implicate_withins,
                          double v_sdl);

// Moment-matched approximate degrees of freedom, capped at n_k - 1.
// v_b + v_sdl == 0 collapses to the cap.
double degrees_of_freedom(double v_w, double v_b, double v_sdl, int L,
                          double n_k);

struct CvMoe {
  bool cv_defined = false;
  double cv = 0;
  bool moe_defined = false;
  double moe = 0;
};

// CV = sqrt(v_t)/estimate (undefined when estimate == 0); MOE = half-width of
// the t confidence interval at `level` (default 90%), defined for df >= 1.
CvMoe cv_and_moe(double estimate, double v_t, double df, double level = 0.90);

// --- Full per-cell decomposition -------------------------------------------

struct EvalContext {
  const WeightTable* weights = nullptr;
  std::array<StratumPops, kNumSectors> pops{};
  const std::vector<NoiseAssignment>* sim_draws = nullptr;  // size G
  int state = 0;
  int quarter = 0;
  int L = 10;
  VarianceMode mode = VarianceMode::TextTables;
};

struct CellDecomposition {
  bool defined = true;  // false: ZW3 with no full-quarter jobs
  double published = 0;
  double no_sdl = 0;
  double v_w = 0, v_b = 0, v_sdl = 0, v_t = 0;
  double n_k = 0;
  double df = 0;
  CvMoe cvmoe;
  std::uint32_t flags = 0;
  std::vector<double> per_implicate;  // mode-dependent per-implicate estimates
};

CellDecomposition decompose_cell(const CellTable& table, std::size_t cell,
                                 Stat stat, const EvalContext& ctx);

}  // namespace jobtab
