#include "jobtab/variance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jobtab/stats_math.hpp"

namespace jobtab {

double v1_count(double est1_no_sdl, double n_pop, double f, std::uint32_t* flags) {
  if (n_pop <= 0.0) return 0.0;
  if (f >= 1.0) return 0.0;  // finite population fully observed
  if (f * n_pop <= 1.0) {
    if (flags) *flags |= kFlagDegenerate;
    return 0.0;
  }
  double p = est1_no_sdl / n_pop;
  p = std::clamp(p, 0.0, 1.0);
  return n_pop * n_pop * p * (1.0 - p) * (1.0 - f) / (f * n_pop - 1.0);
}

namespace {

// Sum of squared deviations about `center` from (n, sum, sum of squares).
double ss_about(const CellTable::EarnSuff& suff, double center) {
  double ss = suff.ss - 2.0 * center * suff.s + suff.n * center * center;
  return std::max(ss, 0.0);
}

}  // namespace

double v1_mean_zw3(const CellTable::EarnSuff& suff, double center,
                   double f_hat_no_sdl, double f, std::uint32_t* flags) {
  if (f_hat_no_sdl <= 0.0) return 0.0;
  if (f >= 1.0) return 0.0;
  const double n_obs = f * f_hat_no_sdl;
  if (n_obs <= 1.0) {
    if (flags) *flags |= kFlagDegenerate;
    return 0.0;
  }
  return ss_about(suff, center) / (n_obs - 1.0) * (1.0 - f) / n_obs;
}

double v1_total_w1(const CellTable::EarnSuff& suff, double center,
                   double m_hat_no_sdl, double f, std::uint32_t* flags) {
  if (m_hat_no_sdl <= 0.0) return 0.0;
  if (f >= 1.0) return 0.0;
  const double n_obs = f * m_hat_no_sdl;
  if (n_obs <= 1.0) {
    if (flags) *flags |= kFlagDegenerate;
    return 0.0;
  }
  // ss/(n_obs-1) * m_hat^2 (1-f) / n_obs
  return ss_about(suff, center) / (n_obs - 1.0) * m_hat_no_sdl * m_hat_no_sdl *
         (1.0 - f) / n_obs;
}

double v_sdl(const std::vector<double>& sdl_components) {
  const int G = static_cast<int>(sdl_components.size());
  if (G < 2) throw std::invalid_argument("noise-variance simulation requires G >= 2");
  auto [mn, mx] = std::minmax_element(sdl_components.begin(), sdl_components.end());
  if (*mn == *mx) return 0.0;  // no noise, no variance (exact zero)
  double mean = 0;
  for (double x : sdl_components) mean += x;
  mean /= G;
  double s = 0;
  for (double x : sdl_components) s += (x - mean) * (x - mean);
  return s / (G - 1);
}

RubinResult rubin_combine(const std::vector<double>& per_implicate_estimates,
                          const std::vector<double>& per_implicate_withins,
                          double v_sdl_value) {
  const int L = static_cast<int>(per_implicate_estimates.size());
  if (L < 2)
    throw std::invalid_argument("between-implicate variance requires L >= 2");
  if (per_implicate_withins.size() != per_implicate_estimates.size())
    throw std::invalid_argument("implicate estimate/within length mismatch");

  RubinResult r;
  for (double v : per_implicate_withins) r.v_w += v;
  r.v_w /= L;

  auto [mn, mx] = std::minmax_element(per_implicate_estimates.begin(),
                                      per_implicate_estimates.end());
  if (*mn == *mx) {
    r.estimate = *mn;
    r.v_b = 0.0;  // identical implicates: exactly no imputation spread
  } else {
    for (double e : per_implicate_estimates) r.estimate += e;
    r.estimate /= L;
    for (double e : per_implicate_estimates)
      r.v_b += (e - r.estimate) * (e - r.estimate);
    r.v_b /= (L - 1);
  }
  r.v_t = r.v_w + double(L + 1) / L * (r.v_b + v_sdl_value);
  return r;
}

double degrees_of_freedom(double v_w, double v_b, double v_sdl_value, int L,
                          double n_k) {
  if (n_k <= 1.0) return 0.0;
  const double cap = n_k - 1.0;
  const double between = v_b + v_sdl_value;
  if (between <= 0.0) return cap;  // pure-sampling-variance regime
  const double ratio = 1.0 + double(L) / (L + 1) * v_w / between;
  return std::min(cap, (L - 1) * ratio * ratio);
}

CvMoe cv_and_moe(double estimate, double v_t, double df, double level) {
  CvMoe out;
  const double sd = std::sqrt(std::max(v_t, 0.0));
  if (estimate != 0.0) {
    out.cv_defined = true;
    out.cv = sd / estimate;
  }
  if (df >= 1.0) {
    out.moe_defined = true;
    out.moe = sd == 0.0 ? 0.0 : t_quantile(0.5 * (1.0 + level), df) * sd;
  }
  return out;
}

CellDecomposition decompose_cell(const CellTable& table, std::size_t cell,
                                 Stat stat, const EvalContext& ctx) {
  const int L = table.L();
  if (L < 2)
    throw std::invalid_argument("variance decomposition requires L >= 2 implicates");
  if (!ctx.sim_draws || ctx.sim_draws->size() < 2)
    throw std::invalid_argument("variance decomposition requires G >= 2 noise draws");

  CellDecomposition out;
  const bool text_mode = ctx.mode == VarianceMode::TextTables;

  auto chosen = [&](Stat s, Sector h, int l) {
    return text_mode ? table.per_l_no(cell, s, h, l)
                     : table.per_l_with(cell, s, h, l);
  };

  // Point estimates in every mode: the published estimator carries the
  // production noise; its noise-free twin is used for denominators and N_k.
  double den = 0;  // ZW3 denominator (implicate-averaged noise-free F)
  std::array<double, kNumSectors> den_h{};
  if (stat == Stat::ZW3) {
    for (int h = 0; h < kNumSectors; ++h) {
      den_h[h] = table.avg_no(cell, Stat::F, static_cast<Sector>(h));
      den += den_h[h];
    }
    if (den == 0.0) {
      out.defined = false;
      out.flags |= kFlagSuppressedEmpty;
      return out;
    }
  }

  double pub = 0, nos = 0;
  for (int h = 0; h < kNumSectors; ++h) {
    pub += table.avg_with(cell, stat, static_cast<Sector>(h));
    nos += table.avg_no(cell, stat, static_cast<Sector>(h));
  }
  out.published = stat == Stat::ZW3 ? pub / den : pub;
  out.no_sdl = stat == Stat::ZW3 ? nos / den : nos;

  // Per-implicate combined estimates and within-implicate variances.
  std::vector<double> est_l(L, 0.0), v1_l(L, 0.0);
  for (int l = 0; l < L; ++l) {
    for (int h = 0; h < kNumSectors; ++h) {
      const Sector hh = static_cast<Sector>(h);
      const StratumPops& pop = ctx.pops[h];
      if (!pop.valid) continue;
      const double est_hl = chosen(stat, hh, l);

      switch (stat) {
        case Stat::M:
        case Stat::B:
        case Stat::F: {
          est_l[l] += est_hl;
          const double n_pop = stat == Stat::M   ? pop.n_m
                               : stat == Stat::B ? pop.n_b
                                                 : pop.n_f;
          v1_l[l] += v1_count(est_hl, n_pop, pop.f, &out.flags);
          break;
        }
        case Stat::ZW3: {
          est_l[l] += est_hl / den;
          if (den_h[h] > 0.0) {
            const double share = den_h[h] / den;
            const double center = est_hl / den_h[h];
            v1_l[l] += share * share *
                       v1_mean_zw3(table.zw3_suff(cell, hh, l), center,
                                   den_h[h], pop.f, &out.flags);
          }
          break;
        }
        case Stat::W1: {
          est_l[l] += est_hl;
          const double m_hat = table.avg_no(cell, Stat::M, hh);
          if (m_hat > 0.0) {
            const double center = est_hl / m_hat;
            v1_l[l] += v1_total_w1(table.w1_suff(cell, hh, l), center, m_hat,
                                   pop.f, &out.flags);
          }
          break;
        }
      }
    }
  }

  // Noise-infusion component: recompute the estimator under each simulated
  // assignment (holding the first implicate) minus the noise-free value.
  const auto& draws = *ctx.sim_draws;
  std::vector<double> sdl_components(draws.size(), 0.0);
  for (std::size_t g = 0; g < draws.size(); ++g) {
    double d = 0;
    for (const EmpContrib& ec : table.contribs(cell))
      d += (draws[g].delta[ec.employer] - 1.0) * ec.c[static_cast<int>(stat)];
    sdl_components[g] = stat == Stat::ZW3 ? d / den : d;
  }
  const double v_sdl_value = v_sdl(sdl_components);

  RubinResult rubin = rubin_combine(est_l, v1_l, v_sdl_value);
  out.v_w = rubin.v_w;
  out.v_b = rubin.v_b;
  out.v_sdl = v_sdl_value;
  out.v_t = rubin.v_t;
  out.per_implicate = std::move(est_l);

  // Observed job count in the cell, on the statistic's class variable.
  const Stat cls = class_stat(stat);
  for (int h = 0; h < kNumSectors; ++h) {
    if (!ctx.pops[h].valid) continue;
    out.n_k += ctx.pops[h].f * table.avg_no(cell, cls, static_cast<Sector>(h));
  }

  out.df = degrees_of_freedom(out.v_w, out.v_b, out.v_sdl, L, out.n_k);
  if (out.n_k <= 1.0) out.flags |= kFlagDegenerate;
  out.cvmoe = cv_and_moe(out.published, out.v_t, out.df);
  return out;
}

}  // namespace jobtab
