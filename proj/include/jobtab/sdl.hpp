#pragma once

// Disclosure-limitation noise: a two-sided symmetric ramp distribution
// centered at 1 with support [1-b, 1-a] U [1+a, 1+b], plus permanent
// employer-level assignment and independent simulation batches.

#include <cstdint>
#include <vector>

#include "jobtab/config.hpp"
#include "jobtab/types.hpp"

namespace jobtab {

// Density of the noise factor at delta:
//   (b - |delta-1|) / (b-a)^2   for a <= |delta-1| <= b, else 0.
// Symmetric about 1, integrates to 1, mean exactly 1.
double ramp_density(double delta, const RampParams& params);

// Inverse CDF: maps u in [0,1) to a noise factor. u < 1/2 lands below 1.
double ramp_quantile(double u, const RampParams& params);

// Exact moments of the ramp: E[(delta-1)^2].
double ramp_variance(const RampParams& params);

// Permanent production noise factor for one employer. The stream is keyed by
// employer id only, so the factor is identical in every quarter and every run
// with the same master seed.
double draw_delta(std::uint64_t employer_id, const RampParams& params,
                  std::uint64_t master_seed);

// One complete employer -> delta assignment.
struct NoiseAssignment {
  std::vector<double> delta;  // indexed by employer index

  static NoiseAssignment all_unity(std::size_t n_employers) {
    NoiseAssignment a;
    a.delta.assign(n_employers, 1.0);
    return a;
  }
};

// Production assignment for a world (tag "sdl_prod").
NoiseAssignment assign_noise(const World& world, const RampParams& params,
                             std::uint64_t master_seed, bool sdl_enabled);

// G independent full assignments, from the "sdl_sim" stream family, disjoint
// from the production stream: these estimate the variance of the mechanism,
// not the realized production draw. Throws if G < 2.
std::vector<NoiseAssignment> simulate_sdl_draws(int G, const World& world,
                                                const RampParams& params,
                                                std::uint64_t master_seed,
                                                bool sdl_enabled = true);

}  // namespace jobtab
