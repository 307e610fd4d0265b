#include "jobtab/sdl.hpp"

#include <cmath>
#include <stdexcept>

#include "jobtab/rng.hpp"

namespace jobtab {

double ramp_density(double delta, const RampParams& params) {
  params.validate();
  if (params.a == params.b)
    throw std::invalid_argument("ramp density undefined for a == b");
  const double u = std::fabs(delta - 1.0);
  if (u < params.a || u > params.b) return 0.0;
  const double span = params.b - params.a;
  return (params.b - u) / (span * span);
}

double ramp_quantile(double u, const RampParams& params) {
  params.validate();
  // Split the unit interval by side, then invert the one-sided CDF
  //   F(x) = 1 - (b-x)^2/(b-a)^2  on  a <= x <= b.
  bool upper = u >= 0.5;
  double v = upper ? 2.0 * (u - 0.5) : 2.0 * (0.5 - u);
  if (v > 1.0) v = 1.0;
  const double x = params.b - (params.b - params.a) * std::sqrt(1.0 - v);
  return upper ? 1.0 + x : 1.0 - x;
}

double ramp_variance(const RampParams& params) {
  params.validate();
  if (params.a == params.b) return params.a * params.a;
  // 2/(b-a)^2 * int_a^b u^2 (b-u) du
  const double a = params.a, b = params.b;
  const double span = b - a;
  const double integral = b * b * b * b / 12.0 - a * a * a * b / 3.0 +
                          a * a * a * a / 4.0;
  return 2.0 * integral / (span * span);
}

double draw_delta(std::uint64_t employer_id, const RampParams& params,
                  std::uint64_t master_seed) {
  KeyedRng rng(master_seed, "sdl_prod", employer_id);
  return ramp_quantile(rng.next_u01(), params);
}

NoiseAssignment assign_noise(const World& world, const RampParams& params,
                             std::uint64_t master_seed, bool sdl_enabled) {
  NoiseAssignment out;
  out.delta.resize(world.employers.size(), 1.0);
  if (!sdl_enabled) return out;
  for (std::size_t e = 0; e < world.employers.size(); ++e)
    out.delta[e] = draw_delta(world.employers[e].id, params, master_seed);
  return out;
}

std::vector<NoiseAssignment> simulate_sdl_draws(int G, const World& world,
                                                const RampParams& params,
                                                std::uint64_t master_seed,
                                                bool sdl_enabled) {
  if (G < 2) throw std::invalid_argument("SDL simulation requires G >= 2");
  std::vector<NoiseAssignment> draws(G);
  for (int g = 0; g < G; ++g) {
    draws[g].delta.resize(world.employers.size(), 1.0);
    if (!sdl_enabled) continue;
    for (std::size_t e = 0; e < world.employers.size(); ++e) {
      KeyedRng rng(master_seed, "sdl_sim", world.employers[e].id,
                   static_cast<std::uint64_t>(g));
      draws[g].delta[e] = ramp_quantile(rng.next_u01(), params);
    }
  }
  return draws;
}

}  // namespace jobtab
