#pragma once

// Job-level flags (m/b/f), partitions and cells, and the accumulation engine
// behind the five statistics:
//
//   M    total flow employment        sum of m
//   B    beginning-of-quarter         sum of b (m in t and t-1)
//   F    full-quarter                 sum of f (m in t-1, t, t+1)
//   ZW3  avg monthly earnings of F    (sum of f*w1/3) / F
//   W1   total quarterly payroll      sum of w1 over M jobs
//
// The engine produces, per cell: the published estimator (weights, permanent
// employer noise, 1/L average over implicates), its no-noise counterpart,
// per-implicate values for both, per-employer contributions for noise
// simulation, and unweighted earnings sufficient statistics for the
// dispersion-based variance formulas.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "jobtab/config.hpp"
#include "jobtab/frame.hpp"
#include "jobtab/microdata.hpp"
#include "jobtab/sdl.hpp"
#include "jobtab/types.hpp"

namespace jobtab {

enum class Stat : int { M = 0, B = 1, F = 2, ZW3 = 3, W1 = 4 };
constexpr int kNumStats = 5;
constexpr std::array<Stat, 5> kAllStats{Stat::M, Stat::B, Stat::F, Stat::ZW3,
                                        Stat::W1};

const char* stat_name(Stat s);
bool stat_from_name(const std::string& name, Stat& out);

// The size-class variable for each statistic: M for M/W1 tables, B for B,
// F for F/ZW3.
Stat class_stat(Stat s);

// Supported tabulation quarters: B needs t-1; F and ZW3 need t-1 and t+1.
bool stat_in_support(Stat s, int q, int n_quarters);

class JobFlags {
 public:
  explicit JobFlags(const World& world);

  bool m(std::size_t job, int q) const { return bits(job, q) & 1; }
  bool b(std::size_t job, int q) const { return bits(job, q) & 2; }
  bool f(std::size_t job, int q) const { return bits(job, q) & 4; }

  int n_quarters() const { return n_quarters_; }

 private:
  std::uint8_t bits(std::size_t job, int q) const {
    return data_[job * n_quarters_ + q];
  }
  int n_quarters_ = 0;
  std::vector<std::uint8_t> data_;
};

// Mixed-radix codec between partition coordinates and dense cell indices.
class CellCodec {
 public:
  CellCodec(const TableSpec& spec, const CategorySchema& schema);

  std::size_t n_cells() const { return n_cells_; }
  const std::vector<Item>& dims() const { return dims_; }

  // Code for a fully-observed characteristics vector (uses implicate values
  // for worker items, employer values for county/industry).
  std::size_t code_of(const Characteristics& truth) const;
  std::vector<std::int16_t> decode(std::size_t code) const;
  std::string cell_label(std::size_t code) const;

  // Employer-feature projection of a cell (-1 when the partition does not
  // constrain that item), for structural-zero classification.
  void employer_projection(std::size_t code, std::int16_t& county,
                           std::int16_t& industry) const;

 private:
  friend class CellAccumulator;
  std::vector<Item> dims_;
  std::vector<int> radix_;
  std::size_t n_cells_ = 1;
};

// Per-employer weighted, noise-free contribution to one cell at the first
// implicate; the noise-variance simulation rescales these by (delta-1).
struct EmpContrib {
  std::uint32_t employer;
  std::array<double, kNumStats> c{};
};

// Accumulated sums for every cell of one (partition, state, quarter).
class CellTable {
 public:
  CellTable() = default;
  CellTable(std::size_t n_cells, int L);

  int L() const { return L_; }
  std::size_t n_cells() const { return n_cells_; }

  // Implicate-averaged weighted sums (the published estimator's bracket):
  // avg_with includes the employer noise factor, avg_no does not.
  double avg_with(std::size_t cell, Stat s, Sector h) const {
    return avg_with_[avg_idx(cell, s, h)];
  }
  double avg_no(std::size_t cell, Stat s, Sector h) const {
    return avg_no_[avg_idx(cell, s, h)];
  }
  // Per-implicate weighted sums.
  double per_l_with(std::size_t cell, Stat s, Sector h, int l) const {
    return l_with_[l_idx(cell, s, h, l)];
  }
  double per_l_no(std::size_t cell, Stat s, Sector h, int l) const {
    return l_no_[l_idx(cell, s, h, l)];
  }

  // Unweighted sufficient statistics over observed jobs, per implicate:
  // count, sum and sum of squares of w1/3 over full-quarter jobs (ZW3) and of
  // w1 over M jobs (W1).
  struct EarnSuff {
    double n = 0, s = 0, ss = 0;
  };
  const EarnSuff& zw3_suff(std::size_t cell, Sector h, int l) const {
    return zw3_[suff_idx(cell, h, l)];
  }
  const EarnSuff& w1_suff(std::size_t cell, Sector h, int l) const {
    return w1_[suff_idx(cell, h, l)];
  }

  const std::vector<EmpContrib>& contribs(std::size_t cell) const {
    return emp_[cell];
  }

 private:
  friend class CellAccumulator;
  std::size_t avg_idx(std::size_t cell, Stat s, Sector h) const {
    return (cell * kNumStats + static_cast<int>(s)) * kNumSectors +
           static_cast<int>(h);
  }
  std::size_t l_idx(std::size_t cell, Stat s, Sector h, int l) const {
    return avg_idx(cell, s, h) * L_ + l;
  }
  std::size_t suff_idx(std::size_t cell, Sector h, int l) const {
    return (cell * kNumSectors + static_cast<int>(h)) * L_ + l;
  }

  int L_ = 0;
  std::size_t n_cells_ = 0;
  std::vector<double> avg_with_, avg_no_, l_with_, l_no_;
  std::vector<EarnSuff> zw3_, w1_;
  std::vector<std::vector<EmpContrib>> emp_;
};

struct AccumInputs {
  const World* world = nullptr;
  const JobFlags* flags = nullptr;
  const FrameTable* frame = nullptr;
  const WeightTable* weights = nullptr;      // unused in truth mode
  const ImplicateTable* implicates = nullptr;  // unused in truth mode
  const NoiseAssignment* noise = nullptr;      // unused in truth mode
  // Truth mode evaluates estimands: every in-frame employer observed, weight
  // and noise factors exactly 1, ground-truth characteristics.
  bool truth_mode = false;
};

CellTable accumulate_cells(const AccumInputs& in, const CellCodec& codec,
                           int state, int quarter);

// Finite-population job counts per stratum for the variance formulas: N_B
// from the frame composite, N_M and N_F scaled up from observed counts.
struct StratumPops {
  double n_b = 0, n_m = 0, n_f = 0;
  double f = 1.0, w = 1.0;
  bool valid = false;
};
std::array<StratumPops, kNumSectors> compute_pops(const World& world,
                                                  const JobFlags& flags,
                                                  const FrameTable& frame,
                                                  const WeightTable& weights,
                                                  int state, int quarter);

// --- Single-cell convenience wrappers (tests and spot checks) --------------

// Exact finite-population estimand. `defined` is false for ZW3 on a cell with
// no full-quarter jobs.
double estimand(Stat stat, const World& world, const JobFlags& flags,
                const FrameTable& frame, const TableSpec& spec,
                const std::vector<std::int16_t>& coords, int state, int quarter,
                bool* defined = nullptr);

enum class SdlMode { WithSdl, NoSdl };

// Weighted, noise-infused, multiply-imputed estimator for one cell.
// implicate == -1 averages over implicates (the published value); a specific
// l gives the single-implicate value used by the variance machinery. The ZW3
// denominator is always the implicate-averaged no-noise F estimate.
double estimator(Stat stat, const World& world, const JobFlags& flags,
                 const FrameTable& frame, const WeightTable& weights,
                 const ImplicateTable& implicates, const NoiseAssignment& noise,
                 const TableSpec& spec, const std::vector<std::int16_t>& coords,
                 int state, int quarter, SdlMode mode = SdlMode::WithSdl,
                 int implicate = -1, bool* defined = nullptr);

}  // namespace jobtab
