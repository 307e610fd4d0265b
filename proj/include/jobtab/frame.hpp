#pragma once

// Dynamic employer frame: composite employment via the precedence ladder,
// sector-level weights, and structural/sampling zero classification.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jobtab/types.hpp"

namespace jobtab {

enum class SourceTag : std::uint8_t {
  QcewM1 = 0,
  QcewM2 = 1,
  QcewM3 = 2,
  UiB = 3,
  UiBNext = 4,
  UiM = 5,
  None = 6,  // no QCEW and no UI data for the quarter: composite 0
};

const char* source_tag_name(SourceTag t);

struct FrameTable {
  int n_quarters = 0;
  std::vector<std::uint8_t> in_frame;    // per employer; window-global
  std::vector<std::int32_t> composite;   // [employer * T + q]
  std::vector<SourceTag> tag;            // [employer * T + q]

  bool employer_in_frame(std::uint32_t e) const { return in_frame[e] != 0; }
  std::int32_t composite_at(std::uint32_t e, int q) const {
    return composite[std::size_t(e) * n_quarters + q];
  }
  SourceTag tag_at(std::uint32_t e, int q) const {
    return tag[std::size_t(e) * n_quarters + q];
  }
};

// Composite employment for one employer-quarter, first available of:
// QCEW m1, m2, m3; UI-based B at t; UI-based B at t+1; UI-based M at t.
// UI rungs require the relevant quarters' records to have been filed.
std::pair<std::int32_t, SourceTag> composite_employment(const World& world,
                                                        std::uint32_t employer,
                                                        int quarter);

// An employer is in the frame iff it appears in QCEW at least once in the
// window and shows any positive employment evidence there. Window is a
// closed quarter-index range; throws on an empty window.
FrameTable build_frame(const World& world, int window_first, int window_last);

struct WeightCell {
  double n_b = 0;    // composite employment, all in-frame employers
  double n_ub = 0;   // composite employment, UI-reporting employers
  double w = 1.0;    // n_b / n_ub
  double f = 1.0;    // 1 / w
  bool valid = false;
};

// One weight per (state, sector) per quarter.
class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(int n_states, int n_quarters);

  WeightCell& at(int state, Sector sector, int q) {
    return cells_[idx(state, sector, q)];
  }
  const WeightCell& at(int state, Sector sector, int q) const {
    return cells_[idx(state, sector, q)];
  }
  int n_states() const { return n_states_; }
  int n_quarters() const { return n_quarters_; }

 private:
  std::size_t idx(int state, Sector sector, int q) const {
    return (std::size_t(state) * kNumSectors + static_cast<int>(sector)) * n_quarters_ + q;
  }
  int n_states_ = 0;
  int n_quarters_ = 0;
  std::vector<WeightCell> cells_;
};

// Weights for every stratum-quarter. A stratum with frame employment but no
// observed jobs (N_UB = 0, N_B > 0) has no defined weight and is an error;
// an entirely empty stratum-quarter is marked invalid and skipped downstream.
WeightTable compute_weights(const World& world, const FrameTable& frame);

enum class ZeroClass : std::uint8_t { Structural, Sampling, NonZero };

// Classification of a cell given its employer-feature coordinates
// (county / industry; -1 for "not constrained"). Structural means no in-frame
// employer could ever populate the cell anywhere in the window; cells keyed
// only on worker features are never structural.
ZeroClass classify_zero(const World& world, const FrameTable& frame,
                        std::int16_t state, std::int16_t county,
                        std::int16_t industry, double estimate_nonzero);

// Audit exports.
void write_weight_csv(std::ostream& os, const World& world, const WeightTable& table);
void write_frame_audit_csv(std::ostream& os, const World& world, const FrameTable& frame);

}  // namespace jobtab
