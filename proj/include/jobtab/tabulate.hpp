#pragma once

// Table production: iterate partitions and quarters, classify zeros, round,
// suppress, size-class, and summarize (medians, CV quantiles, component
// shares per size class).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jobtab/config.hpp"
#include "jobtab/microdata.hpp"
#include "jobtab/variance.hpp"

namespace jobtab {

enum class SizeClass : int {
  Zero = 0,
  C1_2 = 1,
  C3_9 = 2,
  C10_99 = 3,
  C100_999 = 4,
  C1000Plus = 5,
};
constexpr int kNumSizeClasses = 6;
const char* size_class_name(SizeClass c);

// Rounds half away from zero, then classifies by closed intervals.
std::int64_t publication_round(double value);
SizeClass size_class(double value);

struct CellResult {
  std::string table;
  int state = 0;
  int quarter = 0;
  Stat stat = Stat::M;
  std::vector<std::int16_t> coords;
  std::string cell_label;
  bool suppressed = false;
  bool published_defined = true;
  std::int64_t published = 0;  // rounded; masked in CSV when suppressed
  double raw = 0;
  SizeClass size_cls = SizeClass::Zero;
  CellDecomposition d;
};

struct RunOutputs {
  std::vector<CellResult> cells;
  int n_structural_excluded = 0;
};

// Full pipeline over prepared inputs. Cells for structural zeros are never
// produced; sampling zeros are. Results are in deterministic key order
// regardless of thread count.
RunOutputs run_tables(const World& world, const JobFlags& flags,
                      const FrameTable& frame, const WeightTable& weights,
                      const ImplicateTable& implicates,
                      const NoiseAssignment& noise,
                      const std::vector<NoiseAssignment>& sim_draws,
                      const RunConfig& run);

struct TableSummary {
  std::string table;
  Stat stat = Stat::M;
  SizeClass size_cls = SizeClass::Zero;
  std::size_t n_cells = 0;
  double median_estimate = 0;
  double median_v_w = 0, median_v_b = 0, median_v_sdl = 0;
  double median_total_variation = 0;  // v_w_med + (L+1)/L*(v_b_med+v_sdl_med)
  double pct_within = 0, pct_between_imp = 0, pct_between_sdl = 0;
  bool cv_defined = false;
  double cv_p50 = 0, cv_p75 = 0, cv_p95 = 0;
  double median_df = 0;
  bool moe_defined = false;
  double moe_at_median = 0;
};

// Groups cells by (table, stat, size class); medians are lower nearest-rank.
// Suppression affects publication only, so suppressed cells still contribute.
std::vector<TableSummary> summarize(const std::vector<CellResult>& cells, int L);

// CSV emission. Every file starts with a manifest comment line.
void write_cells_csv(std::ostream& os, const World& world,
                     const std::vector<CellResult>& cells,
                     const RunConfig& run, const std::string& manifest);
void write_summary_csv(std::ostream& os, const std::vector<TableSummary>& rows,
                       const std::string& manifest);

// Reads a cells.csv produced by write_cells_csv (used by the report command).
struct LoadedCells {
  std::vector<CellResult> cells;
  int L = 10;
};
LoadedCells read_cells_csv(std::istream& is);

}  // namespace jobtab
