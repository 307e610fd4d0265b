#include "jobtab/tabulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "jobtab/csv.hpp"
#include "jobtab/parallel.hpp"
#include "jobtab/stats_math.hpp"

namespace jobtab {

namespace {
constexpr const char* kClassNames[] = {"zero", "1-2", "3-9", "10-99",
                                       "100-999", "1000+"};
}

const char* size_class_name(SizeClass c) {
  return kClassNames[static_cast<int>(c)];
}

std::int64_t publication_round(double value) {
  // Half away from zero ("legacy rounding" stand-in).
  return std::llround(value);
}

SizeClass size_class(double value) {
  const std::int64_t r = publication_round(value);
  if (r <= 0) return SizeClass::Zero;
  if (r <= 2) return SizeClass::C1_2;
  if (r <= 9) return SizeClass::C3_9;
  if (r <= 99) return SizeClass::C10_99;
  if (r <= 999) return SizeClass::C100_999;
  return SizeClass::C1000Plus;
}

namespace {

struct Task {
  int table = 0;
  int state = 0;
  int quarter = 0;
};

// Which (county, industry) combinations any in-frame employer of the state
// could ever populate; cells outside are structural zeros.
struct EmployerPresence {
  std::vector<char> county, industry, pair;
  int n_industries = 0;

  EmployerPresence(const World& world, const FrameTable& frame, int state) {
    const int nc = world.schema.n_categories(Item::County);
    const int ni = world.schema.n_categories(Item::Industry);
    n_industries = ni;
    county.assign(nc, 0);
    industry.assign(ni, 0);
    pair.assign(std::size_t(nc) * ni, 0);
    for (std::uint32_t e = 0; e < world.employers.size(); ++e) {
      if (!frame.employer_in_frame(e)) continue;
      const Employer& emp = world.employers[e];
      if (emp.state != state) continue;
      county[emp.county] = 1;
      industry[emp.industry] = 1;
      pair[std::size_t(emp.county) * ni + emp.industry] = 1;
    }
  }

  bool structural(std::int16_t c, std::int16_t i) const {
    if (c < 0 && i < 0) return false;  // worker features only
    if (c >= 0 && i >= 0) return !pair[std::size_t(c) * n_industries + i];
    if (c >= 0) return !county[c];
    return !industry[i];
  }
};

std::vector<Stat> parse_stats(const std::vector<std::string>& names) {
  std::vector<Stat> stats;
  for (const auto& n : names) {
    Stat s;
    if (!stat_from_name(n, s))
      throw std::invalid_argument("unknown statistic '" + n + "'");
    stats.push_back(s);
  }
  if (stats.empty()) throw std::invalid_argument("no statistics requested");
  return stats;
}

}  // namespace

RunOutputs run_tables(const World& world, const JobFlags& flags,
                      const FrameTable& frame, const WeightTable& weights,
                      const ImplicateTable& implicates,
                      const NoiseAssignment& noise,
                      const std::vector<NoiseAssignment>& sim_draws,
                      const RunConfig& run) {
  if (run.tables.empty()) throw std::invalid_argument("no tables configured");
  if (implicates.L() < 2)
    throw std::invalid_argument("tabulation with variances requires L >= 2");
  const std::vector<Stat> stats = parse_stats(run.stats);

  std::vector<CellCodec> codecs;
  codecs.reserve(run.tables.size());
  for (const auto& t : run.tables) codecs.emplace_back(t, world.schema);

  std::vector<Task> tasks;
  for (int t = 0; t < static_cast<int>(run.tables.size()); ++t)
    for (int s = 0; s < static_cast<int>(world.states.size()); ++s)
      for (int q = 0; q < world.n_quarters; ++q) tasks.push_back({t, s, q});

  std::vector<std::vector<CellResult>> results(tasks.size());
  std::vector<int> structural_counts(tasks.size(), 0);

  parallel_for(tasks.size(), run.threads, [&](std::size_t ti) {
    const Task& task = tasks[ti];
    const CellCodec& codec = codecs[task.table];

    bool any_stat = false;
    for (Stat s : stats)
      any_stat |= stat_in_support(s, task.quarter, world.n_quarters);
    if (!any_stat) return;

    AccumInputs in;
    in.world = &world;
    in.flags = &flags;
    in.frame = &frame;
    in.weights = &weights;
    in.implicates = &implicates;
    in.noise = &noise;
    CellTable table = accumulate_cells(in, codec, task.state, task.quarter);

    EvalContext ctx;
    ctx.weights = &weights;
    ctx.pops = compute_pops(world, flags, frame, weights, task.state, task.quarter);
    ctx.sim_draws = &sim_draws;
    ctx.state = task.state;
    ctx.quarter = task.quarter;
    ctx.L = implicates.L();
    ctx.mode = run.mode;

    EmployerPresence presence(world, frame, task.state);

    auto& rows = results[ti];
    for (std::size_t code = 0; code < codec.n_cells(); ++code) {
      std::int16_t county, industry;
      codec.employer_projection(code, county, industry);
      if (presence.structural(county, industry)) {
        ++structural_counts[ti];
        continue;
      }
      // Class-variable published values shared by the cell's statistics.
      std::array<double, kNumStats> class_pub{};
      for (Stat cs : {Stat::M, Stat::B, Stat::F}) {
        double v = 0;
        for (int h = 0; h < kNumSectors; ++h)
          v += table.avg_with(code, cs, static_cast<Sector>(h));
        class_pub[static_cast<int>(cs)] = v;
      }

      for (Stat s : stats) {
        if (!stat_in_support(s, task.quarter, world.n_quarters)) continue;
        CellResult row;
        row.table = run.tables[task.table].name;
        row.state = task.state;
        row.quarter = task.quarter;
        row.stat = s;
        row.coords = codec.decode(code);
        row.cell_label = codec.cell_label(code);
        row.d = decompose_cell(table, code, s, ctx);
        row.published_defined = row.d.defined;
        row.raw = row.d.published;
        row.published = publication_round(row.d.published);
        row.size_cls = size_class(class_pub[static_cast<int>(class_stat(s))]);
        row.suppressed = row.size_cls == SizeClass::C1_2;
        if (row.suppressed) row.d.flags |= kFlagSuppressed;
        rows.push_back(std::move(row));
      }
    }
  });

  RunOutputs out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.n_structural_excluded += structural_counts[i];
    for (auto& r : results[i]) out.cells.push_back(std::move(r));
  }
  return out;
}

std::vector<TableSummary> summarize(const std::vector<CellResult>& cells, int L) {
  struct Group {
    std::vector<double> est, v_w, v_b, v_sdl, cv, df;
  };
  // Keyed by (table first-appearance index, stat, size class) for stable order.
  std::vector<std::string> table_order;
  auto table_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < table_order.size(); ++i)
      if (table_order[i] == name) return i;
    table_order.push_back(name);
    return table_order.size() - 1;
  };
  std::map<std::tuple<std::size_t, int, int>, Group> groups;
  for (const auto& c : cells) {
    if (!c.published_defined) continue;  // ZW3 cells with no F jobs
    Group& g = groups[{table_index(c.table), static_cast<int>(c.stat),
                       static_cast<int>(c.size_cls)}];
    g.est.push_back(c.raw);
    g.v_w.push_back(c.d.v_w);
    g.v_b.push_back(c.d.v_b);
    g.v_sdl.push_back(c.d.v_sdl);
    g.df.push_back(c.d.df);
    if (c.d.cvmoe.cv_defined) g.cv.push_back(c.d.cvmoe.cv);
  }

  std::vector<TableSummary> out;
  const double mi_factor = double(L + 1) / L;
  for (auto& [key, g] : groups) {
    if (g.est.empty()) continue;
    TableSummary s;
    s.table = table_order[std::get<0>(key)];
    s.stat = static_cast<Stat>(std::get<1>(key));
    s.size_cls = static_cast<SizeClass>(std::get<2>(key));
    s.n_cells = g.est.size();
    s.median_estimate = lower_median(g.est);
    s.median_v_w = lower_median(g.v_w);
    s.median_v_b = lower_median(g.v_b);
    s.median_v_sdl = lower_median(g.v_sdl);
    s.median_total_variation =
        s.median_v_w + mi_factor * (s.median_v_b + s.median_v_sdl);
    if (s.median_total_variation > 0) {
      s.pct_within = 100.0 * s.median_v_w / s.median_total_variation;
      s.pct_between_imp =
          100.0 * mi_factor * s.median_v_b / s.median_total_variation;
      s.pct_between_sdl =
          100.0 * mi_factor * s.median_v_sdl / s.median_total_variation;
    }
    if (!g.cv.empty()) {
      s.cv_defined = true;
      s.cv_p50 = nearest_rank_quantile(g.cv, 0.50);
      s.cv_p75 = nearest_rank_quantile(g.cv, 0.75);
      s.cv_p95 = nearest_rank_quantile(g.cv, 0.95);
    }
    s.median_df = lower_median(g.df);
    if (s.median_df >= 1.0) {
      s.moe_defined = true;
      s.moe_at_median = s.median_total_variation == 0.0
                            ? 0.0
                            : t_quantile(0.95, s.median_df) *
                                  std::sqrt(s.median_total_variation);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string flags_text(const CellResult& c) {
  std::string s;
  auto add = [&](const char* name) {
    if (!s.empty()) s += ';';
    s += name;
  };
  if (c.d.flags & kFlagSuppressed) add("suppressed");
  if (c.d.flags & kFlagDegenerate) add("degenerate");
  if (c.d.flags & kFlagSuppressedEmpty) add("suppressed_empty");
  return s;
}

}  // namespace

void write_cells_csv(std::ostream& os, const World& world,
                     const std::vector<CellResult>& cells,
                     const RunConfig& run, const std::string& manifest) {
  os << "# " << manifest << "\n";
  os << "table,state,quarter,stat,cell,size_class,published,raw_estimate,"
        "v_w,v_b,v_sdl,v_t,pct_within,pct_between_imp,pct_between_sdl,"
        "cv,df,moe_90,n_k,flags,mode\n";
  const double mi_factor = double(run.L + 1) / run.L;
  for (const auto& c : cells) {
    std::vector<std::string> row;
    row.push_back(c.table);
    row.push_back(world.states[c.state]);
    row.push_back(world.quarter_label(c.quarter));
    row.push_back(stat_name(c.stat));
    row.push_back(c.cell_label);
    row.push_back(size_class_name(c.size_cls));
    if (!c.published_defined || c.suppressed)
      row.push_back("");
    else
      row.push_back(std::to_string(c.published));
    row.push_back(c.published_defined ? format_number(c.raw) : "");
    row.push_back(format_number(c.d.v_w));
    row.push_back(format_number(c.d.v_b));
    row.push_back(format_number(c.d.v_sdl));
    row.push_back(format_number(c.d.v_t));
    if (c.d.v_t > 0) {
      row.push_back(format_number(100.0 * c.d.v_w / c.d.v_t));
      row.push_back(format_number(100.0 * mi_factor * c.d.v_b / c.d.v_t));
      row.push_back(format_number(100.0 * mi_factor * c.d.v_sdl / c.d.v_t));
    } else {
      row.insert(row.end(), {"", "", ""});
    }
    row.push_back(c.d.cvmoe.cv_defined ? format_number(c.d.cvmoe.cv) : "");
    row.push_back(format_number(c.d.df));
    row.push_back(c.d.cvmoe.moe_defined ? format_number(c.d.cvmoe.moe) : "");
    row.push_back(format_number(c.d.n_k));
    row.push_back(flags_text(c));
    row.push_back(variance_mode_name(run.mode));
    write_csv_row(os, row);
  }
}

void write_summary_csv(std::ostream& os, const std::vector<TableSummary>& rows,
                       const std::string& manifest) {
  os << "# " << manifest << "\n";
  os << "table,stat,size_class,n_cells,median_estimate,median_v_w,median_v_b,"
        "median_v_sdl,median_total_variation,pct_within,pct_between_imp,"
        "pct_between_sdl,cv_p50,cv_p75,cv_p95,median_df,moe_at_median\n";
  for (const auto& s : rows) {
    std::vector<std::string> row;
    row.push_back(s.table);
    row.push_back(stat_name(s.stat));
    row.push_back(size_class_name(s.size_cls));
    row.push_back(std::to_string(s.n_cells));
    row.push_back(format_number(s.median_estimate));
    row.push_back(format_number(s.median_v_w));
    row.push_back(format_number(s.median_v_b));
    row.push_back(format_number(s.median_v_sdl));
    row.push_back(format_number(s.median_total_variation));
    row.push_back(format_number(s.pct_within));
    row.push_back(format_number(s.pct_between_imp));
    row.push_back(format_number(s.pct_between_sdl));
    if (s.cv_defined) {
      row.push_back(format_number(s.cv_p50));
      row.push_back(format_number(s.cv_p75));
      row.push_back(format_number(s.cv_p95));
    } else {
      row.insert(row.end(), {"", "", ""});
    }
    row.push_back(format_number(s.median_df));
    row.push_back(s.moe_defined ? format_number(s.moe_at_median) : "");
    write_csv_row(os, row);
  }
}

LoadedCells read_cells_csv(std::istream& is) {
  CsvFile file = read_csv(is);
  LoadedCells out;
  for (const auto& comment : file.comments) {
    auto pos = comment.find("L=");
    if (pos != std::string::npos) out.L = std::atoi(comment.c_str() + pos + 2);
  }
  auto col = [&](const char* name) {
    for (std::size_t i = 0; i < file.header.size(); ++i)
      if (file.header[i] == name) return i;
    throw std::runtime_error(std::string("cells csv: missing column ") + name);
  };
  const std::size_t c_table = col("table"), c_stat = col("stat"),
                    c_class = col("size_class"), c_raw = col("raw_estimate"),
                    c_vw = col("v_w"), c_vb = col("v_b"), c_vsdl = col("v_sdl"),
                    c_vt = col("v_t"), c_cv = col("cv"), c_df = col("df");
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    const auto& f = file.rows[r];
    const std::size_t n = file.row_numbers[r];
    CellResult c;
    c.table = f[c_table];
    if (!stat_from_name(f[c_stat], c.stat))
      throw std::runtime_error("cells csv row " + std::to_string(n) +
                               ": unknown stat '" + f[c_stat] + "'");
    bool found = false;
    for (int k = 0; k < kNumSizeClasses; ++k) {
      if (f[c_class] == kClassNames[k]) {
        c.size_cls = static_cast<SizeClass>(k);
        found = true;
      }
    }
    if (!found)
      throw std::runtime_error("cells csv row " + std::to_string(n) +
                               ": unknown size class '" + f[c_class] + "'");
    c.published_defined = !f[c_raw].empty();
    if (c.published_defined) c.raw = parse_double(f[c_raw], n, "raw_estimate");
    c.d.v_w = parse_double(f[c_vw], n, "v_w");
    c.d.v_b = parse_double(f[c_vb], n, "v_b");
    c.d.v_sdl = parse_double(f[c_vsdl], n, "v_sdl");
    c.d.v_t = parse_double(f[c_vt], n, "v_t");
    c.d.df = parse_double(f[c_df], n, "df");
    if (!f[c_cv].empty()) {
      c.d.cvmoe.cv_defined = true;
      c.d.cvmoe.cv = parse_double(f[c_cv], n, "cv");
    }
    out.cells.push_back(std::move(c));
  }
  return out;
}

}  // namespace jobtab
