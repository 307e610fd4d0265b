#include "jobtab/frame.hpp"

#include <ostream>
#include <stdexcept>

#include "jobtab/csv.hpp"

namespace jobtab {

namespace {

constexpr const char* kTagNames[] = {"QCEW_M1", "QCEW_M2", "QCEW_M3",
                                     "UI_B",    "UI_B_NEXT", "UI_M",
                                     "NONE"};

// employer -> job indices (CSR).
struct JobsByEmployer {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> jobs;

  explicit JobsByEmployer(const World& world) {
    offsets.assign(world.employers.size() + 1, 0);
    for (const auto& jm : world.jobs) ++offsets[jm.employer + 1];
    for (std::size_t e = 1; e < offsets.size(); ++e) offsets[e] += offsets[e - 1];
    jobs.resize(world.jobs.size());
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::uint32_t j = 0; j < world.jobs.size(); ++j)
      jobs[cursor[world.jobs[j].employer]++] = j;
  }

  auto span(std::uint32_t e) const {
    return std::pair{jobs.begin() + offsets[e], jobs.begin() + offsets[e + 1]};
  }
};

// UI-derived counts for the composite ladder. A rung is available only if the
// records it needs were filed: B at t needs quarters t and t-1, B at t+1
// needs t+1 and t, M needs t.
std::pair<std::int32_t, SourceTag> composite_from(
    const World& world, const JobsByEmployer& index, std::uint32_t e, int q) {
  const Employer& emp = world.employers[e];
  const auto& eq = emp.quarters[q];
  if (eq.m1 >= 0) return {eq.m1, SourceTag::QcewM1};
  if (eq.m2 >= 0) return {eq.m2, SourceTag::QcewM2};
  if (eq.m3 >= 0) return {eq.m3, SourceTag::QcewM3};

  const int T = world.n_quarters;
  auto [first, last] = index.span(e);
  auto count_pair = [&](int qa, int qb) {
    std::int32_t n = 0;
    for (auto it = first; it != last; ++it) {
      const auto& earn = world.jobs[*it].earnings;
      if (earn[qa] >= 1 && earn[qb] >= 1) ++n;
    }
    return n;
  };
  auto count_single = [&](int qa) {
    std::int32_t n = 0;
    for (auto it = first; it != last; ++it)
      if (world.jobs[*it].earnings[qa] >= 1) ++n;
    return n;
  };

  const bool rep_t = eq.ui_reported;
  if (rep_t && q > 0 && emp.quarters[q - 1].ui_reported)
    return {count_pair(q, q - 1), SourceTag::UiB};
  if (rep_t && q + 1 < T && emp.quarters[q + 1].ui_reported)
    return {count_pair(q + 1, q), SourceTag::UiBNext};
  if (rep_t) return {count_single(q), SourceTag::UiM};
  return {0, SourceTag::None};
}

}  // namespace

const char* source_tag_name(SourceTag t) {
  return kTagNames[static_cast<int>(t)];
}

std::pair<std::int32_t, SourceTag> composite_employment(const World& world,
                                                        std::uint32_t employer,
                                                        int quarter) {
  JobsByEmployer index(world);
  return composite_from(world, index, employer, quarter);
}

FrameTable build_frame(const World& world, int window_first, int window_last) {
  if (window_first > window_last || window_first < 0 ||
      window_last >= world.n_quarters)
    throw std::invalid_argument("empty or out-of-range frame window");

  FrameTable frame;
  frame.n_quarters = world.n_quarters;
  frame.in_frame.assign(world.employers.size(), 0);
  frame.composite.assign(world.employers.size() * world.n_quarters, 0);
  frame.tag.assign(world.employers.size() * world.n_quarters, SourceTag::None);

  JobsByEmployer index(world);

  for (std::uint32_t e = 0; e < world.employers.size(); ++e) {
    const Employer& emp = world.employers[e];
    if (!emp.in_qcew_window) continue;  // UI-only accounts are discarded

    bool appears = false, evidence = false;
    for (int q = window_first; q <= window_last && !(appears && evidence); ++q) {
      const auto& eq = emp.quarters[q];
      if (eq.has_qcew()) appears = true;
      if (eq.m1 > 0 || eq.m2 > 0 || eq.m3 > 0) evidence = true;
    }
    if (appears && !evidence) {
      auto [first, last] = index.span(e);
      for (auto it = first; it != last && !evidence; ++it) {
        const auto& earn = world.jobs[*it].earnings;
        for (int q = window_first; q <= window_last; ++q)
          if (earn[q] >= 1) {
            evidence = true;
            break;
          }
      }
    }
    if (!(appears && evidence)) continue;

    frame.in_frame[e] = 1;
    for (int q = 0; q < world.n_quarters; ++q) {
      auto [value, tag] = composite_from(world, index, e, q);
      frame.composite[std::size_t(e) * world.n_quarters + q] = value;
      frame.tag[std::size_t(e) * world.n_quarters + q] = tag;
    }
  }
  return frame;
}

WeightTable::WeightTable(int n_states, int n_quarters)
    : n_states_(n_states),
      n_quarters_(n_quarters),
      cells_(std::size_t(n_states) * kNumSectors * n_quarters) {}

WeightTable compute_weights(const World& world, const FrameTable& frame) {
  WeightTable table(static_cast<int>(world.states.size()), world.n_quarters);
  for (std::uint32_t e = 0; e < world.employers.size(); ++e) {
    if (!frame.employer_in_frame(e)) continue;
    const Employer& emp = world.employers[e];
    for (int q = 0; q < world.n_quarters; ++q) {
      auto& cell = table.at(emp.state, emp.sector, q);
      const double comp = frame.composite_at(e, q);
      cell.n_b += comp;
      if (emp.quarters[q].ui_reported) cell.n_ub += comp;
    }
  }
  for (int s = 0; s < table.n_states(); ++s) {
    for (int h = 0; h < kNumSectors; ++h) {
      for (int q = 0; q < world.n_quarters; ++q) {
        auto& cell = table.at(s, static_cast<Sector>(h), q);
        if (cell.n_b <= 0) continue;  // empty stratum-quarter, stays invalid
        if (cell.n_ub <= 0)
          throw std::runtime_error(
              "no observed jobs in stratum (" + world.states[s] + ", " +
              sector_name(static_cast<Sector>(h)) + ", " +
              world.quarter_label(q) + "): weight undefined");
        cell.w = cell.n_b / cell.n_ub;
        cell.f = cell.n_ub / cell.n_b;
        cell.valid = true;
      }
    }
  }
  return table;
}

ZeroClass classify_zero(const World& world, const FrameTable& frame,
                        std::int16_t state, std::int16_t county,
                        std::int16_t industry, double estimate_nonzero) {
  // Structural status depends on employer features only.
  if (county >= 0 || industry >= 0) {
    bool possible = false;
    for (std::uint32_t e = 0; e < world.employers.size() && !possible; ++e) {
      if (!frame.employer_in_frame(e)) continue;
      const Employer& emp = world.employers[e];
      if (state >= 0 && emp.state != state) continue;
      if (county >= 0 && emp.county != county) continue;
      if (industry >= 0 && emp.industry != industry) continue;
      possible = true;
    }
    if (!possible) return ZeroClass::Structural;
  }
  return estimate_nonzero != 0.0 ? ZeroClass::NonZero : ZeroClass::Sampling;
}

void write_weight_csv(std::ostream& os, const World& world,
                      const WeightTable& table) {
  os << "state,quarter,sector,n_b,n_ub,w,f\n";
  for (int s = 0; s < table.n_states(); ++s)
    for (int q = 0; q < world.n_quarters; ++q)
      for (int h = 0; h < kNumSectors; ++h) {
        const auto& cell = table.at(s, static_cast<Sector>(h), q);
        if (!cell.valid) continue;
        write_csv_row(os, {world.states[s], world.quarter_label(q),
                           sector_name(static_cast<Sector>(h)),
                           format_number(cell.n_b), format_number(cell.n_ub),
                           format_number(cell.w), format_number(cell.f)});
      }
}

void write_frame_audit_csv(std::ostream& os, const World& world,
                           const FrameTable& frame) {
  os << "employer_id,in_frame,quarter,composite_b,source\n";
  for (std::uint32_t e = 0; e < world.employers.size(); ++e) {
    for (int q = 0; q < world.n_quarters; ++q) {
      write_csv_row(os, {std::to_string(world.employers[e].id),
                         frame.employer_in_frame(e) ? "1" : "0",
                         world.quarter_label(q),
                         std::to_string(frame.composite_at(e, q)),
                         source_tag_name(frame.tag_at(e, q))});
    }
  }
}

}  // namespace jobtab
