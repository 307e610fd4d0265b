#include "jobtab/microdata.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jobtab/rng.hpp"

namespace jobtab {

namespace {

// Count of statutory jobs at employer e in quarter q under the B definition
// (active in q and q-1) and the M definition, from ground truth earnings.
int count_b(const World& world, const std::vector<std::uint32_t>& jobs_of, int q) {
  if (q <= 0) return 0;
  int n = 0;
  for (auto ji : jobs_of) {
    const auto& j = world.jobs[ji];
    if (j.earnings[q] >= 1 && j.earnings[q - 1] >= 1) ++n;
  }
  return n;
}

int count_m(const World& world, const std::vector<std::uint32_t>& jobs_of, int q) {
  int n = 0;
  for (auto ji : jobs_of) {
    if (world.jobs[ji].earnings[q] >= 1) ++n;
  }
  return n;
}

}  // namespace

World generate_world(const WorldConfig& config, std::uint64_t seed) {
  config.validate();
  World world;
  world.n_quarters = config.n_quarters;
  world.base_year = config.base_year;
  world.states = config.states;
  world.schema.cardinality[static_cast<int>(Item::County)] = config.n_counties;
  world.schema.cardinality[static_cast<int>(Item::Industry)] = config.n_industries;

  const int T = config.n_quarters;
  world.employers.reserve(config.n_employers);

  std::vector<std::vector<std::uint32_t>> jobs_of(config.n_employers);

  for (int e = 0; e < config.n_employers; ++e) {
    Employer emp;
    emp.id = static_cast<std::uint64_t>(e) + 1;
    KeyedRng attr(seed, "gen_emp", emp.id);
    emp.state = static_cast<std::int16_t>(attr.next_below(world.states.size()));
    emp.sector = attr.next_bernoulli(config.public_share) ? Sector::Public
                                                          : Sector::Private;
    emp.county = static_cast<std::int16_t>(attr.next_below(config.n_counties));
    emp.industry = static_cast<std::int16_t>(attr.next_below(config.n_industries));
    emp.in_qcew_window = !attr.next_bernoulli(config.qcew_never_fraction);
    emp.quarters.resize(T);

    int size = static_cast<int>(std::lround(
        std::exp(config.size_log_mean + config.size_log_sd * attr.next_normal())));
    size = std::clamp(size, 1, config.size_max);

    for (int i = 0; i < size; ++i) {
      JobMatch jm;
      jm.person_id = (emp.id << 24) | static_cast<std::uint64_t>(i + 1);
      jm.employer = static_cast<std::uint32_t>(e);
      jm.earnings.assign(T, 0);

      KeyedRng mr(seed, "gen_match", emp.id, static_cast<std::uint64_t>(i));
      jm.truth.set(Item::Gender, static_cast<std::int16_t>(mr.next_below(2)));
      jm.truth.set(Item::AgeGroup, static_cast<std::int16_t>(mr.next_below(8)));
      jm.truth.set(Item::Race, static_cast<std::int16_t>(mr.next_below(6)));
      jm.truth.set(Item::Ethnicity, static_cast<std::int16_t>(mr.next_below(2)));
      jm.truth.set(Item::Education, static_cast<std::int16_t>(mr.next_below(4)));
      jm.truth.set(Item::County, emp.county);
      jm.truth.set(Item::Industry, emp.industry);

      int qs = mr.next_bernoulli(config.initial_active)
                   ? 0
                   : 1 + static_cast<int>(mr.next_below(std::max(1, T - 1)));
      double base = std::exp(config.earnings_log_mean +
                             config.earnings_log_sd * mr.next_normal());
      for (int q = qs; q < T; ++q) {
        if (q > qs && !mr.next_bernoulli(config.continuation)) break;
        double v = base * std::exp(0.05 * mr.next_normal());
        jm.earnings[q] = std::max<std::int64_t>(1, std::llround(v));
      }

      // Item missingness, slot-wise, independent of everything else.
      jm.observed = jm.truth;
      KeyedRng miss(seed, "item_miss", jm.person_id, emp.id);
      for (int it = 0; it < kNumWorkerItems; ++it) {
        if (miss.next_bernoulli(config.item_missing[it]))
          jm.observed.set(static_cast<Item>(it), Characteristics::kMissing);
      }

      jobs_of[e].push_back(static_cast<std::uint32_t>(world.jobs.size()));
      world.jobs.push_back(std::move(jm));
    }

    // Record-level response: employer-quarter-wise, MCAR within sector.
    const double miss_p = config.record_missing[static_cast<int>(emp.sector)];
    for (int q = 0; q < T; ++q) {
      KeyedRng ui(seed, "ui_report", emp.id, static_cast<std::uint64_t>(q));
      emp.quarters[q].ui_reported = !ui.next_bernoulli(miss_p);
    }

    world.employers.push_back(std::move(emp));
  }

  // QCEW reports need the job counts, so fill them in a second pass.
  for (int e = 0; e < config.n_employers; ++e) {
    Employer& emp = world.employers[e];
    if (!emp.in_qcew_window) continue;
    for (int q = 0; q < T; ++q) {
      KeyedRng qr(seed, "qcew", emp.id, static_cast<std::uint64_t>(q));
      if (qr.next_bernoulli(config.qcew_quarter_missing)) continue;
      int b_now = q > 0 ? count_b(world, jobs_of[e], q) : count_m(world, jobs_of[e], q);
      int m_now = count_m(world, jobs_of[e], q);
      int b_next = q + 1 < T ? count_b(world, jobs_of[e], q + 1) : m_now;
      auto& eq = emp.quarters[q];
      if (!qr.next_bernoulli(config.qcew_month_missing)) eq.m1 = b_now;
      if (!qr.next_bernoulli(config.qcew_month_missing)) eq.m2 = m_now;
      if (!qr.next_bernoulli(config.qcew_month_missing)) eq.m3 = b_next;
    }
  }

  return world;
}

ImplicateTable::ImplicateTable(std::size_t n_jobs, int L)
    : L_(L), data_(n_jobs * L * kNumWorkerItems, Characteristics::kMissing) {}

ImplicateTable implicates_from_truth(const World& world, int L) {
  ImplicateTable t(world.jobs.size(), L);
  for (std::size_t j = 0; j < world.jobs.size(); ++j)
    for (int l = 0; l < L; ++l)
      for (int it = 0; it < kNumWorkerItems; ++it)
        t.set(j, l, static_cast<Item>(it), world.jobs[j].truth.get(static_cast<Item>(it)));
  return t;
}

ImplicateTable impute_characteristics(const World& world, int L,
                                      std::uint64_t master_seed,
                                      std::string_view purpose) {
  if (L < 1) throw std::invalid_argument("imputation requires L >= 1");

  // Observed-value marginals per (state, sector) stratum, one count per
  // category, plus the global fallback.
  const int n_strata = static_cast<int>(world.states.size()) * kNumSectors;
  auto stratum_of = [&](const JobMatch& jm) {
    const Employer& e = world.employers[jm.employer];
    return e.state * kNumSectors + static_cast<int>(e.sector);
  };

  std::array<std::vector<std::vector<double>>, kNumWorkerItems> strata_counts;
  std::array<std::vector<double>, kNumWorkerItems> global_counts;
  for (int it = 0; it < kNumWorkerItems; ++it) {
    int card = world.schema.n_categories(static_cast<Item>(it));
    strata_counts[it].assign(n_strata, std::vector<double>(card, 0.0));
    global_counts[it].assign(card, 0.0);
  }
  for (const auto& jm : world.jobs) {
    int s = stratum_of(jm);
    for (int it = 0; it < kNumWorkerItems; ++it) {
      std::int16_t v = jm.observed.get(static_cast<Item>(it));
      if (v == Characteristics::kMissing) continue;
      strata_counts[it][s][v] += 1.0;
      global_counts[it][v] += 1.0;
    }
  }
  for (int it = 0; it < kNumWorkerItems; ++it) {
    double total = 0;
    for (double c : global_counts[it]) total += c;
    if (total == 0.0 && !world.jobs.empty())
      throw std::runtime_error(std::string("item '") +
                               item_name(static_cast<Item>(it)) +
                               "' has no observed values anywhere; cannot impute");
  }

  auto draw_cat = [](const std::vector<double>& counts, double u) {
    double total = 0;
    for (double c : counts) total += c;
    double x = u * total;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      x -= counts[k];
      if (x < 0) return static_cast<std::int16_t>(k);
    }
    return static_cast<std::int16_t>(counts.size() - 1);
  };

  ImplicateTable table(world.jobs.size(), L);
  for (std::size_t j = 0; j < world.jobs.size(); ++j) {
    const JobMatch& jm = world.jobs[j];
    const int s = stratum_of(jm);
    KeyedRng rng(master_seed, purpose, jm.person_id,
                 world.employers[jm.employer].id);
    for (int it = 0; it < kNumWorkerItems; ++it) {
      Item item = static_cast<Item>(it);
      std::int16_t obs = jm.observed.get(item);
      if (obs != Characteristics::kMissing) {
        for (int l = 0; l < L; ++l) table.set(j, l, item, obs);
        continue;
      }
      const auto& stratum = strata_counts[it][s];
      double stratum_total = 0;
      for (double c : stratum) stratum_total += c;
      const auto& donor = stratum_total > 0 ? stratum : global_counts[it];
      for (int l = 0; l < L; ++l)
        table.set(j, l, item, draw_cat(donor, rng.next_u01()));
    }
  }
  return table;
}

}  // namespace jobtab
