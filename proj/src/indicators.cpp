#include "jobtab/indicators.hpp"

#include <algorithm>
#include <stdexcept>

namespace jobtab {

namespace {
constexpr const char* kStatNames[] = {"M", "B", "F", "ZW3", "W1"};
}

const char* stat_name(Stat s) { return kStatNames[static_cast<int>(s)]; }

bool stat_from_name(const std::string& name, Stat& out) {
  for (int i = 0; i < kNumStats; ++i) {
    if (name == kStatNames[i]) {
      out = static_cast<Stat>(i);
      return true;
    }
  }
  return false;
}

Stat class_stat(Stat s) {
  switch (s) {
    case Stat::M:
    case Stat::W1:
      return Stat::M;
    case Stat::B:
      return Stat::B;
    case Stat::F:
    case Stat::ZW3:
      return Stat::F;
  }
  return Stat::M;
}

bool stat_in_support(Stat s, int q, int n_quarters) {
  switch (s) {
    case Stat::M:
    case Stat::W1:
      return q >= 0 && q < n_quarters;
    case Stat::B:
      return q >= 1 && q < n_quarters;
    case Stat::F:
    case Stat::ZW3:
      return q >= 1 && q < n_quarters - 1;
  }
  return false;
}

JobFlags::JobFlags(const World& world) : n_quarters_(world.n_quarters) {
  data_.assign(world.jobs.size() * world.n_quarters, 0);
  const int T = world.n_quarters;
  for (std::size_t j = 0; j < world.jobs.size(); ++j) {
    const auto& earn = world.jobs[j].earnings;
    for (int q = 0; q < T; ++q) {
      std::uint8_t bits = 0;
      const bool m0 = earn[q] >= 1;
      if (m0) {
        bits |= 1;
        if (q >= 1 && earn[q - 1] >= 1) {
          bits |= 2;
          if (q + 1 < T && earn[q + 1] >= 1) bits |= 4;
        }
      }
      data_[j * T + q] = bits;
    }
  }
}

CellCodec::CellCodec(const TableSpec& spec, const CategorySchema& schema)
    : dims_(spec.dims) {
  if (dims_.empty()) throw std::invalid_argument("partition has no stratifiers");
  radix_.reserve(dims_.size());
  for (Item it : dims_) {
    int card = schema.n_categories(it);
    radix_.push_back(card);
    n_cells_ *= card;
  }
  if (n_cells_ > 5'000'000)
    throw std::invalid_argument("partition '" + spec.name + "' has too many cells");
}

std::size_t CellCodec::code_of(const Characteristics& c) const {
  std::size_t code = 0;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    std::int16_t v = c.get(dims_[d]);
    code = code * radix_[d] + v;
  }
  return code;
}

std::vector<std::int16_t> CellCodec::decode(std::size_t code) const {
  std::vector<std::int16_t> coords(dims_.size());
  for (std::size_t d = dims_.size(); d-- > 0;) {
    coords[d] = static_cast<std::int16_t>(code % radix_[d]);
    code /= radix_[d];
  }
  return coords;
}

std::string CellCodec::cell_label(std::size_t code) const {
  auto coords = decode(code);
  std::string label;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (d) label += '|';
    label += category_label(dims_[d], coords[d]);
  }
  return label;
}

void CellCodec::employer_projection(std::size_t code, std::int16_t& county,
                                    std::int16_t& industry) const {
  county = -1;
  industry = -1;
  auto coords = decode(code);
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (dims_[d] == Item::County) county = coords[d];
    if (dims_[d] == Item::Industry) industry = coords[d];
  }
}

CellTable::CellTable(std::size_t n_cells, int L) : L_(L), n_cells_(n_cells) {
  avg_with_.assign(n_cells * kNumStats * kNumSectors, 0.0);
  avg_no_.assign(n_cells * kNumStats * kNumSectors, 0.0);
  l_with_.assign(n_cells * kNumStats * kNumSectors * L, 0.0);
  l_no_.assign(n_cells * kNumStats * kNumSectors * L, 0.0);
  zw3_.assign(n_cells * kNumSectors * L, {});
  w1_.assign(n_cells * kNumSectors * L, {});
  emp_.assign(n_cells, {});
}

// Shared accumulation walk. For each observed job it adds, per implicate,
// the weighted (and noise-scaled) contribution of each statistic to the
// implicate's cell, and a single implicate-averaged term (the estimator's
// (1/L) sum evaluated per job, so a complete-data run reproduces the estimand
// arithmetic operation for operation).
class CellAccumulator {
 public:
  CellAccumulator(const AccumInputs& in, const CellCodec& codec, int state,
                  int quarter)
      : in_(in), codec_(codec), state_(state), q_(quarter) {}

  CellTable run() {
    const World& world = *in_.world;
    const int L = in_.truth_mode ? 1 : in_.implicates->L();
    CellTable table(codec_.n_cells(), L);

    std::vector<std::size_t> codes(L);
    std::array<double, kNumStats> qty{};

    for (std::size_t j = 0; j < world.jobs.size(); ++j) {
      const JobMatch& jm = world.jobs[j];
      const Employer& emp = world.employers[jm.employer];
      if (emp.state != state_) continue;
      if (!in_.frame->employer_in_frame(jm.employer)) continue;

      const bool observed =
          in_.truth_mode || emp.quarters[q_].ui_reported;
      if (!observed) continue;

      const auto& flags = *in_.flags;
      const bool fm = flags.m(j, q_);
      if (!fm) continue;  // no record this quarter
      const bool fb = flags.b(j, q_);
      const bool ff = flags.f(j, q_);
      const double w1v = jm.earnings[q_];

      qty[0] = 1.0;                       // M
      qty[1] = fb ? 1.0 : 0.0;            // B
      qty[2] = ff ? 1.0 : 0.0;            // F
      qty[3] = ff ? w1v / 3.0 : 0.0;      // ZW3 numerator
      qty[4] = w1v;                       // W1

      double w = 1.0, delta = 1.0;
      if (!in_.truth_mode) {
        const WeightCell& wc = in_.weights->at(emp.state, emp.sector, q_);
        if (!wc.valid) continue;
        w = wc.w;
        delta = in_.noise->delta[jm.employer];
      }
      const Sector h = emp.sector;

      // Cell membership per implicate.
      int n_distinct = 1;
      if (in_.truth_mode) {
        codes[0] = codec_.code_of(jm.truth);
      } else {
        Characteristics c = jm.truth;  // employer slots are always observed
        bool varies = false;
        for (int l = 0; l < L; ++l) {
          for (int it = 0; it < kNumWorkerItems; ++it)
            c.v[it] = in_.implicates->get(j, l, static_cast<Item>(it));
          codes[l] = codec_.code_of(c);
          if (codes[l] != codes[0]) varies = true;
        }
        n_distinct = varies ? L : 1;
      }

      for (int s = 0; s < kNumStats; ++s) {
        if (qty[s] == 0.0) continue;
        const double term_no = w * qty[s];
        const double term_with = term_no * delta;
        if (n_distinct == 1) {
          // All implicates agree: one exact add with coefficient 1.
          table.avg_no_[table.avg_idx(codes[0], static_cast<Stat>(s), h)] += term_no;
          table.avg_with_[table.avg_idx(codes[0], static_cast<Stat>(s), h)] += term_with;
        } else {
          for (int l = 0; l < L; ++l) {
            table.avg_no_[table.avg_idx(codes[l], static_cast<Stat>(s), h)] +=
                term_no / L;
            table.avg_with_[table.avg_idx(codes[l], static_cast<Stat>(s), h)] +=
                term_with / L;
          }
        }
        for (int l = 0; l < L; ++l) {
          std::size_t cell = codes[n_distinct == 1 ? 0 : l];
          table.l_no_[table.l_idx(cell, static_cast<Stat>(s), h, l)] += term_no;
          table.l_with_[table.l_idx(cell, static_cast<Stat>(s), h, l)] += term_with;
        }
      }

      // Unweighted earnings sufficient statistics over observed jobs.
      for (int l = 0; l < L; ++l) {
        std::size_t cell = codes[n_distinct == 1 ? 0 : l];
        auto& wsuff = table.w1_[table.suff_idx(cell, h, l)];
        wsuff.n += 1.0;
        wsuff.s += w1v;
        wsuff.ss += w1v * w1v;
        if (ff) {
          auto& zsuff = table.zw3_[table.suff_idx(cell, h, l)];
          const double q3 = w1v / 3.0;
          zsuff.n += 1.0;
          zsuff.s += q3;
          zsuff.ss += q3 * q3;
        }
      }

      // Per-employer contribution at the first implicate, noise-free.
      if (!in_.truth_mode) {
        std::size_t cell = codes[0];
        auto& contribs = table.emp_[cell];
        if (contribs.empty() || contribs.back().employer != jm.employer) {
          contribs.push_back({jm.employer, {}});
        }
        for (int s = 0; s < kNumStats; ++s)
          contribs.back().c[s] += w * qty[s];
      }
    }

    // Jobs are employer-contiguous in generated worlds but need not be in
    // hand-built ones; merge any split contributions.
    for (auto& contribs : table.emp_) {
      std::sort(contribs.begin(), contribs.end(),
                [](const EmpContrib& a, const EmpContrib& b) {
                  return a.employer < b.employer;
                });
      std::size_t out = 0;
      for (std::size_t i = 0; i < contribs.size(); ++i) {
        if (out > 0 && contribs[out - 1].employer == contribs[i].employer) {
          for (int s = 0; s < kNumStats; ++s)
            contribs[out - 1].c[s] += contribs[i].c[s];
        } else {
          contribs[out++] = contribs[i];
        }
      }
      contribs.resize(out);
    }
    return table;
  }

 private:
  const AccumInputs& in_;
  const CellCodec& codec_;
  int state_;
  int q_;
};

CellTable accumulate_cells(const AccumInputs& in, const CellCodec& codec,
                           int state, int quarter) {
  if (!in.world || !in.flags || !in.frame)
    throw std::invalid_argument("accumulate_cells: missing inputs");
  if (!in.truth_mode && (!in.weights || !in.implicates || !in.noise))
    throw std::invalid_argument("accumulate_cells: missing estimator inputs");
  if (quarter < 0 || quarter >= in.world->n_quarters)
    throw std::invalid_argument("accumulate_cells: quarter out of range");
  CellAccumulator acc(in, codec, state, quarter);
  return acc.run();
}

std::array<StratumPops, kNumSectors> compute_pops(const World& world,
                                                  const JobFlags& flags,
                                                  const FrameTable& frame,
                                                  const WeightTable& weights,
                                                  int state, int quarter) {
  std::array<StratumPops, kNumSectors> pops{};
  std::array<double, kNumSectors> m_obs{}, f_obs{};
  for (std::size_t j = 0; j < world.jobs.size(); ++j) {
    const Employer& emp = world.employers[world.jobs[j].employer];
    if (emp.state != state) continue;
    if (!frame.employer_in_frame(world.jobs[j].employer)) continue;
    if (!emp.quarters[quarter].ui_reported) continue;
    const int h = static_cast<int>(emp.sector);
    if (flags.m(j, quarter)) m_obs[h] += 1.0;
    if (flags.f(j, quarter)) f_obs[h] += 1.0;
  }
  for (int h = 0; h < kNumSectors; ++h) {
    const WeightCell& wc = weights.at(state, static_cast<Sector>(h), quarter);
    pops[h].valid = wc.valid;
    if (!wc.valid) continue;
    pops[h].w = wc.w;
    pops[h].f = wc.f;
    pops[h].n_b = wc.n_b;
    pops[h].n_m = wc.w * m_obs[h];
    pops[h].n_f = wc.w * f_obs[h];
  }
  return pops;
}

namespace {

std::size_t coords_to_code(const CellCodec& codec,
                           const std::vector<std::int16_t>& coords,
                           const CategorySchema& schema) {
  if (coords.size() != codec.dims().size())
    throw std::invalid_argument("cell coordinate arity mismatch");
  Characteristics c;
  for (std::size_t d = 0; d < coords.size(); ++d) {
    int card = schema.n_categories(codec.dims()[d]);
    if (coords[d] < 0 || coords[d] >= card)
      throw std::invalid_argument("cell coordinate out of range");
    c.set(codec.dims()[d], coords[d]);
  }
  return codec.code_of(c);
}

}  // namespace

double estimand(Stat stat, const World& world, const JobFlags& flags,
                const FrameTable& frame, const TableSpec& spec,
                const std::vector<std::int16_t>& coords, int state, int quarter,
                bool* defined) {
  CellCodec codec(spec, world.schema);
  AccumInputs in;
  in.world = &world;
  in.flags = &flags;
  in.frame = &frame;
  in.truth_mode = true;
  CellTable table = accumulate_cells(in, codec, state, quarter);
  std::size_t cell = coords_to_code(codec, coords, world.schema);

  if (defined) *defined = true;
  if (stat == Stat::ZW3) {
    double den = 0, num = 0;
    for (int h = 0; h < kNumSectors; ++h) {
      den += table.avg_no(cell, Stat::F, static_cast<Sector>(h));
      num += table.avg_no(cell, Stat::ZW3, static_cast<Sector>(h));
    }
    if (den == 0.0) {
      if (defined) *defined = false;
      return 0.0;
    }
    return num / den;
  }
  double v = 0;
  for (int h = 0; h < kNumSectors; ++h)
    v += table.avg_no(cell, stat, static_cast<Sector>(h));
  return v;
}

double estimator(Stat stat, const World& world, const JobFlags& flags,
                 const FrameTable& frame, const WeightTable& weights,
                 const ImplicateTable& implicates, const NoiseAssignment& noise,
                 const TableSpec& spec, const std::vector<std::int16_t>& coords,
                 int state, int quarter, SdlMode mode, int implicate,
                 bool* defined) {
  CellCodec codec(spec, world.schema);
  AccumInputs in;
  in.world = &world;
  in.flags = &flags;
  in.frame = &frame;
  in.weights = &weights;
  in.implicates = &implicates;
  in.noise = &noise;
  CellTable table = accumulate_cells(in, codec, state, quarter);
  std::size_t cell = coords_to_code(codec, coords, world.schema);
  const int L = implicates.L();
  if (implicate >= L) throw std::invalid_argument("implicate index out of range");

  auto sum_stat = [&](Stat s, bool with_sdl) {
    double v = 0;
    for (int h = 0; h < kNumSectors; ++h) {
      Sector hh = static_cast<Sector>(h);
      if (implicate < 0) {
        v += with_sdl ? table.avg_with(cell, s, hh) : table.avg_no(cell, s, hh);
      } else {
        v += with_sdl ? table.per_l_with(cell, s, hh, implicate)
                      : table.per_l_no(cell, s, hh, implicate);
      }
    }
    return v;
  };

  const bool with = mode == SdlMode::WithSdl;
  if (defined) *defined = true;
  if (stat == Stat::ZW3) {
    // Denominator: implicate-averaged noise-free F, in every mode.
    double den = 0;
    for (int h = 0; h < kNumSectors; ++h)
      den += table.avg_no(cell, Stat::F, static_cast<Sector>(h));
    if (den == 0.0) {
      if (defined) *defined = false;
      return 0.0;
    }
    return sum_stat(Stat::ZW3, with) / den;
  }
  return sum_stat(stat, with);
}

}  // namespace jobtab
