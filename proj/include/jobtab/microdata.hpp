#pragma once

// World synthesis, item imputation, and world file I/O.
//
// generate_world produces both the ground-truth view (complete
// characteristics) and the observed view (record- and item-level missingness
// applied). Ground truth never exists in a production system; here it is what
// the brute-force oracles evaluate estimands against.

#include <cstdint>
#include <string>
#include <vector>

#include "jobtab/config.hpp"
#include "jobtab/types.hpp"

namespace jobtab {

World generate_world(const WorldConfig& config, std::uint64_t seed);

// L completed copies of the worker characteristics per job match. Observed
// slots are identical in every implicate; missing slots are draws from the
// empirical marginal of observed values within (state, sector), falling back
// to the global marginal for strata with no observed values.
class ImplicateTable {
 public:
  ImplicateTable() = default;
  ImplicateTable(std::size_t n_jobs, int L);

  int L() const { return L_; }
  std::size_t n_jobs() const { return L_ ? data_.size() / (L_ * kNumWorkerItems) : 0; }

  std::int16_t get(std::size_t job, int l, Item item) const {
    return data_[(job * L_ + l) * kNumWorkerItems + static_cast<int>(item)];
  }
  void set(std::size_t job, int l, Item item, std::int16_t v) {
    data_[(job * L_ + l) * kNumWorkerItems + static_cast<int>(item)] = v;
  }

 private:
  int L_ = 0;
  std::vector<std::int16_t> data_;
};

// Stratified empirical-marginal hot deck. The "purpose" string separates
// independent imputation passes (e.g. Monte Carlo replications) within one
// master seed. Throws if L < 1 or if some item has no observed value at all.
ImplicateTable impute_characteristics(const World& world, int L,
                                      std::uint64_t master_seed,
                                      std::string_view purpose = "impute");

// Builds the single-implicate table holding ground truth (oracle use).
ImplicateTable implicates_from_truth(const World& world, int L = 1);

// --- World files -----------------------------------------------------------
//
// A world directory holds employers, jobs, jobs_truth and implicates files
// (.csv or .jsonl) plus manifest.json. Loads are strict: malformed rows,
// duplicate keys, earnings below $1 or unknown codes are reported with the
// offending row number.

struct WorldFiles {
  World world;
  ImplicateTable implicates;  // empty if no implicates file present
};

void save_world(const World& world, const ImplicateTable* implicates,
                const std::string& dir, const std::string& format,
                const std::string& manifest_json);

WorldFiles load_world(const std::string& dir);

}  // namespace jobtab
