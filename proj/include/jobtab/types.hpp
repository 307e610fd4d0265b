#pragma once

// Core data model: employers, person-employer job matches, and the worlds
// that hold them. A "job" in the statistical sense is one (person, employer,
// quarter) with at least $1 of earnings; internally we store one JobMatch per
// (person, employer) pair with an earnings value per quarter (0 = no record
// that quarter, so no statutory job).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace jobtab {

enum class Sector : std::uint8_t { Public = 0, Private = 1 };
constexpr int kNumSectors = 2;

inline const char* sector_name(Sector s) {
  return s == Sector::Public ? "public" : "private";
}

// Characteristic slots. The first five are worker items subject to item
// missingness and multiple imputation; county and industry derive from the
// employer and are never missing.
enum class Item : int {
  Gender = 0,
  AgeGroup = 1,
  Race = 2,
  Ethnicity = 3,
  Education = 4,
  County = 5,
  Industry = 6,
};
constexpr int kNumItems = 7;
constexpr int kNumWorkerItems = 5;

inline bool is_employer_item(Item it) {
  return it == Item::County || it == Item::Industry;
}

const char* item_name(Item it);
bool item_from_name(const std::string& name, Item& out);

// Category label for CSV output / partition coordinates, e.g. gender "F",
// age group "25-34", county "C03".
std::string category_label(Item it, int value);
int category_from_label(Item it, const std::string& label, int cardinality);

struct CategorySchema {
  // Cardinality per Item slot. Worker items are fixed; county/industry come
  // from the world config.
  std::array<int, kNumItems> cardinality{2, 8, 6, 2, 4, 1, 1};

  int n_categories(Item it) const { return cardinality[static_cast<int>(it)]; }
};

struct Characteristics {
  static constexpr std::int16_t kMissing = -1;
  std::array<std::int16_t, kNumItems> v{kMissing, kMissing, kMissing, kMissing,
                                        kMissing, kMissing, kMissing};

  std::int16_t get(Item it) const { return v[static_cast<int>(it)]; }
  void set(Item it, std::int16_t value) { v[static_cast<int>(it)] = value; }
  bool missing(Item it) const { return get(it) == kMissing; }
  bool complete() const {
    for (auto x : v)
      if (x == kMissing) return false;
    return true;
  }
};

// Per-quarter employer-level reports.
struct EmployerQuarter {
  // QCEW monthly employment counts; -1 = not reported.
  std::int32_t m1 = -1;
  std::int32_t m2 = -1;
  std::int32_t m3 = -1;
  // Whether this employer's UI earnings records for the quarter were filed in
  // time to be observed (record-level response indicator).
  bool ui_reported = true;

  bool has_qcew() const { return m1 >= 0 || m2 >= 0 || m3 >= 0; }
};

struct Employer {
  std::uint64_t id = 0;
  std::int16_t state = 0;  // index into World::states
  Sector sector = Sector::Private;
  std::int16_t county = 0;
  std::int16_t industry = 0;
  // False for UI-only accounts that never appear in QCEW anywhere in the
  // frame window; those are dropped from the frame entirely.
  bool in_qcew_window = true;
  std::vector<EmployerQuarter> quarters;
};

// One person-employer pair. Characteristics are constant across the quarters
// of the match; what varies by quarter is the earnings record.
struct JobMatch {
  std::uint64_t person_id = 0;
  std::uint32_t employer = 0;  // index into World::employers
  Characteristics truth;       // fully observed ground truth
  Characteristics observed;    // truth with item missingness applied
  // earnings[q] in whole dollars; >= 1 when a statutory job exists in q,
  // 0 when there is no record for that quarter.
  std::vector<std::int32_t> earnings;
};

struct World {
  int n_quarters = 0;
  int base_year = 2010;  // quarter 0 == base_year Q1
  std::vector<std::string> states;
  CategorySchema schema;
  std::vector<Employer> employers;
  std::vector<JobMatch> jobs;

  std::string quarter_label(int q) const;
  int quarter_from_label(const std::string& label) const;
};

// Parses "YYYYQn" against a base year; returns the quarter index.
int parse_quarter_label(const std::string& label, int base_year);
std::string format_quarter_label(int q, int base_year);

}  // namespace jobtab
