#include "jobtab/types.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>

namespace jobtab {

namespace {

constexpr std::array<const char*, kNumItems> kItemNames = {
    "gender", "age_group", "race", "ethnicity", "education", "county", "industry"};

const std::array<std::vector<std::string>, kNumWorkerItems> kWorkerLabels = {{
    {"F", "M"},
    {"14-18", "19-21", "22-24", "25-34", "35-44", "45-54", "55-64", "65+"},
    {"R1", "R2", "R3", "R4", "R5", "R6"},
    {"H1", "H2"},
    {"ED1", "ED2", "ED3", "ED4"},
}};

}  // namespace

const char* item_name(Item it) { return kItemNames[static_cast<int>(it)]; }

bool item_from_name(const std::string& name, Item& out) {
  for (int i = 0; i < kNumItems; ++i) {
    if (name == kItemNames[i]) {
      out = static_cast<Item>(i);
      return true;
    }
  }
  return false;
}

std::string category_label(Item it, int value) {
  int idx = static_cast<int>(it);
  if (idx < kNumWorkerItems) {
    const auto& labels = kWorkerLabels[idx];
    if (value < 0 || value >= static_cast<int>(labels.size()))
      throw std::out_of_range("category value out of range for " +
                              std::string(item_name(it)));
    return labels[value];
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02d", it == Item::County ? 'C' : 'I', value + 1);
  return buf;
}

int category_from_label(Item it, const std::string& label, int cardinality) {
  int idx = static_cast<int>(it);
  if (idx < kNumWorkerItems) {
    const auto& labels = kWorkerLabels[idx];
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
      if (labels[i] == label) return i;
    throw std::invalid_argument("unknown " + std::string(item_name(it)) +
                                " category '" + label + "'");
  }
  char prefix = it == Item::County ? 'C' : 'I';
  if (label.size() >= 2 && label[0] == prefix) {
    int v = std::atoi(label.c_str() + 1) - 1;
    if (v >= 0 && v < cardinality) return v;
  }
  throw std::invalid_argument("unknown " + std::string(item_name(it)) +
                              " category '" + label + "'");
}

int parse_quarter_label(const std::string& label, int base_year) {
  if (label.size() < 6) throw std::invalid_argument("bad quarter label '" + label + "'");
  std::size_t qpos = label.find('Q');
  if (qpos == std::string::npos || qpos + 1 >= label.size())
    throw std::invalid_argument("bad quarter label '" + label + "'");
  int year = std::atoi(label.substr(0, qpos).c_str());
  int q = std::atoi(label.substr(qpos + 1).c_str());
  if (year < 1900 || q < 1 || q > 4)
    throw std::invalid_argument("bad quarter label '" + label + "'");
  return (year - base_year) * 4 + (q - 1);
}

std::string format_quarter_label(int q, int base_year) {
  int year = base_year + (q >= 0 ? q / 4 : (q - 3) / 4);
  int qq = ((q % 4) + 4) % 4 + 1;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04dQ%d", year, qq);
  return buf;
}

std::string World::quarter_label(int q) const {
  return format_quarter_label(q, base_year);
}

int World::quarter_from_label(const std::string& label) const {
  return parse_quarter_label(label, base_year);
}

}  // namespace jobtab
