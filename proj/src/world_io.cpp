#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "jobtab/csv.hpp"
#include "jobtab/microdata.hpp"
#include <json.hpp>

// World files: employers / jobs / jobs_truth / implicates as CSV or JSON
// lines, plus world.json (shape metadata) and manifest.json (run provenance).
// Loads are strict; every rejection names the offending row.

namespace jobtab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kWorkerCols[kNumWorkerItems] = {
    "gender", "age_group", "race", "ethnicity", "education"};

std::string chars_field(const Characteristics& c, int item) {
  std::int16_t v = c.v[item];
  return v == Characteristics::kMissing
             ? std::string()
             : category_label(static_cast<Item>(item), v);
}

void write_lines(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

struct RowError : std::runtime_error {
  RowError(const std::string& file, std::size_t row, const std::string& msg)
      : std::runtime_error(file + " row " + std::to_string(row) + ": " + msg) {}
};

// Uniform row access over CSV and JSONL inputs.
struct Rows {
  std::vector<std::map<std::string, std::string>> rows;
  std::vector<std::size_t> numbers;
};

Rows read_rows(const std::string& path, bool jsonl) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Rows out;
  if (!jsonl) {
    CsvFile csv = read_csv(in);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      if (csv.rows[r].size() != csv.header.size())
        throw RowError(path, csv.row_numbers[r], "wrong number of fields");
      std::map<std::string, std::string> m;
      for (std::size_t c = 0; c < csv.header.size(); ++c)
        m[csv.header[c]] = csv.rows[r][c];
      out.rows.push_back(std::move(m));
      out.numbers.push_back(csv.row_numbers[r]);
    }
    return out;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const std::exception& e) {
      throw RowError(path, lineno, std::string("bad json: ") + e.what());
    }
    std::map<std::string, std::string> m;
    for (auto& [k, v] : j.items()) {
      if (v.is_null()) continue;
      m[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    out.rows.push_back(std::move(m));
    out.numbers.push_back(lineno);
  }
  return out;
}

std::string get_field(const std::map<std::string, std::string>& row,
                      const std::string& key) {
  auto it = row.find(key);
  return it == row.end() ? std::string() : it->second;
}

void emit_row(std::ostringstream& csv, std::ostringstream& jsonl, bool use_jsonl,
              const std::vector<std::pair<std::string, std::string>>& fields) {
  if (use_jsonl) {
    json j;
    for (const auto& [k, v] : fields) j[k] = v;
    jsonl << j.dump() << '\n';
  } else {
    std::vector<std::string> vals;
    vals.reserve(fields.size());
    for (const auto& [k, v] : fields) vals.push_back(v);
    write_csv_row(csv, vals);
  }
}

}  // namespace

void save_world(const World& world, const ImplicateTable* implicates,
                const std::string& dir, const std::string& format,
                const std::string& manifest_json) {
  if (format != "csv" && format != "jsonl")
    throw std::invalid_argument("world format must be csv or jsonl");
  const bool jl = format == "jsonl";
  fs::create_directories(dir);

  json meta;
  meta["n_quarters"] = world.n_quarters;
  meta["base_year"] = world.base_year;
  meta["states"] = world.states;
  meta["n_counties"] = world.schema.n_categories(Item::County);
  meta["n_industries"] = world.schema.n_categories(Item::Industry);
  meta["format"] = format;
  write_lines(dir + "/world.json", meta.dump(2) + "\n");
  write_lines(dir + "/manifest.json", manifest_json + "\n");

  const std::string ext = jl ? ".jsonl" : ".csv";

  {
    std::ostringstream csv, jsonl;
    if (!jl)
      csv << "employer_id,state,sector,county,industry,in_qcew_window,quarter,"
             "qcew_m1,qcew_m2,qcew_m3,ui_reported\n";
    for (const auto& e : world.employers) {
      for (int q = 0; q < world.n_quarters; ++q) {
        const auto& eq = e.quarters[q];
        auto opt = [](std::int32_t v) {
          return v < 0 ? std::string() : std::to_string(v);
        };
        emit_row(csv, jsonl, jl,
                 {{"employer_id", std::to_string(e.id)},
                  {"state", world.states[e.state]},
                  {"sector", sector_name(e.sector)},
                  {"county", category_label(Item::County, e.county)},
                  {"industry", category_label(Item::Industry, e.industry)},
                  {"in_qcew_window", e.in_qcew_window ? "1" : "0"},
                  {"quarter", world.quarter_label(q)},
                  {"qcew_m1", opt(eq.m1)},
                  {"qcew_m2", opt(eq.m2)},
                  {"qcew_m3", opt(eq.m3)},
                  {"ui_reported", eq.ui_reported ? "1" : "0"}});
      }
    }
    write_lines(dir + "/employers" + ext, (jl ? jsonl : csv).str());
  }

  auto write_jobs = [&](const std::string& name, bool truth_view) {
    std::ostringstream csv, jsonl;
    if (!jl)
      csv << "person_id,employer_id,quarter,earnings,gender,age_group,race,"
             "ethnicity,education\n";
    for (const auto& jm : world.jobs) {
      const Characteristics& c = truth_view ? jm.truth : jm.observed;
      for (int q = 0; q < world.n_quarters; ++q) {
        if (jm.earnings[q] < 1) continue;
        std::vector<std::pair<std::string, std::string>> fields = {
            {"person_id", std::to_string(jm.person_id)},
            {"employer_id", std::to_string(world.employers[jm.employer].id)},
            {"quarter", world.quarter_label(q)},
            {"earnings", std::to_string(jm.earnings[q])}};
        for (int it = 0; it < kNumWorkerItems; ++it)
          fields.emplace_back(kWorkerCols[it], chars_field(c, it));
        emit_row(csv, jsonl, jl, fields);
      }
    }
    write_lines(dir + "/" + name + ext, (jl ? jsonl : csv).str());
  };
  write_jobs("jobs", false);
  write_jobs("jobs_truth", true);

  if (implicates && implicates->L() > 0) {
    std::ostringstream csv, jsonl;
    if (!jl)
      csv << "person_id,employer_id,implicate,gender,age_group,race,ethnicity,"
             "education\n";
    for (std::size_t j = 0; j < world.jobs.size(); ++j) {
      const auto& jm = world.jobs[j];
      for (int l = 0; l < implicates->L(); ++l) {
        std::vector<std::pair<std::string, std::string>> fields = {
            {"person_id", std::to_string(jm.person_id)},
            {"employer_id", std::to_string(world.employers[jm.employer].id)},
            {"implicate", std::to_string(l + 1)}};
        for (int it = 0; it < kNumWorkerItems; ++it)
          fields.emplace_back(
              kWorkerCols[it],
              category_label(static_cast<Item>(it),
                             implicates->get(j, l, static_cast<Item>(it))));
        emit_row(csv, jsonl, jl, fields);
      }
    }
    write_lines(dir + "/implicates" + ext, (jl ? jsonl : csv).str());
  }
}

WorldFiles load_world(const std::string& dir) {
  std::ifstream meta_in(dir + "/world.json");
  if (!meta_in) throw std::runtime_error("missing " + dir + "/world.json");
  json meta = json::parse(meta_in);

  WorldFiles out;
  World& world = out.world;
  world.n_quarters = meta.at("n_quarters").get<int>();
  world.base_year = meta.at("base_year").get<int>();
  world.states = meta.at("states").get<std::vector<std::string>>();
  world.schema.cardinality[static_cast<int>(Item::County)] =
      meta.at("n_counties").get<int>();
  world.schema.cardinality[static_cast<int>(Item::Industry)] =
      meta.at("n_industries").get<int>();
  const bool jl = meta.value("format", "csv") == "jsonl";
  const std::string ext = jl ? ".jsonl" : ".csv";
  const int T = world.n_quarters;

  auto state_index = [&](const std::string& name, const std::string& file,
                         std::size_t row) {
    for (std::size_t i = 0; i < world.states.size(); ++i)
      if (world.states[i] == name) return static_cast<std::int16_t>(i);
    throw RowError(file, row, "unknown state '" + name + "'");
  };

  // --- employers ---
  std::map<std::uint64_t, std::uint32_t> emp_index;
  {
    const std::string file = dir + "/employers" + ext;
    Rows rows = read_rows(file, jl);
    std::map<std::pair<std::uint64_t, int>, bool> seen;
    for (std::size_t r = 0; r < rows.rows.size(); ++r) {
      const auto& row = rows.rows[r];
      std::size_t n = rows.numbers[r];
      std::uint64_t id = parse_int(get_field(row, "employer_id"), n, "employer_id");
      int q = parse_quarter_label(get_field(row, "quarter"), world.base_year);
      if (q < 0 || q >= T) throw RowError(file, n, "quarter out of range");
      if (seen.count({id, q})) throw RowError(file, n, "duplicate employer-quarter");
      seen[{id, q}] = true;

      std::uint32_t idx;
      auto it = emp_index.find(id);
      if (it == emp_index.end()) {
        Employer e;
        e.id = id;
        e.state = state_index(get_field(row, "state"), file, n);
        std::string sec = get_field(row, "sector");
        if (sec == "public")
          e.sector = Sector::Public;
        else if (sec == "private")
          e.sector = Sector::Private;
        else
          throw RowError(file, n, "unknown sector code '" + sec + "'");
        e.county = static_cast<std::int16_t>(category_from_label(
            Item::County, get_field(row, "county"),
            world.schema.n_categories(Item::County)));
        e.industry = static_cast<std::int16_t>(category_from_label(
            Item::Industry, get_field(row, "industry"),
            world.schema.n_categories(Item::Industry)));
        e.in_qcew_window = get_field(row, "in_qcew_window") == "1";
        e.quarters.resize(T);
        idx = static_cast<std::uint32_t>(world.employers.size());
        emp_index[id] = idx;
        world.employers.push_back(std::move(e));
      } else {
        idx = it->second;
      }
      auto& eq = world.employers[idx].quarters[q];
      auto opt = [&](const char* key) {
        std::string s = get_field(row, key);
        return s.empty() ? -1 : static_cast<std::int32_t>(parse_int(s, n, key));
      };
      eq.m1 = opt("qcew_m1");
      eq.m2 = opt("qcew_m2");
      eq.m3 = opt("qcew_m3");
      eq.ui_reported = get_field(row, "ui_reported") == "1";
    }
  }

  // --- jobs (observed and truth views) ---
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t> job_index;
  auto load_jobs = [&](const std::string& name, bool truth_view) {
    const std::string file = dir + "/" + name + ext;
    Rows rows = read_rows(file, jl);
    std::map<std::tuple<std::uint64_t, std::uint64_t, int>, bool> seen;
    for (std::size_t r = 0; r < rows.rows.size(); ++r) {
      const auto& row = rows.rows[r];
      std::size_t n = rows.numbers[r];
      std::uint64_t pid = parse_int(get_field(row, "person_id"), n, "person_id");
      std::uint64_t eid = parse_int(get_field(row, "employer_id"), n, "employer_id");
      auto eit = emp_index.find(eid);
      if (eit == emp_index.end())
        throw RowError(file, n, "unknown employer " + std::to_string(eid));
      int q = parse_quarter_label(get_field(row, "quarter"), world.base_year);
      if (q < 0 || q >= T) throw RowError(file, n, "quarter out of range");
      long long earn = parse_int(get_field(row, "earnings"), n, "earnings");
      if (earn < 1)
        throw RowError(file, n, "earnings below $1 (a job exists only with >= $1)");
      if (seen.count({pid, eid, q}))
        throw RowError(file, n, "duplicate (person, employer, quarter)");
      seen[{pid, eid, q}] = true;

      Characteristics c;
      const Employer& emp = world.employers[eit->second];
      c.set(Item::County, emp.county);
      c.set(Item::Industry, emp.industry);
      for (int it = 0; it < kNumWorkerItems; ++it) {
        std::string s = get_field(row, kWorkerCols[it]);
        if (s.empty()) {
          if (truth_view) throw RowError(file, n, "ground truth has missing item");
          continue;
        }
        c.set(static_cast<Item>(it),
              static_cast<std::int16_t>(category_from_label(
                  static_cast<Item>(it), s,
                  world.schema.n_categories(static_cast<Item>(it)))));
      }

      auto key = std::make_pair(pid, eid);
      auto jit = job_index.find(key);
      std::uint32_t idx;
      if (jit == job_index.end()) {
        if (truth_view)
          throw RowError(file, n, "truth row for unknown job (missing in jobs file)");
        JobMatch jm;
        jm.person_id = pid;
        jm.employer = eit->second;
        jm.earnings.assign(T, 0);
        idx = static_cast<std::uint32_t>(world.jobs.size());
        job_index[key] = idx;
        world.jobs.push_back(std::move(jm));
      } else {
        idx = jit->second;
      }
      JobMatch& jm = world.jobs[idx];
      if (!truth_view) {
        if (jm.earnings[q] != 0) throw RowError(file, n, "duplicate earnings record");
        jm.earnings[q] = static_cast<std::int32_t>(earn);
        jm.observed = c;  // identical across the match's rows by construction
      } else {
        if (jm.earnings[q] != earn)
          throw RowError(file, n, "truth earnings disagree with observed view");
        jm.truth = c;
      }
    }
  };
  load_jobs("jobs", false);
  if (fs::exists(dir + "/jobs_truth" + ext)) {
    load_jobs("jobs_truth", true);
  } else {
    for (auto& jm : world.jobs) jm.truth = jm.observed;
  }

  // --- implicates ---
  const std::string impl_file = dir + "/implicates" + ext;
  if (fs::exists(impl_file)) {
    Rows rows = read_rows(impl_file, jl);
    int L = 0;
    for (std::size_t r = 0; r < rows.rows.size(); ++r)
      L = std::max(L, static_cast<int>(parse_int(
                          get_field(rows.rows[r], "implicate"), rows.numbers[r],
                          "implicate")));
    if (L < 1) throw std::runtime_error(impl_file + ": no implicates");
    out.implicates = ImplicateTable(world.jobs.size(), L);
    for (std::size_t r = 0; r < rows.rows.size(); ++r) {
      const auto& row = rows.rows[r];
      std::size_t n = rows.numbers[r];
      std::uint64_t pid = parse_int(get_field(row, "person_id"), n, "person_id");
      std::uint64_t eid = parse_int(get_field(row, "employer_id"), n, "employer_id");
      auto jit = job_index.find({pid, eid});
      if (jit == job_index.end())
        throw RowError(impl_file, n, "implicate for unknown job");
      int l = static_cast<int>(parse_int(get_field(row, "implicate"), n, "implicate")) - 1;
      for (int it = 0; it < kNumWorkerItems; ++it) {
        std::string s = get_field(row, kWorkerCols[it]);
        if (s.empty()) throw RowError(impl_file, n, "implicate has missing item");
        out.implicates.set(
            jit->second, l, static_cast<Item>(it),
            static_cast<std::int16_t>(category_from_label(
                static_cast<Item>(it), s,
                world.schema.n_categories(static_cast<Item>(it)))));
      }
    }
  }

  return out;
}

}  // namespace jobtab
