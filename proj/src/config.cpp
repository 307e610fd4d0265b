#include "jobtab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jobtab/rng.hpp"
#include <json.hpp>

namespace jobtab {

using nlohmann::json;

const char* const kJobtabVersion = "0.1.0";

void RampParams::validate() const {
  // a == b is the degenerate point-mass limit, allowed for draws but the
  // density is undefined there.
  if (!(a > 0.0) || !(b >= a) || !(b < 1.0))
    throw std::invalid_argument("ramp params require 0 < a <= b < 1");
}

void WorldConfig::validate() const {
  auto check_prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument(std::string(what) + " must be in [0,1]");
  };
  if (states.empty()) throw std::invalid_argument("world.states must be non-empty");
  if (n_employers <= 0) throw std::invalid_argument("world.n_employers must be positive");
  if (n_quarters <= 0) throw std::invalid_argument("world.n_quarters must be positive");
  if (n_counties <= 0 || n_industries <= 0)
    throw std::invalid_argument("world.n_counties/n_industries must be positive");
  check_prob(public_share, "world.public_share");
  for (double p : record_missing) check_prob(p, "world.record_missing");
  check_prob(qcew_month_missing, "world.qcew_month_missing");
  check_prob(qcew_quarter_missing, "world.qcew_quarter_missing");
  check_prob(qcew_never_fraction, "world.qcew_never_fraction");
  for (double p : item_missing) check_prob(p, "world.item_missing");
  check_prob(continuation, "world.continuation");
  check_prob(initial_active, "world.initial_active");
  if (size_max <= 0) throw std::invalid_argument("world.size_max must be positive");
  if (!(size_log_sd >= 0) || !(earnings_log_sd >= 0))
    throw std::invalid_argument("log-sd parameters must be non-negative");
}

void RunConfig::validate() const {
  if (L < 1) throw std::invalid_argument("run.L must be at least 1");
  if (G < 2) throw std::invalid_argument("run.G must be at least 2");
  ramp.validate();
  if (format != "csv" && format != "jsonl")
    throw std::invalid_argument("run.format must be csv or jsonl");
  if (threads < 0) throw std::invalid_argument("run.threads must be >= 0");
  if (frame_window && frame_window->first > frame_window->second)
    throw std::invalid_argument("run.frame_window is empty");
  for (const auto& t : tables) {
    if (t.dims.empty())
      throw std::invalid_argument("table '" + t.name + "' has no stratifiers");
  }
}

namespace {

json world_to_json(const WorldConfig& w) {
  json j;
  j["states"] = w.states;
  j["n_employers"] = w.n_employers;
  j["n_quarters"] = w.n_quarters;
  j["base_year"] = w.base_year;
  j["n_counties"] = w.n_counties;
  j["n_industries"] = w.n_industries;
  j["public_share"] = w.public_share;
  j["size_log_mean"] = w.size_log_mean;
  j["size_log_sd"] = w.size_log_sd;
  j["size_max"] = w.size_max;
  j["record_missing"] = {{"public", w.record_missing[0]},
                         {"private", w.record_missing[1]}};
  j["qcew_month_missing"] = w.qcew_month_missing;
  j["qcew_quarter_missing"] = w.qcew_quarter_missing;
  j["qcew_never_fraction"] = w.qcew_never_fraction;
  json im;
  for (int i = 0; i < kNumWorkerItems; ++i)
    im[item_name(static_cast<Item>(i))] = w.item_missing[i];
  j["item_missing"] = im;
  j["earnings_log_mean"] = w.earnings_log_mean;
  j["earnings_log_sd"] = w.earnings_log_sd;
  j["continuation"] = w.continuation;
  j["initial_active"] = w.initial_active;
  return j;
}

WorldConfig world_from_json(const json& j) {
  WorldConfig w;
  if (j.contains("states")) w.states = j.at("states").get<std::vector<std::string>>();
  auto get = [&](const char* key, auto& out) {
    if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  get("n_employers", w.n_employers);
  get("n_quarters", w.n_quarters);
  get("base_year", w.base_year);
  get("n_counties", w.n_counties);
  get("n_industries", w.n_industries);
  get("public_share", w.public_share);
  get("size_log_mean", w.size_log_mean);
  get("size_log_sd", w.size_log_sd);
  get("size_max", w.size_max);
  if (j.contains("record_missing")) {
    const auto& rm = j.at("record_missing");
    if (rm.is_number()) {
      w.record_missing[0] = w.record_missing[1] = rm.get<double>();
    } else {
      w.record_missing[0] = rm.value("public", w.record_missing[0]);
      w.record_missing[1] = rm.value("private", w.record_missing[1]);
    }
  }
  get("qcew_month_missing", w.qcew_month_missing);
  get("qcew_quarter_missing", w.qcew_quarter_missing);
  get("qcew_never_fraction", w.qcew_never_fraction);
  if (j.contains("item_missing")) {
    const auto& im = j.at("item_missing");
    for (int i = 0; i < kNumWorkerItems; ++i) {
      const char* name = item_name(static_cast<Item>(i));
      if (im.contains(name)) w.item_missing[i] = im.at(name).get<double>();
    }
  }
  get("earnings_log_mean", w.earnings_log_mean);
  get("earnings_log_sd", w.earnings_log_sd);
  get("continuation", w.continuation);
  get("initial_active", w.initial_active);
  return w;
}

json tables_to_json(const std::vector<TableSpec>& tables) {
  json arr = json::array();
  for (const auto& t : tables) {
    json jt;
    jt["name"] = t.name;
    json dims = json::array();
    for (Item it : t.dims) dims.push_back(item_name(it));
    jt["dims"] = dims;
    arr.push_back(jt);
  }
  return arr;
}

std::vector<TableSpec> tables_from_json(const json& arr) {
  std::vector<TableSpec> tables;
  for (const auto& jt : arr) {
    TableSpec t;
    t.name = jt.value("name", "");
    for (const auto& d : jt.at("dims")) {
      Item item;
      std::string name = d.get<std::string>();
      if (!item_from_name(name, item))
        throw std::invalid_argument("unknown stratifier '" + name + "' in table '" +
                                    t.name + "'");
      t.dims.push_back(item);
    }
    if (t.name.empty()) {
      for (std::size_t i = 0; i < t.dims.size(); ++i) {
        if (i) t.name += " x ";
        t.name += item_name(t.dims[i]);
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

json run_to_json(const RunConfig& r) {
  json j;
  j["seed"] = r.seed;
  j["L"] = r.L;
  j["G"] = r.G;
  j["ramp"] = {{"a", r.ramp.a}, {"b", r.ramp.b}};
  j["sdl_enabled"] = r.sdl_enabled;
  j["mode"] = variance_mode_name(r.mode);
  if (r.frame_window)
    j["frame_window"] = {r.frame_window->first, r.frame_window->second};
  j["tables"] = tables_to_json(r.tables);
  j["stats"] = r.stats;
  j["threads"] = r.threads;
  j["world_dir"] = r.world_dir;
  j["out_dir"] = r.out_dir;
  j["format"] = r.format;
  return j;
}

RunConfig run_from_json(const json& j) {
  RunConfig r;
  if (!j.contains("seed"))
    throw std::invalid_argument("config: run.seed is required (no implicit nondeterminism)");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.L = j.value("L", r.L);
  r.G = j.value("G", r.G);
  if (j.contains("ramp")) {
    r.ramp.a = j.at("ramp").value("a", r.ramp.a);
    r.ramp.b = j.at("ramp").value("b", r.ramp.b);
  }
  r.sdl_enabled = j.value("sdl_enabled", true);
  std::string mode = j.value("mode", "text_tables");
  if (mode == "text_tables" || mode == "text") {
    r.mode = VarianceMode::TextTables;
  } else if (mode == "supplemental") {
    r.mode = VarianceMode::Supplemental;
  } else {
    throw std::invalid_argument("run.mode must be text_tables or supplemental");
  }
  if (j.contains("frame_window") && !j.at("frame_window").is_null()) {
    auto fw = j.at("frame_window");
    r.frame_window = std::make_pair(fw.at(0).get<int>(), fw.at(1).get<int>());
  }
  if (j.contains("tables")) r.tables = tables_from_json(j.at("tables"));
  if (j.contains("tables_file")) {
    std::ifstream in(j.at("tables_file").get<std::string>());
    if (!in) throw std::runtime_error("cannot open tables file");
    json tf = json::parse(in);
    auto extra = tables_from_json(tf.is_array() ? tf : tf.at("tables"));
    r.tables.insert(r.tables.end(), extra.begin(), extra.end());
  }
  if (j.contains("stats")) r.stats = j.at("stats").get<std::vector<std::string>>();
  r.threads = j.value("threads", 0);
  r.world_dir = j.value("world_dir", r.world_dir);
  r.out_dir = j.value("out_dir", r.out_dir);
  r.format = j.value("format", r.format);
  return r;
}

}  // namespace

std::string config_to_json(const Config& cfg) {
  json j;
  j["world"] = world_to_json(cfg.world);
  json r = run_to_json(cfg.run);
  // seed lives at top level of "run" in serialized form
  j["run"] = r;
  return j.dump(2);
}

Config config_from_json(const std::string& text) {
  json j = json::parse(text);
  Config cfg;
  if (j.contains("world")) cfg.world = world_from_json(j.at("world"));
  if (!j.contains("run")) throw std::invalid_argument("config: missing 'run' section");
  cfg.run = run_from_json(j.at("run"));
  cfg.world.validate();
  cfg.run.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_hash(const Config& cfg) {
  // nlohmann::json::dump() emits keys in sorted order, so the serialization
  // is canonical.
  std::uint64_t h = fnv1a64(config_to_json(cfg));
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace jobtab
