#include "privagg/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "privagg/errors.hpp"

namespace privagg::cli {

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported.
// Parsed text gives unsigned numbers; values built in code may be signed.
bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& child(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::uint64_t u64(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
    if (!has(key)) return fallback_or(key, fallback);
    const json& v = child(key);
    if (!non_negative_integer(v)) throw ConfigError(where(key) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  unsigned u32(const std::string& key, std::optional<unsigned> fallback = std::nullopt) {
    const std::uint64_t v = u64(key, fallback);
    if (v > 0xFFFFFFFFu) throw ConfigError(where(key) + " is too large");
    return static_cast<unsigned>(v);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) return fallback_or(key, fallback);
    const json& v = child(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    return v.get<double>();
  }

  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt) {
    if (!has(key)) return fallback_or(key, fallback);
    const json& v = child(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) return fallback_or(key, fallback);
    const json& v = child(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  std::vector<std::uint64_t> u64_list(const std::string& key) {
    std::vector<std::uint64_t> out;
    if (!has(key)) return out;
    const json& v = child(key);
    if (!v.is_array()) throw ConfigError(where(key) + " must be an array");
    for (const json& e : v) {
      if (!non_negative_integer(e)) throw ConfigError(where(key) + " must hold non-negative integers");
      out.push_back(e.get<std::uint64_t>());
    }
    return out;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.contains(item.key())) throw ConfigError("unknown key " + where(item.key()));
    }
  }

  std::string where(const std::string& key = {}) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  template <typename T>
  T fallback_or(const std::string& key, const std::optional<T>& fallback) const {
    if (!fallback) throw ConfigError("missing key " + where(key));
    return *fallback;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

MechanismConfig parse_mechanism(const json& j) {
  ObjectReader r(j, "mechanism");
  MechanismConfig m;
  try {
    m.kind = parse_mechanism_kind(r.string("kind"));
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  switch (m.kind) {
    case MechanismKind::rr:
      m.query_value = r.u32("query_value");
      m.rr.pi1 = r.number("pi1");
      m.rr.pi2 = r.number("pi2");
      break;
    case MechanismKind::xyz_binary:
      m.query_value = r.u32("query_value");
      m.xyz_binary.pi_s = r.number("pi_s");
      m.xyz_binary.pi_yes = r.number("pi_yes");
      m.xyz_binary.pi_no = r.number("pi_no");
      break;
    case MechanismKind::calibrated:
      m.query_value = r.u32("query_value");
      m.calibrated.pi_s_yes_1 = r.number("pi_s_yes_1");
      m.calibrated.pi_s_no_1 = r.number("pi_s_no_1");
      m.calibrated.pi_s_yes_2 = r.number("pi_s_yes_2");
      m.calibrated.pi_s_no_2 = r.number("pi_s_no_2");
      m.calibrated.pi_no = r.number("pi_no", 0.0);
      break;
    case MechanismKind::xyz_multi: {
      m.xyz_multi.pi_s = r.number("pi_s");
      m.xyz_multi.pi_v = r.number("pi_v");
      for (std::uint64_t v : r.u64_list("domain")) {
        if (v > 0xFFFFFFFFu) throw ConfigError("mechanism.domain value is too large");
        m.domain.push_back(static_cast<std::uint32_t>(v));
      }
      m.xyz_multi.domain_size = static_cast<std::uint32_t>(m.domain.size());
      break;
    }
  }
  r.finish();
  return m;
}

json dump_mechanism(const MechanismConfig& m) {
  json j;
  j["kind"] = std::string(to_string(m.kind));
  switch (m.kind) {
    case MechanismKind::rr:
      j["query_value"] = m.query_value;
      j["pi1"] = m.rr.pi1;
      j["pi2"] = m.rr.pi2;
      break;
    case MechanismKind::xyz_binary:
      j["query_value"] = m.query_value;
      j["pi_s"] = m.xyz_binary.pi_s;
      j["pi_yes"] = m.xyz_binary.pi_yes;
      j["pi_no"] = m.xyz_binary.pi_no;
      break;
    case MechanismKind::calibrated:
      j["query_value"] = m.query_value;
      j["pi_s_yes_1"] = m.calibrated.pi_s_yes_1;
      j["pi_s_no_1"] = m.calibrated.pi_s_no_1;
      j["pi_s_yes_2"] = m.calibrated.pi_s_yes_2;
      j["pi_s_no_2"] = m.calibrated.pi_s_no_2;
      j["pi_no"] = m.calibrated.pi_no;
      break;
    case MechanismKind::xyz_multi:
      j["pi_s"] = m.xyz_multi.pi_s;
      j["pi_v"] = m.xyz_multi.pi_v;
      j["domain"] = m.domain;
      break;
  }
  return j;
}

PopulationSpec parse_population(const json& j) {
  ObjectReader r(j, "population");
  PopulationSpec spec;
  spec.total = r.u64("total");
  if (r.has("counts")) {
    const json& counts = r.child("counts");
    if (!counts.is_object()) throw ConfigError("population.counts must be an object");
    for (const auto& item : counts.items()) {
      std::uint32_t value = 0;
      try {
        std::size_t used = 0;
        const unsigned long parsed = std::stoul(item.key(), &used);
        if (used != item.key().size() || parsed > 0xFFFFFFFFul) throw std::invalid_argument("");
        value = static_cast<std::uint32_t>(parsed);
      } catch (const std::exception&) {
        throw ConfigError("population.counts key '" + item.key() + "' is not a value id");
      }
      if (!non_negative_integer(item.value())) {
        throw ConfigError("population.counts." + item.key() + " must be a non-negative integer");
      }
      spec.counts[value] = item.value().get<std::uint64_t>();
    }
  }
  r.finish();
  std::uint64_t assigned = 0;
  for (const auto& [v, c] : spec.counts) assigned += c;
  if (assigned > spec.total) throw ConfigError("population.counts exceed population.total");
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ObjectReader r(j, "");
  ExperimentConfig c;
  c.epoch.mech = parse_mechanism(r.child("mechanism"));
  if (r.has("population") == r.has("dataset")) {
    throw ConfigError("exactly one of population and dataset is required");
  }
  if (r.has("population")) c.population = parse_population(r.child("population"));
  if (r.has("dataset")) {
    ObjectReader d(r.child("dataset"), "dataset");
    DatasetSource src;
    src.path = d.string("path");
    src.pad_to_total = d.u64("pad_to_total", 0);
    d.finish();
    c.dataset = src;
  }
  c.sweep_totals = r.u64_list("sweep_totals");
  if (!c.sweep_totals.empty() && !c.population) {
    throw ConfigError("sweep_totals needs a synthetic population");
  }
  if (c.population) {
    std::uint64_t assigned = 0;
    for (const auto& [v, count] : c.population->counts) assigned += count;
    for (std::uint64_t total : c.sweep_totals) {
      if (total < assigned) throw ConfigError("sweep total below the truthful counts");
    }
  }

  if (r.has("epoch")) {
    ObjectReader e(r.child("epoch"), "epoch");
    const EpochConfig defaults;
    c.epoch.parties = e.u32("parties", defaults.parties);
    c.epoch.k_threshold = e.u64("k_threshold", defaults.k_threshold);
    c.epoch.db_slots = e.u64("db_slots", defaults.db_slots);
    if (e.has("row_width")) c.epoch.row_width = e.u64("row_width");
    c.epoch.id_bits = e.u32("id_bits", defaults.id_bits);
    c.epoch.checksum_bits = e.u32("checksum_bits", defaults.checksum_bits);
    c.epoch.epoch_id = e.u64("epoch_id", defaults.epoch_id);
    c.epoch.verify = e.boolean("verify", defaults.verify);
    try {
      c.epoch.verify_kind = parse_blinding_kind(e.string("verify_kind", "square"));
    } catch (const InvalidParams& ex) {
      throw ConfigError(ex.what());
    }
    c.crypto = e.boolean("crypto", false);
    e.finish();
  }
  c.trials = r.u64("trials", 1);
  c.seed = r.u64("seed", 0);
  if (c.trials == 0) throw ConfigError("trials must be positive");
  r.finish();

  try {
    c.epoch.validate();
    if (c.epoch.row_width) {
      FssParams::with_defaults(10, c.epoch.parties, c.epoch.message_bits())
          .with_row_width(*c.epoch.row_width);
    }
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json dump_config(const ExperimentConfig& c) {
  json j;
  j["mechanism"] = dump_mechanism(c.epoch.mech);
  if (c.population) {
    json counts = json::object();
    for (const auto& [v, n] : c.population->counts) counts[std::to_string(v)] = n;
    j["population"] = {{"total", c.population->total}, {"counts", counts}};
  }
  if (c.dataset) j["dataset"] = {{"path", c.dataset->path}, {"pad_to_total", c.dataset->pad_to_total}};
  j["sweep_totals"] = c.sweep_totals;
  json epoch = {
      {"parties", c.epoch.parties},
      {"k_threshold", c.epoch.k_threshold},
      {"db_slots", c.epoch.db_slots},
      {"id_bits", c.epoch.id_bits},
      {"checksum_bits", c.epoch.checksum_bits},
      {"epoch_id", c.epoch.epoch_id},
      {"verify", c.epoch.verify},
      {"verify_kind", std::string(to_string(c.epoch.verify_kind))},
      {"crypto", c.crypto},
  };
  if (c.epoch.row_width) epoch["row_width"] = *c.epoch.row_width;
  j["epoch"] = epoch;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_override(json& j, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }

  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (!node->is_object()) throw ConfigError("override key '" + key + "' crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

Population load_dataset_csv(const std::filesystem::path& path, unsigned id_bits,
                            std::uint64_t pad_to_total) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty dataset");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "owner_id,value") throw ConfigError(path.string() + ": header must be owner_id,value");

  Population out;
  std::unordered_map<std::string, std::uint64_t> seen;
  std::uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ConfigError(where + ": expected two fields");
    }
    const std::string owner = line.substr(0, comma);
    const std::string value_text = line.substr(comma + 1);
    if (owner.empty()) throw ConfigError(where + ": empty owner_id");
    std::uint64_t value = 0;
    try {
      std::size_t used = 0;
      value = std::stoull(value_text, &used);
      if (used != value_text.size() || value_text.front() == '-') throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError(where + ": value '" + value_text + "' is not a non-negative integer");
    }
    if (id_bits < 64 && (value >> id_bits) != 0) throw ConfigError(where + ": value does not fit id_bits");
    if (!seen.emplace(owner, out.size()).second) {
      throw ConfigError(where + ": duplicate owner_id '" + owner + "'");
    }
    out.push_back(Owner{out.size(), static_cast<std::uint32_t>(value)});
  }
  if (pad_to_total != 0) {
    if (pad_to_total < out.size()) throw ConfigError("pad_to_total is below the dataset size");
    while (out.size() < pad_to_total) out.push_back(Owner{out.size(), std::nullopt});
  }
  if (out.empty()) throw ConfigError(path.string() + ": dataset has no owners");
  return out;
}

}  // namespace privagg::cli
