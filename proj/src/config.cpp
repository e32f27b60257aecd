#include "vortexlab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace vlab {

namespace {

struct KeySpec {
  const char* key;
  const char* fallback;  // nullptr marks a required key
  bool affects_pde;
};

// every accepted key; anything else in a config is an error
constexpr KeySpec kKeys[] = {
    {"domain.domain", "unit_square", true},
    {"domain.tol_boundary", "1e-12", true},
    {"model.nu", nullptr, true},
    {"model.M", "auto", true},
    {"model.omega0", nullptr, true},
    {"model.g", nullptr, true},
    {"heat.epsilon_c", "0.5", false},
    {"heat.grid_g", "0", false},
    {"heat.tail_tol", "1e-12", false},
    {"heat.deposition", "nearest", false},
    {"particles.n", "16", false},
    {"particles.k_sub", "4", false},
    {"particles.seed", "1", false},
    {"particles.bookkeeping", "split", false},
    {"particles.dump_particles", "false", false},
    {"pde.pde_j", "64", true},
    {"pde.pde_dt", "1e-3", true},
    {"pde.coupled", "true", true},
    {"output.divisions", "10", true},
    {"output.pde_grid", "128", true},
    {"sweep.n_list", "8,16,32", false},
    {"sweep.seeds", "10", false},
    {"sweep.norms", "l2", false},
    {"sweep.fail_seeds", "", false},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key " + key + ": expected a number, got '" + v + "'");
  }
  return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key " + key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key " + key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Expression to_expression(const std::string& key, const std::string& v) {
  try {
    return Expression::parse(v);
  } catch (const ExpressionError& e) {
    throw ConfigError("config key " + key + ": " + e.what());
  }
}

}  // namespace

ConfigText ConfigText::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  ConfigText out;
  out.raw = text;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config key '" + section + "' must appear inside a [section]");
    }
    for (const auto& [key, value] : body) {
      out.entries[section + "." + key] = unquote(trim(value.data()));
    }
  }
  return out;
}

ConfigText ConfigText::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string canonical_text(const std::map<std::string, std::string>& entries) {
  std::string out;
  for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
  return out;
}

std::string fingerprint(const std::map<std::string, std::string>& entries) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text(entries))));
  return buf;
}

std::string HarnessConfig::fingerprint() const { return vlab::fingerprint(resolved); }

std::string HarnessConfig::pde_fingerprint() const {
  std::map<std::string, std::string> subset;
  for (const auto& spec : kKeys) {
    if (spec.affects_pde) subset[spec.key] = resolved.at(spec.key);
  }
  return vlab::fingerprint(subset);
}

std::vector<std::uint64_t> HarnessConfig::seeds() const {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < seed_count; ++i) out.push_back(sim.seed + static_cast<std::uint64_t>(i));
  return out;
}

HarnessConfig resolve_config(const ConfigText& text, std::optional<std::uint64_t> seed_override) {
  std::set<std::string> known;
  for (const auto& spec : kKeys) known.insert(spec.key);
  for (const auto& [k, v] : text.entries) {
    if (!known.count(k)) throw ConfigError("unknown config key: " + k);
  }

  HarnessConfig cfg;
  cfg.source = text;
  for (const auto& spec : kKeys) {
    auto it = text.entries.find(spec.key);
    if (it != text.entries.end()) {
      cfg.resolved[spec.key] = it->second;
    } else if (spec.fallback == nullptr) {
      throw MissingKeyError(spec.key);
    } else {
      cfg.resolved[spec.key] = spec.fallback;
    }
  }
  if (seed_override) cfg.resolved["particles.seed"] = std::to_string(*seed_override);
  const auto& r = cfg.resolved;
  auto get = [&](const char* k) -> const std::string& { return r.at(k); };

  Domain domain = [&] {
    try {
      return Domain::from_name(get("domain.domain"));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config key domain.domain: ") + e.what());
    }
  }();
  const double nu = to_double("model.nu", get("model.nu"));
  const Expression omega0 = to_expression("model.omega0", get("model.omega0"));
  const Expression g = to_expression("model.g", get("model.g"));
  double speed_bound = std::numeric_limits<double>::infinity();
  cfg.auto_speed_bound = get("model.M") == "auto";
  if (!cfg.auto_speed_bound) speed_bound = to_double("model.M", get("model.M"));

  SimConfig& sim = cfg.sim;
  sim.domain = domain;
  sim.n = to_int<int>("particles.n", get("particles.n"));
  sim.nu = nu;
  sim.speed_bound = speed_bound;
  sim.epsilon_c = to_double("heat.epsilon_c", get("heat.epsilon_c"));
  sim.k_sub = to_int<int>("particles.k_sub", get("particles.k_sub"));
  sim.grid_g = to_int<int>("heat.grid_g", get("heat.grid_g"));
  sim.seed = to_int<std::uint64_t>("particles.seed", get("particles.seed"));
  sim.omega0 = omega0;
  sim.g = g;
  sim.output_divisions = to_int<int>("output.divisions", get("output.divisions"));
  sim.tail_tol = to_double("heat.tail_tol", get("heat.tail_tol"));
  sim.tol_boundary = to_double("domain.tol_boundary", get("domain.tol_boundary"));
  const std::string& dep = get("heat.deposition");
  if (dep == "nearest") {
    sim.deposition = Deposition::nearest;
  } else if (dep == "bilinear") {
    sim.deposition = Deposition::bilinear;
  } else {
    throw ConfigError("config key heat.deposition: expected nearest or bilinear, got '" + dep + "'");
  }
  const std::string& book = get("particles.bookkeeping");
  if (book == "split") {
    sim.bookkeeping = Bookkeeping::split;
  } else if (book == "signed") {
    sim.bookkeeping = Bookkeeping::signed_;
  } else {
    throw ConfigError("config key particles.bookkeeping: expected split or signed, got '" + book +
                      "'");
  }
  cfg.dump_particles = to_bool("particles.dump_particles", get("particles.dump_particles"));

  PdeConfig& pde = cfg.pde;
  pde.nu = nu;
  pde.speed_bound = speed_bound;
  pde.omega0 = omega0;
  pde.g = g;
  pde.modes = to_int<int>("pde.pde_j", get("pde.pde_j"));
  pde.dt = to_double("pde.pde_dt", get("pde.pde_dt"));
  pde.output_divisions = sim.output_divisions;
  pde.coupled = to_bool("pde.coupled", get("pde.coupled"));
  cfg.pde_grid = to_int<int>("output.pde_grid", get("output.pde_grid"));
  if (cfg.pde_grid < 4) throw ConfigError("config key output.pde_grid: must be at least 4");

  for (const auto& item : split_list(get("sweep.n_list"))) {
    cfg.n_list.push_back(to_int<int>("sweep.n_list", item));
  }
  cfg.seed_count = to_int<int>("sweep.seeds", get("sweep.seeds"));
  if (cfg.seed_count < 1) throw ConfigError("config key sweep.seeds: must be at least 1");
  for (const auto& item : split_list(get("sweep.norms"))) {
    try {
      cfg.norms.push_back(NormSpec::parse(item, nu));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key sweep.norms: ") + e.what());
    }
  }
  if (cfg.norms.empty()) throw ConfigError("config key sweep.norms: no norms given");
  for (const auto& item : split_list(get("sweep.fail_seeds"))) {
    cfg.fail_seeds.push_back(to_int<std::uint64_t>("sweep.fail_seeds", item));
  }

  try {
    pde.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace vlab
