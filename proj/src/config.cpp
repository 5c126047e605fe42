#include "qtorus/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qtorus {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': cannot parse boolean '" + v + "'");
}

// comma/space list, or start:stop:step expansion
std::vector<double> parse_list(const std::string& key, const std::string& v) {
  if (v.find(':') != std::string::npos) {
    std::vector<std::string> parts = split(v, ':');
    if (parts.size() != 3)
      throw ConfigError("config key '" + key + "': range needs start:stop:step");
    double start = parse_double(key, parts[0]);
    double stop = parse_double(key, parts[1]);
    double step = parse_double(key, parts[2]);
    if (!(step > 0.0)) throw ConfigError("config key '" + key + "': step must be > 0");
    std::vector<double> out;
    for (long i = 0;; ++i) {
      double t = start + double(i) * step;
      if (t > stop + 1e-12 * std::max(1.0, std::fabs(stop))) break;
      out.push_back(t);
    }
    return out;
  }
  std::vector<double> out;
  std::string norm = v;
  for (char& c : norm)
    if (c == ',') c = ' ';
  std::istringstream is(norm);
  std::string tok;
  while (is >> tok) out.push_back(parse_double(key, tok));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<int> to_int_vector(const std::string& key, const std::vector<double>& v) {
  std::vector<int> out;
  out.reserve(v.size());
  for (double d : v) {
    int i = int(std::lround(d));
    if (std::fabs(d - double(i)) > 1e-9)
      throw ConfigError("config key '" + key + "': expected integers");
    out.push_back(i);
  }
  return out;
}

Monomial parse_monomial(const std::string& v) {
  std::vector<std::string> parts = split(v, '|');
  if (parts.size() != 3)
    throw ConfigError("config key 'perturbation.monomial': expected 'coeff | alpha | beta'");
  Monomial m;
  m.coeff = parse_double("perturbation.monomial", parts[0]);
  m.alpha = MultiIndex(to_int_vector("perturbation.monomial", parse_list("perturbation.monomial", parts[1])));
  m.beta = MultiIndex(to_int_vector("perturbation.monomial", parse_list("perturbation.monomial", parts[2])));
  return m;
}

BScaleMode parse_b_scale(const std::string& v) {
  if (v == "chain_rule") return BScaleMode::kChainRule;
  if (v == "fixed_inverse_e") return BScaleMode::kFixedInverseE;
  throw ConfigError("config key 'solver.b_scale_mode': expected chain_rule or fixed_inverse_e");
}

ExperimentMode parse_mode(const std::string& v) {
  if (v == "solve") return ExperimentMode::kSolve;
  if (v == "drift") return ExperimentMode::kDrift;
  if (v == "resonance_scan") return ExperimentMode::kResonanceScan;
  throw ConfigError("config key 'mode': expected solve, drift or resonance_scan");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (outputs.directory.empty())
    throw ConfigError("config key 'outputs.directory': required");
  if (mode == ExperimentMode::kSolve) {
    try {
      system.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config section [system]/[perturbation]: ") + e.what());
    }
    try {
      solver.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config section [solver]: ") + e.what());
    }
  }
  if (mode == ExperimentMode::kResonanceScan) {
    try {
      scan.domain.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config section [resonance]: ") + e.what());
    }
  }
  if (!(outputs.reference_dt > 0.0))
    throw ConfigError("config key 'outputs.reference_dt': must be > 0");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.solver.amplitude = std::exp(-1.0);
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  bool n_seen = false;
  std::size_t n = 1;
  std::vector<double> omega0;
  std::vector<Monomial> monomials;

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    std::string full = section.empty() ? key : section + "." + key;

    if (full == "name") cfg.name = value;
    else if (full == "mode") cfg.mode = parse_mode(value);
    else if (full == "system.n") { n = std::size_t(parse_long(full, value)); n_seen = true; }
    else if (full == "system.omega0") omega0 = parse_list(full, value);
    else if (full == "system.amplitude") cfg.solver.amplitude = parse_double(full, value);
    else if (full == "perturbation.epsilon") cfg.system.epsilon = parse_double(full, value);
    else if (full == "perturbation.monomial") monomials.push_back(parse_monomial(value));
    else if (full == "solver.M") cfg.solver.M = int(parse_long(full, value));
    else if (full == "solver.N0") cfg.solver.N0 = int(parse_long(full, value));
    else if (full == "solver.max_iter") cfg.solver.max_iter = int(parse_long(full, value));
    else if (full == "solver.tol_residual") cfg.solver.tol_residual = parse_double(full, value);
    else if (full == "solver.use_B") cfg.solver.use_B = parse_bool(full, value);
    else if (full == "solver.b_scale_mode") cfg.solver.b_scale = parse_b_scale(value);
    else if (full == "solver.N_cap") cfg.solver.N_cap = int(parse_long(full, value));
    else if (full == "solver.rcond_floor") cfg.solver.rcond_floor = parse_double(full, value);
    else if (full == "solver.mode_budget") cfg.solver.mode_budget = std::size_t(parse_long(full, value));
    else if (full == "solver.dense_rows_cap") cfg.solver.dense_rows_cap = std::size_t(parse_long(full, value));
    else if (full == "solver.seed") cfg.solver.seed = std::uint64_t(parse_long(full, value));
    else if (full == "diagnostics.s") cfg.solver.gevrey_s = parse_double(full, value);
    else if (full == "diagnostics.tau") cfg.solver.tau = parse_double(full, value);
    else if (full == "diagnostics.M_box") cfg.solver.diophantine_box = int(parse_long(full, value));
    else if (full == "diagnostics.strict") cfg.solver.strict_conditions = parse_bool(full, value);
    else if (full == "diagnostics.localization_dim_cap")
      cfg.solver.localization_dim_cap = std::size_t(parse_long(full, value));
    else if (full == "drift.h_values") cfg.drift.h_values = parse_list(full, value);
    else if (full == "drift.n_steps") cfg.drift.n_steps = parse_long(full, value);
    else if (full == "resonance.lower") cfg.scan.domain.lower = parse_list(full, value);
    else if (full == "resonance.upper") cfg.scan.domain.upper = parse_list(full, value);
    else if (full == "resonance.taus") cfg.scan.taus = parse_list(full, value);
    else if (full == "resonance.M_box") cfg.scan.M_box = int(parse_long(full, value));
    else if (full == "resonance.samples") cfg.scan.samples = std::size_t(parse_long(full, value));
    else if (full == "resonance.seed") cfg.scan.seed = std::uint64_t(parse_long(full, value));
    else if (full == "outputs.directory") cfg.outputs.directory = value;
    else if (full == "outputs.emit_trajectories") cfg.outputs.emit_trajectories = parse_bool(full, value);
    else if (full == "outputs.trajectory_times") cfg.outputs.trajectory_times = parse_list(full, value);
    else if (full == "outputs.reference_dt") cfg.outputs.reference_dt = parse_double(full, value);
    else throw ConfigError("config key '" + full + "': unknown key");
  }

  if (cfg.mode == ExperimentMode::kSolve) {
    if (!n_seen) throw ConfigError("config key 'system.n': required");
    if (omega0.empty()) throw ConfigError("config key 'system.omega0': required");
    if (omega0.size() != n)
      throw ConfigError("config key 'system.omega0': length must equal system.n");
    cfg.system.n = n;
    cfg.system.omega0 = omega0;
    cfg.system.terms = std::move(monomials);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  std::string t = trim(text);
  if (!t.empty() && t[0] == '{') {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, true, true);
    if (j.contains("config")) j = j["config"];  // accept a summary.json
    return config_from_json(j);
  }
  return parse_config_text(text);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["mode"] = cfg.mode == ExperimentMode::kSolve ? "solve"
              : cfg.mode == ExperimentMode::kDrift ? "drift"
                                                   : "resonance_scan";
  j["system"] = {{"n", cfg.system.n},
                 {"omega0", cfg.system.omega0},
                 {"amplitude", cfg.solver.amplitude}};
  nlohmann::json terms = nlohmann::json::array();
  for (const Monomial& m : cfg.system.terms)
    terms.push_back({{"coeff", m.coeff},
                     {"alpha", m.alpha.entries()},
                     {"beta", m.beta.entries()}});
  j["perturbation"] = {{"epsilon", cfg.system.epsilon}, {"monomials", terms}};
  j["solver"] = {{"M", cfg.solver.M},
                 {"N0", cfg.solver.N0},
                 {"max_iter", cfg.solver.max_iter},
                 {"tol_residual", cfg.solver.tol_residual},
                 {"use_B", cfg.solver.use_B},
                 {"b_scale_mode", cfg.solver.b_scale == BScaleMode::kChainRule
                                      ? "chain_rule"
                                      : "fixed_inverse_e"},
                 {"N_cap", cfg.solver.N_cap},
                 {"rcond_floor", cfg.solver.rcond_floor},
                 {"mode_budget", cfg.solver.mode_budget},
                 {"dense_rows_cap", cfg.solver.dense_rows_cap},
                 {"seed", cfg.solver.seed}};
  j["diagnostics"] = {{"s", cfg.solver.gevrey_s},
                      {"tau", cfg.solver.tau},
                      {"M_box", cfg.solver.diophantine_box},
                      {"strict", cfg.solver.strict_conditions},
                      {"localization_dim_cap", cfg.solver.localization_dim_cap}};
  j["drift"] = {{"h_values", cfg.drift.h_values}, {"n_steps", cfg.drift.n_steps}};
  j["resonance"] = {{"lower", cfg.scan.domain.lower},
                    {"upper", cfg.scan.domain.upper},
                    {"taus", cfg.scan.taus},
                    {"M_box", cfg.scan.M_box},
                    {"samples", cfg.scan.samples},
                    {"seed", cfg.scan.seed}};
  j["outputs"] = {{"directory", cfg.outputs.directory},
                  {"emit_trajectories", cfg.outputs.emit_trajectories},
                  {"trajectory_times", cfg.outputs.trajectory_times},
                  {"reference_dt", cfg.outputs.reference_dt}};
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", std::string("experiment"));
    cfg.mode = parse_mode(j.value("mode", std::string("solve")));
    if (j.contains("system")) {
      const auto& s = j.at("system");
      cfg.system.n = s.at("n").get<std::size_t>();
      cfg.system.omega0 = s.at("omega0").get<std::vector<double>>();
      cfg.solver.amplitude = s.value("amplitude", std::exp(-1.0));
    } else if (cfg.mode == ExperimentMode::kSolve) {
      throw ConfigError("config key 'system': required");
    }
    if (j.contains("perturbation")) {
      const auto& p = j.at("perturbation");
      cfg.system.epsilon = p.value("epsilon", 0.0);
      for (const auto& t : p.value("monomials", nlohmann::json::array())) {
        Monomial m;
        m.coeff = t.at("coeff").get<double>();
        m.alpha = MultiIndex(t.at("alpha").get<std::vector<int>>());
        m.beta = MultiIndex(t.at("beta").get<std::vector<int>>());
        cfg.system.terms.push_back(std::move(m));
      }
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      cfg.solver.M = s.value("M", 2);
      cfg.solver.N0 = s.value("N0", 1);
      cfg.solver.max_iter = s.value("max_iter", 8);
      cfg.solver.tol_residual = s.value("tol_residual", 1e-12);
      cfg.solver.use_B = s.value("use_B", true);
      cfg.solver.b_scale = parse_b_scale(s.value("b_scale_mode", std::string("chain_rule")));
      cfg.solver.N_cap = s.value("N_cap", 64);
      cfg.solver.rcond_floor = s.value("rcond_floor", 1e-14);
      cfg.solver.mode_budget = s.value("mode_budget", kDefaultModeBudget);
      cfg.solver.dense_rows_cap = s.value("dense_rows_cap", std::size_t(6000));
      cfg.solver.seed = s.value("seed", std::uint64_t(0));
    }
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      cfg.solver.gevrey_s = d.value("s", 0.5);
      cfg.solver.tau = d.value("tau", 2.0);
      cfg.solver.diophantine_box = d.value("M_box", 10);
      cfg.solver.strict_conditions = d.value("strict", false);
      cfg.solver.localization_dim_cap =
          d.value("localization_dim_cap", std::size_t(2500));
    }
    if (j.contains("drift")) {
      const auto& d = j.at("drift");
      cfg.drift.h_values = d.value("h_values", cfg.drift.h_values);
      cfg.drift.n_steps = d.value("n_steps", cfg.drift.n_steps);
    }
    if (j.contains("resonance")) {
      const auto& r = j.at("resonance");
      cfg.scan.domain.lower = r.value("lower", std::vector<double>{});
      cfg.scan.domain.upper = r.value("upper", std::vector<double>{});
      cfg.scan.taus = r.value("taus", cfg.scan.taus);
      cfg.scan.M_box = r.value("M_box", 10);
      cfg.scan.samples = r.value("samples", std::size_t(20000));
      cfg.scan.seed = r.value("seed", std::uint64_t(7));
    }
    if (j.contains("outputs")) {
      const auto& o = j.at("outputs");
      cfg.outputs.directory = o.value("directory", std::string());
      cfg.outputs.emit_trajectories = o.value("emit_trajectories", false);
      cfg.outputs.trajectory_times =
          o.value("trajectory_times", std::vector<double>{});
      cfg.outputs.reference_dt = o.value("reference_dt", 1e-3);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config json: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace qtorus
