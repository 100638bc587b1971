#include "morphgrad/cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "morphgrad/envs/benchmark.hpp"
#include "morphgrad/errors.hpp"

namespace morphgrad {

ConfigError::ConfigError(const std::string& field, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + " (" + field +
                                        "): " + message
                                  : "config field " + field + ": " + message),
      field_(field),
      line_(line) {}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("not a non-negative integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + text + "'");
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

std::vector<std::size_t> parse_hidden(const std::string& text) {
  std::vector<std::size_t> dims;
  if (text.empty()) return dims;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) dims.push_back(static_cast<std::size_t>(parse_u64(trim(tok))));
  return dims;
}

std::string format_hidden(const std::vector<std::size_t>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) out += (i ? "," : "") + std::to_string(dims[i]);
  return out;
}

// One scalar key of the file format.
struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
  // Whether this key belongs in the canonical form of `cfg`.
  std::function<bool(const RunConfig&)> applies;
};

template <typename T>
Field number(std::string section, std::string key, T RunConfig::*group, double T::*member,
             std::function<bool(const RunConfig&)> applies) {
  return {std::move(section), std::move(key),
          [=](const RunConfig& c) { return format_double(c.*group.*member); },
          [=](RunConfig& c, const std::string& v) { c.*group.*member = parse_double(v); },
          std::move(applies)};
}

template <typename T>
Field count(std::string section, std::string key, T RunConfig::*group, std::size_t T::*member,
            std::function<bool(const RunConfig&)> applies) {
  return {std::move(section), std::move(key),
          [=](const RunConfig& c) { return std::to_string(c.*group.*member); },
          [=](RunConfig& c, const std::string& v) {
            c.*group.*member = static_cast<std::size_t>(parse_u64(v));
          },
          std::move(applies)};
}

template <typename T>
Field flag(std::string section, std::string key, T RunConfig::*group, bool T::*member,
           std::function<bool(const RunConfig&)> applies) {
  return {std::move(section), std::move(key),
          [=](const RunConfig& c) { return format_bool(c.*group.*member); },
          [=](RunConfig& c, const std::string& v) { c.*group.*member = parse_bool(v); },
          std::move(applies)};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    auto always = [](const RunConfig&) { return true; };
    auto bench = [](const RunConfig& c) { return c.is_benchmark(); };
    auto embodied = [](const RunConfig& c) { return !c.is_benchmark(); };
    auto hopper = [](const RunConfig& c) { return c.env_id == "hopper"; };
    auto spring = [](const RunConfig& c) { return c.env_id == "springmass"; };

    std::vector<Field> f;
    f.push_back({"run", "env", [](const RunConfig& c) { return c.env_id; },
                 [](RunConfig& c, const std::string& v) { c.env_id = v; }, always});
    f.push_back({"run", "output_dir", [](const RunConfig& c) { return c.output_dir; },
                 [](RunConfig& c, const std::string& v) { c.output_dir = v; }, always});
    f.push_back({"env", "dim", [](const RunConfig& c) { return std::to_string(c.env_dim); },
                 [](RunConfig& c, const std::string& v) {
                   c.env_dim = static_cast<std::size_t>(parse_u64(v));
                 },
                 bench});
    f.push_back({"policy", "kind",
                 [](const RunConfig& c) {
                   return std::string(c.policy == PolicyKind::kNetwork ? "network" : "reference");
                 },
                 [](RunConfig& c, const std::string& v) {
                   if (v == "network") c.policy = PolicyKind::kNetwork;
                   else if (v == "reference") c.policy = PolicyKind::kReference;
                   else throw std::invalid_argument("expected network or reference");
                 },
                 embodied});
    f.push_back({"policy", "hidden", [](const RunConfig& c) { return format_hidden(c.hidden); },
                 [](RunConfig& c, const std::string& v) { c.hidden = parse_hidden(v); },
                 embodied});

    using TC = TrainConfig;
    f.push_back(count("train", "generations", &RunConfig::train, &TC::generations, always));
    f.push_back(count("train", "population_size", &RunConfig::train, &TC::population_size, always));
    f.push_back(count("train", "rollouts_per_candidate", &RunConfig::train,
                      &TC::rollouts_per_candidate, always));
    f.push_back({"train", "master_seed",
                 [](const RunConfig& c) { return std::to_string(c.train.master_seed); },
                 [](RunConfig& c, const std::string& v) { c.train.master_seed = parse_u64(v); },
                 always});
    f.push_back(count("train", "eval_every", &RunConfig::train, &TC::eval_every, always));
    f.push_back(count("train", "eval_rollouts", &RunConfig::train, &TC::eval_rollouts, always));
    f.push_back(count("train", "checkpoint_every", &RunConfig::train, &TC::checkpoint_every, always));
    f.push_back(number("train", "mu_init_range", &RunConfig::train, &TC::mu_init_range, always));

    using OC = OptimizerConfig;
    f.push_back(number("optimizer", "lr_mu", &RunConfig::optimizer, &OC::lr_mu, always));
    f.push_back(number("optimizer", "lr_sigma", &RunConfig::optimizer, &OC::lr_sigma, always));
    f.push_back(number("optimizer", "sigma_init", &RunConfig::optimizer, &OC::sigma_init, always));
    f.push_back(number("optimizer", "sigma_floor", &RunConfig::optimizer, &OC::sigma_floor, always));
    f.push_back(flag("optimizer", "use_baseline", &RunConfig::optimizer, &OC::use_baseline, always));
    f.push_back(flag("optimizer", "rank_shaping", &RunConfig::optimizer, &OC::rank_shaping, always));
    f.push_back(flag("optimizer", "antithetic", &RunConfig::optimizer, &OC::antithetic, always));

    f.push_back({"augmentation", "enabled", [](const RunConfig& c) { return format_bool(c.augment); },
                 [](RunConfig& c, const std::string& v) { c.augment = parse_bool(v); }, embodied});

    using HP = HopperParams;
    f.push_back(number("hopper", "dt", &RunConfig::hopper, &HP::dt, hopper));
    f.push_back(count("hopper", "substeps", &RunConfig::hopper, &HP::substeps, hopper));
    f.push_back(count("hopper", "max_steps", &RunConfig::hopper, &HP::max_steps, hopper));
    f.push_back(number("hopper", "gravity", &RunConfig::hopper, &HP::gravity, hopper));
    f.push_back(number("hopper", "torso_mass", &RunConfig::hopper, &HP::torso_mass, hopper));
    f.push_back(number("hopper", "density", &RunConfig::hopper, &HP::density, hopper));
    f.push_back(number("hopper", "torque_limit", &RunConfig::hopper, &HP::torque_limit, hopper));
    f.push_back(number("hopper", "torque_cost", &RunConfig::hopper, &HP::torque_cost, hopper));
    f.push_back(number("hopper", "fall_height", &RunConfig::hopper, &HP::fall_height, hopper));
    f.push_back(number("hopper", "fall_penalty", &RunConfig::hopper, &HP::fall_penalty, hopper));
    f.push_back(number("hopper", "joint_damping", &RunConfig::hopper, &HP::joint_damping, hopper));
    f.push_back(number("hopper", "knee_min", &RunConfig::hopper, &HP::knee_min, hopper));
    f.push_back(number("hopper", "knee_max", &RunConfig::hopper, &HP::knee_max, hopper));
    f.push_back(number("hopper", "hip_limit", &RunConfig::hopper, &HP::hip_limit, hopper));
    f.push_back(number("hopper", "limit_stiffness", &RunConfig::hopper, &HP::limit_stiffness, hopper));
    f.push_back(number("hopper", "limit_damping", &RunConfig::hopper, &HP::limit_damping, hopper));
    f.push_back(number("hopper", "contact_stiffness", &RunConfig::hopper, &HP::contact_stiffness, hopper));
    f.push_back(number("hopper", "contact_damping", &RunConfig::hopper, &HP::contact_damping, hopper));
    f.push_back(number("hopper", "friction_coefficient", &RunConfig::hopper,
                       &HP::friction_coefficient, hopper));
    f.push_back(number("hopper", "friction_damping", &RunConfig::hopper, &HP::friction_damping, hopper));
    f.push_back(number("hopper", "init_velocity_noise", &RunConfig::hopper, &HP::init_velocity_noise,
                       hopper));
    f.push_back(number("hopper", "terrain_bump_height", &RunConfig::hopper, &HP::terrain_bump_height,
                       hopper));
    const char* design_keys[] = {"thigh_length", "shin_length", "thigh_width", "shin_width"};
    for (std::size_t i = 0; i < 4; ++i) {
      f.push_back({"hopper", design_keys[i],
                   [i](const RunConfig& c) { return format_double(c.hopper.design[i]); },
                   [i](RunConfig& c, const std::string& v) { c.hopper.design[i] = parse_double(v); },
                   hopper});
    }

    using SP = SpringMassParams;
    f.push_back(number("springmass", "body_mass", &RunConfig::springmass, &SP::body_mass, spring));
    f.push_back(number("springmass", "density", &RunConfig::springmass, &SP::density, spring));
    f.push_back(number("springmass", "stiffness_constant", &RunConfig::springmass,
                       &SP::stiffness_constant, spring));
    f.push_back(number("springmass", "damping", &RunConfig::springmass, &SP::damping, spring));
    f.push_back(number("springmass", "actuator_force", &RunConfig::springmass, &SP::actuator_force,
                       spring));
    f.push_back(number("springmass", "drive_frequency", &RunConfig::springmass, &SP::drive_frequency,
                       spring));
    f.push_back(number("springmass", "ratchet", &RunConfig::springmass, &SP::ratchet, spring));
    f.push_back(number("springmass", "gravity", &RunConfig::springmass, &SP::gravity, spring));
    f.push_back(number("springmass", "dt", &RunConfig::springmass, &SP::dt, spring));
    f.push_back(count("springmass", "steps", &RunConfig::springmass, &SP::steps, spring));
    f.push_back(number("springmass", "leg_length", &RunConfig::springmass, &SP::leg_length, spring));
    f.push_back(number("springmass", "leg_thickness", &RunConfig::springmass, &SP::leg_thickness,
                       spring));
    return f;
  }();
  return table;
}

const char* kSectionOrder[] = {"run",       "env",        "policy",       "train",
                               "optimizer", "morphology", "augmentation", "hopper",
                               "springmass"};

bool known_section(const std::string& s) {
  for (const char* name : kSectionOrder)
    if (s == name) return true;
  return false;
}

}  // namespace

void RunConfig::validate() const {
  if (env_id.empty()) throw ConfigError("run.env", 0, "missing required key");
  if (env_id != "sphere" && env_id != "rastrigin" && env_id != "springmass" && env_id != "hopper")
    throw ConfigError("run.env", 0, "unknown environment '" + env_id + "'");
  if (is_benchmark()) {
    if (env_dim < 1) throw ConfigError("env.dim", 0, "benchmark dimension must be >= 1");
    if (!morphology.params.empty())
      throw ConfigError("morphology", 0, "benchmarks have no morphology");
  }
  if (policy == PolicyKind::kReference && env_id != "springmass")
    throw ConfigError("policy.kind", 0, "a reference policy exists only for springmass");
  try {
    train.validate();
  } catch (const ContractError& e) {
    throw ConfigError("train", 0, e.what());
  }
  try {
    OptimizerConfig opt = optimizer;
    opt.population_size = train.population_size;
    opt.validate();
  } catch (const ContractError& e) {
    throw ConfigError("optimizer", 0, e.what());
  }
  try {
    morphology.validate();
    if (!is_benchmark()) {
      make_task(*this);
    }
  } catch (const ContractError& e) {
    throw ConfigError("morphology", 0, e.what());
  }
}

RunConfig parse_run_config(const std::string& text) {
  std::map<std::string, const Field*> index;
  for (const Field& f : fields()) index[f.section + "." + f.key] = &f;

  RunConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line, line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) throw ConfigError(section, line_no, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(section, line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(key, line_no, "key outside of any section");
    const std::string name = section + "." + key;

    if (section == "morphology") {
      std::istringstream vs(value);
      std::string original, limit, extra;
      vs >> original >> limit;
      if (original.empty() || limit.empty() || (vs >> extra))
        throw ConfigError(name, line_no, "expected '<original> <scale_limit>'");
      MorphParam p;
      p.name = key;
      try {
        p.original = parse_double(original);
        p.scale_limit = parse_double(limit);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(name, line_no, e.what());
      }
      cfg.morphology.params.push_back(p);
      continue;
    }
    auto it = index.find(name);
    if (it == index.end()) throw ConfigError(name, line_no, "unknown key");
    try {
      it->second->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name, line_no, e.what());
    } catch (const std::out_of_range& e) {
      throw ConfigError(name, line_no, "value out of range");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", 0, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize(const RunConfig& cfg) {
  std::ostringstream out;
  for (const char* section : kSectionOrder) {
    std::ostringstream body;
    bool any = false;
    if (std::string(section) == "morphology") {
      if (cfg.is_benchmark()) continue;
      for (const MorphParam& p : cfg.morphology.params)
        body << p.name << " = " << format_double(p.original) << ' '
             << format_double(p.scale_limit) << '\n';
      any = true;  // an empty [morphology] marks the fixed-morphology baseline
    }
    for (const Field& f : fields()) {
      if (f.section != section || !f.applies(cfg)) continue;
      body << f.key << " = " << f.get(cfg) << '\n';
      any = true;
    }
    if (any) out << '[' << section << "]\n" << body.str() << '\n';
  }
  return out.str();
}

std::string config_digest(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.output_dir.clear();
  const std::string text = serialize(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::shared_ptr<const Environment> make_environment(const RunConfig& cfg) {
  if (cfg.env_id == "hopper") return std::make_shared<PlanarHopper>(cfg.hopper);
  if (cfg.env_id == "springmass") return std::make_shared<SpringMass1D>(cfg.springmass);
  throw ConfigError("run.env", 0, "'" + cfg.env_id + "' is not a physical environment");
}

std::unique_ptr<Task> make_task(const RunConfig& cfg) {
  if (cfg.is_benchmark())
    return std::make_unique<BenchmarkTask>(
        BenchmarkEnv{parse_benchmark_kind(cfg.env_id), cfg.env_dim});
  auto env = make_environment(cfg);
  if (cfg.policy == PolicyKind::kReference)
    return std::make_unique<EmbodiedTask>(env, PolicyFn(SpringMass1D::reference_policy),
                                          cfg.morphology, cfg.augment);
  NetworkShape shape{env->obs_dim(), cfg.hidden, env->act_dim()};
  return std::make_unique<EmbodiedTask>(env, shape, cfg.morphology, cfg.augment);
}

}  // namespace morphgrad
