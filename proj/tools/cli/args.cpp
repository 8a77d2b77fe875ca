#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "sag_cli.hpp"

namespace sag::cli {

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
};

// Flag name <-> parameter-document key.
constexpr FlagSpec kFlags[] = {
    {"--lambda", "lambda"},     {"--r", "r"},           {"--T", "T"},
    {"--beta", "beta"},         {"--A", "A"},           {"--mu", "mu"},
    {"--P", "P"},               {"--w", "w"},           {"--C", "C"},
    {"--metric", "metric"},     {"--rho", "rho"},       {"--rho-min", "rho_min"},
    {"--rho-max", "rho_max"},   {"--steps", "steps"},   {"--p0", "p0"},
    {"--horizon", "horizon"},   {"--step", "step"},     {"--p", "p"},
    {"--n", "n"},               {"--seed", "seed"},     {"--max-slots", "max_slots"},
    {"--window", "window"},     {"--quantity", "quantity"},
};

void add_flags(CLI::App& app, Options& o, std::string& params_file) {
  app.add_option("--lambda", o.lambda, "node intensity");
  app.add_option("--r", o.r, "link distance");
  app.add_option("--T", o.T, "SINR threshold");
  app.add_option("--beta", o.beta, "path-loss exponent (> 2)");
  app.add_option("--A", o.A, "attenuation scale");
  app.add_option("--mu", o.mu, "fading rate");
  app.add_option("--P", o.P, "transmit power");
  app.add_option("--w", o.w, "noise power");
  app.add_option("--C", o.C, "contention constant, replaces the geometry");
  app.add_option("--metric", o.metric, "goodput or delay")
      ->check(CLI::IsMember({"goodput", "delay"}));
  app.add_option("--rho", o.rho, "price factor");
  app.add_option("--rho-min", o.rho_min, "sweep start");
  app.add_option("--rho-max", o.rho_max, "sweep end");
  app.add_option("--steps", o.steps, "number of sweep points");
  app.add_option("--p0", o.p0, "initial MAP");
  app.add_option("--horizon", o.horizon, "integration horizon");
  app.add_option("--step", o.step, "RK4 step");
  app.add_option("--p", o.p, "medium access probability");
  app.add_option("--n", o.n, "Monte Carlo replications");
  app.add_option("--seed", o.seed, "RNG seed (default: $SAG_SEED, else 0)");
  app.add_option("--max-slots", o.max_slots, "local-delay censoring point");
  app.add_option("--window", o.window, "auto or a radius");
  app.add_option("--quantity", o.quantity, "coverage or local-delay")
      ->check(CLI::IsMember({"coverage", "local-delay"}));
  app.add_option("--threads", o.threads, "worker threads (0: all cores)");
  app.add_option("--output", o.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", o.out, "output file (default: stdout)");
  app.add_option("--params", params_file, "reload a parameter block echoed by an earlier run");
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open parameter file '" + path + "'");
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("parameter file '" + path + "': " + e.what());
  }
}

double number_of(const Json& v, const std::string& key) {
  if (!v.is_number()) {
    throw UsageError("parameter '" + key + "' must be a number");
  }
  return v.get<double>();
}

long long integer_of(const Json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw UsageError("parameter '" + key + "' must be an integer");
  }
  return v.get<long long>();
}

std::string string_of(const Json& v, const std::string& key) {
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_number()) {
    return format_number(v.get<double>());
  }
  throw UsageError("parameter '" + key + "' must be a string");
}

}  // namespace

void apply_params_document(const Json& doc, Options& o,
                           const std::vector<std::string>& explicit_keys) {
  const Json& flat = doc.contains("params") ? doc.at("params") : doc;
  if (!flat.is_object()) {
    throw UsageError("parameter document must be a JSON object");
  }
  const auto skip = [&](const std::string& key) {
    return !flat.contains(key) ||
           std::find(explicit_keys.begin(), explicit_keys.end(), key) != explicit_keys.end();
  };

  const std::map<std::string, std::optional<double>*> reals = {
      {"lambda", &o.lambda}, {"r", &o.r},       {"T", &o.T},
      {"beta", &o.beta},     {"A", &o.A},       {"mu", &o.mu},
      {"P", &o.P},           {"w", &o.w},       {"rho", &o.rho},
      {"rho_min", &o.rho_min}, {"rho_max", &o.rho_max}, {"p0", &o.p0},
      {"p", &o.p},
  };
  for (const auto& [key, target] : reals) {
    if (!skip(key)) {
      *target = number_of(flat.at(key), key);
    }
  }
  // C is an input only when it overrides the geometry; otherwise it is derived.
  if (!skip("C") && flat.value("C_source", std::string("override")) == "override") {
    o.C = number_of(flat.at("C"), "C");
  }
  if (!skip("metric")) o.metric = string_of(flat.at("metric"), "metric");
  if (!skip("steps")) o.steps = integer_of(flat.at("steps"), "steps");
  if (!skip("horizon")) o.horizon = number_of(flat.at("horizon"), "horizon");
  if (!skip("step")) o.step = number_of(flat.at("step"), "step");
  if (!skip("n")) o.n = integer_of(flat.at("n"), "n");
  if (!skip("seed")) {
    const long long s = integer_of(flat.at("seed"), "seed");
    if (s < 0) {
      throw UsageError("parameter 'seed' must be non-negative");
    }
    o.seed = static_cast<unsigned long long>(s);
  }
  if (!skip("max_slots")) o.max_slots = integer_of(flat.at("max_slots"), "max_slots");
  if (!skip("window")) o.window = string_of(flat.at("window"), "window");
  if (!skip("quantity")) o.quantity = string_of(flat.at("quantity"), "quantity");
}

Options parse_args(const std::vector<std::string>& argv) {
  Options o;
  std::string params_file;

  CLI::App app{"Selfish medium access in Poisson bipolar networks"};
  app.require_subcommand(1, 1);
  const std::pair<const char*, const char*> commands[] = {
      {"sne", "symmetric Nash equilibria at a price"},
      {"price-opt", "price that makes the equilibrium team-optimal"},
      {"poa-sweep", "price of anarchy over a price range"},
      {"replicator", "replicator dynamics of the goodput game"},
      {"simulate", "Monte Carlo check of the closed forms"},
  };
  for (const auto& [name, help] : commands) {
    add_flags(*app.add_subcommand(name, help), o, params_file);
  }

  std::vector<std::string> rest(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(rest.begin(), rest.end());  // CLI11 consumes from the back
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  o.command = sub->get_name();

  if (!params_file.empty()) {
    std::vector<std::string> explicit_keys;
    for (const auto& f : kFlags) {
      if (sub->count(f.flag) > 0) {
        explicit_keys.emplace_back(f.key);
      }
    }
    apply_params_document(load_json_file(params_file), o, explicit_keys);
  }

  if (!o.seed) {
    if (const char* env = std::getenv("SAG_SEED"); env != nullptr && *env != '\0') {
      std::istringstream in(env);
      unsigned long long s = 0;
      if (!(in >> s) || !in.eof()) {
        throw UsageError(std::string("SAG_SEED is not a non-negative integer: ") + env);
      }
      o.seed = s;
    }
  }
  return o;
}

}  // namespace sag::cli
