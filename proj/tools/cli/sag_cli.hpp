#pragma once

/**
 * \file sag_cli.hpp
 * \brief Library behind the `sag` executable, exposed so tests can drive the
 * commands in-process.
 */

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace sag::cli {

using Json = nlohmann::ordered_json;

/// Usage or validation problem; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Everything a command may read. Unset optionals fall back to defaults or
/// to a UsageError when the command needs them.
struct Options {
  std::string command;

  std::optional<double> lambda, r, T, beta, A, mu, P, w, C;
  std::string metric = "goodput";

  std::optional<double> rho, rho_min, rho_max;
  long long steps = 100;

  std::optional<double> p0;
  double horizon = 1000.0;
  double step = 0.01;

  std::optional<double> p;
  std::optional<long long> n;  ///< default 1e5 (coverage) or 1e4 (local-delay)
  std::optional<unsigned long long> seed;
  long long max_slots = 1000;
  std::string window = "auto";
  std::string quantity = "coverage";
  unsigned threads = 0;

  std::string output = "json";
  std::string out;
};

/// A table cell. Infinity is written "inf" in CSV and "infinite" in JSON.
using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct RunReport {
  std::string command;
  Json params = Json::object();   ///< resolved parameters, reloadable with --params
  Json results = Json::object();  ///< command payload (table rows are added on rendering)
  Table table;
  std::vector<std::string> warnings;
  int exit_code = kExitOk;
};

/// Parses argv (argv[0] is the program name). Throws UsageError.
Options parse_args(const std::vector<std::string>& argv);

/// Overlays the keys of a parameter document on `base`. Accepts either a flat
/// object or a whole report, in which case its "params" member is used.
/// Explicit flags win: keys named in `explicit_keys` are left untouched.
void apply_params_document(const Json& doc, Options& base,
                           const std::vector<std::string>& explicit_keys = {});

RunReport cmd_sne(const Options& opts);
RunReport cmd_price_opt(const Options& opts);
RunReport cmd_poa_sweep(const Options& opts);
RunReport cmd_replicator(const Options& opts);
RunReport cmd_simulate(const Options& opts);

/// Dispatches on opts.command.
RunReport execute(const Options& opts);

/// JSON rendering; every floating-point value is printed with %.17g.
std::string render_json(const RunReport& report);
/// CSV rendering of report.table.
std::string render_csv(const RunReport& report);

/// Formats a double with 17 significant digits ("inf"/"-inf"/"nan" otherwise).
std::string format_number(double x);

/// Full program: parse, execute, render to `out` (or --out PATH); messages go to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace sag::cli
