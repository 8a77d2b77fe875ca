#include <cmath>
#include <cstdio>
#include <sstream>

#include "sag_cli.hpp"

namespace sag::cli {

namespace {

void dump(const Json& v, std::ostringstream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        os << (first ? "" : ",\n") << pad << Json(key).dump() << ": ";
        dump(item, os, indent + 2);
        first = false;
      }
      os << '\n' << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i == 0 ? "" : ",\n") << pad;
        dump(v[i], os, indent + 2);
      }
      os << '\n' << close << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      if (std::isfinite(x)) {
        os << format_number(x);
      } else {
        os << Json(x > 0 ? "infinite" : (x < 0 ? "-infinite" : "nan")).dump();
      }
      return;
    }
    default:
      os << v.dump();
  }
}

Json cell_to_json(const Cell& c) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          return std::isinf(x) ? Json("infinite") : Json(x);
        } else {
          return Json(x);
        }
      },
      c);
}

std::string cell_to_csv(const Cell& c) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(x);
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          if (x.find_first_of(",\"\n") == std::string::npos) {
            return x;
          }
          std::string quoted = "\"";
          for (char ch : x) {
            quoted += ch;
            if (ch == '"') quoted += '"';
          }
          return quoted + '"';
        }
      },
      c);
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render_json(const RunReport& report) {
  Json doc = Json::object();
  doc["command"] = report.command;
  doc["params"] = report.params;
  Json results = report.results;
  if (!report.table.columns.empty()) {
    Json rows = Json::array();
    for (const auto& row : report.table.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < report.table.columns.size(); ++i) {
        obj[report.table.columns[i]] = cell_to_json(row[i]);
      }
      rows.push_back(std::move(obj));
    }
    results["rows"] = std::move(rows);
  }
  doc["results"] = std::move(results);
  doc["warnings"] = report.warnings;

  std::ostringstream os;
  dump(doc, os, 0);
  os << '\n';
  return os.str();
}

std::string render_csv(const RunReport& report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.table.columns.size(); ++i) {
    os << (i ? "," : "") << report.table.columns[i];
  }
  os << '\n';
  for (const auto& row : report.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << cell_to_csv(row[i]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace sag::cli
