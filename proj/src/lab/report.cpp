#include <cmath>
#include <cstdio>
#include <fstream>

#include "wmap/lab.hpp"

namespace wmap::lab {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string formatReal(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string formatCell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return formatReal(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return quote(v);
        }
      },
      cell);
}

Json cellJson(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          return std::isfinite(v) ? Json(v) : Json(nullptr);
        } else {
          return v;
        }
      },
      cell);
}

void writeFile(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << body;
  if (!out) fail(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

}  // namespace

std::string toCsv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += quote(table.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += formatCell(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

Json toJson(const Report& report) {
  Json doc = Json::object();
  doc["config"] = report.config;
  Json tables = Json::object();
  for (const auto& t : report.tables) {
    Json rows = Json::array();
    for (const auto& row : t.rows) {
      Json r = Json::array();
      for (const auto& c : row) r.push_back(cellJson(c));
      rows.push_back(std::move(r));
    }
    tables[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
  }
  doc["tables"] = std::move(tables);
  doc["provenance"] = report.provenance;
  doc["warnings"] = report.warnings;
  doc["failure"] = report.failure ? Json(*report.failure) : Json(nullptr);
  return doc;
}

void emitReport(const Report& report, const std::filesystem::path& outDir, const ReportFormats& formats) {
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory '" + outDir.string() + "': " + ec.message());
  if (formats.csv) {
    for (const auto& t : report.tables) writeFile(outDir / (t.name + ".csv"), toCsv(t));
  }
  if (formats.json) writeFile(outDir / "report.json", toJson(report).dump(2) + "\n");
}

}  // namespace wmap::lab
