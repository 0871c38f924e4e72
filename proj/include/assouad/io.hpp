#pragma once

// File formats: spectrum JSON, validation report JSON, growth-function piece
// lists, CSV tables and run manifests. All writes go through a temporary file
// and a rename.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assouad/errors.hpp"
#include "assouad/growth.hpp"
#include "assouad/moran.hpp"
#include "assouad/spectrum.hpp"
#include "assouad/validation.hpp"

namespace assouad {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

/// %.17g; non-finite values are written as nan / inf / -inf.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------
// Files

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_atomic(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::filesystem::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

inline void write_json_atomic(const std::filesystem::path& p, const json& j) { write_text_atomic(p, j.dump(2) + "\n"); }

inline json parse_json(const std::string& text, const std::string& origin = "input") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Spectrum

inline json spectrum_to_json(const SpectrumFn& f) {
  json j;
  j["d"] = f.dim().value();
  if (const BetaFn* b = f.exact()) {
    j["form"] = "beta";
    j["breakpoints"] = b->breakpoints();
    j["values"] = b->values();
  } else {
    j["form"] = "table";
    j["breakpoints"] = f.table()->grid;
    j["values"] = f.table()->values;
  }
  return j;
}

namespace detail {

inline std::vector<double> number_array(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw ParseError(std::string("spectrum: missing array \"") + key + "\"");
  std::vector<double> v;
  v.reserve(j[key].size());
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw ParseError(std::string("spectrum: non-numeric entry in \"") + key + "\"");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace detail

/// Extra fields are ignored. Structural problems raise ParseError; values that
/// violate the function invariants (order, range) raise invalid_argument.
inline SpectrumFn spectrum_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("spectrum: expected a JSON object");
  if (!j.contains("d") || !j["d"].is_number_integer()) throw ParseError("spectrum: missing integer \"d\"");
  if (!j.contains("form") || !j["form"].is_string()) throw ParseError("spectrum: missing string \"form\"");
  const AmbientDim d(j["d"].get<int>());
  auto xs = detail::number_array(j, "breakpoints");
  auto ys = detail::number_array(j, "values");
  const std::string form = j["form"].get<std::string>();
  if (form == "beta") return SpectrumFn(BetaFn(std::move(xs), std::move(ys), d));
  if (form == "table") return SpectrumFn::tabulated(std::move(xs), std::move(ys), d);
  throw ParseError("spectrum: unknown form \"" + form + "\"");
}

inline SpectrumFn read_spectrum(const std::filesystem::path& p) {
  return spectrum_from_json(parse_json(read_text(p), p.string()));
}

// ---------------------------------------------------------------------------
// Reports

inline json check_to_json(const CheckResult& c) {
  json j{{"name", c.name},
         {"passed", c.passed()},
         {"worst_violation", finite_or_null(c.worst_violation)},
         {"tolerance", c.tolerance}};
  json w = json::array();
  for (double x : c.witness) w.push_back(finite_or_null(x));
  j["witness"] = w;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline json report_to_json(const ValidationReport& r) {
  json j{{"passed", r.passed}, {"abstained", r.abstained}};
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_to_json(c));
  j["checks"] = checks;
  if (r.grid) {
    j["grid"] = {{"n_theta", r.grid->n_theta},
                 {"spacing", r.grid->spacing == Spacing::uniform ? "uniform" : "geometric_near_endpoints"},
                 {"tolerance", r.grid->tolerance}};
  }
  if (!r.ladder.empty()) j["ladder"] = r.ladder;
  return j;
}

// ---------------------------------------------------------------------------
// Growth functions

inline json growth_to_json(const GrowthFn& g) {
  json pieces = json::array();
  for (std::size_t i = 0; i < g.pieces().size(); ++i) {
    const Piece& p = g.pieces()[i];
    json q{{"kind", to_string(p.kind)}, {"start", g.piece_start(i)}, {"length", p.length}};
    switch (p.kind) {
      case PieceKind::xi:
        q["z"] = p.a;
        break;
      case PieceKind::decay:
        q["w"] = p.a;
        break;
      case PieceKind::relax:
        q["alpha"] = p.a;
        q["q"] = p.b;
        break;
      case PieceKind::table:
        q["xs"] = p.xs;
        q["ys"] = p.ys;
        break;
    }
    pieces.push_back(q);
  }
  json j{{"d", g.dim().value()}, {"length", g.length()}, {"pieces", pieces}};
  if (g.xi()) j["target"] = spectrum_to_json(g.xi()->spectrum());
  return j;
}

inline GrowthFn growth_from_json(const json& j) {
  if (!j.is_object() || !j.contains("pieces") || !j["pieces"].is_array() || !j.contains("d"))
    throw ParseError("growth: expected {\"d\", \"pieces\"}");
  const AmbientDim d(j["d"].get<int>());
  std::optional<XiFn> xi;
  if (j.contains("target")) xi = XiFn(spectrum_from_json(j["target"]));
  std::vector<Piece> pieces;
  try {
    for (const auto& q : j["pieces"]) {
      const std::string kind = q.at("kind").get<std::string>();
      const double len = q.contains("length") ? q["length"].get<double>() : 0.0;
      if (kind == "xi") {
        pieces.push_back(Piece::xi(len, q.at("z").get<double>()));
      } else if (kind == "decay") {
        pieces.push_back(Piece::decay(len, q.at("w").get<double>()));
      } else if (kind == "relax") {
        pieces.push_back(Piece::relax(len, q.at("alpha").get<double>(), q.at("q").get<double>()));
      } else if (kind == "table") {
        pieces.push_back(Piece::table(q.at("xs").get<std::vector<double>>(), q.at("ys").get<std::vector<double>>()));
      } else {
        throw ParseError("growth: unknown piece kind \"" + kind + "\"");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("growth: ") + e.what());
  }
  return GrowthFn(std::move(pieces), std::move(xi), d);
}

// ---------------------------------------------------------------------------
// CSV

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : cols_(header.size()) { line(header); }

  void row(const std::vector<double>& values) {
    if (values.size() != cols_) throw std::invalid_argument("csv: row width mismatch");
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt17(v));
    line(cells);
  }

  const std::string& str() const { return out_; }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ += (i ? "," : "") + cells[i];
    out_ += "\n";
  }
  std::size_t cols_;
  std::string out_;
};

inline std::string schedule_csv(const RatioSchedule& s) {
  CsvTable t({"k", "t_k", "r_k"});
  for (int k = 0; k <= s.levels(); ++k) t.row({static_cast<double>(k), s.t(k), k == 0 ? 1.0 : s.r(k)});
  return t.str();
}

inline std::string points_csv(const std::vector<std::vector<double>>& pts, int d) {
  std::vector<std::string> header;
  for (int j = 0; j < d; ++j) header.push_back("x" + std::to_string(j + 1));
  CsvTable t(header);
  for (const auto& p : pts) t.row(p);
  return t.str();
}

/// Rows of a numeric CSV with a header line.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvData parse_csv(const std::string& text, const std::string& origin = "csv") {
  CsvData out;
  std::istringstream in(text);
  std::string line;
  const auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
  out.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& c : split(line)) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw ParseError(origin + ": non-numeric cell \"" + c + "\"");
      }
    }
    if (row.size() != out.header.size()) throw ParseError(origin + ": row width mismatch");
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifests

struct RunManifest {
  std::string command;
  json parameters = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  json grid = nullptr;
  std::string version = kToolVersion;
  double wall_seconds = 0.0;

  json to_json() const {
    return {{"command", command}, {"parameters", parameters}, {"inputs", inputs}, {"outputs", outputs},
            {"grid", grid},       {"version", version},       {"wall_seconds", wall_seconds}};
  }

  static RunManifest from_json(const json& j) {
    RunManifest m;
    try {
      m.command = j.at("command").get<std::string>();
      m.parameters = j.at("parameters");
      m.inputs = j.value("inputs", std::vector<std::string>{});
      m.outputs = j.value("outputs", std::vector<std::string>{});
      m.grid = j.value("grid", json(nullptr));
      m.version = j.value("version", std::string(kToolVersion));
      m.wall_seconds = j.value("wall_seconds", 0.0);
    } catch (const json::exception& e) {
      throw ParseError(std::string("manifest: ") + e.what());
    }
    return m;
  }
};

}  // namespace assouad
