#include "mqt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

#include "mqt/errors.hpp"

namespace mqt::io {

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of the key "field", or 0.
int line_of_key(const std::string& text, const std::string& field) {
  if (text.empty()) return 0;
  const auto pos = text.find('"' + field + '"');
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(field, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& field, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ParseError(field, "not a number: '" + s + "'", line);
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

json to_json(const AtomicMeasure& mu) {
  return {{"positions", std::vector<double>(mu.positions().begin(), mu.positions().end())},
          {"masses", std::vector<double>(mu.masses().begin(), mu.masses().end())}};
}

AtomicMeasure measure_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, "expected an object with positions and masses");
  if (!j.contains("positions")) throw ParseError(field + ".positions", "missing");
  if (!j.contains("masses")) throw ParseError(field + ".masses", "missing");
  try {
    return AtomicMeasure(number_array(j["positions"], field + ".positions"),
                         number_array(j["masses"], field + ".masses"));
  } catch (const PreconditionError& e) {
    throw ParseError(field, e.what());
  }
}

json to_json(const Coupling& p) {
  json rows = json::array();
  for (std::size_t i = 0; i < p.rows(); ++i) {
    std::vector<double> r(p.cols());
    for (std::size_t j = 0; j < p.cols(); ++j) r[j] = p(i, j);
    rows.push_back(r);
  }
  return {{"source", to_json(p.source())}, {"target", to_json(p.target())}, {"mass", rows}};
}

Coupling coupling_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, "expected an object");
  for (const char* k : {"source", "target", "mass"})
    if (!j.contains(k)) throw ParseError(field + "." + k, "missing");
  auto src = measure_from_json(j["source"], field + ".source");
  auto tgt = measure_from_json(j["target"], field + ".target");
  const auto& rows = j["mass"];
  if (!rows.is_array() || rows.size() != src.size())
    throw ParseError(field + ".mass", "expected one row per source atom");
  std::vector<double> m;
  for (const auto& r : rows) {
    auto v = number_array(r, field + ".mass");
    if (v.size() != tgt.size()) throw ParseError(field + ".mass", "expected one column per target atom");
    m.insert(m.end(), v.begin(), v.end());
  }
  try {
    return Coupling(std::move(src), std::move(tgt), std::move(m));
  } catch (const PreconditionError& e) {
    throw ParseError(field + ".mass", e.what());
  }
}

json to_json(const RefinementReport& r) {
  json trace = json::array();
  for (const auto& [d, v] : r.trace) trace.push_back({d, v});
  return {{"refined_value", r.value}, {"depth", r.depth}, {"converged", r.converged}, {"trace", trace}};
}

json to_json(const MQTrace& t) {
  json trace = json::array();
  for (const auto& [d, v] : t.steps) trace.push_back({d, v});
  return {{"coupling", to_json(t.coupling)}, {"converged", t.converged}, {"trace", trace}};
}

MarginalCurve parse_curve_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", e.what(), line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  auto fail = [&](const std::string& field, const std::string& what) -> ParseError {
    const auto root = field.substr(0, field.find('.'));
    return ParseError(field, what, line_of_key(text, root));
  };
  if (!j.is_object()) throw ParseError("", "curve spec must be a JSON object", 1);
  if (!j.contains("kind") || !j["kind"].is_string()) throw fail("kind", "missing or not a string");

  try {
    const auto kind = j["kind"].get<std::string>();
    // Presets carry K in "levels"; grid curves use "levels" for the alpha
    // breakpoints and "level_count" for K.
    int K = 64;
    const char* k_key = kind == "grid" ? "level_count" : (j.contains("levels") ? "levels" : "level_count");
    if (j.contains(k_key)) {
      if (!j[k_key].is_number_integer()) throw fail(k_key, "expected an integer level count");
      K = j[k_key].get<int>();
      if (K < 1) throw fail(k_key, "must be at least 1");
    }
    json params = json::object();
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw fail("params", "expected an object");
      params = j["params"];
    }
    auto opt = [&](const char* key, double dflt) {
      if (!params.contains(key)) return dflt;
      if (!params[key].is_number()) throw fail(std::string("params.") + key, "expected a number");
      return params[key].get<double>();
    };

    std::optional<MarginalCurve> c;
    try {
      if (kind == "translation") {
        c = MarginalCurve::translation(K, opt("velocity", 1.0));
      } else if (kind == "scaling") {
        c = MarginalCurve::scaling(K, opt("rate", 1.0));
      } else if (kind == "split_merge") {
        c = MarginalCurve::split_merge(K);
      } else if (kind == "moving_point") {
        c = MarginalCurve::moving_point(K);
      } else if (kind == "constant") {
        c = params.contains("measure") ? MarginalCurve::constant(K, measure_from_json(params["measure"], "params.measure"))
                                  : MarginalCurve::constant(K);
      } else if (kind == "grid") {
        for (const char* k : {"times", "levels", "values"})
          if (!j.contains(k)) throw fail(k, "missing for a grid curve");
        auto times = number_array(j["times"], "times");
        auto levels = number_array(j["levels"], "levels");
        if (!j["values"].is_array()) throw fail("values", "expected an array of rows");
        std::vector<std::vector<double>> values;
        for (const auto& row : j["values"]) values.push_back(number_array(row, "values"));
        c = MarginalCurve::grid(std::move(times), std::move(levels), std::move(values), K);
      } else {
        throw fail("kind", "unknown curve kind '" + kind + "'");
      }
    } catch (const PreconditionError& e) {
      throw fail(kind == "grid" ? "values" : "kind", e.what());
    }
    if (j.contains("special_times")) {
      const auto extra = number_array(j["special_times"], "special_times");
      try {
        c = c->with_special_times(extra);
      } catch (const PreconditionError& e) {
        throw fail("special_times", e.what());
      }
    }
    return *c;
  } catch (const ParseError& e) {
    if (e.line() > 0 || e.field().empty()) throw;
    throw ParseError(e.field(), std::string(e.what()).substr(std::string(e.what()).find(": ") + 2),
                     line_of_key(text, e.field().substr(0, e.field().find('.'))));
  }
}

MarginalCurve load_curve_spec(const std::filesystem::path& path) { return parse_curve_spec(read_file(path)); }

std::string paths_csv(const PathSet& paths) {
  std::string out = "path_id,t,x\n";
  for (std::size_t p = 0; p < paths.n_paths; ++p)
    for (std::size_t i = 0; i < paths.times.size(); ++i) {
      out += std::to_string(p);
      out += ',';
      out += format_double(paths.times[i]);
      out += ',';
      out += format_double(paths.at(p, i));
      out += '\n';
    }
  return out;
}

PathSet parse_paths_csv(const std::string& text) {
  const auto table = parse_csv(text);
  if (table.header != std::vector<std::string>{"path_id", "t", "x"})
    throw ParseError("header", "expected path_id,t,x", 1);
  PathSet out;
  std::size_t expected_path = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = static_cast<int>(r) + 2;
    const auto id = static_cast<std::size_t>(row[0]);
    if (static_cast<double>(id) != row[0]) throw ParseError("path_id", "not a path index", line);
    if (id != expected_path) {
      if (id != expected_path + 1) throw ParseError("path_id", "paths must be listed in order", line);
      expected_path = id;
    }
    if (id == 0) out.times.push_back(row[1]);
    else if (row[1] != out.times.at(out.positions.size() % out.times.size()))
      throw ParseError("t", "time mesh differs between paths", line);
    out.n_paths = id + 1;
    out.positions.push_back(row[2]);
  }
  if (out.n_paths == 0 || out.positions.size() != out.n_paths * out.times.size())
    throw ParseError("path_id", "ragged or empty path table");
  return out;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (out.header.empty()) {
      out.header = std::move(cells);
      continue;
    }
    if (cells.size() != out.header.size())
      throw ParseError("row", "expected " + std::to_string(out.header.size()) + " columns", n);
    std::vector<double> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row.push_back(parse_double(cells[i], out.header[i], n));
    out.rows.push_back(std::move(row));
  }
  if (out.header.empty()) throw ParseError("header", "empty CSV", 1);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mqt::io
