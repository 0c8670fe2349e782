#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mqt/coupling.hpp"
#include "mqt/curve.hpp"
#include "mqt/markov_quantile.hpp"
#include "mqt/measure.hpp"

// JSON and CSV formats used by the command-line tool.
//
//   measure   {"positions": [..], "masses": [..]}
//   coupling  {"source": measure, "target": measure, "mass": [[..], ..]}
//   curve     {"kind": "translation" | "scaling" | "split_merge" | "moving_point"
//                      | "constant",
//              "levels": K (default 64),
//              "params": {"velocity": v     (translation, default 1),
//                         "rate": s         (scaling, default 1),
//                         "measure": measure (constant; default G = alpha)},
//              "special_times": [..] (optional)}
//          or  {"kind": "grid", "times": [..], "levels": [alpha breakpoints],
//              "values": [[..], ..] (one nondecreasing row per time),
//              "level_count": K (default 64), "special_times": [..]}
//              A repeated time in a grid curve encodes a jump.
//   paths     CSV with header path_id,t,x
namespace mqt::io {

using json = nlohmann::json;

json to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const json& j, const std::string& field = "measure");

json to_json(const Coupling& p);
Coupling coupling_from_json(const json& j, const std::string& field = "coupling");

json to_json(const RefinementReport& r);
/// {"coupling": .., "converged": .., "trace": [[depth, distance], ..]}
json to_json(const MQTrace& t);

/// Parses a curve spec. Throws ParseError naming the offending field and,
/// when it can be located, its line in `text`.
MarginalCurve parse_curve_spec(const std::string& text);
MarginalCurve load_curve_spec(const std::filesystem::path& path);

/// Rows ordered by path, then time.
std::string paths_csv(const PathSet& paths);
PathSet parse_paths_csv(const std::string& text);

/// Numeric CSV with a header line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mqt::io
