#pragma once

#include <string>

#include "json.hpp"
#include "mpc.hpp"
#include "problem.hpp"

namespace pipg {

using Json = nlohmann::json;

/// Set descriptors: {"type":"ball","radius":r,"dim":d},
/// {"type":"box","lower":[...],"upper":[...]} (null entries stand for the
/// infinite bound on their side), {"type":"halfspace","normal":[...],
/// "offset":a}, {"type":"soc","dim":d}, {"type":"product","factors":[...]},
/// {"type":"whole","dim":d}. Sets built from function callbacks (epigraph,
/// sublevel) have no JSON form and make set_to_json throw.
Json set_to_json(const ConvexSet& set);
ConvexSet set_from_json(const Json& j);

/// Problem documents: {"H": rows, "h": [...], "G": rows, "g": [...],
/// "set": descriptor} with dense row-major matrices (arrays of row arrays).
Json problem_to_json(const QpProblem& problem);
QpProblem problem_from_json(const Json& j);

Json tracking_to_json(const TrackingProblem& tp);
TrackingProblem tracking_from_json(const Json& j);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const char* what);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const char* what);

/// Parse with a ParseError instead of nlohmann's exception type.
Json parse_json_text(const std::string& text, const char* what);
Json load_json_file(const std::string& path);
void save_json_file(const Json& j, const std::string& path);

}  // namespace pipg
