#include "json_io.hpp"

#include <fstream>
#include <limits>

#include "errors.hpp"

namespace pipg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  Vector v(j.size());
  Index i = 0;
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError(std::string(what) + ": expected numeric entries");
    v[i++] = e.get<double>();
  }
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  Matrix m;
  Index i = 0;
  for (const auto& row : j) {
    if (!row.is_array()) throw ParseError(std::string(what) + ": expected row arrays");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Index>(row.size()) != cols)
      throw ParseError(std::string(what) + ": ragged rows");
    Index k = 0;
    for (const auto& e : row) {
      if (!e.is_number()) throw ParseError(std::string(what) + ": expected numeric entries");
      m(i, k++) = e.get<double>();
    }
    ++i;
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

Json set_to_json(const ConvexSet& set) {
  return std::visit(
      [&](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return Json{{"type", "ball"}, {"radius", s.radius}, {"dim", s.dim}};
        } else if constexpr (std::is_same_v<T, Box>) {
          Json lower = Json::array();
          Json upper = Json::array();
          for (Index i = 0; i < s.lower.size(); ++i) {
            if (s.lower[i] == -kInf)
              lower.push_back(nullptr);
            else
              lower.push_back(s.lower[i]);
            if (s.upper[i] == kInf)
              upper.push_back(nullptr);
            else
              upper.push_back(s.upper[i]);
          }
          return Json{{"type", "box"}, {"lower", lower}, {"upper", upper}};
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          return Json{{"type", "halfspace"}, {"normal", vector_to_json(s.normal)},
                      {"offset", s.offset}};
        } else if constexpr (std::is_same_v<T, SecondOrderCone>) {
          return Json{{"type", "soc"}, {"dim", s.dim}};
        } else if constexpr (std::is_same_v<T, Product>) {
          Json factors = Json::array();
          for (const auto& f : s.factors) factors.push_back(set_to_json(f));
          return Json{{"type", "product"}, {"factors", factors}};
        } else if constexpr (std::is_same_v<T, Whole>) {
          return Json{{"type", "whole"}, {"dim", s.dim}};
        } else {
          throw ParseError("sets defined by function callbacks have no JSON form");
        }
      },
      set.node());
}

ConvexSet set_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw ParseError("set descriptor: expected an object with a \"type\" tag");
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "ball")
      return ConvexSet(Ball{j.at("radius").get<double>(), j.at("dim").get<Index>()});
    if (type == "box") {
      const Json& lo = j.at("lower");
      const Json& hi = j.at("upper");
      if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size())
        throw ParseError("box descriptor: lower/upper must be arrays of equal length");
      Vector lower(lo.size()), upper(hi.size());
      for (std::size_t i = 0; i < lo.size(); ++i) {
        lower[static_cast<Index>(i)] = lo[i].is_null() ? -kInf : lo[i].get<double>();
        upper[static_cast<Index>(i)] = hi[i].is_null() ? kInf : hi[i].get<double>();
      }
      return ConvexSet(Box{std::move(lower), std::move(upper)});
    }
    if (type == "halfspace")
      return ConvexSet(Halfspace{vector_from_json(j.at("normal"), "halfspace normal"),
                                 j.at("offset").get<double>()});
    if (type == "soc") return ConvexSet(SecondOrderCone{j.at("dim").get<Index>()});
    if (type == "product") {
      std::vector<ConvexSet> factors;
      for (const auto& f : j.at("factors")) factors.push_back(set_from_json(f));
      return ConvexSet(Product{std::move(factors)});
    }
    if (type == "whole") return ConvexSet(Whole{j.at("dim").get<Index>()});
  } catch (const Json::exception& e) {
    throw ParseError(std::string("set descriptor \"") + type + "\": " + e.what());
  }
  throw ParseError("unknown set type \"" + type + "\"");
}

Json problem_to_json(const QpProblem& problem) {
  return Json{{"H", matrix_to_json(problem.H())},
              {"h", vector_to_json(problem.h())},
              {"G", matrix_to_json(problem.G())},
              {"g", vector_to_json(problem.g())},
              {"set", set_to_json(problem.feasible_set())}};
}

QpProblem problem_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("problem document: expected an object");
  for (const char* key : {"H", "h", "G", "g", "set"})
    if (!j.contains(key))
      throw ParseError(std::string("problem document: missing field \"") + key + "\"");
  return QpProblem(matrix_from_json(j.at("H"), "H"), vector_from_json(j.at("h"), "h"),
                   matrix_from_json(j.at("G"), "G"), vector_from_json(j.at("g"), "g"),
                   set_from_json(j.at("set")));
}

Json tracking_to_json(const TrackingProblem& tp) {
  Json j;
  j["horizon"] = tp.horizon;
  auto mats = [](const std::vector<Matrix>& v) {
    Json arr = Json::array();
    for (const auto& m : v) arr.push_back(matrix_to_json(m));
    return arr;
  };
  auto vecs = [](const std::vector<Vector>& v) {
    Json arr = Json::array();
    for (const auto& x : v) arr.push_back(vector_to_json(x));
    return arr;
  };
  auto sets = [](const std::vector<ConvexSet>& v) {
    Json arr = Json::array();
    for (const auto& s : v) arr.push_back(set_to_json(s));
    return arr;
  };
  j["A"] = mats(tp.A);
  j["B"] = mats(tp.B);
  j["Q"] = mats(tp.Q);
  j["R"] = mats(tp.R);
  j["y"] = vecs(tp.y);
  j["X"] = sets(tp.X);
  j["U"] = sets(tp.U);
  j["x0"] = vector_to_json(tp.x0);
  return j;
}

TrackingProblem tracking_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("tracking document: expected an object");
  TrackingProblem tp;
  try {
    tp.horizon = j.at("horizon").get<int>();
    for (const auto& m : j.at("A")) tp.A.push_back(matrix_from_json(m, "A"));
    for (const auto& m : j.at("B")) tp.B.push_back(matrix_from_json(m, "B"));
    for (const auto& m : j.at("Q")) tp.Q.push_back(matrix_from_json(m, "Q"));
    for (const auto& m : j.at("R")) tp.R.push_back(matrix_from_json(m, "R"));
    for (const auto& v : j.at("y")) tp.y.push_back(vector_from_json(v, "y"));
    for (const auto& s : j.at("X")) tp.X.push_back(set_from_json(s));
    for (const auto& s : j.at("U")) tp.U.push_back(set_from_json(s));
    tp.x0 = vector_from_json(j.at("x0"), "x0");
  } catch (const Json::exception& e) {
    throw ParseError(std::string("tracking document: ") + e.what());
  }
  tp.validate();
  return tp;
}

Json parse_json_text(const std::string& text, const char* what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError(std::string(what) + ": malformed JSON");
  return j;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_json_text(text, path.c_str());
}

void save_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace pipg
