#include "disscat/model_io.hpp"

#include "disscat/errors.hpp"

#include <fstream>

namespace disscat {

using nlohmann::json;

json matrix_to_json(const CMatrix& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back({a(i, j).real(), a(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw InvalidInput("matrix must be a non-empty array of rows");
  const auto rows = j.size();
  const auto cols = j[0].size();
  CMatrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw InvalidInput("matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) {
      const json& e = j[i][k];
      if (e.is_number()) {
        a(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        a(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw InvalidInput("matrix entries must be [re, im] pairs");
      }
    }
  }
  return a;
}

json fiber_map_to_json(const FiberMap& map) {
  json j;
  j["rows"] = map.rows();
  j["cols"] = map.cols();
  j["holder_exponent"] = map.holder_exponent();
  if (const auto* cf = map.closed_form()) {
    j["type"] = "closed-form";
    json terms = json::array();
    for (const auto& t : cf->terms) {
      json jt;
      jt["shape"] = t.shape == Shape::kGauss ? "gauss" : "constant";
      jt["center"] = t.center;
      jt["width"] = t.width;
      jt["envelope_power"] = t.envelope_power;
      jt["coefficient"] = matrix_to_json(t.coefficient);
      terms.push_back(std::move(jt));
    }
    j["terms"] = std::move(terms);
  } else {
    j["type"] = "chebyshev";
    json coeffs = json::array();
    for (const auto& c : map.chebyshev()->coefficients) coeffs.push_back(matrix_to_json(c));
    j["coefficients"] = std::move(coeffs);
  }
  return j;
}

FiberMap fiber_map_from_json(const json& j, const Interval& domain) {
  try {
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    const double s = j.value("holder_exponent", 0.99);
    const std::string type = j.at("type").get<std::string>();
    if (type == "closed-form") {
      ClosedForm cf;
      for (const auto& jt : j.at("terms")) {
        ProfileTerm t;
        const std::string shape = jt.value("shape", "constant");
        if (shape == "gauss") {
          t.shape = Shape::kGauss;
        } else if (shape != "constant") {
          throw InvalidInput("unknown profile shape '" + shape + "'");
        }
        t.center = jt.value("center", 0.0);
        t.width = jt.value("width", 1.0);
        t.envelope_power = jt.value("envelope_power", 0);
        t.coefficient = matrix_from_json(jt.at("coefficient"));
        cf.terms.push_back(std::move(t));
      }
      return FiberMap(rows, cols, domain, s, std::move(cf));
    }
    if (type == "chebyshev") {
      Chebyshev ch;
      for (const auto& c : j.at("coefficients")) ch.coefficients.push_back(matrix_from_json(c));
      return FiberMap(rows, cols, domain, s, std::move(ch));
    }
    throw InvalidInput("unknown fiber map type '" + type + "'");
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed fiber map: ") + e.what());
  }
}

json model_to_json(const Model& model) {
  json j;
  j["name"] = model.name;
  j["lambda"] = {{"lo", model.lambda.lo}, {"hi", model.lambda.hi}, {"margin", model.lambda.margin}};
  j["k"] = model.k;
  j["m"] = model.m;
  j["r"] = model.r;
  j["K"] = matrix_to_json(model.K);
  j["z0g"] = fiber_map_to_json(model.z0g);
  j["z0c"] = fiber_map_to_json(model.z0c);
  json meta = json::object();
  for (const auto& [key, v] : model.metadata) meta[key] = v;
  j["metadata"] = std::move(meta);
  return j;
}

Model model_from_json(const json& j) {
  try {
    Model model;
    model.name = j.value("name", std::string("custom"));
    const json& lam = j.at("lambda");
    const double lo = lam.at("lo").get<double>();
    const double hi = lam.at("hi").get<double>();
    model.lambda = lam.contains("margin") ? Interval{lo, hi, lam.at("margin").get<double>()}
                                          : Interval::with_default_margin(lo, hi);
    model.k = j.at("k").get<int>();
    model.m = j.at("m").get<int>();
    model.r = j.at("r").get<int>();
    model.K = matrix_from_json(j.at("K"));
    model.z0g = fiber_map_from_json(j.at("z0g"), model.lambda);
    model.z0c = fiber_map_from_json(j.at("z0c"), model.lambda);
    if (j.contains("metadata"))
      for (const auto& [key, v] : j.at("metadata").items()) model.metadata[key] = v.get<double>();
    return model;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed model document: ") + e.what());
  }
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open model file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("model file " + path + " is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace disscat
