#pragma once

// JSON artifact formats shared by the CLI and file consumers:
//   factorization: {n, space, A, B, sigma, defect}   (row-major matrices)
//   witness:       {space, n, z, margin}
//   report:        extraction report with all intermediate values
// Ordered JSON keeps dumps byte-stable for reproduction runs.

#include "jsum/extraction.hpp"
#include "jsum/jconvexity.hpp"
#include "jsum/operators.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace jsum {

using Json = nlohmann::ordered_json;

inline Json to_json_matrix(const Mat& m) {
  Json arr = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  return arr;
}

inline Mat matrix_from_json(const Json& arr, int rows, int cols, const std::string& what) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != rows * cols)
    throw std::invalid_argument(what + ": expected " + std::to_string(rows * cols) + " entries");
  Mat m(rows, cols);
  int idx = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = arr[idx++].get<double>();
  return m;
}

inline Json factorization_to_json(const Factorization& f) {
  Json j;
  j["n"] = f.n;
  j["space"] = f.a.codomain.spec();
  j["A"] = to_json_matrix(f.a.matrix);
  j["B"] = to_json_matrix(f.b.matrix);
  j["sigma"] = f.sigma;
  j["defect"] = f.defect;
  return j;
}

inline Factorization factorization_from_json(const Json& j) {
  int n = j.at("n").get<int>();
  Space space = Space::parse(j.at("space").get<std::string>());
  Mat a = matrix_from_json(j.at("A"), space.dim(), n, "A");
  Mat b = matrix_from_json(j.at("B"), n, space.dim(), "B");
  Factorization f = verify_factorization(LinOperator(a, Space::lp(1.0, n), space),
                                         LinOperator(b, space, Space::linf(n)), n, kAlgTol);
  double stored_sigma = j.at("sigma").get<double>();
  double stored_defect = j.at("defect").get<double>();
  if (std::abs(stored_sigma - f.sigma) > 1e-6 || std::abs(stored_defect - f.defect) > 1e-6)
    throw std::invalid_argument("factorization file: stored sigma/defect do not match matrices");
  return f;
}

inline Json witness_to_json(const JWitness& w) {
  Json j;
  j["space"] = w.space.spec();
  j["n"] = w.n;
  Json z = Json::array();
  for (const Vec& v : w.z) {
    Json row = Json::array();
    for (int i = 0; i < v.size(); ++i) row.push_back(v[i]);
    z.push_back(std::move(row));
  }
  j["z"] = std::move(z);
  j["margin"] = w.margin;
  return j;
}

inline JWitness witness_from_json(const Json& j) {
  JWitness w;
  w.space = Space::parse(j.at("space").get<std::string>());
  w.n = j.at("n").get<int>();
  const Json& z = j.at("z");
  if (!z.is_array() || static_cast<int>(z.size()) != w.n)
    throw std::invalid_argument("witness file: z must hold n vectors");
  for (const Json& row : z) {
    Vec v(w.space.dim());
    if (static_cast<int>(row.size()) != w.space.dim())
      throw std::invalid_argument("witness file: vector dimension mismatch");
    for (int i = 0; i < v.size(); ++i) v[i] = row[i].get<double>();
    w.z.push_back(std::move(v));
  }
  w.margin = j.at("margin").get<double>();
  validate_witness(w);
  return w;
}

inline Json report_to_json(const ExtractionReport& r) {
  Json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["j0"] = r.j0;
  j["i0"] = r.i0;
  j["sigma"] = r.sigma;
  j["eps"] = r.eps;
  j["direct_mode"] = r.direct_mode;
  j["L"] = r.l_set;
  j["M"] = r.m_set;
  j["witness"] = witness_to_json(r.witness);
  j["solver_gaps"] = r.solver_gaps;
  j["slack"] = r.slack;
  j["f_prefix_values"] = r.f_prefix_values;
  j["e_prefix_values"] = r.e_prefix_values;
  j["ground_bound_formula"] = r.ground_bound_formula;
  j["ground_bound"] = r.ground_bound;
  return j;
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  Json j;
  in >> j;
  return j;
}

}  // namespace jsum
