#pragma once

// JSON encodings of algebras, elements, maps, isotopes, triples and forms.
// Scalars are strings: exact as "p/q" (q omitted when 1), approx as %.17g.

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hurwitz/hurwitz.hpp"

namespace hurwitz::io {

using json = nlohmann::ordered_json;

enum class Backend { Exact, Approx };

inline Backend parse_backend(const std::string& s) {
  if (s == "exact") return Backend::Exact;
  if (s == "approx") return Backend::Approx;
  fail(ErrorKind::ParseError, "unknown backend '" + s + "'");
}

inline const char* backend_string(Backend b) { return b == Backend::Exact ? "exact" : "approx"; }

template <Scalar S>
constexpr Backend backend_of() {
  return is_exact_v<S> ? Backend::Exact : Backend::Approx;
}

template <Scalar S>
json scalar_json(const S& x) {
  return to_string(x);
}

template <Scalar S>
S scalar_from(const json& j) {
  if (j.is_string()) return from_string<S>(j.get<std::string>());
  if (j.is_number_integer()) return from_string<S>(std::to_string(j.get<long long>()));
  if (j.is_number()) return from_string<S>(j.dump());
  fail(ErrorKind::ParseError, "scalar must be a string or number");
}

template <Scalar S>
json vector_json(const std::vector<S>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(scalar_json(x));
  return a;
}

template <Scalar S>
std::vector<S> vector_from(const json& j, int expected) {
  if (!j.is_array()) fail(ErrorKind::ParseError, "expected an array of scalars");
  std::vector<S> v;
  for (const auto& x : j) v.push_back(scalar_from<S>(x));
  if (expected >= 0 && static_cast<int>(v.size()) != expected)
    fail(ErrorKind::ParseError, "expected " + std::to_string(expected) + " scalars, got " + std::to_string(v.size()));
  return v;
}

/// Algebra description as stored in files: parameters kept as strings so one
/// record can be loaded with either backend check.
struct AlgebraSpec {
  std::string id;
  Backend backend = Backend::Exact;
  json params = json::array();

  int dim() const { return 1 << params.size(); }
};

inline json algebra_json(const AlgebraSpec& a) {
  return json{{"id", a.id}, {"dim", a.dim()}, {"params", a.params}, {"backend", backend_string(a.backend)}};
}

inline AlgebraSpec algebra_spec_from(const json& j) {
  if (!j.is_object()) fail(ErrorKind::ParseError, "algebra must be an object");
  AlgebraSpec a;
  a.id = j.value("id", std::string("A"));
  a.backend = parse_backend(j.value("backend", std::string("exact")));
  if (!j.contains("params") || !j["params"].is_array()) fail(ErrorKind::ParseError, "algebra needs a params array");
  for (const auto& p : j["params"]) a.params.push_back(p.is_string() ? p : json(p.dump()));
  if (a.params.size() > 3) fail(ErrorKind::ParseError, "at most three parameters");
  if (j.contains("dim") && j["dim"].get<int>() != a.dim()) fail(ErrorKind::ParseError, "dim does not match params");
  return a;
}

template <Scalar S>
HurwitzAlgebra<S> build_algebra(const AlgebraSpec& a) {
  if (a.backend != backend_of<S>()) fail(ErrorKind::BackendMismatch, "algebra backend differs from requested backend");
  std::vector<S> params;
  for (const auto& p : a.params) params.push_back(scalar_from<S>(p));
  return HurwitzAlgebra<S>::cayley_dickson(params);
}

template <Scalar S>
json element_json(const std::string& alg_id, const Element<S>& x) {
  return json{{"algebra", alg_id}, {"coords", vector_json(x.coords())}};
}

template <Scalar S>
Element<S> element_from(const json& j, int dim) {
  if (j.is_array()) return Element<S>(vector_from<S>(j, dim));
  if (!j.is_object() || !j.contains("coords")) fail(ErrorKind::ParseError, "element needs coords");
  return Element<S>(vector_from<S>(j["coords"], dim));
}

template <Scalar S>
json rows_json(const Matrix<S>& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(scalar_json(m(i, k)));
    rows.push_back(std::move(r));
  }
  return rows;
}

template <Scalar S>
json map_json(const std::string& alg_id, const Matrix<S>& m) {
  return json{{"algebra", alg_id}, {"rows", rows_json(m)}};
}

template <Scalar S>
Matrix<S> map_from(const json& j, int dim) {
  const json& rows = j.is_object() ? j.at("rows") : j;
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
    fail(ErrorKind::ParseError, "map needs " + std::to_string(dim) + " rows");
  Matrix<S> m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    auto r = vector_from<S>(rows[static_cast<size_t>(i)], dim);
    for (int k = 0; k < dim; ++k) m(i, k) = r[static_cast<size_t>(k)];
  }
  return m;
}

template <Scalar S>
json isotope_json(const std::string& alg_id, const Isotope<S>& iso) {
  return json{{"algebra", alg_id}, {"alpha", map_json(alg_id, iso.alpha)}, {"beta", map_json(alg_id, iso.beta)}};
}

template <Scalar S>
Isotope<S> isotope_from(const json& j, int dim) {
  if (!j.is_object() || !j.contains("alpha") || !j.contains("beta"))
    fail(ErrorKind::ParseError, "isotope needs alpha and beta");
  return {map_from<S>(j["alpha"], dim), map_from<S>(j["beta"], dim)};
}

template <Scalar S>
json triple_json(const std::string& alg_id, const TrialityTriple<S>& t) {
  return json{{"algebra", alg_id},
              {"phi", map_json(alg_id, t.phi)},
              {"phi1", map_json(alg_id, t.phi1)},
              {"phi2", map_json(alg_id, t.phi2)},
              {"residual", scalar_json(t.residual)}};
}

template <Scalar S>
TrialityTriple<S> triple_from(const json& j, int dim) {
  if (!j.is_object() || !j.contains("phi") || !j.contains("phi1") || !j.contains("phi2"))
    fail(ErrorKind::ParseError, "triple needs phi, phi1 and phi2");
  TrialityTriple<S> t{map_from<S>(j["phi"], dim), map_from<S>(j["phi1"], dim), map_from<S>(j["phi2"], dim), S(0)};
  if (j.contains("residual")) t.residual = scalar_from<S>(j["residual"]);
  return t;
}

inline json class_json(IsotopeClass c) { return json::array({c.i, c.j}); }

inline IsotopeClass class_from(const json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::ParseError, "class must be [i, j]");
  IsotopeClass c{j[0].get<int>(), j[1].get<int>()};
  if (std::abs(c.i) != 1 || std::abs(c.j) != 1) fail(ErrorKind::ParseError, "class entries must be +-1");
  return c;
}

inline json quat_form_json(const QuatCanonicalForm& f) {
  return json{{"class", class_json(f.cls)},
              {"a", vector_json(f.a.coords())},
              {"b", vector_json(f.b.coords())},
              {"delta", rows_json(f.delta)},
              {"epsilon", rows_json(f.epsilon)},
              {"normalization", kNormalizationTag}};
}

inline QuatCanonicalForm quat_form_from(const json& j) {
  if (j.value("normalization", std::string(kNormalizationTag)) != kNormalizationTag)
    fail(ErrorKind::ParseError, "form uses a different normalization rule");
  return {class_from(j.at("class")), Element<double>(vector_from<double>(j.at("a"), 4)),
          Element<double>(vector_from<double>(j.at("b"), 4)), map_from<double>(j.at("delta"), 4),
          map_from<double>(j.at("epsilon"), 4)};
}

template <Scalar S>
json comp_form_json(const CompCanonicalForm<S>& f) {
  return json{{"class", class_json(f.cls)},
              {"a", vector_json(f.a.coords())},
              {"b", vector_json(f.b.coords())},
              {"normalization", kNormalizationTag}};
}

template <Scalar S>
CompCanonicalForm<S> comp_form_from(const json& j) {
  if (j.value("normalization", std::string(kNormalizationTag)) != kNormalizationTag)
    fail(ErrorKind::ParseError, "form uses a different normalization rule");
  return {class_from(j.at("class")), Element<S>(vector_from<S>(j.at("a"), 4)),
          Element<S>(vector_from<S>(j.at("b"), 4))};
}

}  // namespace hurwitz::io
