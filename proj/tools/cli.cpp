#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hurwitz/hurwitz.hpp"
#include "serialize.hpp"

namespace hurwitz::cli {
namespace {

using io::json;

// ---------------------------------------------------------------------------
// Input handling

json load_json(const std::string& arg) {
  std::string text;
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) fail(ErrorKind::ParseError, "cannot read '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  // A report produced by this tool can be fed back in: use its result.
  if (j.is_object() && j.contains("operation") && j.contains("result")) return j["result"];
  return j;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

json scalar_list(const std::string& s) {
  json a = json::array();
  for (auto& x : split_list(s)) a.push_back(x);
  return a;
}

struct Session {
  std::map<std::string, io::AlgebraSpec> algebras;
  std::vector<std::string> algebra_files;
  ToleranceContext ctx;
  std::uint64_t seed = 0;
  std::string op;

  void load_algebras() {
    for (const auto& f : algebra_files) {
      io::AlgebraSpec a = io::algebra_spec_from(load_json(f));
      algebras[a.id] = a;
    }
  }

  /// Algebra of an object: inline object, id into the loaded algebras, or the
  /// single loaded algebra when the field is absent.
  io::AlgebraSpec resolve(const json& obj) const {
    if (obj.is_object() && obj.contains("algebra")) {
      const json& a = obj["algebra"];
      if (a.is_object()) return io::algebra_spec_from(a);
      if (a.is_string()) {
        auto it = algebras.find(a.get<std::string>());
        if (it != algebras.end()) return it->second;
        if (algebras.size() == 1) fail(ErrorKind::ParseError, "unknown algebra id '" + a.get<std::string>() + "'");
      }
    }
    return only();
  }

  io::AlgebraSpec only() const {
    if (algebras.size() != 1) fail(ErrorKind::ParseError, "pass exactly one --algebra file");
    return algebras.begin()->second;
  }
};

template <class F>
json with_backend(const io::AlgebraSpec& spec, F&& f) {
  if (spec.backend == io::Backend::Exact) return f(io::build_algebra<Rational>(spec));
  return f(io::build_algebra<double>(spec));
}

struct Report {
  json inputs = json::object();
  json verdict = nullptr;
  json witness = nullptr;
  json residuals = json::object();
  json result = nullptr;
  std::optional<io::Backend> backend;

  json finish(const Session& s) const {
    json prov{{"seed", s.seed},
              {"tolerances", {{"eq", to_string(s.ctx.eq)}, {"residual", to_string(s.ctx.residual)}}},
              {"normalization", kNormalizationTag}};
    if (backend) prov["backend"] = io::backend_string(*backend);
    return json{{"operation", s.op}, {"inputs", inputs},   {"verdict", verdict},    {"witness", witness},
                {"residuals", residuals}, {"result", result}, {"provenance", prov}};
  }
};

template <Scalar S>
void require_approx(const char* what) {
  if constexpr (is_exact_v<S>) fail(ErrorKind::BackendMismatch, std::string(what) + " needs the approx backend");
}

template <Scalar S>
json coords(const Element<S>& x) {
  return io::vector_json(x.coords());
}

template <Scalar S>
bool within(const S& deviation, const ToleranceContext& ctx, double scale = 1.0) {
  if constexpr (is_exact_v<S>) {
    return deviation == S(0);
  } else {
    return deviation <= ctx.residual * std::max(1.0, scale);
  }
}

// ---------------------------------------------------------------------------
// Commands

json cmd_algebra_new(Session& s, const std::string& params, int dim, const std::string& backend,
                     const std::string& id) {
  io::AlgebraSpec spec;
  spec.id = id;
  spec.backend = io::parse_backend(backend);
  if (!params.empty()) {
    spec.params = scalar_list(params);
  } else {
    if (dim != 1 && dim != 2 && dim != 4 && dim != 8) fail(ErrorKind::ParseError, "dim must be 1, 2, 4 or 8");
    for (int d = dim; d > 1; d /= 2) spec.params.push_back("-1");
  }
  Report r;
  r.backend = spec.backend;
  r.inputs = {{"params", spec.params}, {"backend", backend}};
  r.result = with_backend(spec, [&](const auto& alg) {
    json out = io::algebra_json(spec);
    out["params"] = io::vector_json(alg.params());
    out["norm_diagonal"] = io::vector_json(alg.norm_diagonal());
    out["euclidean"] = alg.euclidean();
    return out;
  });
  r.verdict = "constructed";
  return r.finish(s);
}

json cmd_element(Session& s, const std::string& element, const std::string& coord_list, const std::string& times) {
  io::AlgebraSpec spec;
  json ej;
  if (!element.empty()) {
    ej = load_json(element);
    spec = s.resolve(ej);
  } else {
    spec = s.only();
    ej = scalar_list(coord_list);
  }
  Report r;
  r.backend = spec.backend;
  r.result = with_backend(spec, [&](const auto& alg) {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    Element<S> x = io::element_from<S>(ej, alg.dim());
    r.inputs = {{"element", coords(x)}};
    json out{{"element", io::element_json(spec.id, x)},
             {"norm", io::scalar_json(alg.norm(x))},
             {"trace", io::scalar_json(alg.trace(x))},
             {"conjugate", coords(alg.conj(x))},
             {"in_nucleus", alg.in_nucleus(x, s.ctx)}};
    out["inverse"] = alg.is_invertible(x, s.ctx) ? coords(alg.inverse(x, s.ctx)) : json(nullptr);
    if (!times.empty()) {
      json yj = times.front() == '{' || times.front() == '[' || times.find(".json") != std::string::npos
                    ? load_json(times)
                    : scalar_list(times);
      Element<S> y = io::element_from<S>(yj, alg.dim());
      r.inputs["times"] = coords(y);
      out["product"] = coords(alg.mul(x, y));
    }
    return out;
  });
  r.verdict = "computed";
  return r.finish(s);
}

json cmd_map(Session& s, const std::string& kind, const std::string& coord_list) {
  io::AlgebraSpec spec = s.only();
  Report r;
  r.backend = spec.backend;
  r.inputs = {{"kind", kind}};
  if (!coord_list.empty()) r.inputs["coords"] = scalar_list(coord_list);
  r.result = with_backend(spec, [&](const auto& alg) {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    auto element = [&] { return io::element_from<S>(scalar_list(coord_list), alg.dim()); };
    Matrix<S> m;
    if (kind == "identity") {
      m = Matrix<S>::identity(alg.dim());
    } else if (kind == "kappa") {
      m = alg.kappa();
    } else if (kind == "left") {
      m = alg.left_matrix(element());
    } else if (kind == "right") {
      m = alg.right_matrix(element());
    } else if (kind == "diag") {
      auto d = element();
      m = Matrix<S>::diagonal(std::span<const S>(d.coords()));
    } else if (kind == "random-invertible") {
      m = random_invertible(alg, s.seed, s.ctx);
    } else if (kind == "random-similitude") {
      m = random_proper_similitude(alg, s.seed, s.ctx);
    } else {
      fail(ErrorKind::ParseError, "unknown map kind '" + kind + "'");
    }
    json out = io::map_json(spec.id, m);
    out["determinant"] = io::scalar_json(determinant(m));
    return out;
  });
  r.verdict = "constructed";
  return r.finish(s);
}

json cmd_isotope_new(Session& s, const std::string& alpha, const std::string& beta, const std::string& unital_a,
                     const std::string& unital_b, bool random) {
  io::AlgebraSpec spec = s.only();
  Report r;
  r.backend = spec.backend;
  r.result = with_backend(spec, [&](const auto& alg) {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    Isotope<S> iso;
    if (random) {
      Rng rng(s.seed);
      iso = {random_invertible(alg, rng, s.ctx), random_invertible(alg, rng, s.ctx)};
      r.inputs = {{"random", true}};
    } else if (!unital_a.empty() || !unital_b.empty()) {
      Element<S> a = io::element_from<S>(scalar_list(unital_a.empty() ? "1" : unital_a), alg.dim());
      Element<S> b = io::element_from<S>(scalar_list(unital_b.empty() ? "1" : unital_b), alg.dim());
      iso = {alg.right_matrix(alg.inverse(a, s.ctx)), alg.left_matrix(alg.inverse(b, s.ctx))};
      r.inputs = {{"a", coords(a)}, {"b", coords(b)}};
    } else {
      if (alpha.empty() || beta.empty()) fail(ErrorKind::ParseError, "isotope new needs --alpha and --beta");
      iso = {io::map_from<S>(load_json(alpha), alg.dim()), io::map_from<S>(load_json(beta), alg.dim())};
      r.inputs = {{"alpha", alpha}, {"beta", beta}};
    }
    iso = make_isotope(alg, iso.alpha, iso.beta, s.ctx);
    return io::isotope_json(spec.id, iso);
  });
  r.verdict = "constructed";
  return r.finish(s);
}

template <Scalar S>
Isotope<S> read_isotope(const json& j, const HurwitzAlgebra<S>& alg) {
  return io::isotope_from<S>(j, alg.dim());
}

template <class F>
json on_isotope(Session& s, const std::string& file, Report& r, F&& f) {
  json ij = load_json(file);
  io::AlgebraSpec spec = s.resolve(ij);
  r.backend = spec.backend;
  r.inputs["isotope"] = file;
  return with_backend(spec, [&](const auto& alg) {
    auto iso = read_isotope(ij, alg);
    return f(alg, iso, spec);
  });
}

json cmd_isotope_identity(Session& s, const std::string& file) {
  Report r;
  r.result = on_isotope(s, file, r, [&](const auto& alg, const auto& iso, const io::AlgebraSpec&) -> json {
    try {
      auto e = find_identity(alg, iso, s.ctx);
      r.verdict = "unital";
      r.witness = coords(e);
      json out{{"identity", coords(e)}};
      try {
        out["norm_scale"] = io::scalar_json(unital_isotope_norm(alg, iso, s.ctx));
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::IsotropicIdentity) throw;
        out["norm_scale"] = nullptr;
        out["note"] = "identity is isotropic";
      }
      return out;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NotUnital) throw;
      r.verdict = "not-unital";
      return json{{"reason", err.what()}};
    }
  });
  return r.finish(s);
}

json cmd_isotope_double_sign(Session& s, const std::string& file) {
  Report r;
  r.result = on_isotope(s, file, r, [&](const auto& alg, const auto& iso, const io::AlgebraSpec&) -> json {
    auto d = double_sign(alg, iso);
    r.verdict = "computed";
    return json{{"exponent", d.first.exponent},
                {"first", io::scalar_json(d.first.representative)},
                {"second", io::scalar_json(d.second.representative)}};
  });
  return r.finish(s);
}

json cmd_isotope_same(Session& s, const std::string& file, const std::string& other) {
  Report r;
  r.inputs["other"] = other;
  json oj = load_json(other);
  r.result = on_isotope(s, file, r, [&](const auto& alg, const auto& iso, const io::AlgebraSpec&) -> json {
    auto iso2 = read_isotope(oj, alg);
    try {
      auto w = same_isotope(alg, iso, iso2, s.ctx);
      r.verdict = "same";
      r.witness = coords(w);
      return json{{"w", coords(w)}};
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::Distinct) throw;
      r.verdict = "distinct";
      return json{{"reason", err.what()}};
    }
  });
  return r.finish(s);
}

template <Scalar S>
TrialityTriple<S> solve_triple(const HurwitzAlgebra<S>& alg, const Matrix<S>& phi, const Session& s, int restarts) {
  TrialitySolverOptions opts;
  opts.restarts = restarts;
  opts.seed = s.seed;
  return triality_components(alg, phi, s.ctx, opts);
}

json cmd_isotope_transport(Session& s, const std::string& file, const std::string& phi_file,
                           const std::string& triple_file, int restarts) {
  Report r;
  r.inputs["phi"] = phi_file;
  if (!triple_file.empty()) r.inputs["triple"] = triple_file;
  r.result = on_isotope(s, file, r, [&](const auto& alg, const auto& iso, const io::AlgebraSpec& spec) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    TrialityTriple<S> t;
    if (!triple_file.empty()) {
      t = io::triple_from<S>(load_json(triple_file), alg.dim());
    } else {
      if (phi_file.empty()) fail(ErrorKind::ParseError, "transport needs --phi or --triple");
      t = solve_triple(alg, io::map_from<S>(load_json(phi_file), alg.dim()), s, restarts);
    }
    auto res = transport(alg, iso, t, s.ctx);
    r.verdict = "transported";
    r.witness = io::map_json(spec.id, res.phi);
    r.residuals["isomorphism"] = io::scalar_json(res.residual);
    r.residuals["triality"] = io::scalar_json(verify_triality(alg, t, s.ctx));
    return json{{"target", io::isotope_json(spec.id, res.target)}, {"triple", io::triple_json(spec.id, t)}};
  });
  return r.finish(s);
}

template <class F>
json on_map(Session& s, const std::string& file, Report& r, F&& f) {
  json mj = load_json(file);
  io::AlgebraSpec spec = s.resolve(mj);
  r.backend = spec.backend;
  r.inputs["map"] = file;
  return with_backend(spec, [&](const auto& alg) {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    return f(alg, io::map_from<S>(mj, alg.dim()), spec);
  });
}

json cmd_similitude_check(Session& s, const std::string& file) {
  Report r;
  r.result = on_map(s, file, r, [&](const auto& alg, const auto& m, const io::AlgebraSpec&) -> json {
    try {
      auto c = similitude_check(alg, m, s.ctx);
      r.verdict = "similitude";
      r.residuals["form"] = io::scalar_json(c.residual);
      return json{{"multiplier", io::scalar_json(c.multiplier)},
                  {"proper", c.proper},
                  {"determinant", io::scalar_json(determinant(m))}};
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NotSimilitude) throw;
      r.verdict = "not-similitude";
      return json{{"reason", err.what()}};
    }
  });
  return r.finish(s);
}

json cmd_triality_solve(Session& s, const std::string& file, int restarts) {
  Report r;
  r.inputs["restarts"] = restarts;
  r.result = on_map(s, file, r, [&](const auto& alg, const auto& m, const io::AlgebraSpec& spec) -> json {
    auto t = solve_triple(alg, m, s, restarts);
    r.verdict = "solved";
    r.residuals["triality"] = io::scalar_json(t.residual);
    r.residuals["verify"] = io::scalar_json(verify_triality(alg, t, s.ctx));
    return io::triple_json(spec.id, t);
  });
  return r.finish(s);
}

json cmd_triality_verify(Session& s, const std::string& file) {
  Report r;
  json tj = load_json(file);
  io::AlgebraSpec spec = s.resolve(tj);
  r.backend = spec.backend;
  r.inputs["triple"] = file;
  r.result = with_backend(spec, [&](const auto& alg) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    auto t = io::triple_from<S>(tj, alg.dim());
    S dev = verify_triality(alg, t, s.ctx);
    bool ok = within(dev, s.ctx, detail::product_scale(alg, t.phi));
    r.verdict = ok ? "valid" : "invalid";
    r.residuals["verify"] = io::scalar_json(dev);
    return json{{"deviation", io::scalar_json(dev)}};
  });
  return r.finish(s);
}

json cmd_triality_align(Session& s, const std::string& file, const std::string& other) {
  Report r;
  json t1 = load_json(file), t2 = load_json(other);
  io::AlgebraSpec spec = s.resolve(t1);
  r.backend = spec.backend;
  r.inputs = {{"triple", file}, {"other", other}};
  r.result = with_backend(spec, [&](const auto& alg) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    auto a = io::triple_from<S>(t1, alg.dim());
    auto b = io::triple_from<S>(t2, alg.dim());
    try {
      auto w = triality_align(alg, a, b, s.ctx);
      r.verdict = "related";
      r.witness = coords(w);
      return json{{"w", coords(w)}};
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NotRelated) throw;
      r.verdict = "not-related";
      return json{{"reason", err.what()}};
    }
  });
  return r.finish(s);
}

json cmd_polar(Session& s, const std::string& file) {
  Report r;
  r.result = on_map(s, file, r, [&](const auto& alg, const auto& m, const io::AlgebraSpec& spec) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    require_approx<S>("polar factorisation");
    if constexpr (!is_exact_v<S>) {
      auto f = polar_decompose(alg, m, s.ctx);
      r.verdict = "factored";
      r.residuals["recompose"] = io::scalar_json(f.residual);
      return json{{"zeta", io::map_json(spec.id, f.zeta)},
                  {"delta", io::map_json(spec.id, f.delta)},
                  {"lambda", f.lambda_is_kappa ? "kappa" : "identity"}};
    }
    return json(nullptr);
  });
  return r.finish(s);
}

json cmd_so4_factor(Session& s, const std::string& file) {
  Report r;
  r.result = on_map(s, file, r, [&](const auto& alg, const auto& m, const io::AlgebraSpec&) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    require_approx<S>("so4-factor");
    if constexpr (!is_exact_v<S>) {
      auto [p, q] = so4_factor(alg, m, s.ctx);
      r.verdict = "factored";
      r.witness = json{{"p", coords(p)}, {"q", coords(q)}};
      r.residuals["factor"] = io::scalar_json(max_abs_diff(Matrix<double>(alg.left_matrix(p) * alg.right_matrix(q)), m));
      return json{{"p", coords(p)}, {"q", coords(q)}};
    }
    return json(nullptr);
  });
  return r.finish(s);
}

// Principal axes of the shape factors and the line directions of a, b.
std::string geometry_summary(const QuatCanonicalForm& f) {
  auto axes = [](const Matrix<double>& m) {
    EigenResult e = symmetric_eigen(m);
    std::string out;
    for (size_t k = 0; k < e.values.size(); ++k) out += (k ? ", " : "") + to_string(e.values[k]);
    return out;
  };
  auto line = [](const Element<double>& x) {
    std::string out;
    for (int k = 0; k < x.dim(); ++k) out += (k ? ", " : "") + to_string(x[k]);
    return out;
  };
  return "lines through (" + line(f.a) + ") and (" + line(f.b) + "); ellipsoid axes delta [" + axes(f.delta) +
         "], epsilon [" + axes(f.epsilon) + "]";
}

json cmd_classify_quaternion(Session& s, const std::string& file) {
  Report r;
  r.result = on_isotope(s, file, r, [&](const auto& alg, const auto& iso, const io::AlgebraSpec& spec) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    require_approx<S>("quaternion classification");
    if constexpr (!is_exact_v<S>) {
      auto res = quaternion_canonical(alg, iso, s.ctx);
      auto ds = double_sign(alg, iso);
      r.verdict = "classified";
      r.witness = json{{"nuclear", coords(res.reduction.nuclear)},
                       {"phi", io::map_json(spec.id, res.reduction.move.phi)},
                       {"phi1", io::map_json(spec.id, res.reduction.move.phi1)},
                       {"phi2", io::map_json(spec.id, res.reduction.move.phi2)}};
      r.residuals["rebuild"] = io::scalar_json(res.residual);
      json out = io::quat_form_json(res.form);
      out["double_sign"] = json::array({sign(ds.first.representative), sign(ds.second.representative)});
      out["geometry"] = geometry_summary(res.form);
      return out;
    }
    return json(nullptr);
  });
  return r.finish(s);
}

json cmd_classify_composition(Session& s, const std::string& file) {
  Report r;
  r.result = on_isotope(s, file, r, [&](const auto& alg, const auto& iso, const io::AlgebraSpec& spec) -> json {
    try {
      auto res = comp_canonical(alg, iso, s.ctx);
      r.verdict = "classified";
      r.witness = json{{"nuclear", coords(res.reduction.nuclear)},
                       {"phi", io::map_json(spec.id, res.reduction.move.phi)}};
      return io::comp_form_json(res.form);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NotComposition) throw;
      r.verdict = "not-composition";
      return json{{"reason", err.what()}};
    }
  });
  return r.finish(s);
}

json cmd_iso_test(Session& s, const std::string& file, const std::string& other, const std::string& mode) {
  Report r;
  r.inputs = {{"first", file}, {"second", other}, {"mode", mode}};
  json j1 = load_json(file), j2 = load_json(other);
  bool forms = j1.is_object() && j1.contains("class");
  io::AlgebraSpec spec = forms ? s.only() : s.resolve(j1);
  r.backend = spec.backend;
  r.result = with_backend(spec, [&](const auto& alg) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    if (mode == "composition") {
      CompCanonicalForm<S> f1, f2;
      if (forms) {
        f1 = io::comp_form_from<S>(j1);
        f2 = io::comp_form_from<S>(j2);
      } else {
        f1 = comp_canonical(alg, read_isotope(j1, alg), s.ctx).form;
        f2 = comp_canonical(alg, read_isotope(j2, alg), s.ctx).form;
      }
      auto w = comp_iso_test(alg, f1, f2, s.ctx);
      r.verdict = w ? "isomorphic" : "not-isomorphic";
      if (w) r.witness = json{{"s", coords(w->s)}, {"rho_a", io::scalar_json(w->rho_a)}, {"rho_b", io::scalar_json(w->rho_b)}};
      return json{{"first", io::comp_form_json(f1)}, {"second", io::comp_form_json(f2)}};
    }
    if (mode != "quaternion") fail(ErrorKind::ParseError, "mode must be quaternion or composition");
    require_approx<S>("quaternion isomorphism test");
    if constexpr (!is_exact_v<S>) {
      QuatCanonicalForm f1, f2;
      if (forms) {
        f1 = io::quat_form_from(j1);
        f2 = io::quat_form_from(j2);
      } else {
        f1 = quaternion_canonical(alg, read_isotope(j1, alg), s.ctx).form;
        f2 = quaternion_canonical(alg, read_isotope(j2, alg), s.ctx).form;
      }
      auto res = quat_iso_test(alg, f1, f2, s.ctx);
      r.verdict = to_string(res.verdict);
      if (res.witness) r.witness = json{{"s", coords(*res.witness)}};
      r.residuals["witness"] = std::isfinite(res.residual) ? json(to_string(res.residual)) : json(nullptr);
      return json{{"first", io::quat_form_json(f1)}, {"second", io::quat_form_json(f2)}};
    }
    return json(nullptr);
  });
  return r.finish(s);
}

json cmd_pair_conjugacy(Session& s, const std::string& a, const std::string& b, const std::string& a2,
                        const std::string& b2) {
  io::AlgebraSpec spec = s.only();
  Report r;
  r.backend = spec.backend;
  r.result = with_backend(spec, [&](const auto& alg) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    auto el = [&](const std::string& t) { return io::element_from<S>(scalar_list(t), alg.dim()); };
    std::pair<Element<S>, Element<S>> p1{el(a), el(b)}, p2{el(a2), el(b2)};
    r.inputs = {{"a", coords(p1.first)}, {"b", coords(p1.second)}, {"a2", coords(p2.first)}, {"b2", coords(p2.second)}};
    try {
      auto c = pair_conjugacy(alg, p1, p2, s.ctx);
      r.verdict = "conjugate";
      r.witness = json{{"s", coords(c.s)}, {"rho_a", io::scalar_json(c.rho_a)}, {"rho_b", io::scalar_json(c.rho_b)}};
      return r.witness;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NotConjugate) throw;
      r.verdict = "not-conjugate";
      return json{{"reason", err.what()}};
    }
  });
  return r.finish(s);
}

// ---------------------------------------------------------------------------
// Oracle runner: checks an identity on seeded random inputs.

template <Scalar S>
double deviation(const S& x, const S& y) {
  if constexpr (is_exact_v<S>) {
    return x == y ? 0.0 : 1.0;
  } else {
    return std::fabs(x - y) / std::max({1.0, std::fabs(x), std::fabs(y)});
  }
}

template <Scalar S>
double deviation(const Element<S>& x, const Element<S>& y) {
  double d = 0;
  for (int i = 0; i < x.dim(); ++i) d = std::max(d, deviation(x[i], y[i]));
  return d;
}

template <Scalar S>
double deviation(const Matrix<S>& x, const Matrix<S>& y) {
  if constexpr (is_exact_v<S>) {
    return x == y ? 0.0 : 1.0;
  } else {
    return max_abs_diff(x, y) / std::max({1.0, max_abs(x), max_abs(y)});
  }
}

template <Scalar S>
std::function<double(Rng&)> oracle_trial(const std::string& property, const HurwitzAlgebra<S>& alg,
                                         const ToleranceContext& ctx) {
  if (property == "norm-multiplicativity")
    return [&](Rng& g) {
      auto x = random_element(alg, g), y = random_element(alg, g);
      return deviation(alg.norm(alg.mul(x, y)), S(alg.norm(x) * alg.norm(y)));
    };
  if (property == "alternativity")
    return [&](Rng& g) {
      auto x = random_element(alg, g), y = random_element(alg, g);
      return std::max(deviation(alg.mul(alg.mul(x, x), y), alg.mul(x, alg.mul(x, y))),
                      deviation(alg.mul(x, alg.mul(y, y)), alg.mul(alg.mul(x, y), y)));
    };
  if (property == "moufang")
    return [&](Rng& g) {
      auto x = random_element(alg, g), y = random_element(alg, g), z = random_element(alg, g);
      return deviation(alg.mul(alg.mul(alg.mul(x, y), x), z), alg.mul(x, alg.mul(y, alg.mul(x, z))));
    };
  if (property == "conjugation")
    return [&](Rng& g) {
      auto x = random_element(alg, g), y = random_element(alg, g);
      return std::max(deviation(alg.conj(alg.mul(x, y)), alg.mul(alg.conj(y), alg.conj(x))),
                      deviation(alg.conj(alg.conj(x)), x));
    };
  if (property == "quadratic")
    return [&](Rng& g) {
      auto x = random_element(alg, g);
      auto q = alg.mul(x, x) - x * alg.trace(x) + alg.scalar(alg.norm(x));
      return deviation(q, alg.zero());
    };
  if (property == "inverse")
    return [&](Rng& g) {
      auto x = random_invertible_element(alg, g, ctx);
      return deviation(Matrix<S>(alg.left_matrix(x) * alg.left_matrix(alg.inverse(x, ctx))),
                       Matrix<S>::identity(alg.dim()));
    };
  if (property == "multiplier")
    return [&](Rng& g) {
      auto a = random_invertible_element(alg, g, ctx);
      auto cl = similitude_check(alg, alg.left_matrix(a), ctx);
      auto cr = similitude_check(alg, alg.right_matrix(a), ctx);
      double d = std::max(deviation(cl.multiplier, alg.norm(a)), deviation(cr.multiplier, alg.norm(a)));
      if (alg.dim() >= 2) {
        S expected = power(alg.norm(a), static_cast<unsigned>(alg.dim() / 2));
        d = std::max(d, deviation(determinant(alg.left_matrix(a)), expected));
      }
      return cl.proper && cr.proper ? d : 1.0;
    };
  if (property == "identity")
    return [&](Rng& g) {
      auto a = random_invertible_element(alg, g, ctx), b = random_invertible_element(alg, g, ctx);
      Isotope<S> iso{alg.right_matrix(alg.inverse(a, ctx)), alg.left_matrix(alg.inverse(b, ctx))};
      return deviation(find_identity(alg, iso, ctx), alg.mul(b, a));
    };
  if (property == "triality")
    return [&](Rng& g) {
      if (alg.dim() <= 4) {
        auto t = triality_components(alg, random_proper_similitude(alg, g, ctx), ctx);
        return to_double(verify_triality(alg, t, ctx));
      }
      if constexpr (is_exact_v<S>) {
        auto t = random_proper_similitude_with_triality(alg, g, ctx);
        return to_double(verify_triality(alg, t, ctx));
      } else {
        auto known = random_proper_similitude_with_triality(alg, g, ctx);
        TrialitySolverOptions opts;
        opts.seed = g();
        auto t = triality_components(alg, known.phi, ctx, opts);
        return verify_triality(alg, t, ctx) / detail::product_scale(alg, t.phi);
      }
    };
  fail(ErrorKind::ParseError, "unknown oracle property '" + property + "'");
}

json cmd_oracle(Session& s, const std::string& property, int dim, const std::string& params,
                const std::string& backend, int trials) {
  io::AlgebraSpec spec;
  spec.backend = io::parse_backend(backend);
  if (!params.empty()) {
    spec.params = scalar_list(params);
  } else {
    for (int d = dim; d > 1; d /= 2) spec.params.push_back("-1");
  }
  Report r;
  r.backend = spec.backend;
  r.inputs = {{"property", property}, {"params", spec.params}, {"trials", trials}};
  r.result = with_backend(spec, [&](const auto& alg) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    auto trial = oracle_trial<S>(property, alg, s.ctx);
    Rng rng(s.seed);
    int violations = 0, errors = 0;
    double worst = 0;
    for (int k = 0; k < trials; ++k) {
      try {
        double d = trial(rng);
        worst = std::max(worst, d);
        bool bad = is_exact_v<S> ? d != 0.0 : d > s.ctx.residual;
        violations += bad;
      } catch (const Error&) {
        ++errors;
      }
    }
    r.verdict = violations == 0 && errors == 0 ? "pass" : "fail";
    r.residuals["max_deviation"] = to_string(worst);
    return json{{"trials", trials}, {"violations", violations}, {"errors", errors}};
  });
  return r.finish(s);
}

// ---------------------------------------------------------------------------
// Batch classification

json cmd_batch_classify(Session& s, int count, const std::string& sampler, const std::string& backend) {
  Report r;
  r.inputs = {{"count", count}, {"sampler", sampler}};
  io::AlgebraSpec spec;
  spec.backend = io::parse_backend(backend);
  spec.params = json::array({"-1", "-1"});
  r.backend = spec.backend;
  std::map<std::string, int> classes{{"1,1", 0}, {"-1,1", 0}, {"1,-1", 0}, {"-1,-1", 0}};
  std::map<std::string, int> verdicts;
  json failures = json::array();
  double worst = 0;
  r.result = with_backend(spec, [&](const auto& alg) -> json {
    using S = typename std::decay_t<decltype(alg.norm_diagonal())>::value_type;
    if (sampler != "composition" && sampler != "quaternion")
      fail(ErrorKind::ParseError, "sampler must be quaternion or composition");
    if (sampler == "quaternion") require_approx<S>("quaternion batch classification");
    Rng rng(s.seed);
    for (int k = 0; k < count; ++k) {
      try {
        Isotope<S> iso;
        if (sampler == "composition") {
          Matrix<S> al = random_proper_similitude(alg, rng, s.ctx), be = random_proper_similitude(alg, rng, s.ctx);
          if (std::bernoulli_distribution(0.5)(rng)) al = al * alg.kappa();
          if (std::bernoulli_distribution(0.5)(rng)) be = be * alg.kappa();
          iso = {al, be};
        } else {
          iso = {random_invertible(alg, rng, s.ctx), random_invertible(alg, rng, s.ctx)};
        }
        auto phi = random_proper_similitude(alg, rng, s.ctx);
        auto moved = transport(alg, iso, triality_components(alg, phi, s.ctx), s.ctx).target;
        IsotopeClass cls;
        std::string verdict;
        if (sampler == "composition") {
          auto f1 = comp_canonical(alg, iso, s.ctx).form;
          auto f2 = comp_canonical(alg, moved, s.ctx).form;
          cls = f1.cls;
          verdict = comp_iso_test(alg, f1, f2, s.ctx) ? "isomorphic" : "not-isomorphic";
        } else if constexpr (!is_exact_v<S>) {
          auto f1 = quaternion_canonical(alg, iso, s.ctx);
          auto f2 = quaternion_canonical(alg, moved, s.ctx);
          cls = f1.form.cls;
          auto t = quat_iso_test(alg, f1.form, f2.form, s.ctx);
          verdict = to_string(t.verdict);
          worst = std::max({worst, t.residual, f1.residual, f2.residual});
        }
        classes[std::to_string(cls.i) + "," + std::to_string(cls.j)]++;
        verdicts[verdict]++;
        if (verdict == "inconclusive") failures.push_back(json{{"item", k}, {"verdict", verdict}});
      } catch (const Error& e) {
        failures.push_back(json{{"item", k}, {"error", std::string(to_string(e.kind()))}, {"message", e.what()}});
      }
    }
    json cj = json::object();
    for (const auto& key : {"1,1", "-1,1", "1,-1", "-1,-1"}) cj[key] = classes[key];
    json vj = json::object();
    for (const auto& [k, v] : verdicts) vj[k] = v;
    r.residuals["max_witness"] = to_string(worst);
    return json{{"count", count}, {"classes", cj}, {"verdicts", vj}, {"issues", failures}};
  });
  r.verdict = failures.empty() ? "complete" : "complete-with-issues";
  return r.finish(s);
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return 2;
    case ErrorKind::BackendMismatch: return 3;
    case ErrorKind::TrialitySolverFailed: return 4;
    default: return 1;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Session s;
  CLI::App app{"Hurwitz algebras, principal isotopes and their classification"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--algebra", s.algebra_files, "algebra JSON file (repeatable)");
  double tol = 0;
  app.add_option("--tol", tol, "residual tolerance (overrides ISOTOPE_TOL)");
  app.add_option("--seed", s.seed, "random seed");

  // Option holders.
  std::string params, backend = "exact", id = "A", file, other, coords_opt, times, kind, alpha, beta, ua, ub, phi,
                      triple, mode = "quaternion", pa, pb, pa2, pb2, property, sampler = "quaternion";
  int dim = 4, restarts = 16, trials = 100, count = 10;
  bool random = false;
  std::function<json()> action;

  auto* alg_cmd = app.add_subcommand("algebra", "construct algebras")->require_subcommand(1);
  auto* alg_new = alg_cmd->add_subcommand("new", "Cayley-Dickson algebra from parameters");
  alg_new->add_option("--params", params, "comma-separated parameters, e.g. --params=-1,-1");
  alg_new->add_option("--dim", dim, "dimension with all parameters -1 when --params is absent");
  alg_new->add_option("--backend", backend, "exact or approx");
  alg_new->add_option("--id", id, "algebra id");
  alg_new->callback([&] { action = [&] { return cmd_algebra_new(s, params, dim, backend, id); }; });

  auto* el_cmd = app.add_subcommand("element", "element data: norm, trace, conjugate, inverse, products");
  el_cmd->add_option("--element", file, "element JSON");
  el_cmd->add_option("--coords", coords_opt, "comma-separated coordinates");
  el_cmd->add_option("--times", times, "right factor (coordinates or JSON)");
  el_cmd->callback([&] { action = [&] { return cmd_element(s, file, coords_opt, times); }; });

  auto* map_cmd = app.add_subcommand("map", "build a linear map");
  map_cmd->add_option("--kind", kind, "identity|kappa|left|right|diag|random-invertible|random-similitude")->required();
  map_cmd->add_option("--coords", coords_opt, "element for left/right, diagonal for diag");
  map_cmd->callback([&] { action = [&] { return cmd_map(s, kind, coords_opt); }; });

  auto* iso_cmd = app.add_subcommand("isotope", "principal isotopes")->require_subcommand(1);
  auto* iso_new = iso_cmd->add_subcommand("new", "isotope from two maps");
  iso_new->add_option("--alpha", alpha, "alpha map JSON");
  iso_new->add_option("--beta", beta, "beta map JSON");
  iso_new->add_option("--unital-a", ua, "build (R_a^-1, L_b^-1): coordinates of a");
  iso_new->add_option("--unital-b", ub, "coordinates of b");
  iso_new->add_flag("--random", random, "random invertible maps from --seed");
  iso_new->callback([&] { action = [&] { return cmd_isotope_new(s, alpha, beta, ua, ub, random); }; });
  auto* iso_id = iso_cmd->add_subcommand("identity", "identity element, if unital");
  iso_id->add_option("--isotope", file)->required();
  iso_id->callback([&] { action = [&] { return cmd_isotope_identity(s, file); }; });
  auto* iso_ds = iso_cmd->add_subcommand("double-sign", "determinant cosets of (alpha, beta)");
  iso_ds->add_option("--isotope", file)->required();
  iso_ds->callback([&] { action = [&] { return cmd_isotope_double_sign(s, file); }; });
  auto* iso_same = iso_cmd->add_subcommand("same", "literal equality of two multiplications");
  iso_same->add_option("--isotope", file)->required();
  iso_same->add_option("--other", other)->required();
  iso_same->callback([&] { action = [&] { return cmd_isotope_same(s, file, other); }; });
  auto* iso_tr = iso_cmd->add_subcommand("transport", "move an isotope along a similitude");
  iso_tr->add_option("--isotope", file)->required();
  iso_tr->add_option("--phi", phi, "similitude JSON (triple solved on the fly)");
  iso_tr->add_option("--triple", triple, "verified triality triple JSON");
  iso_tr->add_option("--restarts", restarts);
  iso_tr->callback([&] { action = [&] { return cmd_isotope_transport(s, file, phi, triple, restarts); }; });

  auto* sim_cmd = app.add_subcommand("similitude", "similitudes")->require_subcommand(1);
  auto* sim_check = sim_cmd->add_subcommand("check", "certify a similitude");
  sim_check->add_option("--map", file)->required();
  sim_check->callback([&] { action = [&] { return cmd_similitude_check(s, file); }; });

  auto* tri_cmd = app.add_subcommand("triality", "triality components")->require_subcommand(1);
  auto* tri_solve = tri_cmd->add_subcommand("solve", "compute (phi1, phi2)");
  tri_solve->add_option("--map", file)->required();
  tri_solve->add_option("--restarts", restarts);
  tri_solve->callback([&] { action = [&] { return cmd_triality_solve(s, file, restarts); }; });
  auto* tri_verify = tri_cmd->add_subcommand("verify", "recheck a triple");
  tri_verify->add_option("--triple", file)->required();
  tri_verify->callback([&] { action = [&] { return cmd_triality_verify(s, file); }; });
  auto* tri_align = tri_cmd->add_subcommand("align", "nuclear element relating two triples");
  tri_align->add_option("--triple", file)->required();
  tri_align->add_option("--other", other)->required();
  tri_align->callback([&] { action = [&] { return cmd_triality_align(s, file, other); }; });

  auto* polar_cmd = app.add_subcommand("polar", "alpha = zeta delta lambda");
  polar_cmd->add_option("--map", file)->required();
  polar_cmd->callback([&] { action = [&] { return cmd_polar(s, file); }; });

  auto* so4_cmd = app.add_subcommand("so4-factor", "zeta = L_p R_q with unit p, q");
  so4_cmd->add_option("--map", file)->required();
  so4_cmd->callback([&] { action = [&] { return cmd_so4_factor(s, file); }; });

  auto* cls_cmd = app.add_subcommand("classify", "canonical forms")->require_subcommand(1);
  auto* cls_q = cls_cmd->add_subcommand("quaternion", "isotopes of Euclidean quaternions");
  cls_q->add_option("--isotope", file)->required();
  cls_q->callback([&] { action = [&] { return cmd_classify_quaternion(s, file); }; });
  auto* cls_c = cls_cmd->add_subcommand("composition", "composition isotopes of quaternion algebras");
  cls_c->add_option("--isotope", file)->required();
  cls_c->callback([&] { action = [&] { return cmd_classify_composition(s, file); }; });

  auto* iso_test = app.add_subcommand("iso-test", "isomorphism test between isotopes or canonical forms");
  iso_test->add_option("--isotope", file)->required();
  iso_test->add_option("--other", other)->required();
  iso_test->add_option("--mode", mode, "quaternion or composition");
  iso_test->callback([&] { action = [&] { return cmd_iso_test(s, file, other, mode); }; });

  auto* pc = app.add_subcommand("pair-conjugacy", "simultaneous conjugacy of quaternion pairs");
  pc->add_option("--a", pa)->required();
  pc->add_option("--b", pb)->required();
  pc->add_option("--a2", pa2)->required();
  pc->add_option("--b2", pb2)->required();
  pc->callback([&] { action = [&] { return cmd_pair_conjugacy(s, pa, pb, pa2, pb2); }; });

  auto* oracle = app.add_subcommand("oracle", "check an identity on random inputs");
  oracle->add_option("property", property,
                     "norm-multiplicativity|alternativity|moufang|conjugation|quadratic|inverse|multiplier|identity|"
                     "triality")
      ->required();
  oracle->add_option("--dim", dim);
  oracle->add_option("--params", params);
  oracle->add_option("--backend", backend);
  oracle->add_option("--trials", trials);
  oracle->callback([&] { action = [&] { return cmd_oracle(s, property, dim, params, backend, trials); }; });

  auto* batch = app.add_subcommand("batch", "batch drivers")->require_subcommand(1);
  auto* batch_cls = batch->add_subcommand("classify", "classify random samples");
  batch_cls->add_option("--count", count);
  batch_cls->add_option("--sampler", sampler, "quaternion or composition");
  batch_cls->add_option("--backend", backend);
  batch_cls->callback([&] {
    if (sampler == "quaternion" && backend == "exact" && !batch_cls->count("--backend")) backend = "approx";
    action = [&] { return cmd_batch_classify(s, count, sampler, backend); };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    s.ctx = ToleranceContext::from_env();
    if (tol > 0) {
      s.ctx.residual = tol;
      s.ctx.eq = std::min(s.ctx.eq, tol);
      s.ctx.validate();
    }
    s.load_algebras();
    std::vector<std::string> path;
    for (const CLI::App* c = &app; c != nullptr;) {
      auto subs = c->get_subcommands();
      if (subs.empty()) break;
      path.push_back(subs.front()->get_name());
      c = subs.front();
    }
    for (size_t i = 0; i < path.size(); ++i) s.op += (i ? " " : "") + path[i];
    if (!action) fail(ErrorKind::ParseError, "no command");
    out << action().dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    err << json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump() << "\n";
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    err << json{{"error", "ParseError"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
}

}  // namespace hurwitz::cli
