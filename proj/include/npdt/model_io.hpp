#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "npdt/hopf.hpp"
#include "npdt/model.hpp"

namespace npdt {

using Json = nlohmann::json;

namespace detail {

inline void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& context) {
  if (!j.is_object()) throw Error(ErrorKind::input, context + ": expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw Error(ErrorKind::input, context + ": unknown field '" + key + "'");
}

inline const Json& require_field(const Json& j, const std::string& key, const std::string& context) {
  if (!j.contains(key)) throw Error(ErrorKind::input, context + ": missing field '" + key + "'");
  return j.at(key);
}

inline double as_real(const Json& j, const std::string& what) {
  if (!j.is_number()) throw Error(ErrorKind::input, what + " must be a number");
  return j.get<double>();
}

inline Vector as_vector(const Json& j, Eigen::Index n, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::input, what + " must be an array");
  if (static_cast<Eigen::Index>(j.size()) != n)
    throw Error(ErrorKind::input, what + " must have " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = as_real(j[static_cast<std::size_t>(i)], what);
  return v;
}

inline Matrix as_matrix(const Json& j, Eigen::Index n, const std::string& what) {
  const Vector flat = as_vector(j, n * n, what);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = flat[i * n + k];
  return m;
}

inline Json to_json_array(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace detail

/// Strict model document: n, weights (optional), M (row-major), r, b, c, p, name.
inline ModelSpec model_from_json(const Json& j, const std::string& context = "model") {
  detail::reject_unknown(j, {"n", "weights", "M", "r", "b", "c", "p", "name"}, context);
  const Json& jn = detail::require_field(j, "n", context);
  if (!jn.is_number_integer() || jn.get<long long>() < 1) throw Error(ErrorKind::input, context + ": n must be a positive integer");
  const auto n = static_cast<Eigen::Index>(jn.get<long long>());
  Vector w = Vector::Ones(n);
  if (j.contains("weights")) w = detail::as_vector(j.at("weights"), n, context + ".weights");
  const Matrix m = detail::as_matrix(detail::require_field(j, "M", context), n, context + ".M");
  const Vector r = detail::as_vector(detail::require_field(j, "r", context), n, context + ".r");
  const Vector b = detail::as_vector(detail::require_field(j, "b", context), n, context + ".b");
  const Vector c = detail::as_vector(detail::require_field(j, "c", context), n, context + ".c");
  const double p = detail::as_real(detail::require_field(j, "p", context), context + ".p");
  const Json& jname = detail::require_field(j, "name", context);
  if (!jname.is_string()) throw Error(ErrorKind::input, context + ": name must be a string");
  try {
    return ModelSpec(FellerMatrix(m, Measure(w)), r, b, c, p, jname.get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorKind::input, context + ": " + e.what());
  }
}

inline Json model_to_json(const ModelSpec& spec) {
  Json j;
  j["n"] = spec.n();
  if (!spec.measure().is_unit()) j["weights"] = detail::to_json_array(spec.measure().weights());
  Json m = Json::array();
  for (Eigen::Index i = 0; i < spec.n(); ++i)
    for (Eigen::Index k = 0; k < spec.n(); ++k) m.push_back(spec.M()(i, k));
  j["M"] = m;
  j["r"] = detail::to_json_array(spec.r());
  j["b"] = detail::to_json_array(spec.b());
  j["c"] = detail::to_json_array(spec.c());
  j["p"] = spec.p();
  j["name"] = spec.name();
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::input, "malformed JSON in '" + path + "': " + e.what());
  }
}

inline ModelSpec load_model(const std::string& path) { return model_from_json(read_json_file(path), path); }

/// Family document: base model, affine targets for any of r, b, c, M, a
/// theta range, and an optional r = b coupling.
struct FamilySpec {
  Json base;
  Json targets;
  double theta_lo = 0.0;
  double theta_hi = 1.0;
  bool r_equals_b = false;
};

inline FamilySpec family_from_json(const Json& j, const std::string& context = "family") {
  detail::reject_unknown(j, {"base", "targets", "theta", "r_equals_b"}, context);
  FamilySpec f;
  f.base = detail::require_field(j, "base", context);
  const ModelSpec base = model_from_json(f.base, context + ".base");
  f.targets = j.contains("targets") ? j.at("targets") : Json::object();
  detail::reject_unknown(f.targets, {"r", "b", "c", "M"}, context + ".targets");
  const Eigen::Index n = base.n();
  for (const auto& key : {"r", "b", "c"})
    if (f.targets.contains(key)) detail::as_vector(f.targets.at(key), n, context + ".targets." + key);
  if (f.targets.contains("M")) detail::as_matrix(f.targets.at("M"), n, context + ".targets.M");
  if (j.contains("theta")) {
    const Json& t = j.at("theta");
    if (!t.is_array() || t.size() != 2) throw Error(ErrorKind::input, context + ".theta must be [lo, hi]");
    f.theta_lo = detail::as_real(t[0], context + ".theta");
    f.theta_hi = detail::as_real(t[1], context + ".theta");
    if (!(f.theta_lo < f.theta_hi)) throw Error(ErrorKind::input, context + ".theta needs lo < hi");
  }
  if (j.contains("r_equals_b")) {
    if (!j.at("r_equals_b").is_boolean()) throw Error(ErrorKind::input, context + ".r_equals_b must be boolean");
    f.r_equals_b = j.at("r_equals_b").get<bool>();
  }
  return f;
}

/// theta -> (1 - theta) base + theta target, field by field.
inline ModelFamily make_family(const FamilySpec& f) {
  const ModelSpec base = model_from_json(f.base, "family.base");
  return [base, f](double theta) {
    const Eigen::Index n = base.n();
    auto blend = [&](const Vector& v, const char* key) -> Vector {
      if (!f.targets.contains(key)) return v;
      return (1.0 - theta) * v + theta * detail::as_vector(f.targets.at(key), n, key);
    };
    Matrix m = base.M();
    if (f.targets.contains("M")) m = (1.0 - theta) * m + theta * detail::as_matrix(f.targets.at("M"), n, "M");
    const Vector b = blend(base.b(), "b");
    const Vector r = f.r_equals_b ? b : blend(base.r(), "r");
    return ModelSpec(FellerMatrix(m, base.measure()), r, b, blend(base.c(), "c"), base.p(),
                     base.name() + "@" + std::to_string(theta));
  };
}

}  // namespace npdt
