#include "predreg/config.hpp"

#include <algorithm>
#include <initializer_list>
#include <string_view>

#include "predreg/error.hpp"

namespace predreg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(Errc::Config, path + ": " + what);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<std::string_view> known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      fail(path + "." + it.key(), "unknown field");
    }
  }
}

const json& required(const json& j, const std::string& path, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double number_or(const json& j, const std::string& path, const std::string& key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, path + "." + key);
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Translate library validation errors into path-qualified config errors.
template <class Fn>
auto at_path(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == Errc::Config) throw;
    fail(path, e.what());
  }
}

}  // namespace

PersistenceRule rule_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = string(required(j, path, "rule"), path + ".rule");
  PersistenceRule r;
  if (kind == "stat") {
    reject_unknown(j, path, {"rule", "rho"});
    r = PersistenceRule::stationary(number(required(j, path, "rho"), path + ".rho"));
  } else if (kind == "mi") {
    reject_unknown(j, path, {"rule", "c", "a"});
    const double c = number(required(j, path, "c"), path + ".c");
    const double a = number(required(j, path, "a"), path + ".a");
    r = at_path(path, [&] { return PersistenceRule::mildly_integrated(c, a); });
  } else if (kind == "lur") {
    reject_unknown(j, path, {"rule", "c"});
    r = PersistenceRule::local_to_unity(number(required(j, path, "c"), path + ".c"));
  } else if (kind == "unit") {
    reject_unknown(j, path, {"rule"});
    r = PersistenceRule::unit_root();
  } else {
    fail(path + ".rule", "expected one of stat, mi, lur, unit");
  }
  return r;
}

json to_json(const PersistenceRule& rule) {
  switch (rule.kind) {
    case PersistenceRule::Kind::Stationary: return {{"rule", "stat"}, {"rho", rule.rho}};
    case PersistenceRule::Kind::MildlyIntegrated: return {{"rule", "mi"}, {"c", rule.c}, {"a", rule.a}};
    case PersistenceRule::Kind::LocalToUnity: return {{"rule", "lur"}, {"c", rule.c}};
    case PersistenceRule::Kind::UnitRoot: return {{"rule", "unit"}};
  }
  return {};
}

InnovationLaw law_from_json(const json& j, const std::string& path) {
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else {
    expect_object(j, path);
    reject_unknown(j, path, {"kind", "df"});
    kind = string(required(j, path, "kind"), path + ".kind");
  }
  if (kind == "gaussian") return InnovationLaw::gaussian();
  if (kind == "laplace") return InnovationLaw::laplace();
  if (kind == "student_t") {
    if (!j.is_object()) fail(path, "student_t needs an object with df");
    const auto df = integer(required(j, path, "df"), path + ".df");
    return at_path(path + ".df", [&] { return InnovationLaw::student_t(static_cast<int>(df)); });
  }
  fail(path, "expected gaussian, laplace or student_t");
}

json to_json(const InnovationLaw& law) {
  switch (law.kind()) {
    case InnovationLaw::Kind::Gaussian: return "gaussian";
    case InnovationLaw::Kind::Laplace: return "laplace";
    case InnovationLaw::Kind::StudentT: return {{"kind", "student_t"}, {"df", law.df()}};
  }
  return {};
}

RegressionFunction function_from_json(const json& j, const std::string& path) {
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
    if (kind == "zero") return RegressionFunction::zero();
    fail(path, "only 'zero' may be given as a bare string");
  }
  expect_object(j, path);
  kind = string(required(j, path, "kind"), path + ".kind");
  if (kind == "zero") {
    reject_unknown(j, path, {"kind"});
    return RegressionFunction::zero();
  }
  if (kind == "constant") {
    reject_unknown(j, path, {"kind", "theta"});
    return RegressionFunction::constant(number(required(j, path, "theta"), path + ".theta"));
  }
  if (kind == "linear") {
    reject_unknown(j, path, {"kind", "slope", "cap"});
    const double slope = number(required(j, path, "slope"), path + ".slope");
    const double cap = number_or(j, path, "cap", 1e300);
    return RegressionFunction::linear(slope, cap);
  }
  if (kind == "logistic") {
    reject_unknown(j, path, {"kind", "scale"});
    return RegressionFunction::logistic(number(required(j, path, "scale"), path + ".scale"));
  }
  if (kind == "sine") {
    reject_unknown(j, path, {"kind", "freq"});
    return RegressionFunction::sine(number(required(j, path, "freq"), path + ".freq"));
  }
  fail(path + ".kind", "expected zero, constant, linear, logistic or sine");
}

json to_json(const RegressionFunction& m) {
  switch (m.kind) {
    case RegressionFunction::Kind::Zero: return {{"kind", "zero"}};
    case RegressionFunction::Kind::Constant: return {{"kind", "constant"}, {"theta", m.p1}};
    case RegressionFunction::Kind::Linear: return {{"kind", "linear"}, {"slope", m.p1}, {"cap", m.p2}};
    case RegressionFunction::Kind::Logistic: return {{"kind", "logistic"}, {"scale", m.p1}};
    case RegressionFunction::Kind::Sine: return {{"kind", "sine"}, {"freq", m.p1}};
  }
  return {};
}

BandwidthRule bandwidth_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"rule", "c_h", "gamma", "lower_exponent", "upper_exponent"});
  BandwidthRule b;
  const std::string kind = string(required(j, path, "rule"), path + ".rule");
  if (kind == "deterministic") {
    b.kind = BandwidthRule::Kind::Deterministic;
  } else if (kind == "data_driven") {
    b.kind = BandwidthRule::Kind::DataDriven;
  } else {
    fail(path + ".rule", "expected deterministic or data_driven");
  }
  b.c_h = number_or(j, path, "c_h", b.c_h);
  b.gamma = number_or(j, path, "gamma", b.gamma);
  b.lower_exponent = number_or(j, path, "lower_exponent", b.lower_exponent);
  b.upper_exponent = number_or(j, path, "upper_exponent", b.upper_exponent);
  if (!(b.c_h > 0.0)) fail(path + ".c_h", "must be positive");
  return b;
}

json to_json(const BandwidthRule& rule) {
  return {{"rule", rule.kind == BandwidthRule::Kind::Deterministic ? "deterministic" : "data_driven"},
          {"c_h", rule.c_h},
          {"gamma", rule.gamma},
          {"lower_exponent", rule.lower_exponent},
          {"upper_exponent", rule.upper_exponent}};
}

DgpSpec dgp_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"m", "persistence", "filter", "eps_law", "u_law", "sigma_u", "n", "delta", "cbar"});
  DgpSpec s;
  s.m = function_from_json(required(j, path, "m"), path + ".m");
  s.sigma_u = number(required(j, path, "sigma_u"), path + ".sigma_u");
  if (auto it = j.find("persistence"); it != j.end()) s.persistence = rule_from_json(*it, path + ".persistence");
  if (auto it = j.find("filter"); it != j.end()) {
    auto coefs = number_list(*it, path + ".filter");
    s.filter = at_path(path + ".filter", [&] { return LinearFilter(std::move(coefs)); });
  }
  if (auto it = j.find("eps_law"); it != j.end()) s.eps_law = law_from_json(*it, path + ".eps_law");
  if (auto it = j.find("u_law"); it != j.end()) s.u_law = law_from_json(*it, path + ".u_law");
  if (auto it = j.find("n"); it != j.end()) s.n = integer(*it, path + ".n");
  s.persistence.delta = number_or(j, path, "delta", s.persistence.delta);
  s.persistence.cbar = number_or(j, path, "cbar", s.persistence.cbar);
  if (!(s.sigma_u >= 0.0)) fail(path + ".sigma_u", "must be nonnegative");
  return s;
}

json to_json(const DgpSpec& spec) {
  return {{"m", to_json(spec.m)},
          {"persistence", to_json(spec.persistence)},
          {"filter", std::vector<double>(spec.filter.coefficients().begin(), spec.filter.coefficients().end())},
          {"eps_law", to_json(spec.eps_law)},
          {"u_law", to_json(spec.u_law)},
          {"sigma_u", spec.sigma_u},
          {"n", spec.n},
          {"delta", spec.persistence.delta},
          {"cbar", spec.persistence.cbar}};
}

ExperimentConfig experiment_from_json(const json& j) {
  const std::string root = "$";
  expect_object(j, root);
  reject_unknown(j, root, {"dgp", "rho_grid", "n_grid", "reps", "alpha", "kernel", "bandwidth", "points",
                           "density", "master_seed", "workers", "self_test"});
  ExperimentConfig c;
  c.base = dgp_from_json(required(j, root, "dgp"), "$.dgp");

  const json& grid = required(j, root, "rho_grid");
  if (!grid.is_array()) fail("$.rho_grid", "expected an array");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    c.rho_grid.push_back(rule_from_json(grid[i], "$.rho_grid[" + std::to_string(i) + "]"));
  }
  const json& ns = required(j, root, "n_grid");
  if (!ns.is_array()) fail("$.n_grid", "expected an array");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    c.n_grid.push_back(integer(ns[i], "$.n_grid[" + std::to_string(i) + "]"));
  }
  c.reps = integer(required(j, root, "reps"), "$.reps");
  c.alpha = number_or(j, root, "alpha", c.alpha);
  if (auto it = j.find("kernel"); it != j.end()) {
    const std::string name = string(*it, "$.kernel");
    c.kernel = at_path("$.kernel", [&] { return Kernel::from_name(name); });
  }
  if (auto it = j.find("bandwidth"); it != j.end()) c.bandwidth = bandwidth_from_json(*it, "$.bandwidth");
  if (auto it = j.find("points"); it != j.end()) c.points = number_list(*it, "$.points");
  if (auto it = j.find("density"); it != j.end()) {
    const std::string path = "$.density";
    expect_object(*it, path);
    reject_unknown(*it, path, {"grid", "c_h", "gamma", "oracle"});
    if (auto g = it->find("grid"); g != it->end()) c.density.grid = number_list(*g, path + ".grid");
    c.density.c_h = number_or(*it, path, "c_h", c.density.c_h);
    c.density.gamma = number_or(*it, path, "gamma", c.density.gamma);
    if (auto o = it->find("oracle"); o != it->end()) {
      const std::string op = path + ".oracle";
      expect_object(*o, op);
      reject_unknown(*o, op, {"steps", "paths", "bandwidth"});
      if (auto f = o->find("steps"); f != o->end()) c.density.oracle.steps = integer(*f, op + ".steps");
      if (auto f = o->find("paths"); f != o->end()) c.density.oracle.paths = integer(*f, op + ".paths");
      c.density.oracle.bandwidth = number_or(*o, op, "bandwidth", c.density.oracle.bandwidth);
    }
  }
  if (auto it = j.find("master_seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      fail("$.master_seed", "expected a nonnegative integer");
    }
    c.master_seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("workers"); it != j.end()) {
    const auto w = integer(*it, "$.workers");
    if (w < 0) fail("$.workers", "must be nonnegative");
    c.workers = static_cast<unsigned>(w);
  }
  if (auto it = j.find("self_test"); it != j.end()) {
    if (!it->is_boolean()) fail("$.self_test", "expected a boolean");
    c.self_test = it->get<bool>();
  }
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json grid = json::array();
  for (const auto& r : c.rho_grid) grid.push_back(to_json(r));
  json dgp = to_json(c.base);
  dgp.erase("n");
  dgp.erase("persistence");
  return {{"dgp", dgp},
          {"rho_grid", grid},
          {"n_grid", c.n_grid},
          {"reps", c.reps},
          {"alpha", c.alpha},
          {"kernel", c.kernel.name()},
          {"bandwidth", to_json(c.bandwidth)},
          {"points", c.points},
          {"density",
           {{"grid", c.density.grid},
            {"c_h", c.density.c_h},
            {"gamma", c.density.gamma},
            {"oracle",
             {{"steps", c.density.oracle.steps},
              {"paths", c.density.oracle.paths},
              {"bandwidth", c.density.oracle.bandwidth}}}}},
          {"master_seed", c.master_seed},
          {"workers", c.workers},
          {"self_test", c.self_test}};
}

std::uint64_t experiment_digest(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("workers");
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace predreg
