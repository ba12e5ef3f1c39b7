#include "aoii/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>

namespace aoii {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Config, (where.empty() ? std::string("/") : where) + ": " + what);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) fail(where + "/" + item.key(), "unknown field");
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where + "/" + key, "required field is missing");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where, "expected a finite number");
  return d;
}

double positive(const json& v, const std::string& where) {
  const double d = number(v, where);
  if (!(d > 0)) fail(where, "must be positive");
  return d;
}

int count(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

std::uint64_t unsigned_count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(where, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

// Threshold entry: number >= 0 or null for "never".
double threshold(const json& v, const std::string& where) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  const double d = number(v, where);
  if (d < 0) fail(where, "thresholds must be nonnegative");
  return d;
}

json threshold_json(double t) { return std::isfinite(t) ? json(t) : json(nullptr); }

// Library errors raised while building objects are reported at `where`.
template <class F>
auto at_path(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(where, e.what());
  }
}

Matrix matrix_from(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of rows");
  const Eigen::Index n = static_cast<Eigen::Index>(v.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    const std::string rw = where + "/" + std::to_string(i);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) fail(rw, "expected a row of length " + std::to_string(n));
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = number(row[static_cast<std::size_t>(k)], rw + "/" + std::to_string(k));
  }
  return m;
}

SolverConfig solver_from(const json& v, const std::string& where) {
  allow_keys(v, where, {"eps_lambda", "eps_tau", "eps_eta", "grid_step", "tau_max", "lambda_max", "lambda_cap",
                        "grid_cap", "gamma_max", "audit_step", "max_iterations", "max_bisections"});
  SolverConfig c;
  auto set = [&](const char* key, double& field) {
    if (v.contains(key)) field = positive(v.at(key), where + "/" + key);
  };
  set("eps_lambda", c.eps_lambda);
  set("eps_tau", c.eps_tau);
  set("eps_eta", c.eps_eta);
  set("grid_step", c.grid_step);
  set("tau_max", c.tau_max);
  set("lambda_max", c.lambda_max);
  set("lambda_cap", c.lambda_cap);
  set("grid_cap", c.grid_cap);
  set("gamma_max", c.gamma_max);
  set("audit_step", c.audit_step);
  if (v.contains("max_iterations")) c.max_iterations = count(v.at("max_iterations"), where + "/max_iterations");
  if (v.contains("max_bisections")) c.max_bisections = count(v.at("max_bisections"), where + "/max_bisections");
  at_path(where, [&] {
    validate(c);
    return 0;
  });
  return c;
}

std::vector<double> values_from(const json& v, const std::string& where) {
  allow_keys(v, where, {"axis", "values", "range", "families", "simulate"});
  std::vector<double> out;
  if (v.contains("values")) {
    const json& vals = v.at("values");
    if (!vals.is_array()) fail(where + "/values", "expected an array");
    for (std::size_t k = 0; k < vals.size(); ++k) out.push_back(number(vals[k], where + "/values/" + std::to_string(k)));
  } else if (v.contains("range")) {
    const json& r = v.at("range");
    const std::string rw = where + "/range";
    allow_keys(r, rw, {"start", "stop", "step"});
    const double start = number(require(r, rw, "start"), rw + "/start");
    const double stop = number(require(r, rw, "stop"), rw + "/stop");
    const double step = positive(require(r, rw, "step"), rw + "/step");
    if (stop < start) fail(rw, "stop < start");
    const long steps = std::lround(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= steps; ++k) out.push_back(start + static_cast<double>(k) * step);
  } else {
    fail(where, "either 'values' or 'range' is required");
  }
  if (out.empty()) fail(where, "sweep range is empty");
  return out;
}

}  // namespace

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Tau: return "tau";
    case SweepAxis::Budget: return "budget";
    case SweepAxis::States: return "n";
    case SweepAxis::Mu: return "mu";
  }
  return "unknown";
}

Generator build_source(const json& spec, std::optional<int> n_override) {
  const std::string where = "/source";
  if (!spec.is_object()) fail(where, "expected an object");
  const json& type_v = require(spec, where, "type");
  if (!type_v.is_string()) fail(where + "/type", "expected a string");
  const std::string type = type_v.get<std::string>();
  if (type == "matrix") {
    allow_keys(spec, where, {"type", "matrix"});
    if (n_override) fail(where, "a sweep over n needs a symmetric or spread source");
    const Matrix q = matrix_from(require(spec, where, "matrix"), where + "/matrix");
    return at_path(where + "/matrix", [&] { return Generator::validate(q); });
  }
  if (type == "symmetric") {
    allow_keys(spec, where, {"type", "n", "sigma"});
    const int n = n_override.value_or(count(require(spec, where, "n"), where + "/n"));
    const double sigma = positive(require(spec, where, "sigma"), where + "/sigma");
    return at_path(where, [&] { return make_symmetric(n, sigma); });
  }
  if (type == "binary") {
    allow_keys(spec, where, {"type", "sigma1", "sigma2"});
    if (n_override) fail(where, "a sweep over n needs a symmetric or spread source");
    const double s1 = positive(require(spec, where, "sigma1"), where + "/sigma1");
    const double s2 = positive(require(spec, where, "sigma2"), where + "/sigma2");
    return at_path(where, [&] { return make_binary(s1, s2); });
  }
  if (type == "spread") {
    allow_keys(spec, where, {"type", "n", "sigma_min", "sigma_max", "p_min", "p_max"});
    const int n = n_override.value_or(count(require(spec, where, "n"), where + "/n"));
    const double smin = positive(require(spec, where, "sigma_min"), where + "/sigma_min");
    const double smax = positive(require(spec, where, "sigma_max"), where + "/sigma_max");
    const double pmin = number(require(spec, where, "p_min"), where + "/p_min");
    const double pmax = number(require(spec, where, "p_max"), where + "/p_max");
    return at_path(where, [&] { return make_spread(n, smin, smax, pmin, pmax); });
  }
  fail(where + "/type", "unknown source type '" + type + "' (matrix, symmetric, binary, spread)");
}

json to_json(const Policy& p) {
  return std::visit(
      [](const auto& pol) -> json {
        using T = std::decay_t<decltype(pol)>;
        if constexpr (std::is_same_v<T, Esat>) {
          json rows = json::array();
          for (Eigen::Index j = 0; j < pol.thresholds.rows(); ++j) {
            json row = json::array();
            for (Eigen::Index i = 0; i < pol.thresholds.cols(); ++i)
              row.push_back(i == j ? json(nullptr) : threshold_json(pol.thresholds(j, i)));
            rows.push_back(std::move(row));
          }
          return {{"family", "esat"}, {"thresholds", std::move(rows)}};
        } else if constexpr (std::is_same_v<T, Eat>) {
          json row = json::array();
          for (double t : pol.thresholds) row.push_back(threshold_json(t));
          return {{"family", "eat"}, {"thresholds", std::move(row)}};
        } else if constexpr (std::is_same_v<T, St>) {
          return {{"family", "st"}, {"threshold", threshold_json(pol.threshold)}};
        } else {
          return {{"family", "ps"}, {"intensity", pol.intensity}};
        }
      },
      p);
}

Policy policy_from_json(const json& v, Eigen::Index n, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object");
  const json& fam = require(v, where, "family");
  if (!fam.is_string()) fail(where + "/family", "expected a string");
  const Family family = at_path(where + "/family", [&] { return parse_family(fam.get<std::string>()); });
  switch (family) {
    case Family::Esat: {
      allow_keys(v, where, {"family", "thresholds"});
      const std::string tw = where + "/thresholds";
      const json& rows = require(v, where, "thresholds");
      if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
        fail(tw, "expected " + std::to_string(n) + " rows");
      }
      Matrix t = Matrix::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const json& row = rows[static_cast<std::size_t>(j)];
        const std::string rw = tw + "/" + std::to_string(j);
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
          fail(rw, "expected a row of length " + std::to_string(n));
        }
        for (Eigen::Index i = 0; i < n; ++i)
          if (i != j) t(j, i) = threshold(row[static_cast<std::size_t>(i)], rw + "/" + std::to_string(i));
      }
      return Esat{t};
    }
    case Family::Eat: {
      allow_keys(v, where, {"family", "thresholds"});
      const std::string tw = where + "/thresholds";
      const json& row = require(v, where, "thresholds");
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        fail(tw, "expected " + std::to_string(n) + " thresholds");
      }
      Vector t(n);
      for (Eigen::Index j = 0; j < n; ++j) t[j] = threshold(row[static_cast<std::size_t>(j)], tw + "/" + std::to_string(j));
      return Eat{t};
    }
    case Family::St:
      allow_keys(v, where, {"family", "threshold"});
      return St{threshold(require(v, where, "threshold"), where + "/threshold")};
    case Family::Ps: {
      allow_keys(v, where, {"family", "intensity"});
      const double g = number(require(v, where, "intensity"), where + "/intensity");
      if (g < 0) fail(where + "/intensity", "must be nonnegative");
      return Ps{g};
    }
  }
  fail(where, "unreachable");
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  allow_keys(doc, "", {"$schema", "source", "channel", "budget", "family", "policy", "policy_file", "solver",
                       "simulation", "sweep", "output"});
  const json& schema = require(doc, "", "$schema");
  if (!schema.is_string() || schema.get<std::string>() != kConfigSchema) {
    fail("/$schema", std::string("expected \"") + kConfigSchema + "\"");
  }
  const json& src = require(doc, "", "source");
  Generator g = build_source(src);

  const json& chan = require(doc, "", "channel");
  allow_keys(chan, "/channel", {"mu"});
  const double mu = positive(require(chan, "/channel", "mu"), "/channel/mu");

  RunConfig cfg{.source_spec = src, .source = g, .channel = make_channel(mu)};
  if (doc.contains("budget")) {
    const double b = number(doc.at("budget"), "/budget");
    if (b < 0) fail("/budget", "must be nonnegative");
    cfg.budget = b;
  }
  if (doc.contains("family")) {
    const json& f = doc.at("family");
    if (!f.is_string()) fail("/family", "expected a string");
    cfg.family = at_path("/family", [&] { return parse_family(f.get<std::string>()); });
  }
  if (doc.contains("policy") && doc.contains("policy_file")) {
    fail("/policy_file", "give either 'policy' or 'policy_file', not both");
  }
  if (doc.contains("policy")) cfg.policy = policy_from_json(doc.at("policy"), g.size());
  if (doc.contains("policy_file")) {
    const json& pf = doc.at("policy_file");
    if (!pf.is_string()) fail("/policy_file", "expected a path string");
    std::filesystem::path path = pf.get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    std::ifstream in(path);
    if (!in) fail("/policy_file", "cannot open '" + path.string() + "'");
    json artifact;
    try {
      artifact = json::parse(in);
    } catch (const json::parse_error& e) {
      fail("/policy_file", std::string("invalid JSON: ") + e.what());
    }
    const json& pol = artifact.contains("policy") ? artifact.at("policy") : artifact;
    cfg.policy = policy_from_json(pol, g.size(), "/policy_file#/policy");
  }
  if (doc.contains("solver")) cfg.solver = solver_from(doc.at("solver"), "/solver");
  if (doc.contains("simulation")) {
    const json& s = doc.at("simulation");
    allow_keys(s, "/simulation", {"cycles", "seed", "trace"});
    if (s.contains("cycles")) {
      cfg.simulation.cycles = unsigned_count(s.at("cycles"), "/simulation/cycles");
      if (cfg.simulation.cycles < 1) fail("/simulation/cycles", "must be at least 1");
    }
    if (s.contains("seed")) cfg.simulation.seed = unsigned_count(s.at("seed"), "/simulation/seed");
    if (s.contains("trace")) {
      if (!s.at("trace").is_boolean()) fail("/simulation/trace", "expected a boolean");
      cfg.simulation.trace = s.at("trace").get<bool>();
    }
  }
  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    SweepSettings sw;
    sw.values = values_from(s, "/sweep");
    const json& axis = require(s, "/sweep", "axis");
    const std::string name = axis.is_string() ? axis.get<std::string>() : "";
    if (name == "tau") sw.axis = SweepAxis::Tau;
    else if (name == "budget") sw.axis = SweepAxis::Budget;
    else if (name == "n") sw.axis = SweepAxis::States;
    else if (name == "mu") sw.axis = SweepAxis::Mu;
    else fail("/sweep/axis", "expected one of tau, budget, n, mu");
    if (s.contains("families")) {
      const json& fams = s.at("families");
      if (!fams.is_array() || fams.empty()) fail("/sweep/families", "expected a non-empty array");
      for (std::size_t k = 0; k < fams.size(); ++k) {
        const std::string fw = "/sweep/families/" + std::to_string(k);
        if (!fams[k].is_string()) fail(fw, "expected a string");
        sw.families.push_back(at_path(fw, [&] { return parse_family(fams[k].get<std::string>()); }));
      }
    } else if (cfg.family) {
      sw.families = {*cfg.family};
    } else {
      sw.families = {Family::St};
    }
    if (s.contains("simulate")) {
      if (!s.at("simulate").is_boolean()) fail("/sweep/simulate", "expected a boolean");
      sw.simulate = s.at("simulate").get<bool>();
    }
    for (std::size_t k = 0; k < sw.values.size(); ++k) {
      const double v = sw.values[k];
      const std::string vw = "/sweep/values/" + std::to_string(k);
      if (sw.axis == SweepAxis::Tau && v < 0) fail(vw, "thresholds must be nonnegative");
      if ((sw.axis == SweepAxis::Budget || sw.axis == SweepAxis::Mu) && !(v > 0)) fail(vw, "must be positive");
      if (sw.axis == SweepAxis::States && (v < 2 || v != std::floor(v))) fail(vw, "must be an integer >= 2");
    }
    if (sw.axis == SweepAxis::States) {
      const std::string type = src.at("type").get<std::string>();
      if (type != "symmetric" && type != "spread") fail("/sweep/axis", "a sweep over n needs a symmetric or spread source");
    }
    cfg.sweep = std::move(sw);
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    allow_keys(o, "/output", {"dir", "format", "timing"});
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) fail("/output/dir", "expected a string");
      cfg.output.dir = o.at("dir").get<std::string>();
    }
    if (o.contains("format")) {
      const json& f = o.at("format");
      if (!f.is_string() || (f != "json" && f != "csv" && f != "both")) fail("/output/format", "expected json, csv or both");
      cfg.output.format = f.get<std::string>();
    }
    if (o.contains("timing")) {
      if (!o.at("timing").is_boolean()) fail("/output/timing", "expected a boolean");
      cfg.output.timing = o.at("timing").get<bool>();
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("invalid JSON in '") + path.string() + "': " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json to_json(const CycleParams& c) {
  return {{"duration", c.duration},
          {"area", c.area},
          {"transmissions", c.transmissions},
          {"next", std::vector<double>(c.next.data(), c.next.data() + c.next.size())}};
}

json to_json(const EvalResult& e) {
  json cycles = json::array();
  for (const auto& c : e.cycles) cycles.push_back(to_json(c));
  return {{"maoii", e.maoii},
          {"rate", e.rate},
          {"pi", std::vector<double>(e.pi.data(), e.pi.data() + e.pi.size())},
          {"cycles", std::move(cycles)}};
}

json to_json(const SolveReport& r) {
  return {{"lambda_star", r.lambda_star},
          {"eta_trace", r.eta_trace},
          {"values", std::vector<double>(r.values.data(), r.values.data() + r.values.size())},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"monotone", r.monotone}};
}

json to_json(const SimResult& r) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"maoii_hat", r.maoii_hat},
          {"rate_hat", r.rate_hat},
          {"stderr_maoii", finite_or_null(r.stderr_maoii)},
          {"stderr_rate", finite_or_null(r.stderr_rate)},
          {"cycle_count", r.cycle_count},
          {"blocks", r.blocks},
          {"max_area_discrepancy", r.max_area_discrepancy}};
}

json to_json(const SolverConfig& c) {
  return {{"eps_lambda", c.eps_lambda}, {"eps_tau", c.eps_tau},       {"eps_eta", c.eps_eta},
          {"grid_step", c.grid_step},   {"tau_max", c.tau_max},       {"lambda_max", c.lambda_max},
          {"lambda_cap", c.lambda_cap}, {"grid_cap", c.grid_cap},     {"gamma_max", c.gamma_max},
          {"audit_step", c.audit_step}, {"max_iterations", c.max_iterations},
          {"max_bisections", c.max_bisections}};
}

}  // namespace aoii
