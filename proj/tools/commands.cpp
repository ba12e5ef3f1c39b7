#include "commands.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace aoii::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Flat ';'-separated policy parameters for CSV cells.
std::string parameters(const Policy& p) {
  std::string out;
  auto add = [&](double v) {
    if (!out.empty()) out += ';';
    out += num(v);
  };
  if (const auto* e = std::get_if<Esat>(&p)) {
    for (Eigen::Index j = 0; j < e->thresholds.rows(); ++j)
      for (Eigen::Index i = 0; i < e->thresholds.cols(); ++i)
        if (i != j) add(e->thresholds(j, i));
  } else if (const auto* e = std::get_if<Eat>(&p)) {
    for (double t : e->thresholds) add(t);
  } else if (const auto* s = std::get_if<St>(&p)) {
    add(s->threshold);
  } else {
    add(std::get<Ps>(p).intensity);
  }
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

class Output {
 public:
  Output(const RunConfig& cfg, const Options& opts)
      : dir_(opts.out_dir.value_or(cfg.output.dir)),
        format_(opts.format.value_or(cfg.output.format)),
        plot_(opts.emit_plot_script) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  bool json_enabled() const { return format_ != "csv"; }
  bool csv_enabled() const { return format_ != "json"; }
  bool has_dir() const { return !dir_.empty(); }

  /// Primary document: JSON (or the main CSV table when only CSV is asked
  /// for) on stdout, plus files when an output directory is configured.
  void emit(const std::string& name, const json& doc, const Table& table, const std::string& plot = {}) const {
    std::cout << (json_enabled() ? doc.dump(2) + "\n" : table.csv());
    if (!has_dir()) return;
    if (json_enabled()) write(name + ".json", doc.dump(2) + "\n");
    if (csv_enabled()) write(name + ".csv", table.csv());
    if (plot_ && !plot.empty()) write(name + ".gp", plot);
  }

  void write(const std::string& file, const std::string& content) const {
    const std::filesystem::path path = std::filesystem::path(dir_) / file;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
    out << content;
  }

 private:
  std::string dir_;
  std::string format_;
  bool plot_;
};

const Policy& require_policy(const RunConfig& cfg, const std::string& command) {
  if (!cfg.policy) throw Error(ErrorKind::Config, "/policy: '" + command + "' needs 'policy' or 'policy_file'");
  return *cfg.policy;
}

double require_budget(const RunConfig& cfg, const std::string& command) {
  if (!cfg.budget) throw Error(ErrorKind::Config, "/budget: '" + command + "' needs a budget");
  if (!(*cfg.budget > 0)) throw Error(ErrorKind::Config, "/budget: must be positive");
  return *cfg.budget;
}

std::string plot_script(const std::string& csv, const std::string& x, const std::string& y,
                        const std::vector<std::string>& series) {
  std::ostringstream os;
  os << "# gnuplot script; run: gnuplot -p " << csv.substr(0, csv.size() - 4) << ".gp\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel '" << x << "'\nset ylabel '" << y << "'\nset grid\n";
  if (series.empty()) {
    os << "plot '" << csv << "' using '" << x << "':'" << y << "' with linespoints title '" << y << "'\n";
  } else {
    os << "plot ";
    for (std::size_t k = 0; k < series.size(); ++k) {
      os << (k ? ", \\\n     " : "") << "'" << csv << "' using '" << x << "':(strcol('family') eq '" << series[k]
         << "' ? column('" << y << "') : NaN) with linespoints title '" << series[k] << "'";
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

void analyze(const RunConfig& cfg, const Output& out) {
  const Policy& pol = require_policy(cfg, "analyze");
  const EvalResult e = evaluate_policy(cfg.source, cfg.channel, pol);
  const json doc = {{"command", "analyze"},
                    {"family", to_string(family_of(pol))},
                    {"policy", to_json(pol)},
                    {"result", to_json(e)}};
  Table t;
  t.header = {"cycle", "pi", "duration", "area", "transmissions"};
  const Eigen::Index n = cfg.source.size();
  for (Eigen::Index i = 0; i < n; ++i) t.header.push_back("p_" + std::to_string(i));
  for (Eigen::Index j = 0; j < n; ++j) {
    const CycleParams& c = e.cycles[static_cast<std::size_t>(j)];
    std::vector<std::string> row{std::to_string(j), num(e.pi[j]), num(c.duration), num(c.area),
                                 num(c.transmissions)};
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(num(c.next[i]));
    t.rows.push_back(std::move(row));
  }
  out.emit("analyze", doc, t);
  if (out.has_dir() && out.csv_enabled()) {
    Table s{{"family", "maoii", "rate"}, {{std::string(to_string(family_of(pol))), num(e.maoii), num(e.rate)}}};
    out.write("analyze_summary.csv", s.csv());
  }
}

void optimize_cmd(const RunConfig& cfg, const Output& out) {
  const double budget = require_budget(cfg, "optimize");
  if (!cfg.family) throw Error(ErrorKind::Config, "/family: 'optimize' needs a policy family");
  const auto t0 = Clock::now();
  const OptimizeResult r = optimize(cfg.source, cfg.channel, budget, *cfg.family, cfg.solver);
  const double elapsed = seconds_since(t0);
  json doc = {{"command", "optimize"},
              {"family", to_string(*cfg.family)},
              {"budget", budget},
              {"policy", to_json(r.policy)},
              {"lambda_star", r.lambda_star},
              {"binding", r.binding},
              {"tight", r.tight},
              {"saturated", r.saturated},
              {"bisection_steps", r.bisection_steps},
              {"result", to_json(r.eval)},
              {"report", to_json(r.report)},
              {"solver", to_json(cfg.solver)}};
  Table t{{"family", "budget", "lambda_star", "maoii", "rate", "binding", "tight", "iterations", "parameters"}, {}};
  std::vector<std::string> row{std::string(to_string(*cfg.family)), num(budget), num(r.lambda_star),
                               num(r.eval.maoii), num(r.eval.rate), r.binding ? "1" : "0", r.tight ? "1" : "0",
                               std::to_string(r.report.iterations), parameters(r.policy)};
  if (cfg.output.timing) {
    doc["seconds"] = elapsed;
    t.header.push_back("seconds");
    row.push_back(num(elapsed));
  }
  t.rows.push_back(std::move(row));
  out.emit("optimize", doc, t);
}

void simulate_cmd(const RunConfig& cfg, const Output& out) {
  const Policy& pol = require_policy(cfg, "simulate");
  if (cfg.simulation.trace && !out.has_dir()) {
    throw Error(ErrorKind::Config, "/simulation/trace: a trace needs an output directory (--out)");
  }
  SimConfig sc{.cycles = cfg.simulation.cycles,
               .seed = cfg.simulation.seed,
               .policy = pol,
               .source = cfg.source,
               .channel = cfg.channel};
  SimTrace trace;
  const SimResult r = simulate(sc, cfg.simulation.trace ? &trace : nullptr);
  json analytic = nullptr;
  try {
    const EvalResult e = evaluate_policy(cfg.source, cfg.channel, pol);
    analytic = {{"maoii", e.maoii}, {"rate", e.rate}};
  } catch (const Error&) {
    // e.g. a policy that never transmits has no stationary synchronization chain
  }
  const json doc = {{"command", "simulate"},
                    {"family", to_string(family_of(pol))},
                    {"policy", to_json(pol)},
                    {"seed", cfg.simulation.seed},
                    {"result", to_json(r)},
                    {"analytic", analytic}};
  Table t{{"maoii_hat", "stderr_maoii", "rate_hat", "stderr_rate", "cycles", "blocks"},
          {{num(r.maoii_hat), num(r.stderr_maoii), num(r.rate_hat), num(r.stderr_rate),
            std::to_string(r.cycle_count), std::to_string(r.blocks)}}};
  out.emit("simulate", doc, t);
  if (cfg.simulation.trace) {
    Table tr{{"cycle", "value", "next", "duration", "out_of_sync", "area", "transmissions"}, {}};
    for (const CycleRecord& c : trace.cycles) {
      tr.rows.push_back({std::to_string(c.index), std::to_string(c.value), std::to_string(c.next),
                         num(c.duration), num(c.out_of_sync), num(c.area), std::to_string(c.transmissions)});
    }
    out.write("simulate_trace.csv", tr.csv());
  }
}

struct SweepRow {
  double value = 0;
  Family family = Family::St;
  std::string status = "ok";
  std::string message;
  std::optional<Policy> policy;
  double lambda_star = NAN, maoii = NAN, rate = NAN;
  bool tight = true;
  double sim_maoii = NAN, sim_se_maoii = NAN, sim_rate = NAN, sim_se_rate = NAN;
  double seconds = NAN;
};

SweepRow sweep_point(const RunConfig& cfg, double value, Family family) {
  SweepRow row;
  row.value = value;
  row.family = family;
  const SweepSettings& sw = *cfg.sweep;
  try {
    Generator g = cfg.source;
    Channel ch = cfg.channel;
    if (sw.axis == SweepAxis::States) g = build_source(cfg.source_spec, static_cast<int>(value));
    if (sw.axis == SweepAxis::Mu) ch = make_channel(value);
    const auto t0 = Clock::now();
    if (sw.axis == SweepAxis::Tau) {
      row.policy = St{value};
      const EvalResult e = evaluate_policy(g, ch, *row.policy);
      row.maoii = e.maoii;
      row.rate = e.rate;
    } else {
      const double budget = sw.axis == SweepAxis::Budget ? value : require_budget(cfg, "sweep");
      const OptimizeResult r = optimize(g, ch, budget, family, cfg.solver);
      row.policy = r.policy;
      row.lambda_star = r.lambda_star;
      row.maoii = r.eval.maoii;
      row.rate = r.eval.rate;
      row.tight = r.tight;
    }
    row.seconds = seconds_since(t0);
    if (sw.simulate) {
      const SimResult s = simulate({.cycles = cfg.simulation.cycles,
                                    .seed = cfg.simulation.seed,
                                    .policy = *row.policy,
                                    .source = g,
                                    .channel = ch});
      row.sim_maoii = s.maoii_hat;
      row.sim_se_maoii = s.stderr_maoii;
      row.sim_rate = s.rate_hat;
      row.sim_se_rate = s.stderr_rate;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    row.status = std::string(to_string(e.kind()));
    row.message = e.what();
  }
  return row;
}

void sweep_cmd(const RunConfig& cfg, const Output& out, unsigned jobs) {
  if (!cfg.sweep) throw Error(ErrorKind::Config, "/sweep: 'sweep' needs a sweep section");
  const SweepSettings& sw = *cfg.sweep;
  if (sw.axis != SweepAxis::Budget && sw.axis != SweepAxis::Tau) require_budget(cfg, "sweep");
  const std::vector<Family> families = sw.axis == SweepAxis::Tau ? std::vector<Family>{Family::St} : sw.families;

  struct Point {
    double value;
    Family family;
  };
  std::vector<Point> points;
  for (double v : sw.values)
    for (Family f : families) points.push_back({v, f});
  std::vector<SweepRow> rows(points.size());

  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = cursor++; k < points.size(); k = cursor++) {
      try {
        rows[k] = sweep_point(cfg, points[k].value, points[k].family);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  const std::string axis(to_string(sw.axis));
  Table t{{axis, "family", "status", "parameters", "lambda_star", "maoii", "rate", "tight"}, {}};
  if (sw.simulate) {
    for (const char* h : {"sim_maoii", "sim_stderr_maoii", "sim_rate", "sim_stderr_rate"}) t.header.push_back(h);
  }
  if (cfg.output.timing) t.header.push_back("seconds");
  json items = json::array();
  for (const SweepRow& r : rows) {
    std::vector<std::string> cells{num(r.value),       std::string(to_string(r.family)), r.status,
                                   r.policy ? parameters(*r.policy) : "",
                                   num(r.lambda_star), num(r.maoii), num(r.rate), r.tight ? "1" : "0"};
    json item = {{axis, r.value}, {"family", to_string(r.family)}, {"status", r.status}};
    if (!r.message.empty()) item["message"] = r.message;
    if (r.policy) {
      item["policy"] = to_json(*r.policy);
      item["maoii"] = r.maoii;
      item["rate"] = r.rate;
      item["tight"] = r.tight;
      if (!std::isnan(r.lambda_star)) item["lambda_star"] = r.lambda_star;
    }
    if (sw.simulate) {
      for (double v : {r.sim_maoii, r.sim_se_maoii, r.sim_rate, r.sim_se_rate}) cells.push_back(num(v));
      if (r.policy) {
        auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
        item["simulation"] = {{"maoii_hat", finite(r.sim_maoii)},
                              {"stderr_maoii", finite(r.sim_se_maoii)},
                              {"rate_hat", finite(r.sim_rate)},
                              {"stderr_rate", finite(r.sim_se_rate)}};
      }
    }
    if (cfg.output.timing) {
      cells.push_back(num(r.seconds));
      if (!std::isnan(r.seconds)) item["seconds"] = r.seconds;
    }
    t.rows.push_back(std::move(cells));
    items.push_back(std::move(item));
  }
  const json doc = {{"command", "sweep"}, {"axis", axis}, {"rows", std::move(items)}};
  std::vector<std::string> series;
  for (Family f : families) series.emplace_back(to_string(f));
  out.emit("sweep", doc, t, plot_script("sweep.csv", axis, "maoii", series));
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return kConfigError;
    case ErrorKind::Infeasible:
    case ErrorKind::GridCap: return kInfeasible;
    default: return kNumericError;
  }
}

void run(const Options& opts) {
  RunConfig cfg = load_config(opts.config_path);
  if (opts.seed) cfg.simulation.seed = *opts.seed;
  const Output out(cfg, opts);
  if (opts.command == "analyze") analyze(cfg, out);
  else if (opts.command == "optimize") optimize_cmd(cfg, out);
  else if (opts.command == "simulate") simulate_cmd(cfg, out);
  else if (opts.command == "sweep") sweep_cmd(cfg, out, opts.jobs);
  else throw Error(ErrorKind::Config, "unknown command '" + opts.command + "'");
}

}  // namespace aoii::cli
