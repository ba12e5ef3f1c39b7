#include <doctest.h>

#include "aoii/closed_form.hpp"
#include "aoii/simulator.hpp"
#include "oracles.hpp"

using namespace aoii;

namespace {

Generator ternary() {
  Matrix q(3, 3);
  q << -1.025, 1, 0.025, 0.05, -0.75, 0.7, 0.4, 0.01, -0.41;
  return Generator::validate(q);
}

SimConfig config(const Generator& g, double mu, Policy pol, std::uint64_t cycles, std::uint64_t seed = 1) {
  return {.cycles = cycles, .seed = seed, .policy = std::move(pol), .source = g, .channel = {mu}};
}

bool identical(const SimResult& a, const SimResult& b) {
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return same(a.maoii_hat, b.maoii_hat) && same(a.rate_hat, b.rate_hat) && same(a.stderr_maoii, b.stderr_maoii) &&
         same(a.stderr_rate, b.stderr_rate) && a.cycle_count == b.cycle_count && a.blocks == b.blocks &&
         same(a.max_area_discrepancy, b.max_area_discrepancy);
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("fixed seed reproduces the run exactly") {
    const SimConfig cfg = config(ternary(), 1.0, Eat{(Vector(3) << 0.3, 0.8, 1.2).finished()}, 20000, 99);
    CHECK(identical(simulate(cfg), simulate(cfg)));
    SimConfig other = cfg;
    other.seed = 100;
    CHECK(simulate(other).maoii_hat != simulate(cfg).maoii_hat);
  }

  TEST_CASE("never transmitting: zero rate and the no-transmission cycle") {
    const Generator g = ternary();
    for (Eigen::Index j = 0; j < 3; ++j) {
      SimConfig cfg = config(g, 1.0, Eat{Vector::Constant(3, INFINITY)}, 100000, 5);
      cfg.initial_state = j;
      const SimResult r = simulate(cfg);
      CHECK(r.rate_hat == 0.0);
      const CycleParams c = esat_cycle(g, {1.0}, {j, Vector::Constant(2, INFINITY)});
      CHECK(std::abs(r.maoii_hat - c.area / c.duration) < 3 * r.stderr_maoii);
    }
    SimConfig idle = config(g, 1.0, Ps{0.0}, 50000, 6);
    CHECK(simulate(idle).rate_hat == 0.0);
  }

  TEST_CASE("binary source matches the closed form") {
    const Generator g = make_binary(0.6, 0.75);
    for (auto [t1, t2] : {std::pair{0.0, 0.0}, std::pair{0.5, 1.3}, std::pair{2.0, 0.1}}) {
      const SimResult r = simulate(config(g, 1.0, Eat{(Vector(2) << t1, t2).finished()}, 100000, 7));
      const BinaryClosedForm b = binary_closed_form(0.6, 0.75, 1.0, t1, t2);
      CAPTURE(t1);
      CAPTURE(t2);
      CHECK(std::abs(r.maoii_hat - b.maoii) < 3 * r.stderr_maoii);
      CHECK(std::abs(r.rate_hat - b.rate) < 3 * r.stderr_rate);
    }
  }

  TEST_CASE("every policy family matches the analysis on the ternary source") {
    const Generator g = ternary();
    Matrix t(3, 3);
    t << 0, 0.4, 1.1, 0.2, 0, 0.6, 0.9, 0.05, 0;
    const std::vector<Policy> policies{Esat{t}, Eat{(Vector(3) << 0.2, 0.7, 0.4).finished()}, St{0.5}, Ps{0.8}};
    for (double mu : {1.0, 100.0}) {
      for (const Policy& pol : policies) {
        const SimResult r = simulate(config(g, mu, pol, 100000, 11));
        const EvalResult e = evaluate_policy(g, {mu}, pol);
        CAPTURE(mu);
        CAPTURE(to_string(family_of(pol)));
        CHECK(std::abs(r.maoii_hat - e.maoii) < 3.5 * r.stderr_maoii);
        CHECK(std::abs(r.rate_hat - e.rate) < 3.5 * r.stderr_rate);
        CHECK(r.max_area_discrepancy < 1e-12);
      }
    }
  }

  TEST_CASE("standard errors shrink like one over the square root of the run length") {
    const Generator g = ternary();
    const Policy pol = St{0.4};
    const SimResult a = simulate(config(g, 1.0, pol, 100000, 3));
    const SimResult b = simulate(config(g, 1.0, pol, 200000, 3));
    const double ratio = b.stderr_maoii / a.stderr_maoii;
    CHECK(ratio > 0.8 / std::sqrt(2.0));
    CHECK(ratio < 1.2 / std::sqrt(2.0));
    const double rate_ratio = b.stderr_rate / a.stderr_rate;
    CHECK(rate_ratio > 0.8 / std::sqrt(2.0));
    CHECK(rate_ratio < 1.2 / std::sqrt(2.0));
  }

  TEST_CASE("event log honours preemption and the thresholds") {
    const Generator g = make_spread(4, 0.5, 3, 0.5, 1.5);
    Matrix t(4, 4);
    t << 0, 0.3, 0.6, 0.1, 0.2, 0, 0.4, 0.9, 0.5, 0.05, 0, 0.3, 0.7, 0.2, 0.1, 0;
    SimTrace trace;
    trace.events_enabled = true;
    simulate(config(g, 0.7, Esat{t}, 3000, 13), &trace);
    REQUIRE(trace.events.size() > 1000);

    bool in_flight = false;
    Eigen::Index source = -1;
    double last_time = 0, last_age = 0;
    int preempted = 0;
    for (const SimEvent& e : trace.events) {
      CHECK(e.time >= last_time);
      switch (e.kind) {
        case EventKind::Desync:
          CHECK_FALSE(in_flight);
          CHECK(e.age == 0.0);
          CHECK(e.source != e.estimate);
          source = e.source;
          last_age = 0;
          break;
        case EventKind::Jump:
          CHECK(e.age >= last_age);
          if (in_flight) ++preempted;
          in_flight = false;
          source = e.source;
          break;
        case EventKind::Start:
          CHECK_FALSE(in_flight);
          CHECK(e.source == source);
          // transmissions start exactly when AoII reaches the threshold, or
          // at a state change that lands above it
          CHECK(e.age >= t(e.estimate, e.source) - 1e-12);
          in_flight = true;
          break;
        case EventKind::Completion:
          CHECK(in_flight);
          CHECK(e.source == source);
          in_flight = false;
          break;
        case EventKind::Resync:
          CHECK_FALSE(in_flight);
          CHECK(e.source == e.estimate);
          break;
        case EventKind::Sample: FAIL("threshold policies do not sample at random"); break;
      }
      last_time = e.time;
      last_age = e.age;
    }
    CHECK(preempted > 0);
  }

  TEST_CASE("Poisson sampling counts samples taken during a transmission") {
    SimTrace trace;
    trace.events_enabled = true;
    simulate(config(ternary(), 0.2, Ps{5.0}, 2000, 17), &trace);
    int overlapping = 0;
    bool in_flight = false;
    for (const SimEvent& e : trace.events) {
      if (e.kind == EventKind::Sample) {
        if (in_flight) ++overlapping;
        in_flight = true;
      } else if (e.kind == EventKind::Jump || e.kind == EventKind::Completion) {
        in_flight = false;
      }
    }
    CHECK(overlapping > 0);
    std::uint64_t recorded = 0;
    for (const CycleRecord& c : trace.cycles) recorded += static_cast<std::uint64_t>(c.transmissions);
    std::uint64_t samples = 0;
    for (const SimEvent& e : trace.events) samples += e.kind == EventKind::Sample;
    CHECK(recorded == samples);
  }

  TEST_CASE("cycle records are consistent") {
    SimTrace trace;
    const SimResult r = simulate(config(ternary(), 1.0, St{0.3}, 5000, 19), &trace);
    REQUIRE(trace.cycles.size() == 5000);
    double area = 0, time = 0;
    for (std::size_t k = 0; k < trace.cycles.size(); ++k) {
      const CycleRecord& c = trace.cycles[k];
      CHECK(c.duration > c.out_of_sync);
      CHECK(c.area == doctest::Approx(0.5 * c.out_of_sync * c.out_of_sync));
      if (k > 0) CHECK(c.value == trace.cycles[k - 1].next);
      area += c.area;
      time += c.duration;
    }
    CHECK(r.maoii_hat == doctest::Approx(area / time).epsilon(1e-12));
    CHECK(r.cycle_count == 5000);
    CHECK(r.blocks > 100);
  }

  TEST_CASE("configuration checks") {
    const Generator g = ternary();
    CHECK(oracle::error_kind([&] { simulate(config(g, 1.0, St{0.1}, 0)); }) == ErrorKind::InvalidArgument);
    CHECK(oracle::error_kind([&] { simulate(config(g, 1.0, Eat{Vector::Zero(2)}, 10)); }) == ErrorKind::Dimension);
    CHECK(oracle::error_kind([&] { simulate(config(g, 1.0, St{-1}, 10)); }) == ErrorKind::Domain);
    CHECK(oracle::error_kind([&] { simulate(config(g, 1.0, Ps{-1}, 10)); }) == ErrorKind::Domain);
    SimConfig bad = config(g, 1.0, St{0.1}, 10);
    bad.initial_state = 3;
    CHECK(oracle::error_kind([&] { simulate(bad); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("a single regeneration block has no standard error") {
    const SimResult r = simulate(config(ternary(), 1.0, St{0.1}, 1));
    CHECK(std::isnan(r.stderr_maoii));
    CHECK(r.cycle_count == 1);
  }
}
