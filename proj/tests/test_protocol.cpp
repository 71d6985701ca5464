#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "twotime/protocol.hpp"

using namespace twotime;

namespace {

LangevinTrajectory synthetic(const std::string& id, const std::vector<double>& t,
                             const std::vector<cplx>& v) {
  LangevinTrajectory traj;
  SampleSeries s;
  s.id = id;
  s.t = t;
  s.v = v;
  traj.series.push_back(std::move(s));
  traj.final_clock = t.empty() ? 0.0 : t.back();
  return traj;
}

MeasurementSchedule window_at(double t2, double delta, double termination) {
  MeasurementSchedule s;
  s.t1 = -1.0;
  s.t2 = t2;
  s.delta = delta;
  s.termination = termination;
  return s;
}

}  // namespace

TEST_CASE("windowed correlator averages then squares") {
  std::vector<double> t;
  std::vector<cplx> v;
  for (int i = 0; i < 100; ++i) {
    t.push_back(static_cast<double>(i));
    v.push_back(cplx{2.0, 0.0});
  }
  auto traj = synthetic("obs", t, v);
  WindowedEstimate est = windowed_correlator(traj, window_at(50, 20, 99), "obs");
  CHECK(est.samples == 21);
  CHECK(est.value.real() == doctest::Approx(2.0));
  CHECK(est.probability == doctest::Approx(4.0));

  // alternating signs inside the window cancel to zero
  for (int i = 0; i < 100; ++i) v[static_cast<size_t>(i)] = (i % 2) ? 1.0 : -1.0;
  auto alt = synthetic("obs", t, v);
  WindowedEstimate zero =
      windowed_correlator(alt, window_at(49.5, 19.0, 99), "obs");
  CHECK(zero.samples == 20);
  CHECK(std::abs(zero.value) < 1e-15);
  CHECK(zero.probability < 1e-15);
}

TEST_CASE("full-span window reduces to the plain mean") {
  std::vector<double> t;
  std::vector<cplx> v;
  double sum = 0.0;
  for (int i = 0; i < 64; ++i) {
    t.push_back(static_cast<double>(i));
    double x = std::sin(0.37 * i) + 0.2;
    v.push_back(cplx{x, 0.0});
    sum += x;
  }
  auto traj = synthetic("obs", t, v);
  WindowedEstimate est =
      windowed_correlator(traj, window_at(31.5, 63.0, 63.0), "obs");
  CHECK(est.samples == 64);
  CHECK(est.value.real() == doctest::Approx(sum / 64.0).epsilon(1e-12));
}

TEST_CASE("windowed correlator failure modes") {
  std::vector<double> t{0.0, 1.0, 2.0, 3.0};
  std::vector<cplx> v{1.0, 1.0, 1.0, 1.0};
  auto traj = synthetic("obs", t, v);
  // the run never reached the end of the requested window
  CHECK_THROWS_WITH_AS(
      windowed_correlator(traj, window_at(10.0, 4.0, 12.0), "obs"),
      "measurement window not covered by the run", std::runtime_error);
  // window is covered but the sampling left a hole
  auto sparse = synthetic("obs", {0.0, 3.0}, {cplx{1.0, 0.0}, cplx{1.0, 0.0}});
  sparse.final_clock = 3.0;
  CHECK_THROWS_WITH_AS(
      windowed_correlator(sparse, window_at(1.5, 0.5, 3.0), "obs"),
      "no samples recorded inside the measurement window", std::runtime_error);
  CHECK_THROWS_AS(windowed_correlator(traj, window_at(2.0, 1.0, 3.0), "other"),
                  std::out_of_range);
}

TEST_CASE("probability samples reject negatives") {
  CHECK_NOTHROW(ProbabilitySample{0.0});
  CHECK_NOTHROW(ProbabilitySample{2.5});
  CHECK_THROWS_AS(ProbabilitySample{-1e-9}, std::invalid_argument);
}

TEST_CASE("ensemble statistics over binary outcomes") {
  std::vector<ProbabilitySample> runs;
  for (int i = 0; i < 10; ++i) runs.push_back(ProbabilitySample{i < 4 ? 1.0 : 0.0});
  DistributionSummary d = ensemble_probability(runs, 4);
  CHECK(d.binary);
  CHECK(d.count == 10);
  CHECK(d.mean == doctest::Approx(0.4));
  CHECK(d.std_error == doctest::Approx(std::sqrt(0.4 * 0.6 / 10.0)));
  std::int64_t total = 0;
  for (auto c : d.bin_counts) total += c;
  CHECK(total == 10);

  runs.push_back(ProbabilitySample{0.5});
  DistributionSummary e = ensemble_probability(runs);
  CHECK_FALSE(e.binary);
  CHECK(e.std_error > 0.0);

  CHECK_THROWS_AS(ensemble_probability({}), std::invalid_argument);
  CHECK_THROWS_AS(ensemble_probability(runs, 0), std::invalid_argument);
}

TEST_CASE("averaging order does not commute with squaring") {
  // sixteen runs, each holding a constant unit phase; per-run probabilities
  // are all 1 while the pooled amplitude cancels to zero
  const int runs = 16;
  std::vector<ProbabilitySample> per_run;
  cplx pooled{0.0, 0.0};
  for (int k = 0; k < runs; ++k) {
    double theta = 2.0 * std::numbers::pi * k / runs;
    cplx phase{std::cos(theta), std::sin(theta)};
    std::vector<double> t{0.0, 1.0, 2.0};
    std::vector<cplx> v{phase, phase, phase};
    auto traj = synthetic("amp", t, v);
    WindowedEstimate est = windowed_correlator(traj, window_at(1.0, 2.0, 2.0), "amp");
    per_run.push_back(ProbabilitySample{est.probability});
    pooled += est.value / static_cast<double>(runs);
  }
  DistributionSummary d = ensemble_probability(per_run);
  CHECK(d.mean == doctest::Approx(1.0));
  CHECK(std::norm(pooled) < 1e-12);
}

TEST_CASE("ramp schedule interpolates and validates") {
  RampSchedule r{0.5, 2.5, 1.0, 3.0};
  CHECK(r.value(0.0) == 0.5);
  CHECK(r.value(1.0) == 0.5);
  CHECK(r.value(2.0) == doctest::Approx(1.5));
  CHECK(r.value(3.0) == 2.5);
  CHECK(r.value(99.0) == 2.5);
  CHECK_NOTHROW(r.validate());

  CHECK_THROWS_AS((RampSchedule{0.0, 1.0, 3.0, 1.0}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS((RampSchedule{1.0, 0.5, 0.0, 1.0}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS((RampSchedule{-0.1, 1.0, 0.0, 1.0}).validate(),
                  std::invalid_argument);
}

TEST_CASE("pointer device validation") {
  PointerDevice d;
  d.v = 0.0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = PointerDevice{};
  d.N = 0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = PointerDevice{};
  d.dt = 0.0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = PointerDevice{};
  d.record_cadence = 0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);

  d = PointerDevice{};
  d.ramp.t_end = 5.0;
  auto flat = [](double) { return 0.0; };
  CHECK_THROWS_AS(pointer_measurement(flat, d, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(pointer_measurement({}, d, 10.0), std::invalid_argument);
}

namespace {

PointerDevice settling_device(std::uint32_t replica) {
  PointerDevice d;
  d.N = 4;
  d.hbar = 0.25;
  d.v = 1.0;
  d.ramp = {0.0, 1.0, 0.0, 5.0};
  d.dt = 1e-3;
  d.record_cadence = 100;
  d.master_seed = 7;
  d.replica = replica;
  return d;
}

}  // namespace

TEST_CASE("unbiased pointer settles to an even coin") {
  auto flat = [](double) { return 0.0; };
  int plus = 0, resolved = 0;
  const int runs = 40;
  for (int r = 0; r < runs; ++r) {
    PointerTranscript tr = pointer_measurement(flat, settling_device(r), 8.0);
    if (tr.resolved) {
      ++resolved;
      if (tr.outcome == 1) ++plus;
    }
  }
  REQUIRE(resolved >= 36);
  double p = static_cast<double>(plus) / resolved;
  double err = std::sqrt(0.25 / resolved);
  CHECK(std::abs(p - 0.5) < 3.0 * err);
}

TEST_CASE("a strong bias decides the outcome") {
  auto up = [](double) { return 1.0; };
  for (bool through_ramp : {false, true}) {
    for (int r = 0; r < 20; ++r) {
      PointerDevice d = settling_device(static_cast<std::uint32_t>(100 + r));
      // ramped coupling must beat the trapping threshold 4gN max M(M^2-v^2)
      // at every ramp fraction, so the tilt never leaves a metastable well
      d.kappa = through_ramp ? 9.0 : 6.0;
      d.ramp_kappa = through_ramp;
      PointerTranscript tr = pointer_measurement(up, d, 8.0);
      CHECK(tr.resolved);
      CHECK(tr.outcome == 1);
    }
  }
}

TEST_CASE("no well means no resolution") {
  auto flat = [](double) { return 0.0; };
  PointerDevice d;
  d.v = 4.0;
  d.hbar = 1e-8;
  d.ramp = {0.0, 0.0, 0.0, 0.5};
  d.dt = 1e-3;
  d.master_seed = 3;
  PointerTranscript tr = pointer_measurement(flat, d, 1.0);
  CHECK_FALSE(tr.resolved);
  CHECK(tr.outcome == 0);
  CHECK(tr.post_ramp_flips == 0);
  CHECK(tr.first_flip_censored);
  CHECK(tr.first_flip_time == doctest::Approx(0.5));
}

TEST_CASE("deep pointers freeze after the ramp") {
  auto flat = [](double) { return 0.0; };
  for (int r = 0; r < 12; ++r) {
    PointerDevice d;
    d.N = 32;
    d.hbar = 1.0;
    d.v = 1.0;
    d.ramp = {0.0, 1.0, 0.0, 2.0};
    d.dt = 1e-3;
    d.record_cadence = 200;
    d.master_seed = 11;
    d.replica = static_cast<std::uint32_t>(r);
    PointerTranscript tr = pointer_measurement(flat, d, 12.0);  // 1e4 steps post-ramp
    CHECK(tr.resolved);
    CHECK(tr.post_ramp_flips == 0);
  }
}

TEST_CASE("flip traffic falls as the barrier grows") {
  auto flat = [](double) { return 0.0; };
  std::int64_t flips_small = 0, flips_large = 0;
  int censored_small = 0, censored_large = 0;
  for (int r = 0; r < 8; ++r) {
    PointerDevice d;
    d.hbar = 1.0;
    d.v = 1.0;
    d.ramp = {0.0, 1.0, 0.0, 2.0};
    d.dt = 1e-3;
    d.record_cadence = 200;
    d.master_seed = 13;
    d.replica = static_cast<std::uint32_t>(r);
    d.N = 1;
    PointerTranscript a = pointer_measurement(flat, d, 22.0);
    flips_small += a.post_ramp_flips;
    censored_small += a.first_flip_censored ? 1 : 0;
    d.N = 6;
    PointerTranscript b = pointer_measurement(flat, d, 22.0);
    flips_large += b.post_ramp_flips;
    censored_large += b.first_flip_censored ? 1 : 0;
  }
  CHECK(flips_small > flips_large);
  CHECK(censored_large >= censored_small);
  CHECK(flips_small > 0);
}

TEST_CASE("series signal holds the latest sample") {
  SampleSeries s;
  s.id = "sig";
  s.t = {1.0, 2.0, 4.0};
  s.v = {cplx{0.5, 9.0}, cplx{-1.5, 0.0}, cplx{3.0, 0.0}};
  auto f = series_signal(s);
  CHECK(f(0.0) == 0.0);  // before the first sample
  CHECK(f(1.0) == 0.5);  // imaginary part is ignored
  CHECK(f(1.7) == 0.5);
  CHECK(f(2.0) == -1.5);
  CHECK(f(3.999) == -1.5);
  CHECK(f(100.0) == 3.0);
}

TEST_CASE("deviation sweep row arithmetic") {
  std::vector<double> deltas{2.0, 8.0};
  std::vector<std::vector<double>> groups{{1.0, 3.0}, {2.0, 2.0, 2.0}};
  auto rows = deviation_sweep(deltas, groups, 4.0, 1.5, 0.25);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].delta_over_delta_fluct == doctest::Approx(0.5));
  CHECK(rows[0].windowed == doctest::Approx(2.0));
  CHECK(rows[0].windowed_var == doctest::Approx(2.0));
  CHECK(rows[0].diff == doctest::Approx(0.5));
  CHECK(rows[0].err == doctest::Approx(std::sqrt(2.0 / 2.0 + 0.0625)));
  CHECK(rows[1].windowed_var == doctest::Approx(0.0));
  CHECK(rows[1].err == doctest::Approx(0.25));

  CHECK_THROWS_AS(deviation_sweep({}, {}, 1.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(deviation_sweep({1.0}, {{}}, 1.0, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(deviation_sweep({1.0}, {{1.0}}, 0.0, 0.0, 0.0),
                  std::invalid_argument);
}
