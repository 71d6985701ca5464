#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "twotime/rng.hpp"
#include "twotime/schedule.hpp"

namespace twotime {

// Finite-window time average of a recorded observable: the measurement record
// is the mean over samples falling in [t2 - delta/2, t2 + delta/2], and the
// probability quantity derived from it is the squared magnitude.
struct WindowedEstimate {
  std::string id;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::int64_t samples = 0;
  cplx value{0.0, 0.0};
  double probability = 0.0;  // |value|^2
};

WindowedEstimate windowed_correlator(const LangevinTrajectory& traj,
                                     const MeasurementSchedule& schedule,
                                     const std::string& series_id);

// A per-run probability quantity.  The constructor rejects negatives, so
// ensemble statistics can only ever be formed over probabilities, never over
// amplitudes: squaring (or outcome mapping) must happen per run, first.
class ProbabilitySample {
 public:
  explicit ProbabilitySample(double p);
  double value() const { return p_; }

 private:
  double p_;
};

struct DistributionSummary {
  std::int64_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;  // binomial for binary inputs, plain stderr otherwise
  bool binary = false;     // every sample is 0 or 1
  std::vector<double> bin_edges;        // size bins+1
  std::vector<std::int64_t> bin_counts; // size bins
};

DistributionSummary ensemble_probability(const std::vector<ProbabilitySample>& runs,
                                         int bins = 20);

// Linear ramp for the pointer's double-well depth g(t').
struct RampSchedule {
  double g0 = 0.0;
  double g1 = 1.0;
  double t_start = 0.0;
  double t_end = 1.0;

  double value(double t) const;
  void validate() const;  // monotone nondecreasing, t_end >= t_start
};

// Collective coordinate M dragged through a symmetry-breaking transition:
// U(M, t') = g(t') N (M^2 - v^2)^2 - kappa_eff M (system observable), so a
// positive bias tips the settled sign to +1.  The barrier height g N v^4
// controls Kramers freezing of the outcome.
struct PointerDevice {
  double M0 = 0.0;
  double v = 1.0;
  double kappa = 0.0;
  int N = 1;
  RampSchedule ramp;
  bool ramp_kappa = false;  // couple kappa through the normalized ramp
  double hbar = 1.0;
  double dt = 1e-3;
  int record_cadence = 1;
  std::uint64_t master_seed = 0;
  std::uint32_t replica = 0;

  void validate() const;
};

struct PointerTranscript {
  std::vector<double> t;
  std::vector<double> M;
  int outcome = 0;      // +1 / -1; 0 while unresolved
  bool resolved = false;
  std::int64_t post_ramp_flips = 0;  // settled-sign changes after ramp end
  double first_flip_time = 0.0;      // after ramp end; window length if none
  bool first_flip_censored = true;
};

// Euler-Maruyama evolution of M under the ramped double-well plus coupling,
// real noise of variance 2*hbar*dt per step.  The observable is sampled as a
// function of Langevin time; couple a recorded series via series_signal.
PointerTranscript pointer_measurement(const std::function<double(double)>& observable,
                                      const PointerDevice& device,
                                      double termination);

// Step interpolation of a recorded series: value of the latest sample at or
// before t, 0 before the first sample.
std::function<double(double)> series_signal(const SampleSeries& series);

// One row of the window-size sweep comparing time-window estimates against an
// ensemble-mode reference.
struct DeviationRow {
  double delta = 0.0;
  double delta_over_delta_fluct = 0.0;
  double windowed = 0.0;      // mean of per-run windowed estimates
  double windowed_var = 0.0;  // run-to-run variance
  double ensemble_ref = 0.0;
  double diff = 0.0;
  double err = 0.0;  // combined standard error of diff
};

std::vector<DeviationRow> deviation_sweep(
    const std::vector<double>& deltas,
    const std::vector<std::vector<double>>& windowed_by_delta,
    double delta_fluct, double ensemble_ref, double ensemble_err);

}  // namespace twotime
