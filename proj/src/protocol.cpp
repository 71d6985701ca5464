#include "twotime/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace twotime {

WindowedEstimate windowed_correlator(const LangevinTrajectory& traj,
                                     const MeasurementSchedule& schedule,
                                     const std::string& series_id) {
  schedule.validate();
  const SampleSeries& ser = traj.find(series_id);
  WindowedEstimate est;
  est.id = series_id;
  est.window_lo = schedule.window_lo();
  est.window_hi = schedule.window_hi();
  if (traj.final_clock < est.window_hi - 1e-9)
    throw std::runtime_error("measurement window not covered by the run");

  cplx sum{0.0, 0.0};
  std::int64_t n = 0;
  for (size_t i = 0; i < ser.t.size(); ++i) {
    if (ser.t[i] < est.window_lo - 1e-9 || ser.t[i] > est.window_hi + 1e-9)
      continue;
    sum += ser.v[i];
    ++n;
  }
  if (n == 0)
    throw std::runtime_error("no samples recorded inside the measurement window");
  est.samples = n;
  est.value = sum / static_cast<double>(n);
  est.probability = std::norm(est.value);
  return est;
}

ProbabilitySample::ProbabilitySample(double p) : p_(p) {
  if (!(p >= 0.0))
    throw std::invalid_argument("probability sample must be non-negative");
}

DistributionSummary ensemble_probability(const std::vector<ProbabilitySample>& runs,
                                         int bins) {
  if (runs.empty())
    throw std::invalid_argument("ensemble statistics need at least one run");
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");

  DistributionSummary d;
  d.count = static_cast<std::int64_t>(runs.size());
  double lo = runs.front().value(), hi = lo, sum = 0.0;
  bool binary = true;
  for (const auto& r : runs) {
    double v = r.value();
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (std::abs(v) > 1e-12 && std::abs(v - 1.0) > 1e-12) binary = false;
  }
  const double n = static_cast<double>(d.count);
  d.mean = sum / n;
  d.binary = binary;
  if (binary) {
    d.std_error = std::sqrt(std::max(d.mean * (1.0 - d.mean), 0.0) / n);
  } else if (d.count > 1) {
    double ss = 0.0;
    for (const auto& r : runs) {
      double dlt = r.value() - d.mean;
      ss += dlt * dlt;
    }
    d.std_error = std::sqrt(ss / (n - 1.0) / n);
  }

  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  d.bin_edges.resize(static_cast<size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b)
    d.bin_edges[static_cast<size_t>(b)] = lo + (hi - lo) * b / bins;
  d.bin_counts.assign(static_cast<size_t>(bins), 0);
  for (const auto& r : runs) {
    int b = static_cast<int>((r.value() - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    ++d.bin_counts[static_cast<size_t>(b)];
  }
  return d;
}

double RampSchedule::value(double t) const {
  if (t <= t_start) return g0;
  if (t >= t_end) return g1;
  return g0 + (g1 - g0) * (t - t_start) / (t_end - t_start);
}

void RampSchedule::validate() const {
  if (t_end < t_start)
    throw std::invalid_argument("ramp must end at or after it starts");
  if (g0 < 0.0) throw std::invalid_argument("well depth cannot be negative");
  if (g1 < g0)
    throw std::invalid_argument("ramp must be monotone nondecreasing");
}

void PointerDevice::validate() const {
  ramp.validate();
  if (!(v > 0.0)) throw std::invalid_argument("well separation must be positive");
  if (N < 1) throw std::invalid_argument("degrees-of-freedom count must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("pointer step must be positive");
  if (hbar < 0.0) throw std::invalid_argument("hbar must be non-negative");
  if (record_cadence < 1)
    throw std::invalid_argument("record cadence must be at least 1");
}

PointerTranscript pointer_measurement(const std::function<double(double)>& observable,
                                      const PointerDevice& device,
                                      double termination) {
  device.validate();
  if (!(termination > 0.0))
    throw std::invalid_argument("termination must be positive");
  if (device.ramp.t_end > termination + 1e-9)
    throw std::invalid_argument("ramp must complete within the run");
  if (!observable)
    throw std::invalid_argument("pointer needs a system observable signal");

  const auto rng = CounterRng::make(device.master_seed, device.replica,
                                    StreamPurpose::pointer_noise);
  const double dt = device.dt;
  const double sd = std::sqrt(2.0 * device.hbar * dt);
  const double kappa_span =
      device.ramp.g1 - device.ramp.g0;  // normalizes the coupled ramp
  const std::int64_t steps =
      static_cast<std::int64_t>(std::ceil(termination / dt - 1e-9));

  PointerTranscript tr;
  tr.t.reserve(static_cast<size_t>(steps / device.record_cadence) + 2);
  tr.M.reserve(tr.t.capacity());
  double M = device.M0;
  tr.t.push_back(0.0);
  tr.M.push_back(M);

  int settled = 0;  // Schmitt state: last sign of M seen beyond |M| >= v/2
  for (std::int64_t i = 0; i < steps; ++i) {
    const double t_now = static_cast<double>(i) * dt;
    const double g = device.ramp.value(t_now);
    double kappa_eff = device.kappa;
    if (device.ramp_kappa)
      kappa_eff *= (kappa_span > 0.0)
                       ? (device.ramp.value(t_now) - device.ramp.g0) / kappa_span
                       : 1.0;
    const double drift = -4.0 * g * device.N * M * (M * M - device.v * device.v) +
                         kappa_eff * observable(t_now);
    M += dt * drift + sd * rng.gaussian(static_cast<std::uint64_t>(i), 0);
    const double t_next = static_cast<double>(i + 1) * dt;

    if (t_next >= device.ramp.t_end && std::abs(M) >= 0.5 * device.v) {
      const int sgn = (M > 0.0) ? 1 : -1;
      if (settled != 0 && sgn != settled) {
        ++tr.post_ramp_flips;
        if (tr.first_flip_censored) {
          tr.first_flip_censored = false;
          tr.first_flip_time = t_next - device.ramp.t_end;
        }
      }
      settled = sgn;
    }
    if ((i + 1) % device.record_cadence == 0 || i + 1 == steps) {
      tr.t.push_back(t_next);
      tr.M.push_back(M);
    }
  }
  if (tr.first_flip_censored)
    tr.first_flip_time = termination - device.ramp.t_end;
  tr.resolved = std::abs(M) >= 0.5 * device.v;
  tr.outcome = tr.resolved ? ((M > 0.0) ? 1 : -1) : 0;
  return tr;
}

std::function<double(double)> series_signal(const SampleSeries& series) {
  auto data = std::make_shared<SampleSeries>(series);
  return [data](double t) -> double {
    const auto& ts = data->t;
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    if (it == ts.begin()) return 0.0;
    size_t idx = static_cast<size_t>(it - ts.begin()) - 1;
    return data->v[idx].real();
  };
}

std::vector<DeviationRow> deviation_sweep(
    const std::vector<double>& deltas,
    const std::vector<std::vector<double>>& windowed_by_delta,
    double delta_fluct, double ensemble_ref, double ensemble_err) {
  if (deltas.empty() || deltas.size() != windowed_by_delta.size())
    throw std::invalid_argument("sweep needs one estimate group per window size");
  if (!(delta_fluct > 0.0))
    throw std::invalid_argument("fluctuation timescale must be positive");

  std::vector<DeviationRow> rows;
  rows.reserve(deltas.size());
  for (size_t k = 0; k < deltas.size(); ++k) {
    const auto& grp = windowed_by_delta[k];
    if (grp.empty())
      throw std::invalid_argument("sweep group has no windowed estimates");
    DeviationRow row;
    row.delta = deltas[k];
    row.delta_over_delta_fluct = deltas[k] / delta_fluct;
    double sum = 0.0;
    for (double v : grp) sum += v;
    const double n = static_cast<double>(grp.size());
    row.windowed = sum / n;
    double ss = 0.0;
    for (double v : grp) ss += (v - row.windowed) * (v - row.windowed);
    row.windowed_var = (grp.size() > 1) ? ss / (n - 1.0) : 0.0;
    row.ensemble_ref = ensemble_ref;
    row.diff = row.windowed - ensemble_ref;
    row.err = std::sqrt(row.windowed_var / n + ensemble_err * ensemble_err);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace twotime
