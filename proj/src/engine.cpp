#include "twotime/engine.hpp"

#include <algorithm>
#include <cmath>

#include "twotime/stats.hpp"

namespace twotime {

NoiseSpec NoiseSpec::make(const LatticeGeometry& g, double hbar, double dt,
                          std::uint64_t master_seed, std::uint32_t replica) {
  g.validate();
  if (dt <= 0.0) throw std::invalid_argument("langevin_step must be positive");
  if (hbar < 0.0) throw std::invalid_argument("hbar must be non-negative");
  NoiseSpec n;
  n.hbar = hbar;
  n.langevin_step = dt;
  n.variance = 2.0 * hbar / (g.cell_volume() * dt);
  n.master_seed = master_seed;
  n.replica = replica;
  return n;
}

void NoiseSpec::validate() const {
  if (langevin_step <= 0.0)
    throw std::invalid_argument("langevin_step must be positive");
  if (!(variance > 0.0))
    throw std::invalid_argument("noise variance must be positive");
}

std::vector<double> sample_noise(const LatticeGeometry& g, const NoiseSpec& spec,
                                 std::uint64_t step_index) {
  g.validate();
  if (spec.langevin_step <= 0.0)
    throw std::invalid_argument("langevin_step must be positive");
  if (spec.variance < 0.0)
    throw std::invalid_argument("noise variance must be non-negative");
  auto rng =
      CounterRng::make(spec.master_seed, spec.replica, StreamPurpose::field_noise);
  const double sd = std::sqrt(spec.variance);
  const int n = g.total_sites();
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] =
        sd * rng.gaussian(step_index, static_cast<std::uint64_t>(i));
  return out;
}

void EngineParams::validate() const {
  if (langevin_step <= 0.0)
    throw std::invalid_argument("langevin_step must be positive");
  if (steps_per_coordinate_tick < 1)
    throw std::invalid_argument("steps_per_coordinate_tick must be at least 1");
  if (burn_in_steps < 0)
    throw std::invalid_argument("burn_in_steps must be non-negative");
  if (!(max_drift_norm > 0.0))
    throw std::invalid_argument("max_drift_norm must be positive");
  if (max_halvings < 0)
    throw std::invalid_argument("max_halvings must be non-negative");
}

void EngineParams::validate_tick(double a_t) const {
  validate();
  double prod = steps_per_coordinate_tick * langevin_step;
  if (std::abs(prod - a_t) > 1e-9 * std::max(1.0, std::abs(a_t)))
    throw std::invalid_argument(
        "steps_per_coordinate_tick * langevin_step must equal the time spacing");
}

RunawayError::RunawayError(std::int64_t step_index, double norm)
    : std::runtime_error("langevin runaway at step " + std::to_string(step_index) +
                         ", drift norm " + std::to_string(norm)),
      step(step_index),
      drift_norm(norm) {}

namespace {

double unpinned_drift_max(const LangevinState& s, const std::vector<cplx>& drift) {
  const int sps = s.geo.sites_per_slice();
  double m = 0.0;
  for (int slice = 0; slice <= s.present; ++slice) {
    if (s.pinned(slice)) continue;
    const int base = slice * sps;
    for (int x = 0; x < sps; ++x) m = std::max(m, std::abs(drift[base + x]));
  }
  return m;
}

struct StepCtx {
  LangevinState& s;
  const ActionSpec& action;
  const NoiseSpec& noise;
  const EngineParams& params;
  const DriftTable& table;
  std::vector<cplx>& drift;
  CounterRng rng;
  std::int64_t step_index;
  std::vector<RunawayEvent>* events;
  double cell_w;
  int substeps = 0;
};

// One chunk of Langevin time.  The whole-block drift is evaluated first, so
// every site moves off the same snapshot.  A chunk whose displacement would
// exceed that of a threshold-sized drift over a full step is halved; at depth
// 0 the trigger reads exactly "drift norm > max_drift_norm".
void advance_chunk(StepCtx& c, double chunk, int depth) {
  drift_all(c.s, c.action, c.table, c.drift);
  const double norm = unpinned_drift_max(c.s, c.drift);
  if (norm * chunk > c.params.max_drift_norm * c.params.langevin_step) {
    if (!c.params.adaptive || depth >= c.params.max_halvings)
      throw RunawayError(c.step_index, norm);
    if (c.events) c.events->push_back({c.step_index, norm, depth + 1});
    advance_chunk(c, 0.5 * chunk, depth + 1);
    advance_chunk(c, 0.5 * chunk, depth + 1);
    return;
  }
  const double sd = std::sqrt(2.0 * c.noise.hbar * chunk / c.cell_w);
  const std::uint64_t epoch = c.s.noise_epoch++;
  const int sps = c.s.geo.sites_per_slice();
  for (int slice = 0; slice <= c.s.present; ++slice) {
    if (c.s.pinned(slice)) continue;
    const int base = slice * sps;
    for (int x = 0; x < sps; ++x) {
      const int site = base + x;
      c.s.values[site] += chunk * c.drift[site] +
                          sd * c.rng.gaussian(epoch, static_cast<std::uint64_t>(site));
    }
  }
  c.s.clock += chunk;
  ++c.substeps;
}

}  // namespace

int langevin_step(LangevinState& s, const ActionSpec& action,
                  const NoiseSpec& noise, const EngineParams& params,
                  const DriftTable& table, std::vector<cplx>& drift_buf,
                  std::int64_t step_index, std::vector<RunawayEvent>* events) {
  StepCtx ctx{s,
              action,
              noise,
              params,
              table,
              drift_buf,
              CounterRng::make(noise.master_seed, noise.replica,
                               StreamPurpose::field_noise),
              step_index,
              events,
              s.geo.cell_volume()};
  advance_chunk(ctx, params.langevin_step, 0);
  return ctx.substeps;
}

BurnInReport run_burn_in(LangevinState& s, const ActionSpec& action,
                         const NoiseSpec& noise, const EngineParams& params) {
  params.validate();
  action.validate();
  if (action.mode != s.mode)
    throw std::invalid_argument("action and state disagree on mode");
  DriftTable table = make_drift_table(s.geo, action);
  std::vector<cplx> drift;

  BurnInReport rep;
  rep.steps = params.burn_in_steps;
  rep.probe.reserve(static_cast<size_t>(params.burn_in_steps));
  for (std::int64_t i = 0; i < params.burn_in_steps; ++i) {
    langevin_step(s, action, noise, params, table, drift, i, &rep.events);
    double sum = 0.0;
    const int n = s.stored_sites();
    for (int k = 0; k < n; ++k) sum += s.values[k].real();
    rep.probe.push_back(sum / n);
  }
  if (rep.probe.size() >= 16) {
    try {
      SeriesStatistics st = autocorrelation_time(rep.probe);
      rep.tau_ok = true;
      rep.tau_int = st.tau_int;
    } catch (const std::exception&) {
      rep.tau_ok = false;  // probe too short or degenerate; caller decides
    }
  }
  return rep;
}

namespace {

void apply_pin(LangevinState& s, const SlicePin& pin) {
  if (pin.has_value) {
    const int sps = s.geo.sites_per_slice();
    for (int x = 0; x < sps; ++x) s.at(pin.slice, x) = pin.value;
  }
  s.pin_slice(pin.slice);
}

}  // namespace

LangevinTrajectory run_two_time(LangevinState& s, const ActionSpec& action,
                                const NoiseSpec& noise, const EngineParams& params,
                                const MeasurementSchedule& schedule,
                                const RunPlan& plan) {
  params.validate();
  schedule.validate();
  action.validate();
  if (action.mode != s.mode)
    throw std::invalid_argument("action and state disagree on mode");
  const double a_t = s.geo.time_spacing;
  if (plan.growth) params.validate_tick(a_t);
  for (const auto& ob : plan.observables) ob.validate(s.geo);
  for (const auto& pin : plan.pins)
    if (pin.slice < 0 || pin.slice >= s.geo.time_extent)
      throw std::invalid_argument("pin slice out of range");

  const double dt = params.langevin_step;
  const std::int64_t total_steps = static_cast<std::int64_t>(
      std::ceil((schedule.termination - s.clock) / dt - 1e-9));
  if (plan.growth) {
    const std::int64_t growths = std::max<std::int64_t>(total_steps, 0) /
                                 params.steps_per_coordinate_tick;
    if (s.present + growths > s.geo.time_extent - 1)
      throw std::invalid_argument("schedule runs past the time extent of the block");
  }

  SliceInitPolicy init = plan.init_policy;
  if (init.noise_scale < 0.0)
    init.noise_scale = std::sqrt(2.0 * noise.hbar * dt / s.geo.cell_volume());

  DriftTable table = make_drift_table(s.geo, action);
  std::vector<cplx> drift;
  CounterRng slice_rng =
      CounterRng::make(noise.master_seed, noise.replica, StreamPurpose::slice_init);

  LangevinTrajectory traj;
  traj.steps = std::max<std::int64_t>(total_steps, 0);
  traj.series.reserve(plan.observables.size());
  for (const auto& ob : plan.observables) {
    SampleSeries ser;
    ser.id = ob.id;
    traj.series.push_back(std::move(ser));
  }

  std::vector<bool> pin_done(plan.pins.size(), false);
  auto engage_pins = [&]() {
    for (size_t k = 0; k < plan.pins.size(); ++k) {
      if (pin_done[k]) continue;
      if (plan.pins[k].slice <= s.present) {
        apply_pin(s, plan.pins[k]);
        pin_done[k] = true;
      }
    }
  };
  engage_pins();  // standard mode, or pins on already-revealed slices

  const int prep_slice = static_cast<int>(std::lround(schedule.t1 / a_t));
  bool prep_done = !schedule.pin_preparation;

  for (std::int64_t i = 0; i < total_steps; ++i) {
    langevin_step(s, action, noise, params, table, drift, i, &traj.events);

    if (plan.growth && (i + 1) % params.steps_per_coordinate_tick == 0) {
      grow_present(s, init, slice_rng);
      engage_pins();
    }
    if (!prep_done && s.clock >= schedule.t1 - 1e-9 && prep_slice <= s.present) {
      s.pin_slice(prep_slice);
      prep_done = true;
    }
    if (plan.step_hook) plan.step_hook(s, i);

    if ((i + 1) % schedule.cadence == 0) {
      for (size_t k = 0; k < plan.observables.size(); ++k) {
        const ObservableSpec& ob = plan.observables[k];
        if (!ob.ready(s)) continue;
        if (ob.window_only && (s.clock < schedule.window_lo() - 1e-9 ||
                               s.clock > schedule.window_hi() + 1e-9))
          continue;
        traj.series[k].t.push_back(s.clock);
        traj.series[k].v.push_back(evaluate_observable(s, ob));
      }
    }
  }
  traj.final_clock = s.clock;
  return traj;
}

}  // namespace twotime
