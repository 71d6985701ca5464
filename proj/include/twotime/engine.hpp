#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "twotime/dynamics.hpp"
#include "twotime/rng.hpp"
#include "twotime/schedule.hpp"

namespace twotime {

// Discretized noise law: eta has per-site variance 2*hbar/(cell_volume * dt'),
// so one update contributes variance 2*hbar*dt'/cell_volume.
struct NoiseSpec {
  double hbar = 1.0;
  double langevin_step = 0.01;
  double variance = 0.0;  // derived, stored explicitly
  std::uint64_t master_seed = 0;
  std::uint32_t replica = 0;

  static NoiseSpec make(const LatticeGeometry& g, double hbar, double dt,
                        std::uint64_t master_seed, std::uint32_t replica);
  void validate() const;
};

// One noise field for a whole lattice at a given step, scaled as eta.
// The engine itself draws per-substep increments from the same stream.
std::vector<double> sample_noise(const LatticeGeometry& g, const NoiseSpec& spec,
                                 std::uint64_t step_index);

struct EngineParams {
  double langevin_step = 0.01;
  int steps_per_coordinate_tick = 1;  // a_t / dt', must divide exactly
  std::int64_t burn_in_steps = 0;
  double max_drift_norm = 1e6;
  bool adaptive = true;
  int max_halvings = 16;

  void validate() const;
  void validate_tick(double a_t) const;  // two-time runs: spt * dt' == a_t
};

class RunawayError : public std::runtime_error {
 public:
  RunawayError(std::int64_t step_index, double norm);
  std::int64_t step;
  double drift_norm;
};

// One nominal step of size params.langevin_step, Euler-Maruyama, with the
// whole-lattice drift evaluated from the pre-substep snapshot (Jacobi sweep).
// When the drift norm exceeds max_drift_norm the step is subdivided in halves
// until the would-be displacement matches that of a threshold-sized drift over
// a full step; with adaptive=false, or past max_halvings, that is a runaway.
// Pinned slices are skipped.  Returns the number of substeps taken.
int langevin_step(LangevinState& s, const ActionSpec& action,
                  const NoiseSpec& noise, const EngineParams& params,
                  const DriftTable& table, std::vector<cplx>& drift_buf,
                  std::int64_t step_index, std::vector<RunawayEvent>* events);

// burn_in_steps steps with no observable recording beyond the probe
// (block mean of the field), whose autocorrelation time gauges adequacy.
BurnInReport run_burn_in(LangevinState& s, const ActionSpec& action,
                         const NoiseSpec& noise, const EngineParams& params);

struct SlicePin {
  int slice = 0;
  bool has_value = false;
  cplx value = 0.0;  // applied when the pin engages, then frozen
};

struct RunPlan {
  std::vector<ObservableSpec> observables;
  bool growth = true;
  // frontier slice initialization; negative noise_scale means one update's
  // worth of noise, sqrt(2*hbar*dt'/cell_volume)
  SliceInitPolicy init_policy{SliceInit::copy_previous_plus_noise, -1.0};
  std::vector<SlicePin> pins;
  std::function<void(const LangevinState&, std::int64_t)> step_hook;
};

// The two-time loop: alternates steps_per_coordinate_tick Langevin steps with
// one grow_present call so the frontier's coordinate time tracks the Langevin
// clock; growth=false runs the standard fixed-block process on the same
// schedule.  Preparation pinning engages when the clock reaches t1.
LangevinTrajectory run_two_time(LangevinState& s, const ActionSpec& action,
                                const NoiseSpec& noise, const EngineParams& params,
                                const MeasurementSchedule& schedule,
                                const RunPlan& plan);

}  // namespace twotime
