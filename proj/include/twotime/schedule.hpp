#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twotime/lattice.hpp"

namespace twotime {

// Measurement bookkeeping: a preparation instant t1, a readout instant t2,
// and an averaging window of duration delta centered on t2.  All times are
// Langevin times; in growing-block runs the frontier keeps coordinate time
// equal to Langevin time, so the same numbers address slices.
struct MeasurementSchedule {
  double t1 = 0.0;
  double t2 = 0.0;
  double delta = 0.0;
  int cadence = 1;           // steps between recorded samples
  double termination = 0.0;  // run stops once the clock reaches this
  bool pin_preparation = false;

  double window_lo() const { return t2 - 0.5 * delta; }
  double window_hi() const { return t2 + 0.5 * delta; }
  void validate() const;
};

// Slice addressing that works while the block is still growing: either a
// fixed index or an offset measured back from the frontier.
struct SliceRef {
  int index = 0;
  bool from_frontier = false;

  static SliceRef absolute(int i) { return {i, false}; }
  static SliceRef behind_frontier(int off) { return {off, true}; }
  int resolve(const LangevinState& s) const {
    return from_frontier ? s.present - index : index;
  }
};

struct ObservablePoint {
  SliceRef slice;
  int spatial = 0;
};

enum class ObservableKind {
  product,       // product of field values at the listed points
  band_product,  // mean over j in [band_lo, band_hi] of v(j)·v(j+lag)
  block_mean,    // mean of v over all sites in slices [band_lo, band_hi]
  phase_factor,  // exp(i k v) at a single point
};

struct ObservableSpec {
  std::string id;
  ObservableKind kind = ObservableKind::product;
  std::vector<ObservablePoint> points;  // product / phase_factor
  int band_lo = 0;
  int band_hi = 0;
  int band_spatial = 0;
  int lag = 0;
  double k = 0.0;
  bool window_only = false;

  void validate(const LatticeGeometry& g) const;
  // all referenced slices exist at the current frontier
  bool ready(const LangevinState& s) const;
};

cplx evaluate_observable(const LangevinState& s, const ObservableSpec& spec);

struct SampleSeries {
  std::string id;
  std::vector<double> t;  // Langevin time stamps
  std::vector<cplx> v;
};

// one adaptive subdivision decision during integration
struct RunawayEvent {
  std::int64_t step = 0;
  double drift_norm = 0.0;
  int depth = 0;  // halvings applied at the moment of the event
};

struct BurnInReport {
  std::int64_t steps = 0;
  std::vector<double> probe;  // per-step block mean of the field, real part
  bool tau_ok = false;        // autocorrelation estimate converged
  double tau_int = 0.0;       // steps; meaningful only when tau_ok
  std::vector<RunawayEvent> events;
};

struct LangevinTrajectory {
  std::vector<SampleSeries> series;
  std::vector<RunawayEvent> events;
  BurnInReport burn_in;
  std::int64_t steps = 0;
  double final_clock = 0.0;

  const SampleSeries& find(const std::string& id) const;
  bool has(const std::string& id) const;
};

}  // namespace twotime
