#include "twotime/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace twotime {

void MeasurementSchedule::validate() const {
  if (!(t1 < t2)) throw std::invalid_argument("schedule needs t1 < t2");
  if (!(delta > 0.0)) throw std::invalid_argument("window duration must be positive");
  if (cadence < 1) throw std::invalid_argument("sampling cadence must be at least 1");
  if (termination < window_hi() - 1e-12)
    throw std::invalid_argument("termination must reach the end of the measurement window");
}

void ObservableSpec::validate(const LatticeGeometry& g) const {
  if (id.empty()) throw std::invalid_argument("observable needs an id");
  int sps = g.sites_per_slice();
  switch (kind) {
    case ObservableKind::product:
      if (points.empty())
        throw std::invalid_argument("product observable needs at least one point");
      break;
    case ObservableKind::phase_factor:
      if (points.size() != 1)
        throw std::invalid_argument("phase factor takes exactly one point");
      break;
    case ObservableKind::band_product:
      if (lag < 0) throw std::invalid_argument("band lag must be non-negative");
      [[fallthrough]];
    case ObservableKind::block_mean: {
      if (band_lo < 0 || band_hi < band_lo)
        throw std::invalid_argument("band bounds must satisfy 0 <= lo <= hi");
      int top = band_hi + (kind == ObservableKind::band_product ? lag : 0);
      if (top >= g.time_extent)
        throw std::invalid_argument("band extends past the lattice");
      if (band_spatial < 0 || band_spatial >= sps)
        throw std::invalid_argument("band spatial index out of range");
      break;
    }
  }
  for (const auto& p : points) {
    if (p.spatial < 0 || p.spatial >= sps)
      throw std::invalid_argument("observable spatial index out of range");
    if (!p.slice.from_frontier &&
        (p.slice.index < 0 || p.slice.index >= g.time_extent))
      throw std::invalid_argument("observable slice out of range");
  }
}

bool ObservableSpec::ready(const LangevinState& s) const {
  auto in_block = [&](int j) { return j >= 0 && j <= s.present; };
  switch (kind) {
    case ObservableKind::product:
    case ObservableKind::phase_factor:
      for (const auto& p : points)
        if (!in_block(p.slice.resolve(s))) return false;
      return true;
    case ObservableKind::band_product:
      return in_block(band_lo) && in_block(band_hi + lag);
    case ObservableKind::block_mean:
      return in_block(band_lo) && in_block(band_hi);
  }
  return false;
}

cplx evaluate_observable(const LangevinState& s, const ObservableSpec& spec) {
  switch (spec.kind) {
    case ObservableKind::product: {
      cplx prod = 1.0;
      for (const auto& p : spec.points)
        prod *= s.at(p.slice.resolve(s), p.spatial);
      return prod;
    }
    case ObservableKind::phase_factor: {
      const auto& p = spec.points.front();
      return std::exp(cplx(0.0, 1.0) * spec.k * s.at(p.slice.resolve(s), p.spatial));
    }
    case ObservableKind::band_product: {
      cplx sum = 0.0;
      for (int j = spec.band_lo; j <= spec.band_hi; ++j)
        sum += s.at(j, spec.band_spatial) * s.at(j + spec.lag, spec.band_spatial);
      return sum / static_cast<double>(spec.band_hi - spec.band_lo + 1);
    }
    case ObservableKind::block_mean: {
      cplx sum = 0.0;
      int sps = s.geo.sites_per_slice();
      for (int j = spec.band_lo; j <= spec.band_hi; ++j)
        for (int x = 0; x < sps; ++x) sum += s.at(j, x);
      return sum / (static_cast<double>(spec.band_hi - spec.band_lo + 1) * sps);
    }
  }
  throw std::logic_error("unhandled observable kind");
}

const SampleSeries& LangevinTrajectory::find(const std::string& id) const {
  for (const auto& s : series)
    if (s.id == id) return s;
  throw std::out_of_range("no recorded series named '" + id + "'");
}

bool LangevinTrajectory::has(const std::string& id) const {
  for (const auto& s : series)
    if (s.id == id) return true;
  return false;
}

}  // namespace twotime
