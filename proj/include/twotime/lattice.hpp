#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "twotime/rng.hpp"

namespace twotime {

using cplx = std::complex<double>;

enum class Mode { euclidean, minkowski };
enum class Boundary { periodic, open };

const char* to_string(Mode m);
const char* to_string(Boundary b);

// Hypercubic block of n spatial dimensions (n = 0 is a worldline) plus one
// coordinate-time axis of time_extent slices.  Spacings are physical; most
// scenarios run at a = a_t = 1.
struct LatticeGeometry {
  int spatial_dims = 0;                       // 0..3
  std::array<int, 3> spatial_extent = {1, 1, 1};
  double spatial_spacing = 1.0;
  int time_extent = 1;
  double time_spacing = 1.0;
  std::array<Boundary, 3> spatial_boundary = {Boundary::periodic,
                                              Boundary::periodic,
                                              Boundary::periodic};
  Boundary time_boundary = Boundary::open;

  int sites_per_slice() const;
  int total_sites() const;
  // volume element a^n * a_t; scales noise and functional derivatives
  double cell_volume() const;
  void validate() const;  // throws std::invalid_argument on bad extents/spacings
};

// Flat site index: slice-major, spatial index x0 + L0*(x1 + L1*x2) within a
// slice.  site = slice * sites_per_slice + spatial.
int spatial_index(const LatticeGeometry& g, const std::array<int, 3>& x);
int site_index(const LatticeGeometry& g, int slice, int spatial);
int slice_of_site(const LatticeGeometry& g, int site);

// Nearest neighbors that exist under the boundary rules, with the axis and
// direction they sit on (axis 0 = time, 1..n = spatial).  Self-links occur
// for periodic extent-1 axes and contribute zero gradient.
struct NeighborLink {
  int site;
  int axis;
  int dir;  // +1 forward, -1 backward
};
std::vector<NeighborLink> site_neighbors(const LatticeGeometry& g, int site);

// How grow_present fills the slice it reveals.
enum class SliceInit { zero, copy_previous_plus_noise, gaussian_free_field };

struct SliceInitPolicy {
  SliceInit kind = SliceInit::copy_previous_plus_noise;
  // copy_previous_plus_noise: std dev of the per-site kick, normally
  // sqrt(2*hbar*dt'/(a^n*a_t)) to match one Langevin step.
  // gaussian_free_field: std dev of the i.i.d. site draw (exact free-field
  // marginal, computed by the reference module).
  double noise_scale = 0.0;
};

// Configuration evolving in Langevin time t'.  Storage is preallocated for
// time_extent slices, but only slices <= present exist; accessors reject
// anything beyond the present.  In euclidean mode values stay real.
struct LangevinState {
  LatticeGeometry geo;
  Mode mode = Mode::euclidean;
  std::vector<cplx> values;
  std::vector<std::uint8_t> slice_pinned;  // pinned slices skip updates
  double clock = 0.0;                      // t'
  int present = 0;
  std::uint64_t noise_epoch = 0;  // advanced once per integrator substep / init

  int stored_sites() const { return (present + 1) * geo.sites_per_slice(); }
  const cplx& at(int slice, int spatial) const;
  cplx& at(int slice, int spatial);
  bool pinned(int slice) const;
  void pin_slice(int slice);
};

LangevinState new_state(const LatticeGeometry& g, Mode mode,
                        int initial_present = 0);

// Reveals one more slice and fills it per policy.  History slices are not
// touched.  Throws std::out_of_range at the far end of the block.
void grow_present(LangevinState& s, const SliceInitPolicy& policy,
                  const CounterRng& rng);

// Checkpoint container (JSON, versioned).  Doubles survive the round trip
// bit-exactly.  Engine-level fields that the state does not own travel in
// CheckpointExtra.
struct CheckpointExtra {
  std::uint64_t master_seed = 0;
  std::uint32_t replica = 0;
  std::uint64_t step_index = 0;  // completed integrator steps
  std::string config_hash;
};

std::string checkpoint_to_json(const LangevinState& s, const CheckpointExtra& x);
void checkpoint_from_json(const std::string& text, LangevinState& s,
                          CheckpointExtra& x);
void write_checkpoint_file(const std::string& path, const LangevinState& s,
                           const CheckpointExtra& x);
bool read_checkpoint_file(const std::string& path, LangevinState& s,
                          CheckpointExtra& x);

}  // namespace twotime
