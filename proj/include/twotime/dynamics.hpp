#pragma once

#include <array>
#include <vector>

#include "twotime/lattice.hpp"

namespace twotime {

enum class ActionKind { scalar_field, worldline };

// Discretized action.  scalar_field: forward-difference kinetic term plus
// site potential m^2 phi^2/2 + lambda phi^4/4!.  worldline: one degree of
// freedom per time slice, kinetic (m/2)((x_{j+1}-x_j)/a_t)^2 plus an external
// polynomial potential V(x) = sum_k potential[k] x^k.  In minkowski mode the
// spatial-gradient and potential terms enter with opposite sign and drifts
// pick up the factor i and the damping term -epsilon*phi.
struct ActionSpec {
  ActionKind kind = ActionKind::scalar_field;
  Mode mode = Mode::euclidean;
  double mass = 1.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  std::array<double, 5> potential = {0, 0, 0, 0, 0};

  void validate() const;
  // dV/dx for the worldline polynomial, analytic in x
  cplx potential_derivative(cplx x) const;
  cplx potential_value(cplx x) const;
};

// Full action of the stored block (slices <= present).  Complex-valued so the
// minkowski branch can be probed with complexified configurations; euclidean
// real configurations give a real result.
cplx action_total(const LangevinState& s, const ActionSpec& a);

// Langevin drift at one site.  euclidean: -(1/w) dS/dphi with w = a^n a_t
// (the functional derivative, so the process samples exp(-S/hbar)).
// minkowski: i (1/w) dS/dphi - epsilon*phi.  Pinned slices still report their
// drift; the integrator is what skips them.
cplx drift_field(const LangevinState& s, const ActionSpec& a, int site);
cplx drift_worldline(const LangevinState& s, const ActionSpec& a, int slice);

// Precomputed link table for whole-block drift evaluation in the integrator
// hot loop.  Links never reach beyond the present: the row for the present
// slice drops its forward-time link unless it is a periodic wrap.
struct DriftTable {
  std::vector<int> row_start;   // size total_sites+1
  std::vector<int> nbr;         // neighbor site per link
  std::vector<double> coef;     // kinetic coefficient per link (sign folded in)
  std::vector<std::uint8_t> has_fwd_time;  // link 0 of the row targets slice+1
  std::array<double, 4> dpot{};  // site-term derivative coefficients (x^0..x^3)
  double pot_sign = 1.0;
};

DriftTable make_drift_table(const LatticeGeometry& g, const ActionSpec& a);
void drift_all(const LangevinState& s, const ActionSpec& a,
               const DriftTable& t, std::vector<cplx>& out);

// Single-time stochastic-mechanics model: W = -ln psi0 on a uniform grid.
// sigma is the diffusion normalization entering V = (W')^2/(2 sigma) - W''/2;
// the solve/reconstruct round trip closes at the default sigma = 1.
struct NelsonModel {
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::vector<double> w;
  double sigma = 1.0;
  double ground_energy = 0.0;

  int points() const { return static_cast<int>(w.size()); }
  double dx() const { return (x_hi - x_lo) / (points() - 1); }
  double grid_x(int i) const { return x_lo + i * dx(); }
};

// Ground state of the finite-difference Hamiltonian -1/(2 sigma) d^2/dx^2 + V
// with walls just outside [x_lo, x_hi].  Throws if the ground state is
// degenerate or not nodeless.
NelsonModel solve_w(const std::vector<double>& v_grid, double x_lo, double x_hi,
                    double sigma = 1.0);

// V - E0 reconstructed from W by central differences (4th order inside,
// lower order at the edges).  Needs at least a 5-point grid.
std::vector<double> compute_v(const NelsonModel& m);

// Drift -dW/dx, linearly interpolated between grid points.  Throws when x
// leaves the grid.
double nelson_drift(const NelsonModel& m, double x);

// -dW/dx tabulated on the grid, for samplers that interpolate themselves.
std::vector<double> nelson_drift_grid(const NelsonModel& m);

}  // namespace twotime
