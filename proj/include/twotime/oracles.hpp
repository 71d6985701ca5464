#pragma once

#include <array>
#include <vector>

#include "twotime/lattice.hpp"

namespace twotime {

// Exact references for validation.  Nothing in this header touches the
// Langevin drift code paths; values come from closed forms or dense linear
// algebra on the same discretized actions.

// Momentum-space free propagator G(p) = 1/(sum_mu (2-2cos p_mu a_mu)/a_mu^2 + m^2)
// on a fully periodic lattice.  momentum[0] is the time-axis integer mode,
// momentum[1..n] the spatial ones.
struct PropagatorEntry {
  std::array<int, 4> momentum{0, 0, 0, 0};
  double value = 0.0;
};
std::vector<PropagatorEntry> free_field_propagator_exact(const LatticeGeometry& g,
                                                         double m);
double free_field_propagator_point(const LatticeGeometry& g, double m,
                                   const std::array<int, 4>& momentum);

// Exact single-site marginal variance of the free field, hbar/(N w) sum_p G(p).
double free_field_site_variance(const LatticeGeometry& g, double m, double hbar);

// Euclidean oscillator two-point function, hbar = m = 1 units.
double ho_correlator_exact(double omega, double tau);  // (1/(2w)) e^{-w tau}
// Infinite-chain result for the discretized worldline at spacing a_t:
// amplitude hbar/(2 m omega_r), decay e^{-mu tau/a_t} with
// cosh(mu) = 1 + a_t^2 omega^2/2.
double ho_correlator_lattice(double omega, double tau, double a_t);

// Ornstein-Uhlenbeck stationary law for dx = -k x dt + sqrt(2D) dW.
struct OuStationary {
  double variance = 0.0;        // D/k
  double tau_int_steps = 0.0;   // 1/(k dt), leading order
};
OuStationary ou_stationary(double k, double D, double dt);
double ou_autocorrelation(double k, double tau);  // e^{-k tau}

// Dense diagonalization of the Euclidean transfer operator
//   T(x,y) = sqrt(m/(2 pi hbar a_t)) exp(-[ m(x-y)^2/(2 a_t)
//            + a_t (V(x)+V(y))/2 ] / hbar) dx
// on a uniform grid (<= 2048 points).  Energies from the leading eigenvalues,
// connected correlators from the spectral decomposition.
struct TransferMatrixResult {
  std::vector<double> x_grid;
  std::vector<double> psi0;      // positive, normalized sum psi^2 dx = 1
  double ground_energy = 0.0;    // -hbar ln(lambda0)/a_t
  double gap = 0.0;              // E1 - E0
  double a_t = 0.0;
  // connected <x(0) x(k a_t)> on the infinite chain
  double correlator(int k) const;
  std::vector<double> lambda_ratio;   // lambda_n / lambda_0
  std::vector<double> x_matrix_elem;  // <0|x|n>
};
TransferMatrixResult transfer_matrix_ground_state(
    const std::vector<double>& v_grid, double x_lo, double x_hi, double a_t,
    double m, double hbar = 1.0);

}  // namespace twotime
