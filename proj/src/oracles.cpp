#include "twotime/oracles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twotime {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_fully_periodic(const LatticeGeometry& g) {
  g.validate();
  if (g.time_boundary != Boundary::periodic)
    throw std::invalid_argument("momentum-space propagator needs a periodic time axis");
  for (int d = 0; d < g.spatial_dims; ++d)
    if (g.spatial_boundary[d] != Boundary::periodic)
      throw std::invalid_argument("momentum-space propagator needs periodic spatial axes");
}

// (2 - 2 cos(2 pi k / N)) / a^2, the eigenvalue of -d^2 on one axis.
double axis_momentum_sq(int k, int extent, double spacing) {
  double p = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(extent);
  return (2.0 - 2.0 * std::cos(p)) / (spacing * spacing);
}

double denominator(const LatticeGeometry& g, double m,
                   const std::array<int, 4>& momentum) {
  double d = m * m + axis_momentum_sq(momentum[0], g.time_extent, g.time_spacing);
  for (int k = 0; k < g.spatial_dims; ++k)
    d += axis_momentum_sq(momentum[k + 1], g.spatial_extent[k], g.spatial_spacing);
  return d;
}

}  // namespace

double free_field_propagator_point(const LatticeGeometry& g, double m,
                                   const std::array<int, 4>& momentum) {
  require_fully_periodic(g);
  if (m < 0.0) throw std::invalid_argument("mass must be non-negative");
  if (momentum[0] < 0 || momentum[0] >= g.time_extent)
    throw std::out_of_range("time momentum mode out of range");
  for (int k = 0; k < g.spatial_dims; ++k)
    if (momentum[k + 1] < 0 || momentum[k + 1] >= g.spatial_extent[k])
      throw std::out_of_range("spatial momentum mode out of range");
  double d = denominator(g, m, momentum);
  if (d <= 0.0)
    throw std::invalid_argument("zero momentum mode requires a positive mass");
  return 1.0 / d;
}

std::vector<PropagatorEntry> free_field_propagator_exact(const LatticeGeometry& g,
                                                         double m) {
  require_fully_periodic(g);
  if (m <= 0.0)
    throw std::invalid_argument("propagator table includes the zero mode; mass must be positive");
  std::vector<PropagatorEntry> table;
  table.reserve(static_cast<size_t>(g.total_sites()));
  std::array<int, 4> mom{0, 0, 0, 0};
  // odometer over all momentum tuples, time axis fastest
  int axes = 1 + g.spatial_dims;
  std::array<int, 4> extent{g.time_extent, 0, 0, 0};
  for (int k = 0; k < g.spatial_dims; ++k) extent[k + 1] = g.spatial_extent[k];
  while (true) {
    PropagatorEntry e;
    e.momentum = mom;
    e.value = 1.0 / denominator(g, m, mom);
    table.push_back(e);
    int ax = 0;
    while (ax < axes) {
      if (++mom[ax] < extent[ax]) break;
      mom[ax] = 0;
      ++ax;
    }
    if (ax == axes) break;
  }
  return table;
}

double free_field_site_variance(const LatticeGeometry& g, double m, double hbar) {
  if (hbar <= 0.0) throw std::invalid_argument("hbar must be positive");
  auto table = free_field_propagator_exact(g, m);
  double sum = 0.0;
  for (const auto& e : table) sum += e.value;
  double n = static_cast<double>(g.total_sites());
  return hbar * sum / (n * g.cell_volume());
}

double ho_correlator_exact(double omega, double tau) {
  if (omega <= 0.0) throw std::invalid_argument("oscillator frequency must be positive");
  return std::exp(-omega * std::abs(tau)) / (2.0 * omega);
}

double ho_correlator_lattice(double omega, double tau, double a_t) {
  if (omega <= 0.0) throw std::invalid_argument("oscillator frequency must be positive");
  if (a_t <= 0.0) throw std::invalid_argument("time spacing must be positive");
  double aw = a_t * omega;
  double omega_r = omega * std::sqrt(1.0 + 0.25 * aw * aw);
  // nearest-neighbor transfer ratio of the Gaussian chain
  double r = 1.0 + 0.5 * aw * aw - aw * std::sqrt(1.0 + 0.25 * aw * aw);
  double mu = -std::log(r);
  return std::exp(-mu * std::abs(tau) / a_t) / (2.0 * omega_r);
}

OuStationary ou_stationary(double k, double D, double dt) {
  if (k <= 0.0) throw std::invalid_argument("relaxation rate must be positive");
  if (D < 0.0) throw std::invalid_argument("diffusion constant must be non-negative");
  if (dt <= 0.0) throw std::invalid_argument("step size must be positive");
  OuStationary s;
  s.variance = D / k;
  s.tau_int_steps = 1.0 / (k * dt);
  return s;
}

double ou_autocorrelation(double k, double tau) {
  if (k <= 0.0) throw std::invalid_argument("relaxation rate must be positive");
  return std::exp(-k * std::abs(tau));
}

double TransferMatrixResult::correlator(int k) const {
  if (k < 0) k = -k;
  double sum = 0.0;
  for (size_t n = 0; n < lambda_ratio.size(); ++n) {
    double w = x_matrix_elem[n] * x_matrix_elem[n];
    if (k == 0) {
      sum += w;  // completeness: full variance about <x>
    } else if (lambda_ratio[n] > 0.0) {
      sum += std::pow(lambda_ratio[n], k) * w;
    }
  }
  return sum;
}

TransferMatrixResult transfer_matrix_ground_state(
    const std::vector<double>& v_grid, double x_lo, double x_hi, double a_t,
    double m, double hbar) {
  size_t n = v_grid.size();
  if (n < 8) throw std::invalid_argument("transfer matrix grid needs at least 8 points");
  if (n > 2048) throw std::invalid_argument("transfer matrix grid capped at 2048 points");
  if (!(x_hi > x_lo)) throw std::invalid_argument("grid interval is empty");
  if (a_t <= 0.0) throw std::invalid_argument("time spacing must be positive");
  if (m <= 0.0) throw std::invalid_argument("mass must be positive");
  if (hbar <= 0.0) throw std::invalid_argument("hbar must be positive");

  double h = (x_hi - x_lo) / static_cast<double>(n - 1);
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = x_lo + h * static_cast<double>(i);

  double pref = std::sqrt(m / (2.0 * kPi * hbar * a_t)) * h;
  Eigen::MatrixXd K(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double dx = x[i] - x[j];
      double expo = -(0.5 * m * dx * dx / a_t + 0.5 * a_t * (v_grid[i] + v_grid[j])) / hbar;
      double val = pref * std::exp(expo);
      K(i, j) = val;
      K(j, i) = val;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("transfer matrix diagonalization failed");
  const auto& ev = es.eigenvalues();   // ascending
  const auto& vec = es.eigenvectors();
  double lam0 = ev(static_cast<Eigen::Index>(n) - 1);
  if (!(lam0 > 0.0))
    throw std::runtime_error("leading transfer eigenvalue is not positive");

  TransferMatrixResult r;
  r.a_t = a_t;
  r.x_grid = x;
  r.ground_energy = -hbar * std::log(lam0) / a_t;
  double lam1 = ev(static_cast<Eigen::Index>(n) - 2);
  r.gap = (lam1 > 0.0) ? -hbar * std::log(lam1 / lam0) / a_t
                       : std::numeric_limits<double>::infinity();

  Eigen::VectorXd v0 = vec.col(static_cast<Eigen::Index>(n) - 1);
  double mean = v0.sum();
  if (mean < 0.0) v0 = -v0;
  r.psi0.resize(n);
  for (size_t i = 0; i < n; ++i) r.psi0[i] = v0(static_cast<Eigen::Index>(i)) / std::sqrt(h);

  // <0|x|k> over the excited spectrum; eigenvectors are l2-orthonormal so
  // the h weights cancel.
  r.lambda_ratio.reserve(n - 1);
  r.x_matrix_elem.reserve(n - 1);
  for (Eigen::Index c = static_cast<Eigen::Index>(n) - 2; c >= 0; --c) {
    double me = 0.0;
    for (size_t i = 0; i < n; ++i)
      me += v0(static_cast<Eigen::Index>(i)) * x[i] * vec(static_cast<Eigen::Index>(i), c);
    r.lambda_ratio.push_back(ev(c) / lam0);
    r.x_matrix_elem.push_back(me);
  }
  return r;
}

}  // namespace twotime
