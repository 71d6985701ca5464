#include "twotime/dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace twotime {

void ActionSpec::validate() const {
  if (mass < 0.0) throw std::invalid_argument("action: mass must be >= 0");
  if (kind == ActionKind::scalar_field && lambda < 0.0)
    throw std::invalid_argument("action: lambda must be >= 0");
  if (epsilon < 0.0) throw std::invalid_argument("action: epsilon must be >= 0");
  if (mode == Mode::minkowski && !(epsilon > 0.0))
    throw std::invalid_argument("action: minkowski mode needs epsilon > 0");
}

cplx ActionSpec::potential_value(cplx x) const {
  // Horner, analytic in x
  cplx v = potential[4];
  for (int k = 3; k >= 0; --k) v = v * x + potential[k];
  return v;
}

cplx ActionSpec::potential_derivative(cplx x) const {
  cplx d = 4.0 * potential[4];
  for (int k = 3; k >= 1; --k) d = d * x + static_cast<double>(k) * potential[k];
  return d;
}

namespace {

// forward neighbor slice under boundary rules, -1 when absent
int forward_slice(const LatticeGeometry& g, int slice, int present) {
  if (slice + 1 <= present) return slice + 1;
  if (slice == g.time_extent - 1 && g.time_boundary == Boundary::periodic)
    return 0;  // wrap; only reachable when present == time_extent-1
  return -1;
}

}  // namespace

cplx action_total(const LangevinState& s, const ActionSpec& a) {
  a.validate();
  const LatticeGeometry& g = s.geo;
  if (a.kind == ActionKind::worldline && g.spatial_dims != 0)
    throw std::invalid_argument("worldline action needs spatial_dims == 0");
  const double w = g.cell_volume();
  const double s_time = 1.0;
  const double s_space = (a.mode == Mode::minkowski) ? -1.0 : 1.0;
  const double s_pot = (a.mode == Mode::minkowski) ? -1.0 : 1.0;
  const double kin = (a.kind == ActionKind::worldline) ? a.mass : 1.0;
  const int sps = g.sites_per_slice();

  cplx total{0.0, 0.0};
  for (int slice = 0; slice <= s.present; ++slice) {
    int fs = forward_slice(g, slice, s.present);
    for (int sp = 0; sp < sps; ++sp) {
      cplx phi = s.values[site_index(g, slice, sp)];
      if (fs >= 0) {
        cplx d = (s.values[site_index(g, fs, sp)] - phi) / g.time_spacing;
        total += s_time * w * 0.5 * kin * d * d;
      }
      if (a.kind == ActionKind::scalar_field) {
        // forward spatial links
        std::array<int, 3> x{0, 0, 0};
        int rem = sp;
        for (int d = 0; d < g.spatial_dims; ++d) {
          x[d] = rem % g.spatial_extent[d];
          rem /= g.spatial_extent[d];
        }
        for (int d = 0; d < g.spatial_dims; ++d) {
          std::array<int, 3> y = x;
          y[d] += 1;
          if (y[d] >= g.spatial_extent[d]) {
            if (g.spatial_boundary[d] == Boundary::periodic)
              y[d] = 0;
            else
              continue;
          }
          cplx dphi =
              (s.values[site_index(g, slice, spatial_index(g, y))] - phi) /
              g.spatial_spacing;
          total += s_space * w * 0.5 * dphi * dphi;
        }
        cplx p2 = phi * phi;
        total += s_pot * w * (0.5 * a.mass * a.mass * p2 +
                              (a.lambda / 24.0) * p2 * p2);
      } else {
        total += s_pot * g.time_spacing * a.potential_value(phi);
      }
    }
  }
  return total;
}

DriftTable make_drift_table(const LatticeGeometry& g, const ActionSpec& a) {
  a.validate();
  g.validate();
  if (a.kind == ActionKind::worldline && g.spatial_dims != 0)
    throw std::invalid_argument("worldline action needs spatial_dims == 0");
  const double s_space = (a.mode == Mode::minkowski) ? -1.0 : 1.0;
  const double kin = (a.kind == ActionKind::worldline) ? a.mass : 1.0;
  const double ct = kin / (g.time_spacing * g.time_spacing);
  const double cs = s_space / (g.spatial_spacing * g.spatial_spacing);

  DriftTable t;
  int total = g.total_sites();
  t.row_start.assign(total + 1, 0);
  t.has_fwd_time.assign(total, 0);
  t.nbr.reserve(total * 2 * (g.spatial_dims + 1));
  t.coef.reserve(t.nbr.capacity());
  for (int site = 0; site < total; ++site) {
    t.row_start[site] = static_cast<int>(t.nbr.size());
    int slice = site / g.sites_per_slice();
    // forward-time link first so the present-slice row can drop it
    for (const NeighborLink& l : site_neighbors(g, site)) {
      if (l.axis == 0 && l.dir == +1) {
        bool wraps = (slice == g.time_extent - 1);
        t.has_fwd_time[site] = wraps ? 0 : 1;
        t.nbr.push_back(l.site);
        t.coef.push_back(ct);
      }
    }
    for (const NeighborLink& l : site_neighbors(g, site)) {
      if (l.axis == 0 && l.dir == +1) continue;
      t.nbr.push_back(l.site);
      t.coef.push_back(l.axis == 0 ? ct : cs);
    }
  }
  t.row_start[total] = static_cast<int>(t.nbr.size());

  if (a.kind == ActionKind::scalar_field) {
    t.dpot = {0.0, a.mass * a.mass, 0.0, a.lambda / 6.0};
  } else {
    t.dpot = {a.potential[1], 2.0 * a.potential[2], 3.0 * a.potential[3],
              4.0 * a.potential[4]};
  }
  t.pot_sign = (a.mode == Mode::minkowski) ? -1.0 : 1.0;
  return t;
}

namespace {

inline cplx site_potential_derivative(const DriftTable& t, cplx phi) {
  return ((t.dpot[3] * phi + t.dpot[2]) * phi + t.dpot[1]) * phi + t.dpot[0];
}

// (1/w) dS/dphi at one site, links clipped at the present
inline cplx grad_over_w(const LangevinState& s, const DriftTable& t, int site,
                        int slice) {
  const cplx phi = s.values[site];
  cplx acc = t.pot_sign * site_potential_derivative(t, phi);
  int b = t.row_start[site];
  const int e = t.row_start[site + 1];
  if (slice == s.present && t.has_fwd_time[site] &&
      s.present + 1 < s.geo.time_extent) {
    ++b;  // forward-time neighbor not revealed yet
  }
  for (int k = b; k < e; ++k) acc += t.coef[k] * (phi - s.values[t.nbr[k]]);
  return acc;
}

}  // namespace

void drift_all(const LangevinState& s, const ActionSpec& a, const DriftTable& t,
               std::vector<cplx>& out) {
  const int sps = s.geo.sites_per_slice();
  const int n = s.stored_sites();
  out.resize(n);
  if (a.mode == Mode::euclidean) {
    for (int site = 0; site < n; ++site)
      out[site] = -grad_over_w(s, t, site, site / sps);
  } else {
    const cplx i_unit{0.0, 1.0};
    for (int site = 0; site < n; ++site)
      out[site] =
          i_unit * grad_over_w(s, t, site, site / sps) - a.epsilon * s.values[site];
  }
}

namespace {

cplx drift_one(const LangevinState& s, const ActionSpec& a, int site) {
  int slice = slice_of_site(s.geo, site);
  if (slice > s.present) throw std::out_of_range("drift: slice beyond the present");
  DriftTable t = make_drift_table(s.geo, a);
  cplx g = grad_over_w(s, t, site, slice);
  if (a.mode == Mode::euclidean) return -g;
  return cplx{0.0, 1.0} * g - a.epsilon * s.values[site];
}

}  // namespace

cplx drift_field(const LangevinState& s, const ActionSpec& a, int site) {
  if (a.kind != ActionKind::scalar_field)
    throw std::invalid_argument("drift_field needs a scalar_field action");
  if (site < 0 || site >= s.geo.total_sites())
    throw std::out_of_range("drift: site index out of range");
  return drift_one(s, a, site);
}

cplx drift_worldline(const LangevinState& s, const ActionSpec& a, int slice) {
  if (a.kind != ActionKind::worldline)
    throw std::invalid_argument("drift_worldline needs a worldline action");
  if (slice < 0 || slice >= s.geo.time_extent)
    throw std::out_of_range("drift: slice index out of range");
  return drift_one(s, a, slice);
}

NelsonModel solve_w(const std::vector<double>& v_grid, double x_lo, double x_hi,
                    double sigma) {
  const int n = static_cast<int>(v_grid.size());
  if (n < 5) throw std::invalid_argument("solve_w: need at least 5 grid points");
  if (!(x_hi > x_lo)) throw std::invalid_argument("solve_w: empty grid range");
  if (!(sigma > 0.0)) throw std::invalid_argument("solve_w: sigma must be > 0");
  const double h = (x_hi - x_lo) / (n - 1);
  const double kc = 1.0 / (2.0 * sigma);

  // 4th-order 5-point Laplacian, Dirichlet walls just outside the grid
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  const double c0 = 30.0 / 12.0, c1 = -16.0 / 12.0, c2 = 1.0 / 12.0;
  for (int i = 0; i < n; ++i) {
    H(i, i) = kc * c0 / (h * h) + v_grid[i];
    if (i + 1 < n) H(i, i + 1) = H(i + 1, i) = kc * c1 / (h * h);
    if (i + 2 < n) H(i, i + 2) = H(i + 2, i) = kc * c2 / (h * h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_w: eigensolver failed");
  const double e0 = es.eigenvalues()(0);
  const double e1 = es.eigenvalues()(1);
  double scale = std::max(std::abs(e0), std::abs(e1));
  if (e1 - e0 <= 1e-10 * std::max(1.0, scale))
    throw std::runtime_error("solve_w: ground state is degenerate");

  Eigen::VectorXd psi = es.eigenvectors().col(0);
  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(psi(i)) > std::abs(psi(imax))) imax = i;
  if (psi(imax) < 0.0) psi = -psi;
  psi /= std::sqrt(psi.squaredNorm() * h);
  for (int i = 0; i < n; ++i)
    if (!(psi(i) > 0.0))
      throw std::runtime_error("solve_w: ground state is not nodeless");

  NelsonModel m;
  m.x_lo = x_lo;
  m.x_hi = x_hi;
  m.sigma = sigma;
  m.ground_energy = e0;
  m.w.resize(n);
  for (int i = 0; i < n; ++i) m.w[i] = -std::log(psi(i));
  return m;
}

namespace {

// W' and W'' on the grid: 4th-order central where the stencil fits,
// lower order toward the edges
void grid_derivatives(const std::vector<double>& w, double h,
                      std::vector<double>& d1, std::vector<double>& d2) {
  const int n = static_cast<int>(w.size());
  d1.assign(n, 0.0);
  d2.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d1[i] = (w[i - 2] - 8.0 * w[i - 1] + 8.0 * w[i + 1] - w[i + 2]) / (12.0 * h);
      d2[i] = (-w[i - 2] + 16.0 * w[i - 1] - 30.0 * w[i] + 16.0 * w[i + 1] -
               w[i + 2]) /
              (12.0 * h * h);
    } else if (i >= 1 && i + 1 < n) {
      d1[i] = (w[i + 1] - w[i - 1]) / (2.0 * h);
      d2[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
    } else if (i == 0) {
      d1[i] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h);
      d2[i] = (w[0] - 2.0 * w[1] + w[2]) / (h * h);
    } else {
      d1[i] = (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * h);
      d2[i] = (w[n - 1] - 2.0 * w[n - 2] + w[n - 3]) / (h * h);
    }
  }
}

}  // namespace

std::vector<double> compute_v(const NelsonModel& m) {
  const int n = m.points();
  if (n < 3) throw std::invalid_argument("compute_v: need at least 3 grid points");
  std::vector<double> d1, d2;
  grid_derivatives(m.w, m.dx(), d1, d2);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = d1[i] * d1[i] / (2.0 * m.sigma) - 0.5 * d2[i];
  return v;
}

std::vector<double> nelson_drift_grid(const NelsonModel& m) {
  if (m.points() < 3)
    throw std::invalid_argument("nelson_drift: need at least 3 grid points");
  std::vector<double> d1, d2;
  grid_derivatives(m.w, m.dx(), d1, d2);
  for (double& d : d1) d = -d;
  return d1;
}

double nelson_drift(const NelsonModel& m, double x) {
  std::vector<double> d = nelson_drift_grid(m);
  if (x < m.x_lo || x > m.x_hi)
    throw std::out_of_range("nelson_drift: x outside the model grid");
  const int n = m.points();
  const double h = m.dx();
  int i = static_cast<int>((x - m.x_lo) / h);
  if (i > n - 2) i = n - 2;
  double f = (x - m.grid_x(i)) / h;
  return (1.0 - f) * d[i] + f * d[i + 1];
}

}  // namespace twotime
