#include "twotime/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twotime {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean of empty series");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("variance needs >= 2 samples");
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

MeanErr jackknife_mean(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw std::invalid_argument("jackknife needs >= 2 values");
  double total = 0.0;
  for (double x : values) total += x;
  double mean = total / n;
  // leave-one-out means; for the plain mean the jackknife error reduces to
  // the standard error, kept in this form so complex estimators can reuse it
  double ss = 0.0;
  for (double x : values) {
    double loo = (total - x) / (n - 1);
    ss += (loo - mean) * (loo - mean);
  }
  MeanErr r;
  r.mean = mean;
  r.err = std::sqrt(ss * (n - 1) / n);
  r.n = n;
  return r;
}

MeanErr binned_jackknife(const std::vector<double>& series, int bin_width) {
  if (bin_width < 1) throw std::invalid_argument("bin width must be >= 1");
  const int nbins = static_cast<int>(series.size()) / bin_width;
  if (nbins < 2)
    throw std::invalid_argument("binned jackknife needs >= 2 full bins");
  std::vector<double> bins(nbins, 0.0);
  for (int b = 0; b < nbins; ++b) {
    double s = 0.0;
    for (int i = 0; i < bin_width; ++i) s += series[b * bin_width + i];
    bins[b] = s / bin_width;
  }
  return jackknife_mean(bins);
}

SeriesStatistics autocorrelation_time(const std::vector<double>& series) {
  const int n = static_cast<int>(series.size());
  if (n < 16)
    throw std::runtime_error("autocorrelation_time: series too short");
  const double m = mean_of(series);
  double c0 = 0.0;
  for (double x : series) c0 += (x - m) * (x - m);
  c0 /= n;
  if (!(c0 > 0.0))
    throw std::invalid_argument("autocorrelation_time: zero variance");

  // rho(t) up to n/4, summed until the self-consistent window W >= 6*tau(W)
  const int t_max = n / 4;
  double tau = 0.5;
  int window = 0;
  bool converged = false;
  for (int t = 1; t <= t_max; ++t) {
    double c = 0.0;
    for (int i = 0; i + t < n; ++i) c += (series[i] - m) * (series[i + t] - m);
    c /= (n - t);
    tau += c / c0;
    if (tau < 0.5) tau = 0.5;  // noise can drive the sum below the i.i.d. floor
    window = t;
    if (t >= 6.0 * tau) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error(
        "autocorrelation_time: no stable window (series too short)");
  if (n < 100.0 * tau)
    throw std::runtime_error(
        "autocorrelation_time: series shorter than 100*tau_int");

  SeriesStatistics st;
  st.n = n;
  st.mean = m;
  st.variance = c0 * n / (n - 1.0);
  st.tau_int = tau;
  st.window = window;
  st.tau_int_err = tau * std::sqrt((4.0 * window + 2.0) / n);
  st.n_eff = n / (2.0 * tau);
  int bin = std::max(1, static_cast<int>(std::ceil(4.0 * tau)));
  if (n / bin >= 2) {
    st.jackknife_error = binned_jackknife(series, bin).err;
  } else {
    st.jackknife_error = std::sqrt(st.variance / st.n_eff);
  }
  return st;
}

FlipTimeEstimate flip_time(const std::vector<double>& times,
                           const std::vector<double>& magnetization,
                           double threshold) {
  if (times.size() != magnetization.size() || times.empty())
    throw std::invalid_argument("flip_time: mismatched or empty series");
  if (!(threshold > 0.0))
    throw std::invalid_argument("flip_time: threshold must be > 0");
  int state = 0;
  std::vector<double> crossings;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double x = magnetization[i];
    int s = x >= threshold ? 1 : (x <= -threshold ? -1 : 0);
    if (s != 0 && s != state) {
      if (state != 0) crossings.push_back(times[i]);
      state = s;
    }
  }
  if (state == 0)
    throw std::runtime_error("flip_time: series never settles past threshold");

  FlipTimeEstimate r;
  const int flips = static_cast<int>(crossings.size());
  r.intervals = flips;
  if (flips >= 5) {
    std::vector<double> gaps(crossings.size() - 1);
    for (std::size_t i = 1; i < crossings.size(); ++i)
      gaps[i - 1] = crossings[i] - crossings[i - 1];
    r.mean_time = mean_of(gaps);
    r.error = std::sqrt(variance_of(gaps) / gaps.size());
  } else {
    // too few flips at desk scale: report a lower bound from the run span
    r.censored = true;
    double span = times.back() - times.front();
    r.mean_time = span / std::max(1, flips);
    r.error = 0.0;
  }
  return r;
}

LineFit weighted_line_fit(const std::vector<double>& x,
                          const std::vector<double>& y,
                          const std::vector<double>& yerr) {
  if (x.size() != y.size() || x.size() != yerr.size() || x.size() < 2)
    throw std::invalid_argument("weighted_line_fit: need >= 2 points");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(yerr[i] > 0.0))
      throw std::invalid_argument("weighted_line_fit: errors must be > 0");
    double w = 1.0 / (yerr[i] * yerr[i]);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i];
  }
  double det = sw * swxx - swx * swx;
  if (!(det > 0.0)) throw std::runtime_error("weighted_line_fit: singular fit");
  LineFit f;
  f.slope = (sw * swxy - swx * swy) / det;
  f.intercept = (swxx * swy - swx * swxy) / det;
  f.slope_err = std::sqrt(sw / det);
  f.intercept_err = std::sqrt(swxx / det);
  return f;
}

}  // namespace twotime
