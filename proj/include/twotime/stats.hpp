#pragma once

#include <vector>

namespace twotime {

struct MeanErr {
  double mean = 0.0;
  double err = 0.0;
  int n = 0;
};

double mean_of(const std::vector<double>& v);
double variance_of(const std::vector<double>& v);  // unbiased, n-1

// Leave-one-out jackknife over independent values (e.g. replica means).
MeanErr jackknife_mean(const std::vector<double>& values);

// Binned jackknife for a correlated series; bin width should be a few tau_int.
MeanErr binned_jackknife(const std::vector<double>& series, int bin_width);

// mean/variance/tau_int/jackknife bundle for one recorded series
struct SeriesStatistics {
  int n = 0;
  double mean = 0.0;
  double variance = 0.0;       // unbiased sample variance
  double tau_int = 0.5;        // integrated autocorrelation time, step units
  double tau_int_err = 0.0;
  double n_eff = 0.0;          // n / (2 tau_int)
  double jackknife_error = 0.0;  // error of the mean, binned jackknife
  int window = 0;              // self-consistent summation window used
};

// Windowed-sum estimator with automatic cutoff at ~6*tau_int.  Throws
// std::invalid_argument on zero variance and std::runtime_error when the
// series is shorter than ~100*tau_int (no stable window).
SeriesStatistics autocorrelation_time(const std::vector<double>& series);

// Mean Langevin time between sign-settled crossings of +-threshold
// (hysteresis two-state trigger).  Fewer than 5 flips: censored, the span of
// the series is reported as a lower bound.  Never settling at all throws.
struct FlipTimeEstimate {
  double mean_time = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool censored = false;
};
FlipTimeEstimate flip_time(const std::vector<double>& times,
                           const std::vector<double>& magnetization,
                           double threshold);

// Weighted least squares y = intercept + slope*x with per-point errors.
struct LineFit {
  double slope = 0.0;
  double slope_err = 0.0;
  double intercept = 0.0;
  double intercept_err = 0.0;
};
LineFit weighted_line_fit(const std::vector<double>& x,
                          const std::vector<double>& y,
                          const std::vector<double>& yerr);

}  // namespace twotime
