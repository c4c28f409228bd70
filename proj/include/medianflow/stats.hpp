#pragma once

#include <vector>

namespace medianflow {

struct Interval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(long successes, long trials, double z = 1.96);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  int points = 0;
};

/// Ordinary least squares y = a + b x with the usual standard error of b.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// fit_line on (log x, log y); needs at least 4 points, all positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& v);

}  // namespace medianflow
