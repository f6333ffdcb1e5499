#pragma once

#include <vector>

namespace percolog {

struct FitPoint {
  double scale = 0.0;  // abscissa (separation, radius, scale index, ...)
  double value = 0.0;
  double sigma = 0.0;  // 1-sigma error on value, must be > 0
};

struct FitResult {
  double intercept = 0.0;
  double slope = 0.0;
  double sigma_intercept = 0.0;
  double sigma_slope = 0.0;
  double r2 = 0.0;  // weighted coefficient of determination
  int npoints = 0;  // points used in the fit
  int excluded = 0; // points dropped (non-finite, sigma <= 0, or value <= 0 for log fits)
};

// value ~ A * scale^slope : weighted straight line in (ln scale, ln value),
// weights (value/sigma)^2. Decay exponents are -slope. Points with
// value <= 0 are excluded (and counted); fewer than 3 usable points throws.
FitResult fit_power_law(const std::vector<FitPoint>& pts);

// value ~ a + b * ln(scale) : weights 1/sigma^2.
FitResult fit_log_model(const std::vector<FitPoint>& pts);

// value ~ a + b * scale : weights 1/sigma^2.
FitResult fit_linear(const std::vector<FitPoint>& pts);

}  // namespace percolog
