#include "percolog/fits.hpp"

#include <cmath>
#include <stdexcept>

namespace percolog {

namespace {

// Weighted least squares on prepared (x, y, w) triples. Errors come from the
// supplied point sigmas (no chi-square rescaling).
FitResult wls(const std::vector<double>& x, const std::vector<double>& y,
              const std::vector<double>& w, int excluded) {
  const size_t n = x.size();
  if (n < 3) throw std::invalid_argument("fit: fewer than 3 usable points");
  double sw = 0.0, xb = 0.0, yb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sw += w[i];
    xb += w[i] * x[i];
    yb += w[i] * y[i];
  }
  xb /= sw;
  yb /= sw;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - xb;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * (y[i] - yb);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit: degenerate abscissae");
  FitResult r;
  r.slope = sxy / sxx;
  r.intercept = yb - r.slope * xb;
  r.sigma_slope = std::sqrt(1.0 / sxx);
  r.sigma_intercept = std::sqrt(1.0 / sw + xb * xb / sxx);
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double fit = r.intercept + r.slope * x[i];
    ss_res += w[i] * (y[i] - fit) * (y[i] - fit);
    ss_tot += w[i] * (y[i] - yb) * (y[i] - yb);
  }
  r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  r.npoints = static_cast<int>(n);
  r.excluded = excluded;
  return r;
}

bool usable(const FitPoint& p) {
  return std::isfinite(p.scale) && std::isfinite(p.value) && std::isfinite(p.sigma) &&
         p.sigma > 0.0;
}

}  // namespace

FitResult fit_power_law(const std::vector<FitPoint>& pts) {
  std::vector<double> x, y, w;
  int excluded = 0;
  for (const FitPoint& p : pts) {
    if (!usable(p) || p.value <= 0.0 || p.scale <= 0.0) {
      ++excluded;
      continue;
    }
    x.push_back(std::log(p.scale));
    y.push_back(std::log(p.value));
    const double rel = p.value / p.sigma;
    w.push_back(rel * rel);
  }
  return wls(x, y, w, excluded);
}

FitResult fit_log_model(const std::vector<FitPoint>& pts) {
  std::vector<double> x, y, w;
  int excluded = 0;
  for (const FitPoint& p : pts) {
    if (!usable(p) || p.scale <= 0.0) {
      ++excluded;
      continue;
    }
    x.push_back(std::log(p.scale));
    y.push_back(p.value);
    w.push_back(1.0 / (p.sigma * p.sigma));
  }
  return wls(x, y, w, excluded);
}

FitResult fit_linear(const std::vector<FitPoint>& pts) {
  std::vector<double> x, y, w;
  int excluded = 0;
  for (const FitPoint& p : pts) {
    if (!usable(p)) {
      ++excluded;
      continue;
    }
    x.push_back(p.scale);
    y.push_back(p.value);
    w.push_back(1.0 / (p.sigma * p.sigma));
  }
  return wls(x, y, w, excluded);
}

}  // namespace percolog
