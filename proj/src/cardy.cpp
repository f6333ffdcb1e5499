#include "percolog/cardy.hpp"

#include <cmath>
#include <stdexcept>

namespace percolog {

double elliptic_K(double m) {
  if (!(m >= 0.0 && m < 1.0)) throw std::invalid_argument("elliptic_K: m outside [0,1)");
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  for (int i = 0; i < 64 && std::fabs(a - b) > 1e-17 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return M_PI / (2.0 * a);
}

namespace {

double agm(double a, double b) {
  for (int i = 0; i < 64 && std::fabs(a - b) > 1e-17 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return a;
}

}  // namespace

double aspect_to_eta(double aspect) {
  if (!(aspect > 0.0)) throw std::invalid_argument("aspect_to_eta: aspect must be positive");
  // Exact reflection keeps eta in (0, 1/2], where the arithmetic below has
  // no cancellation even for extreme aspects.
  if (aspect < 1.0) return 1.0 - aspect_to_eta(1.0 / aspect);
  // The descending Landen transform turns 2K(m)/K(1-m) = aspect with
  // eta = ((1-k)/(1+k))^2 into the direct relation
  //   K(1-eta)/K(eta) = AGM(1, sqrt(1-eta)) / AGM(1, sqrt(eta)) = aspect,
  // strictly decreasing in eta: bisection on eta itself.
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f = agm(1.0, std::sqrt(1.0 - mid)) / agm(1.0, std::sqrt(mid));
    (f > aspect ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// 2F1(1/3, 2/3; 4/3; eta) by its power series; callers keep eta <= 1/2.
double hyp2f1_third(double eta) {
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < 2000; ++k) {
    term *= (1.0 / 3.0 + k) * (2.0 / 3.0 + k) / ((4.0 / 3.0 + k) * (1.0 + k)) * eta;
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return sum;
}

}  // namespace

double cardy_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("cardy_eta: eta outside [0,1]");
  if (eta == 0.0) return 0.0;
  if (eta == 1.0) return 1.0;
  if (eta > 0.5) return 1.0 - cardy_eta(1.0 - eta);
  static const double prefactor =
      std::tgamma(2.0 / 3.0) / (std::tgamma(1.0 / 3.0) * std::tgamma(4.0 / 3.0));
  return prefactor * std::cbrt(eta) * hyp2f1_third(eta);
}

double cardy_crossing(double aspect) { return cardy_eta(aspect_to_eta(aspect)); }

}  // namespace percolog
