#pragma once

namespace percolog {

// Complete elliptic integral of the first kind, parameter convention m = k^2,
// valid for m in [0, 1).
double elliptic_K(double m);

// Solve 2 K(m) / K(1-m) = aspect for m, then eta = ((1-k)/(1+k))^2 with
// k = sqrt(m). Strictly increasing map; aspect must be positive.
double aspect_to_eta(double aspect);

// Crossing probability as a function of eta in (0, 1):
//   pi(eta) = [Gamma(2/3) / (Gamma(1/3) Gamma(4/3))] * eta^{1/3}
//             * 2F1(1/3, 2/3; 4/3; eta),
// with the duality reflection pi(eta) = 1 - pi(1-eta) used for eta > 1/2.
double cardy_eta(double eta);

// Probability of an open crossing spanning the width of a rectangle with
// width/height = aspect. Decreasing in aspect; aspect 1 -> exactly 1/2;
// cardy_crossing(a) + cardy_crossing(1/a) = 1.
double cardy_crossing(double aspect);

}  // namespace percolog
