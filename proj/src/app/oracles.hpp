#pragma once

// Reference values used by the acceptance battery. tests/test_oracles.cpp
// recomputes each one with independent code.

namespace sglab::app::oracle {

// log 2 + E log ch(z sqrt(xi'(1))) - theta(1)/2 for xi(x) = 0.09 x^2
constexpr double kGuerraRSQuadrature = 0.73148918256685042;
// log 2 + xi(1)/2 for the same xi
constexpr double kGuerraRSClosedForm = 0.73814718055994531;
// 2-sat, alpha = 0.3, beta = 0.5, sigma = 0, case n=1 m=2 r=1 C={1}{1}
constexpr double kKsatInvariance = -0.0070432546029472538;

}  // namespace sglab::app::oracle
