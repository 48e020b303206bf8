#pragma once

// Test-side reference values, computed without the library.

#include <cmath>
#include <vector>

namespace oracle {

// 50-digit reference run, h = y^2, rho = sigma = 1.
inline constexpr double kC1 = 0.8354233485952242;   // K = 0.5
inline constexpr double kC2 = 1.1551949767222151;   // K = 1
inline constexpr double kV0 = 0.4391443984062303;   // band value at 0, K = 0.5
inline constexpr double kNashV1Diagonal = 0.6239161197869268;
inline constexpr double kNashBandCostHalfK = 0.4804153705540157;

// h(z) = sqrt(1 + z^2) + z^2 / 2, rho = 0.7, sigma = 1.3.
inline constexpr double kCustomRho = 0.7;
inline constexpr double kCustomSigma = 1.3;
inline constexpr double kCustomP[3][2] = {
    {0.0, 4.034869250598423}, {0.5, 4.303308371137197}, {1.5, 6.372619020053682}};

// Quadratic h = a y^2: p = a y^2 / rho + a sigma^2 / rho^2.
struct Quadratic {
  long double a, sigma, rho, k;

  long double rate() const { return std::sqrt(2 * rho) / sigma; }
  long double p(long double y) const { return a * y * y / rho + a * sigma * sigma / (rho * rho); }
  long double dp(long double y) const { return 2 * a * y / rho; }
  long double d2p() const { return 2 * a / rho; }

  long double residual(long double x) const {
    return (dp(x) - k) / d2p() - std::tanh(rate() * x) / rate();
  }

  long double threshold() const {
    long double lo = 0, hi = 1;
    while (residual(hi) <= 0) hi *= 2;
    for (int i = 0; i < 200; ++i) {
      long double mid = 0.5L * (lo + hi);
      (residual(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5L * (lo + hi);
  }

  long double value(long double y) const {
    long double c = threshold();
    long double r = rate();
    long double amp = -d2p() / (r * r * std::cosh(r * c));
    long double ay = std::fabs(y);
    if (ay <= c) return amp * std::cosh(r * ay) + p(ay);
    return amp * std::cosh(r * c) + p(c) + k * (ay - c);
  }
};

// Discrete two-sided reflection of x0 + cumsum(dz) on [-c, c], by clamping.
struct Reflected {
  std::vector<double> x, up, down;
};

inline Reflected reflect(const std::vector<double>& dz, double c, double x0) {
  Reflected r;
  double x = x0, u = 0, d = 0;
  if (x < -c) { u += -c - x; x = -c; }
  if (x > c) { d += x - c; x = c; }
  r.x.push_back(x); r.up.push_back(u); r.down.push_back(d);
  for (double z : dz) {
    x += z;
    if (x < -c) { u += -c - x; x = -c; }
    if (x > c) { d += x - c; x = c; }
    r.x.push_back(x); r.up.push_back(u); r.down.push_back(d);
  }
  return r;
}

}  // namespace oracle
