#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace llab {

/// One Dormand-Prince 5(4) step for a complex scalar ODE y' = f(t, y).
/// `k1` is f(t, y) on entry; on return it holds f(t + h, y5) (FSAL).
/// Returns the 5th-order solution; `error` receives |y5 - y4|.
template <typename Scalar, typename Field>
std::complex<Scalar> dormand_prince_step(Field&& f, Scalar t, const std::complex<Scalar>& y, Scalar h,
                                         std::complex<Scalar>& k1, Scalar& error) {
  using C = std::complex<Scalar>;
  constexpr Scalar a21 = Scalar(1) / 5;
  constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187, a53 = Scalar(64448) / 6561,
                   a54 = Scalar(-212) / 729;
  constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33, a63 = Scalar(46732) / 5247,
                   a64 = Scalar(49) / 176, a65 = Scalar(-5103) / 18656;
  constexpr Scalar b1 = Scalar(35) / 384, b3 = Scalar(500) / 1113, b4 = Scalar(125) / 192,
                   b5 = Scalar(-2187) / 6784, b6 = Scalar(11) / 84;
  constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                   e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;

  const C k2 = f(t + h / 5, y + h * (a21 * k1));
  const C k3 = f(t + 3 * h / 10, y + h * (a31 * k1 + a32 * k2));
  const C k4 = f(t + 4 * h / 5, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const C k5 = f(t + 8 * h / 9, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const C k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const C y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const C k7 = f(t + h, y5);
  error = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
  k1 = k7;
  return y5;
}

/// Standard step-size update for a method of local order 5.
template <typename Scalar>
Scalar next_step_size(Scalar h, Scalar scaled_error) {
  if (scaled_error <= Scalar(0)) return h * 5;
  const Scalar factor = Scalar(0.9) * std::pow(scaled_error, Scalar(-0.2));
  return h * std::clamp(factor, Scalar(0.2), Scalar(5));
}

}  // namespace llab
