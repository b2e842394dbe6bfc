#pragma once

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "sobcurve/curve.hpp"
#include "sobcurve/errors.hpp"
#include "sobcurve/shapes.hpp"

namespace testing {

using sobcurve::FourierCurve;

// Unit circle plus a smooth random perturbation (coefficients decay like j^-3).
inline FourierCurve perturbed_circle(int N, std::mt19937& rng, double amp) {
  std::uniform_real_distribution<double> u(-1, 1);
  FourierCurve c = sobcurve::circle_curve(N);
  for (int r = 0; r < c.rows(); ++r) {
    const int j = (r + 1) / 2;
    for (int k = 0; k < 2; ++k) c.matrix()(r, k) += amp * u(rng) / std::pow(1.0 + j, 3);
  }
  return c;
}

inline FourierCurve random_field(int N, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  FourierCurve c(2, N);
  for (int r = 0; r < c.rows(); ++r)
    for (int k = 0; k < 2; ++k) c.matrix()(r, k) = u(rng) / std::pow(1.0 + (r + 1) / 2, 2);
  return c;
}

inline FourierCurve rotate(const FourierCurve& c, double phi) {
  FourierCurve out = c;
  Eigen::Matrix2d R;
  R << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  out.matrix() = c.matrix() * R.transpose();
  return out;
}

inline FourierCurve translate(const FourierCurve& c, double x, double y) {
  FourierCurve out = c;
  out.matrix()(0, 0) += x;
  out.matrix()(0, 1) += y;
  return out;
}

inline sobcurve::ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const sobcurve::Error& e) {
    return e.code();
  }
  FAIL("expected a sobcurve::Error");
  return sobcurve::ErrorCode::InvalidArgument;
}

}  // namespace testing
