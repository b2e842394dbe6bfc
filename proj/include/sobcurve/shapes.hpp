#pragma once

#include <string>

#include "sobcurve/curve.hpp"

namespace sobcurve {

// Procedural stand-in shapes in R², all of order N.
FourierCurve circle_curve(int N, double radius = 1.0);
FourierCurve ellipse_curve(int N, double a, double b);
// Polar r(θ) = 1 + amp·cos(lobes·θ); needs N ≥ lobes + 1.
FourierCurve star_curve(int N, double amp = 0.3, int lobes = 5);
// circle | ellipse | star
FourierCurve named_shape(const std::string& name, int N);

// sin(kθ)·(cos θ, sin θ), the mode-k normal field of the unit circle.
FourierCurve circle_normal_mode(int N, int k);
// 90° counter-clockwise rotation of c'.
FourierCurve rotated_tangent(const FourierCurve& c);

}  // namespace sobcurve
