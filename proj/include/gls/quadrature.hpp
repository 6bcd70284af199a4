#pragma once

#include <functional>
#include <string_view>

namespace gls {

inline constexpr double kQuadAbsTol = 1e-10;
inline constexpr double kQuadRelTol = 1e-9;

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Integral over [a, inf) by the double-exponential (exp-sinh) rule.
/// Throws NonIntegrable when the error estimate exceeds
/// max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       std::string_view what, double abs_tol = kQuadAbsTol,
                                       double rel_tol = kQuadRelTol);

/// Integral over a finite [a, b] by the tanh-sinh rule.
QuadratureResult integrate_finite(const std::function<double(double)>& f, double a, double b,
                                  std::string_view what, double abs_tol = kQuadAbsTol,
                                  double rel_tol = kQuadRelTol);

}  // namespace gls
