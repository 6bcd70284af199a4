#include "gls/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "gls/errors.hpp"

namespace gls {

namespace {

QuadratureResult checked(double value, double error, std::string_view what, double abs_tol,
                         double rel_tol) {
    if (!std::isfinite(value) || error > std::max(abs_tol, rel_tol * std::abs(value)))
        throw NonIntegrable("quadrature did not converge: " + std::string(what), error);
    return {value, error};
}

}  // namespace

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       std::string_view what, double abs_tol, double rel_tol) {
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    try {
        value = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol * 1e-2,
                                     &error, &l1);
    } catch (const std::exception& e) {
        throw NonIntegrable(std::string(what) + ": " + e.what(), INFINITY);
    }
    return checked(value, error, what, abs_tol, rel_tol);
}

QuadratureResult integrate_finite(const std::function<double(double)>& f, double a, double b,
                                  std::string_view what, double abs_tol, double rel_tol) {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    if (a == b) return {0.0, 0.0};
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    try {
        value = integrator.integrate(f, a, b, rel_tol * 1e-2, &error, &l1);
    } catch (const std::exception& e) {
        throw NonIntegrable(std::string(what) + ": " + e.what(), INFINITY);
    }
    return checked(value, error, what, abs_tol, rel_tol);
}

}  // namespace gls
