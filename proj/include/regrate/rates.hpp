#pragma once

#include <cstdint>
#include <functional>

#include "regrate/exact.hpp"

namespace regrate {

using ThetaFn = std::function<std::uint64_t(std::uint64_t)>;
using GammaFn = std::function<std::uint64_t(const Quad&)>;

// The closed-form rate calculus. Every ceiling is taken in exact arithmetic:
// the inputs are dyadic rationals (doubles) and the only irrationality that
// can appear is the single square root inside P, which Quad closes over.

/// Modulus of liminf: Delta_{b,theta}(eps, m) = theta(m + ceil(b^2/eps^2)).
/// Guarantees a witness N in [m, Delta] with ||x_N - A_N x_N|| <= eps.
std::uint64_t delta(double b, const ThetaFn& theta, double eps, std::uint64_t m);
std::uint64_t delta(double b, const ThetaFn& theta, const Quad& eps, std::uint64_t m);

/// Rate of A_n-asymptotic regularity:
///   Phi(eps) = theta(gamma(eps/6b) + ceil(4 b^2/eps^2) + 1)
///            = Delta(eps/2, gamma(eps/6b) + 1).
std::uint64_t phi(double b, const ThetaFn& theta, const GammaFn& gamma, double eps);
std::uint64_t phi(double b, const ThetaFn& theta, const GammaFn& gamma, const Quad& eps);

/// h_{a,b}(eps) = eps + sqrt((1-a)/a) sqrt(eps^2 + 2 b eps), extended by
/// h(0) = 0. Transfers an A_n-residual bound to per-map residual bounds.
double h(double a, double b, double eps);

/// P_{a,b}(eps) = min{ eps/2, sqrt(a eps^2 / (4(1-a)) + b^2) - b }; the largest
/// threshold with h(a, b, P) <= eps. For a = 1 the second branch diverges and
/// the value is eps/2.
double p_threshold(double a, double b, double eps);
Quad p_threshold_quad(double a, double b, const BigRat& eps);

/// Rate of T_i-asymptotic regularity (nonexpansive family): Phi'(eps) = Phi(P(eps)).
std::uint64_t phi_prime(double a, double b, const ThetaFn& theta, const GammaFn& gamma, double eps);

/// General rate for k-strict pseudocontractions: Phi''(eps) = Phi'((1-k) eps).
std::uint64_t phi_double_prime(double a, double b, double k, const ThetaFn& theta, const GammaFn& gamma,
                               double eps);

/// Pigeonhole bound on the admissible strictness constant: k <= 1 - 1/(theta(1)+1).
double k_ceiling(const ThetaFn& theta);

/// The quantities every rate depends on: ||x|| <= b and ||x - p|| <= b,
/// a <= inf lambda_i^(n), k the family constant, theta and gamma the moduli.
struct RateInputs {
    double b = 0.0;
    double a = 1.0;
    double k = 0.0;
    ThetaFn theta;
    GammaFn gamma;

    std::uint64_t delta(double eps, std::uint64_t m) const { return regrate::delta(b, theta, eps, m); }
    std::uint64_t phi(double eps) const { return regrate::phi(b, theta, gamma, eps); }
    std::uint64_t phi_prime(double eps) const { return regrate::phi_prime(a, b, theta, gamma, eps); }
    std::uint64_t phi_double_prime(double eps) const {
        return regrate::phi_double_prime(a, b, k, theta, gamma, eps);
    }
    double k_ceiling() const { return regrate::k_ceiling(theta); }
};

}  // namespace regrate
