#include "regrate/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace regrate {

namespace {

void require_eps_positive(const Quad& eps, const char* where) {
    if (eps.sign() <= 0) throw std::domain_error(std::string(where) + ": eps must be positive");
}

void require_b_positive(double b, const char* where) {
    if (!(b > 0.0)) throw std::domain_error(std::string(where) + ": b must be positive");
}

void require_a_valid(double a, const char* where) {
    if (!(a > 0.0) || a > 1.0) throw std::domain_error(std::string(where) + ": a must lie in (0,1]");
}

}  // namespace

std::uint64_t delta(double b, const ThetaFn& theta, const Quad& eps, std::uint64_t m) {
    require_b_positive(b, "delta");
    require_eps_positive(eps, "delta");
    const Quad b2 = Quad(rat_from_double(b) * rat_from_double(b));
    const BigInt cells = (b2 / (eps * eps)).ceil();
    return theta(to_u64_checked(BigInt(m) + cells, "delta"));
}

std::uint64_t delta(double b, const ThetaFn& theta, double eps, std::uint64_t m) {
    return delta(b, theta, Quad::from_double(eps), m);
}

std::uint64_t phi(double b, const ThetaFn& theta, const GammaFn& gamma, const Quad& eps) {
    require_b_positive(b, "phi");
    require_eps_positive(eps, "phi");
    const BigRat b_rat = rat_from_double(b);
    const std::uint64_t g = gamma(eps / Quad(BigRat(6) * b_rat));
    const Quad four_b2 = Quad(BigRat(4) * b_rat * b_rat);
    const BigInt cells = (four_b2 / (eps * eps)).ceil();
    return theta(to_u64_checked(BigInt(g) + cells + 1, "phi"));
}

std::uint64_t phi(double b, const ThetaFn& theta, const GammaFn& gamma, double eps) {
    return phi(b, theta, gamma, Quad::from_double(eps));
}

double h(double a, double b, double eps) {
    require_a_valid(a, "h");
    require_b_positive(b, "h");
    if (eps < 0.0) throw std::domain_error("h: eps must be nonnegative");
    if (eps == 0.0) return 0.0;  // continuous extension
    if (a == 1.0) return eps;
    return eps + std::sqrt((1.0 - a) / a) * std::sqrt(eps * eps + 2.0 * b * eps);
}

Quad p_threshold_quad(double a, double b, const BigRat& eps) {
    require_a_valid(a, "p_threshold");
    require_b_positive(b, "p_threshold");
    if (eps <= 0) throw std::domain_error("p_threshold: eps must be positive");
    const Quad half(eps / 2);
    if (a == 1.0) return half;  // the second branch diverges; min picks eps/2
    const BigRat a_rat = rat_from_double(a);
    const BigRat b_rat = rat_from_double(b);
    const BigRat s = a_rat * eps * eps / (4 * (BigRat(1) - a_rat)) + b_rat * b_rat;
    const Quad root = Quad(-b_rat, BigRat(1), s);  // sqrt(s) - b, the positive root of X^2 + 2bX - a eps^2/(4(1-a))
    return root < half ? root : half;
}

double p_threshold(double a, double b, double eps) {
    return p_threshold_quad(a, b, rat_from_double(eps)).to_double();
}

std::uint64_t phi_prime(double a, double b, const ThetaFn& theta, const GammaFn& gamma, double eps) {
    const Quad p = p_threshold_quad(a, b, rat_from_double(eps));
    return phi(b, theta, gamma, p);
}

std::uint64_t phi_double_prime(double a, double b, double k, const ThetaFn& theta, const GammaFn& gamma,
                               double eps) {
    if (k < 0.0 || k >= 1.0) throw std::domain_error("phi_double_prime: k outside [0,1)");
    const BigRat reduced_eps = (BigRat(1) - rat_from_double(k)) * rat_from_double(eps);
    const Quad p = p_threshold_quad(a, b, reduced_eps);
    return phi(b, theta, gamma, p);
}

double k_ceiling(const ThetaFn& theta) {
    const std::uint64_t t1 = theta(1);
    return 1.0 - 1.0 / (static_cast<double>(t1) + 1.0);
}

}  // namespace regrate
