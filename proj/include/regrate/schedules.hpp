#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "regrate/exact.hpp"
#include "regrate/report.hpp"

namespace regrate {

/// Step sequence (t_n) with its divergence-rate modulus theta:
///   sum_{n=0}^{theta(N)} (t_n - k)(1 - t_n) >= N   for all N.
/// theta is supplied alongside the sequence (it is a premise, not something
/// recomputed from the values); validate_theta checks their consistency.
class StepSchedule {
public:
    using TFn = std::function<double(std::uint64_t)>;
    using ThetaFn = std::function<std::uint64_t(std::uint64_t)>;

    StepSchedule(TFn t, double k_floor, ThetaFn theta, ojson descriptor);

    double t(std::uint64_t n) const { return t_(n); }
    double k_floor() const { return k_floor_; }
    std::uint64_t theta(std::uint64_t big_n) const { return theta_(big_n); }
    const ThetaFn& theta_fn() const { return theta_; }
    const ojson& descriptor() const { return descriptor_; }

    /// Same sequence with a caller-supplied divergence modulus (the modulus is
    /// a premise, so configs may pin their own).
    StepSchedule with_theta(ThetaFn theta, ojson descriptor) const {
        return StepSchedule(t_, k_floor_, std::move(theta), std::move(descriptor));
    }

private:
    TFn t_;
    double k_floor_;
    ThetaFn theta_;
    ojson descriptor_;
};

/// Convex mixing weights (lambda_i^(n)) with a uniform lower bound a > 0 and a
/// Cauchy modulus gamma for sum_j sum_i |lambda_i^(j+1) - lambda_i^(j)|:
///   sum_{j=gamma(eps)+1}^{gamma(eps)+n} sum_i |...| <= eps  for all n, eps > 0.
class MixSchedule {
public:
    using LambdaFn = std::function<double(std::size_t, std::uint64_t)>;
    using RowFn = std::function<void(std::uint64_t, std::span<double>)>;
    using GammaFn = std::function<std::uint64_t(const Quad&)>;

    MixSchedule(std::size_t n_maps, LambdaFn lambda, double a, GammaFn gamma, ojson descriptor, RowFn row = {});

    std::size_t n_maps() const { return n_maps_; }
    double lambda(std::size_t i, std::uint64_t n) const;
    void lambda_row(std::uint64_t n, std::span<double> out) const;
    double a() const { return a_; }
    std::uint64_t gamma(const Quad& eps) const;
    std::uint64_t gamma(double eps) const { return gamma(Quad::from_double(eps)); }
    const GammaFn& gamma_fn() const { return gamma_; }
    const ojson& descriptor() const { return descriptor_; }

    /// Same weights with a caller-supplied Cauchy modulus.
    MixSchedule with_gamma(GammaFn gamma, ojson descriptor) const {
        return MixSchedule(n_maps_, lambda_, a_, std::move(gamma), std::move(descriptor), row_);
    }

private:
    std::size_t n_maps_;
    LambdaFn lambda_;
    double a_;
    GammaFn gamma_;
    ojson descriptor_;
    RowFn row_;
};

/// t_n == t with k < t < 1; theta(N) = ceil(N / ((t-k)(1-t))), computed exactly.
StepSchedule constant_step(double t, double k);

/// lambda_i^(n) == weights[i]; gamma == 0; a = min(weights).
MixSchedule constant_mix(std::vector<double> weights);

/// lambda_i^(n) = limit[i] + c[i] r^n with sum(limit) = 1, sum(c) = 0,
/// 0 < r < 1. The increment series has the exact geometric tail
/// sum_{j >= m+1} (sum_i |c_i|)(1-r) r^j = (sum_i |c_i|) r^{m+1}, so
/// gamma(eps) = least m with (sum_i |c_i|) r^{m+1} <= eps (decided exactly).
MixSchedule geometric_mix(std::vector<double> limit, std::vector<double> c, double r);

/// The nonexpansive-case schedule t'_n = 1 - (1 - t_n)/(1 - k) with k_floor 0.
/// theta carries over: sum t'_n (1 - t'_n) = (1-k)^{-2} sum (t_n - k)(1 - t_n).
StepSchedule reduce_step_schedule(const StepSchedule& s, double k);

CheckReport validate_theta(const StepSchedule& s, std::uint64_t n_max, double slack = 1e-9);
CheckReport validate_gamma(const MixSchedule& m, std::span<const double> eps_list, std::uint64_t n_max,
                           double slack = 1e-12);

}  // namespace regrate
