#include "regrate/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace regrate {

StepSchedule::StepSchedule(TFn t, double k_floor, ThetaFn theta, ojson descriptor)
    : t_(std::move(t)), k_floor_(k_floor), theta_(std::move(theta)), descriptor_(std::move(descriptor)) {
    if (!t_ || !theta_) throw std::invalid_argument("StepSchedule: missing t or theta");
    if (k_floor_ < 0.0 || k_floor_ >= 1.0) throw std::invalid_argument("StepSchedule: k_floor outside [0,1)");
}

MixSchedule::MixSchedule(std::size_t n_maps, LambdaFn lambda, double a, GammaFn gamma, ojson descriptor, RowFn row)
    : n_maps_(n_maps),
      lambda_(std::move(lambda)),
      a_(a),
      gamma_(std::move(gamma)),
      descriptor_(std::move(descriptor)),
      row_(std::move(row)) {
    if (n_maps_ == 0) throw std::invalid_argument("MixSchedule: need at least one map");
    if (!(a_ > 0.0) || a_ > 1.0) throw std::invalid_argument("MixSchedule: lower bound a outside (0,1]");
    if (!lambda_ || !gamma_) throw std::invalid_argument("MixSchedule: missing lambda or gamma");
}

double MixSchedule::lambda(std::size_t i, std::uint64_t n) const {
    if (i >= n_maps_) throw std::invalid_argument("MixSchedule::lambda: map index out of range");
    return lambda_(i, n);
}

void MixSchedule::lambda_row(std::uint64_t n, std::span<double> out) const {
    if (out.size() != n_maps_) throw std::invalid_argument("MixSchedule::lambda_row: bad span size");
    if (row_) {
        row_(n, out);
        return;
    }
    for (std::size_t i = 0; i < n_maps_; ++i) out[i] = lambda_(i, n);
}

std::uint64_t MixSchedule::gamma(const Quad& eps) const {
    if (eps.sign() <= 0) throw std::domain_error("MixSchedule::gamma: eps must be positive");
    return gamma_(eps);
}

StepSchedule constant_step(double t, double k) {
    if (k < 0.0 || k >= 1.0) throw std::invalid_argument("constant_step: k outside [0,1)");
    if (!(t > k) || !(t < 1.0)) throw std::invalid_argument("constant_step: need k < t < 1");
    const BigRat q = (rat_from_double(t) - rat_from_double(k)) * (BigRat(1) - rat_from_double(t));
    ojson desc;
    desc["type"] = "constant";
    desc["t"] = t;
    desc["k"] = k;
    return StepSchedule(
        [t](std::uint64_t) { return t; }, k,
        [q](std::uint64_t big_n) { return to_u64_checked(ceil_rat(BigRat(big_n) / q), "constant_step::theta"); },
        std::move(desc));
}

MixSchedule constant_mix(std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("constant_mix: empty weights");
    double sum = 0.0;
    double a = 1.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("constant_mix: weights must be positive");
        sum += w;
        a = std::min(a, w);
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("constant_mix: weights must sum to 1");
    ojson desc;
    desc["type"] = "constant";
    desc["weights"] = weights;
    const std::size_t n_maps = weights.size();
    auto lambda = [weights](std::size_t i, std::uint64_t) { return weights[i]; };
    auto row = [weights](std::uint64_t, std::span<double> out) {
        std::copy(weights.begin(), weights.end(), out.begin());
    };
    auto gamma = [](const Quad&) -> std::uint64_t { return 0; };
    return MixSchedule(n_maps, std::move(lambda), a, std::move(gamma), std::move(desc), std::move(row));
}

MixSchedule geometric_mix(std::vector<double> limit, std::vector<double> c, double r) {
    if (limit.empty() || limit.size() != c.size()) {
        throw std::invalid_argument("geometric_mix: limit/c size mismatch");
    }
    if (!(r > 0.0) || !(r < 1.0)) throw std::invalid_argument("geometric_mix: r outside (0,1)");
    double limit_sum = 0.0, c_sum = 0.0;
    for (double v : limit) limit_sum += v;
    for (double v : c) c_sum += v;
    if (std::abs(limit_sum - 1.0) > 1e-12) throw std::invalid_argument("geometric_mix: limits must sum to 1");
    if (std::abs(c_sum) > 1e-12) throw std::invalid_argument("geometric_mix: c must sum to 0");

    // lambda_i^(n) in [min(limit_i, limit_i + c_i), max(limit_i, limit_i + c_i)]
    double a = 1.0, top = 0.0;
    for (std::size_t i = 0; i < limit.size(); ++i) {
        a = std::min(a, std::min(limit[i], limit[i] + c[i]));
        top = std::max(top, std::max(limit[i], limit[i] + c[i]));
    }
    if (limit.size() == 1) {
        // single-map geometric degenerates to the constant mix (c must be ~0)
        return constant_mix({1.0});
    }
    if (!(a > 0.0) || !(top < 1.0)) {
        throw std::invalid_argument("geometric_mix: some weight leaves (0,1)");
    }

    BigRat abs_c_sum(0);
    for (double v : c) abs_c_sum += rat_from_double(std::abs(v));
    const BigRat r_rat = rat_from_double(r);

    ojson desc;
    desc["type"] = "geometric";
    desc["limit"] = limit;
    desc["c"] = c;
    desc["r"] = r;

    const std::size_t n_maps = limit.size();
    auto lambda = [limit, c, r](std::size_t i, std::uint64_t n) {
        return limit[i] + c[i] * std::pow(r, static_cast<double>(n));
    };
    auto row = [limit, c, r](std::uint64_t n, std::span<double> out) {
        const double rn = std::pow(r, static_cast<double>(n));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = limit[i] + c[i] * rn;
    };
    auto gamma = [abs_c_sum, r_rat](const Quad& eps) -> std::uint64_t {
        // least m >= 0 with abs_c_sum * r^{m+1} <= eps
        BigRat tail = abs_c_sum * r_rat;
        std::uint64_t m = 0;
        while (Quad(tail) > eps) {
            tail *= r_rat;
            ++m;
            if (m > 10'000'000ULL) throw std::overflow_error("geometric_mix::gamma: eps too small");
        }
        return m;
    };
    return MixSchedule(n_maps, std::move(lambda), a, std::move(gamma), std::move(desc), std::move(row));
}

StepSchedule reduce_step_schedule(const StepSchedule& s, double k) {
    if (k >= 1.0 || k < 0.0) throw std::invalid_argument("reduce_step_schedule: k outside [0,1)");
    if (s.k_floor() != k) throw std::invalid_argument("reduce_step_schedule: schedule k_floor differs from k");
    if (k == 0.0) return s;
    ojson desc;
    desc["type"] = "reduced";
    desc["k"] = k;
    desc["base"] = s.descriptor();
    const double denom = 1.0 - k;
    auto base_t = [s](std::uint64_t n) { return s.t(n); };
    return StepSchedule([base_t, denom](std::uint64_t n) { return 1.0 - (1.0 - base_t(n)) / denom; }, 0.0,
                        s.theta_fn(), std::move(desc));
}

CheckReport validate_theta(const StepSchedule& s, std::uint64_t n_max, double slack) {
    CheckReport report("validate-theta");
    const double k = s.k_floor();
    std::uint64_t work = 0;
    for (std::uint64_t target = 1; target <= n_max; ++target) {
        const std::uint64_t cut = s.theta(target);
        work += cut + 1;
        if (work > 100'000'000ULL) {
            throw std::runtime_error("validate_theta: theta(" + std::to_string(target) + ") = " +
                                     std::to_string(cut) + " is too large to validate by summation");
        }
        double sum = 0.0;
        for (std::uint64_t n = 0; n <= cut; ++n) {
            const double tn = s.t(n);
            sum += (tn - k) * (1.0 - tn);
        }
        // requirement: sum >= target
        report.record(target, static_cast<double>(target), sum, slack);
    }
    return report;
}

CheckReport validate_gamma(const MixSchedule& m, std::span<const double> eps_list, std::uint64_t n_max,
                           double slack) {
    CheckReport report("validate-gamma");
    if (eps_list.size() * n_max > 100'000'000ULL) {
        throw std::runtime_error("validate_gamma: window of " + std::to_string(n_max) +
                                 " terms is too large to validate by summation");
    }
    std::vector<double> prev(m.n_maps()), cur(m.n_maps());
    std::uint64_t case_index = 0;
    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw std::invalid_argument("validate_gamma: eps must be positive");
        const std::uint64_t g = m.gamma(eps);
        double window_sum = 0.0;
        m.lambda_row(g + 1, std::span<double>(prev));
        for (std::uint64_t len = 1; len <= n_max; ++len) {
            const std::uint64_t j = g + len;  // window term index j in [g+1, g+n]
            m.lambda_row(j + 1, std::span<double>(cur));
            double inc = 0.0;
            for (std::size_t i = 0; i < m.n_maps(); ++i) inc += std::abs(cur[i] - prev[i]);
            window_sum += inc;
            report.record(case_index * n_max + len, window_sum, eps, slack);
            std::swap(prev, cur);
        }
        ++case_index;
    }
    return report;
}

}  // namespace regrate
