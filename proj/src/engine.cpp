#include "regrate/engine.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace regrate {

ProblemInstance::ProblemInstance(std::vector<Operator> family, double k, Vector x0, Vector p, double b,
                                 StepSchedule steps, MixSchedule mix, ojson descriptor)
    : family_(std::move(family)),
      k_(k),
      x0_(std::move(x0)),
      p_(std::move(p)),
      b_(b),
      steps_(std::move(steps)),
      mix_(std::move(mix)),
      descriptor_(std::move(descriptor)) {
    if (family_.empty()) throw std::invalid_argument("ProblemInstance: empty family");
    if (mix_.n_maps() != family_.size()) {
        throw std::invalid_argument("ProblemInstance: mix schedule arity differs from family size");
    }
    if (k_ < 0.0 || k_ >= 1.0) throw std::invalid_argument("ProblemInstance: k outside [0,1)");
    if (steps_.k_floor() != k_) throw std::invalid_argument("ProblemInstance: steps.k_floor differs from k");
    if (!x0_.all_finite() || !p_.all_finite()) throw std::invalid_argument("ProblemInstance: non-finite point");
    double k_max = 0.0;
    for (const auto& op : family_) {
        if (op.dim() != x0_.dim()) throw std::invalid_argument("ProblemInstance: operator dimension mismatch");
        if (!(op.fixed_point() == p_)) {
            throw std::invalid_argument("ProblemInstance: family members must share the fixed point p");
        }
        k_max = std::max(k_max, op.k_claimed());
    }
    if (k_ < k_max) throw std::invalid_argument("ProblemInstance: k must dominate every member's constant");
    if (!(b_ > 0.0)) throw std::invalid_argument("ProblemInstance: b must be positive");
    if (norm(x0_) > b_ || dist(x0_, p_) > b_) {
        throw std::invalid_argument("ProblemInstance: need ||x0|| <= b and ||x0 - p|| <= b");
    }
}

RateInputs ProblemInstance::rates() const {
    RateInputs r;
    r.b = b_;
    r.a = mix_.a();
    r.k = k_;
    r.theta = steps_.theta_fn();
    r.gamma = mix_.gamma_fn();
    return r;
}

Vector ProblemInstance::apply_A(std::uint64_t n, const Vector& x) const {
    std::vector<double> weights(family_.size());
    mix_.lambda_row(n, std::span<double>(weights));
    Vector acc(x.dim());
    for (std::size_t i = 0; i < family_.size(); ++i) {
        Vector tx = family_[i].apply(x);
        for (std::size_t j = 0; j < x.dim(); ++j) acc[j] += weights[i] * tx[j];
    }
    return acc;
}

double Trace::res_T(std::size_t n, std::size_t i) const {
    if (!per_map_) throw std::logic_error("Trace: per-map residuals were not recorded");
    return res_T_flat_[n * n_maps_ + i];
}

const Vector& Trace::iterate_at(std::size_t n) const {
    if (iterates_.empty()) throw std::logic_error("Trace: iterates were not recorded");
    return iterates_[n];
}

Trace iterate(const ProblemInstance& inst, std::uint64_t n_max, TraceOptions opts) {
    const std::size_t d = inst.dim();
    const std::size_t n_maps = inst.family_size();
    const std::size_t steps = static_cast<std::size_t>(n_max) + 1;

    Trace tr;
    tr.n_maps_ = n_maps;
    tr.per_map_ = opts.per_map_residuals;
    tr.res_A_.reserve(steps);
    tr.dist_p_.reserve(steps);
    tr.t_.reserve(steps);
    tr.res_T_max_.reserve(steps);
    if (opts.per_map_residuals) tr.res_T_flat_.reserve(steps * n_maps);
    if (opts.keep_iterates) tr.iterates_.reserve(steps);

    Vector x = inst.x0();
    std::vector<double> weights(n_maps);
    Vector ax(d);

    for (std::uint64_t n = 0; n <= n_max; ++n) {
        inst.mix().lambda_row(n, std::span<double>(weights));

        // evaluate the family once; A_n x and all per-map residuals come from it
        for (std::size_t j = 0; j < d; ++j) ax[j] = 0.0;
        double worst_t_res = 0.0;
        for (std::size_t i = 0; i < n_maps; ++i) {
            Vector tx = inst.op(i).apply(x);
            double res_sq = 0.0, norm_sq = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                ax[j] += weights[i] * tx[j];
                const double diff = x[j] - tx[j];
                res_sq += diff * diff;
                norm_sq += tx[j] * tx[j];
            }
            const double res = std::sqrt(res_sq);
            worst_t_res = std::max(worst_t_res, res);
            tr.max_map_norm_ = std::max(tr.max_map_norm_, std::sqrt(norm_sq));
            if (opts.per_map_residuals) tr.res_T_flat_.push_back(res);
        }
        if (!ax.all_finite()) throw iteration_error("iterate: numerical overflow", n);

        const double tn = inst.steps().t(n);
        tr.res_A_.push_back(dist(x, ax));
        tr.res_T_max_.push_back(worst_t_res);
        tr.dist_p_.push_back(dist(x, inst.p()));
        tr.t_.push_back(tn);
        if (opts.keep_iterates) tr.iterates_.push_back(x);

        if (n < n_max) {
            x = lincomb(tn, x, 1.0 - tn, ax);
            if (!x.all_finite()) throw iteration_error("iterate: numerical overflow", n + 1);
        }
    }
    return tr;
}

std::uint64_t liminf_witness(const Trace& trace, double eps, std::uint64_t m, const ProblemInstance& inst,
                             double slack) {
    const std::uint64_t bound = delta(inst.b(), inst.steps().theta_fn(), eps, m);
    if (trace.length() <= bound) {
        throw certificate_error("liminf_witness: trace length " + std::to_string(trace.length()) +
                                " does not cover Delta = " + std::to_string(bound));
    }
    for (std::uint64_t n = m; n <= bound; ++n) {
        if (trace.res_A(n) <= eps + slack) return n;
    }
    throw certificate_error("liminf_witness: no witness in [" + std::to_string(m) + ", " +
                            std::to_string(bound) + "] for eps = " + std::to_string(eps));
}

CheckReport check_step_inequality(const Trace& trace, const ProblemInstance& inst, double slack) {
    if (inst.k() != 0.0) throw std::invalid_argument("check_step_inequality: requires k = 0");
    CheckReport report("step-inequality");
    for (std::size_t n = 0; n + 1 < trace.length(); ++n) {
        const double tn = trace.t_n(n);
        const double lhs = tn * (1.0 - tn) * trace.res_A(n) * trace.res_A(n);
        const double dn = trace.dist_p(n), dn1 = trace.dist_p(n + 1);
        const double rhs = dn * dn - dn1 * dn1;
        report.record(n, lhs, rhs, slack);
    }
    return report;
}

CheckReport check_fejer(const Trace& trace, const ProblemInstance& inst, double slack) {
    if (inst.k() != 0.0) throw std::invalid_argument("check_fejer: requires k = 0");
    CheckReport report("fejer");
    for (std::size_t n = 0; n < trace.length(); ++n) {
        report.record(n, trace.dist_p(n), inst.b(), slack);
        if (n + 1 < trace.length()) report.record(n, trace.dist_p(n + 1), trace.dist_p(n), slack);
    }
    return report;
}

CheckReport check_chain_inequalities(const Trace& trace, const ProblemInstance& inst, double slack) {
    if (inst.k() != 0.0) throw std::invalid_argument("check_chain_inequalities: requires k = 0");
    if (!trace.has_iterates()) throw std::invalid_argument("check_chain_inequalities: needs kept iterates");
    CheckReport report("chain-inequalities");
    for (std::size_t n = 0; n + 1 < trace.length(); ++n) {
        const Vector& xn = trace.iterate_at(n);
        const Vector& xn1 = trace.iterate_at(n + 1);
        const double tn = trace.t_n(n);
        const double res_n = trace.res_A(n);
        const double res_n1 = trace.res_A(n + 1);

        Vector a_n_xn = inst.apply_A(n, xn);
        Vector a_n_xn1 = inst.apply_A(n, xn1);
        Vector a_n1_xn1 = inst.apply_A(n + 1, xn1);
        const double cross = dist(a_n1_xn1, a_n_xn1);

        // 1: ||x_n - A_{n+1} x_{n+1}|| <= (1-t_n) res_A(n) + res_A(n+1)
        report.record(4 * n + 0, dist(xn, a_n1_xn1), (1.0 - tn) * res_n + res_n1, slack);
        // 2: ||A_n x_n - A_{n+1} x_{n+1}|| <= (1-t_n) res_A(n) + cross
        report.record(4 * n + 1, dist(a_n_xn, a_n1_xn1), (1.0 - tn) * res_n + cross, slack);
        // 3: res_A(n+1) <= (1-t_n) res_A(n) + t_n res_A(n+1) + (1-t_n) cross
        report.record(4 * n + 2, res_n1, (1.0 - tn) * res_n + tn * res_n1 + (1.0 - tn) * cross, slack);
        // 4: res_A(n+1) <= res_A(n) + cross
        report.record(4 * n + 3, res_n1, res_n + cross, slack);
    }
    return report;
}

CheckReport check_summed_inequality(const Trace& trace, const ProblemInstance& inst, double slack) {
    if (inst.k() != 0.0) throw std::invalid_argument("check_summed_inequality: requires k = 0");
    CheckReport report("summed-inequality");
    const std::size_t len = trace.length();
    const double three_b = 3.0 * inst.b();

    // uniform bound ||T_i x_n|| <= 3b over the whole recorded run
    report.record(0, trace.max_map_norm(), three_b, slack);

    // prefix sums of the weight increments: drift(j) = sum_i |lambda^{(j+1)} - lambda^{(j)}|
    std::vector<double> cumulative(len, 0.0);
    std::vector<double> prev(inst.family_size()), cur(inst.family_size());
    inst.mix().lambda_row(0, std::span<double>(prev));
    for (std::size_t j = 1; j < len; ++j) {
        inst.mix().lambda_row(j, std::span<double>(cur));
        double inc = 0.0;
        for (std::size_t i = 0; i < inst.family_size(); ++i) inc += std::abs(cur[i] - prev[i]);
        cumulative[j] = cumulative[j - 1] + inc;  // sum over j' in [0, j-1] of drift(j')
        std::swap(prev, cur);
    }

    // res_A(n+m) <= res_A(n) + 3b * (cumulative[n+m] - cumulative[n])
    const std::size_t stride = len <= 256 ? 1 : len / 128;
    std::uint64_t pair_index = 1;
    for (std::size_t n = 0; n < len; n += stride) {
        for (std::size_t end = n + 1; end < len; end += stride) {
            const double rhs = trace.res_A(n) + three_b * (cumulative[end] - cumulative[n]);
            report.record(pair_index++, trace.res_A(end), rhs, slack);
        }
    }
    return report;
}

ProblemInstance reduce_instance(const ProblemInstance& inst) {
    if (inst.k() == 0.0) return inst;
    std::vector<Operator> reduced_family;
    reduced_family.reserve(inst.family_size());
    for (const auto& op : inst.family()) reduced_family.push_back(averaged(op, inst.k()));
    ojson desc;
    desc["type"] = "reduced";
    desc["k"] = inst.k();
    desc["base"] = inst.descriptor();
    return ProblemInstance(std::move(reduced_family), 0.0, inst.x0(), inst.p(), inst.b(),
                           reduce_step_schedule(inst.steps(), inst.k()), inst.mix(), std::move(desc));
}

CheckReport residual_relation(const Trace& original, const Trace& reduced, double k, double slack) {
    if (original.length() != reduced.length() || original.family_size() != reduced.family_size()) {
        throw std::invalid_argument("residual_relation: trace shapes differ");
    }
    if (!original.has_per_map() || !reduced.has_per_map()) {
        throw std::invalid_argument("residual_relation: needs per-map residuals");
    }
    CheckReport report("residual-relation");
    for (std::size_t n = 0; n < original.length(); ++n) {
        for (std::size_t i = 0; i < original.family_size(); ++i) {
            const double expected = (1.0 - k) * original.res_T(n, i);
            const double got = reduced.res_T(n, i);
            report.record(n * original.family_size() + i, std::abs(got - expected), 0.0, slack);
        }
    }
    return report;
}

CheckReport check_preti(const ProblemInstance& inst, const Vector& z, std::uint64_t n, double eps,
                        double slack) {
    CheckReport report("preti");
    if (inst.k() != 0.0) throw std::invalid_argument("check_preti: requires k = 0");
    const double dz = dist(z, inst.p());
    if (dz > inst.b() + slack) {
        report.mark_skipped("precondition ||z - p|| <= b not met");
        return report;
    }
    const double res_a = dist(z, inst.apply_A(n, z));
    if (res_a > eps + slack) {
        report.mark_skipped("precondition ||z - A_n z|| <= eps not met");
        return report;
    }
    const double bound = h(inst.mix().a(), inst.b(), eps);
    for (std::size_t i = 0; i < inst.family_size(); ++i) {
        report.record(i, dist(z, inst.op(i).apply(z)), bound, slack);
    }
    return report;
}

double psi_partial_sum(const Trace& trace, std::uint64_t m, std::uint64_t M) {
    if (m > M) return 0.0;
    if (M >= trace.length()) throw std::invalid_argument("psi_partial_sum: M beyond trace length");
    double sum = 0.0;
    for (std::uint64_t n = m; n <= M; ++n) {
        const double tn = trace.t_n(n);
        sum += tn * (1.0 - tn) * trace.res_A(n) * trace.res_A(n);
    }
    return sum;
}

CheckReport certify_rate_A(const Trace& trace, const ProblemInstance& inst, double eps, double slack) {
    CheckReport report("rate-A(eps=" + std::to_string(eps) + ")");
    const RateInputs r = inst.rates();
    const std::uint64_t from = r.phi(eps);
    if (from >= trace.length()) {
        throw certificate_error("certify_rate_A: trace length " + std::to_string(trace.length()) +
                                " does not reach Phi = " + std::to_string(from));
    }
    for (std::uint64_t n = from; n < trace.length(); ++n) report.record(n, trace.res_A(n), eps, slack);
    return report;
}

CheckReport certify_rate_T(const Trace& trace, const ProblemInstance& inst, double eps, double slack) {
    CheckReport report("rate-T(eps=" + std::to_string(eps) + ")");
    const RateInputs r = inst.rates();
    const std::uint64_t from = r.phi_double_prime(eps);
    if (from >= trace.length()) {
        throw certificate_error("certify_rate_T: trace length " + std::to_string(trace.length()) +
                                " does not reach Phi'' = " + std::to_string(from));
    }
    for (std::uint64_t n = from; n < trace.length(); ++n) report.record(n, trace.res_T_max(n), eps, slack);
    return report;
}

std::optional<std::uint64_t> first_hit_A(const Trace& trace, double eps) {
    for (std::size_t n = 0; n < trace.length(); ++n) {
        if (trace.res_A(n) <= eps) return n;
    }
    return std::nullopt;
}

std::optional<std::uint64_t> first_hit_T(const Trace& trace, double eps) {
    for (std::size_t n = 0; n < trace.length(); ++n) {
        if (trace.res_T_max(n) <= eps) return n;
    }
    return std::nullopt;
}

}  // namespace regrate
