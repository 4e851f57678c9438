#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "regrate/operators.hpp"
#include "regrate/rates.hpp"
#include "regrate/report.hpp"
#include "regrate/schedules.hpp"

namespace regrate {

/// A certificate-level failure: a guaranteed witness or bound did not
/// materialize. Signals either a violated hypothesis (bad theta, bad b) or a
/// genuine bug; never ignored silently.
struct certificate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct iteration_error : std::runtime_error {
    iteration_error(const std::string& msg, std::uint64_t n)
        : std::runtime_error(msg + " at step " + std::to_string(n)), step(n) {}
    std::uint64_t step;
};

/// The data of one run of the parallel algorithm: a family T_1..T_N of
/// k-strict pseudocontractions sharing the fixed point p, a start point x0
/// with ||x0|| <= b and ||x0 - p|| <= b, the step schedule (t_n, theta) and the
/// mixing schedule (lambda, a, gamma).
class ProblemInstance {
public:
    ProblemInstance(std::vector<Operator> family, double k, Vector x0, Vector p, double b, StepSchedule steps,
                    MixSchedule mix, ojson descriptor = ojson::object());

    std::size_t dim() const { return x0_.dim(); }
    std::size_t family_size() const { return family_.size(); }
    const Operator& op(std::size_t i) const { return family_[i]; }
    const std::vector<Operator>& family() const { return family_; }
    double k() const { return k_; }
    const Vector& x0() const { return x0_; }
    const Vector& p() const { return p_; }
    double b() const { return b_; }
    const StepSchedule& steps() const { return steps_; }
    const MixSchedule& mix() const { return mix_; }
    const ojson& descriptor() const { return descriptor_; }

    /// Inputs for the rate calculus (b, a, k, theta, gamma).
    RateInputs rates() const;

    /// A_n x = sum_i lambda_i^(n) T_i x, evaluated at the given point.
    Vector apply_A(std::uint64_t n, const Vector& x) const;

private:
    std::vector<Operator> family_;
    double k_;
    Vector x0_;
    Vector p_;
    double b_;
    StepSchedule steps_;
    MixSchedule mix_;
    ojson descriptor_;
};

struct TraceOptions {
    bool keep_iterates = false;             // store every x_n (memory: d doubles per step)
    bool per_map_residuals = true;          // store ||x_n - T_i x_n|| per i (else only the max over i)
};

/// Per-iteration record of a run: residuals ||x_n - A_n x_n||, per-map
/// residuals, distance to p and the step size. The residual series are always
/// materialized; iterates and per-map series are opt-in (TraceOptions).
/// Immutable once produced.
class Trace {
public:
    std::size_t length() const { return res_A_.size(); }  // n_max + 1
    std::size_t family_size() const { return n_maps_; }
    bool has_iterates() const { return !iterates_.empty(); }
    bool has_per_map() const { return per_map_; }

    double res_A(std::size_t n) const { return res_A_[n]; }
    double dist_p(std::size_t n) const { return dist_p_[n]; }
    double t_n(std::size_t n) const { return t_[n]; }
    double res_T(std::size_t n, std::size_t i) const;
    double res_T_max(std::size_t n) const { return res_T_max_[n]; }
    const Vector& iterate_at(std::size_t n) const;

    /// max over all recorded steps and maps of ||T_i x_n|| (for the 3b bound).
    double max_map_norm() const { return max_map_norm_; }

private:
    friend Trace iterate(const ProblemInstance&, std::uint64_t, TraceOptions);

    std::size_t n_maps_ = 0;
    bool per_map_ = false;
    std::vector<double> res_A_, dist_p_, t_, res_T_max_;
    std::vector<double> res_T_flat_;  // row-major, stride n_maps_
    std::vector<Vector> iterates_;
    double max_map_norm_ = 0.0;
};

/// Run x_{n+1} = t_n x_n + (1 - t_n) A_n x_n for n = 0..n_max-1, recording
/// n_max + 1 steps. Deterministic; throws iteration_error on overflow.
Trace iterate(const ProblemInstance& inst, std::uint64_t n_max, TraceOptions opts = {});

/// Least N in [m, Delta_{b,theta}(eps, m)] with res_A(N) <= eps + slack. The
/// modulus-of-liminf proposition guarantees existence; absence is a
/// certificate_error.
std::uint64_t liminf_witness(const Trace& trace, double eps, std::uint64_t m, const ProblemInstance& inst,
                             double slack = 1e-9);

/// Per-step descent inequality (nonexpansive case):
///   t_n (1 - t_n) res_A(n)^2 <= ||x_n - p||^2 - ||x_{n+1} - p||^2.
CheckReport check_step_inequality(const Trace& trace, const ProblemInstance& inst, double slack = 1e-9);

/// Fejer monotonicity: ||x_n - p|| nonincreasing and bounded by b.
CheckReport check_fejer(const Trace& trace, const ProblemInstance& inst, double slack = 1e-12);

/// The four chained residual inequalities linking consecutive steps through
/// ||A_{n+1} x_{n+1} - A_n x_{n+1}|| (requires kept iterates).
CheckReport check_chain_inequalities(const Trace& trace, const ProblemInstance& inst, double slack = 1e-9);

/// Summed residual drift bound over sampled windows,
///   res_A(n+m) <= res_A(n) + 3b sum_{j=n}^{n+m-1} sum_i |lambda_i^(j+1) - lambda_i^(j)|,
/// plus the uniform bound ||T_i x_n|| <= 3b.
CheckReport check_summed_inequality(const Trace& trace, const ProblemInstance& inst, double slack = 1e-9);

/// Family' = averaged(T_i, k), k' = 0, steps' = reduce_step_schedule(steps, k).
/// Produces the identical iterate sequence.
ProblemInstance reduce_instance(const ProblemInstance& inst);

/// res_T'[i](n) = (1 - k) res_T[i](n) between a trace and its reduction.
CheckReport residual_relation(const Trace& original, const Trace& reduced, double k, double slack = 1e-12);

/// If ||z - p|| <= b and ||z - A_n z|| <= eps then ||z - T_i z|| <= h_{a,b}(eps)
/// for every i. Preconditions are verified numerically first; when they do not
/// hold the report is marked skipped.
CheckReport check_preti(const ProblemInstance& inst, const Vector& z, std::uint64_t n, double eps,
                        double slack = 1e-9);

/// Psi = sum_{n=m}^{M} t_n (1 - t_n) res_A(n)^2 (0 when m > M). For k = 0 the
/// descent lemma forces Psi <= b^2.
double psi_partial_sum(const Trace& trace, std::uint64_t m, std::uint64_t M);

/// Tail certificate for res_A: res_A(n) <= eps + slack for all n in
/// [Phi(eps), length-1]. Fails (not skips) when the trace is shorter than Phi.
CheckReport certify_rate_A(const Trace& trace, const ProblemInstance& inst, double eps, double slack = 1e-9);

/// Tail certificate for the per-map residuals via Phi''(eps).
CheckReport certify_rate_T(const Trace& trace, const ProblemInstance& inst, double eps, double slack = 1e-9);

std::optional<std::uint64_t> first_hit_A(const Trace& trace, double eps);
std::optional<std::uint64_t> first_hit_T(const Trace& trace, double eps);

}  // namespace regrate
