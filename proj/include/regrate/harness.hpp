#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "regrate/engine.hpp"
#include "regrate/rng.hpp"

namespace regrate {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// JSON construction of schedules, operators and instances.
//
// Step:      {"type":"constant","t":0.75}                (theta from the construction)
// Mix:       {"type":"constant","weights":[...]}
//            {"type":"geometric","limit":[...],"c":[...],"r":0.5}
// Either may pin a supplied modulus explicitly:
//   "theta": {"type":"zero"} | {"type":"identity"} | {"type":"linear","slope":4}
//   "gamma": {"type":"zero"} | {"type":"geometric_tail","coeff":0.5,"ratio":0.5}
// Operators (all relative to the instance's fixed point p):
//   {"kind":"identity"} {"kind":"reflection"} {"kind":"contraction","factor":0.5}
//   {"kind":"rotation","plane":[0,1],"angle":0.7} {"kind":"householder","normal":[...]}
//   {"kind":"projection_ball","radius":2.0} {"kind":"linear","matrix":[[...]],"k":0.5}
//   {"kind":"compose","of":[...]} {"kind":"averaged","t":0.5,"of":{...}}
//   {"kind":"convex","weights":[...],"of":[...]} {"kind":"psc","k":0.5,"of":{...}}
// ---------------------------------------------------------------------------

ThetaFn theta_from_json(const ojson& spec);
GammaFn gamma_from_json(const ojson& spec);
StepSchedule step_from_json(const ojson& spec, double k);
MixSchedule mix_from_json(const ojson& spec);
Operator operator_from_json(const ojson& spec, const Vector& p);

/// Build the instance described by config["instance"]: either explicit
/// ("operators", "x0", "fixed_point", ...) or generated ("generate": {...}).
ProblemInstance instance_from_json(const ojson& spec, std::uint64_t seed);

struct GenOptions {
    std::uint64_t step_budget = 800000;  // largest certified index the instance may require
    double eps_min_A = 0.01;             // smallest eps the A_n-rate must afford (k = 0)
    double eps_min_T = 0.1;              // smallest eps the T_i-rate must afford
    std::uint64_t margin = 100;
    double b_start = 2.0;                // starting bound; halved until rates fit the budget
    int max_blocks = 3;
};

/// Seeded random instance: N nonexpansive blocks (rotations, contractions,
/// reflections, ball projections and compositions thereof) about a random
/// common fixed point p, pushed to k-strict pseudocontractions, with
/// b = max(||x0||, ||x0 - p||) rounded up to the next representable value.
/// x0 and p are scaled so the requested rate indices fit the step budget.
ProblemInstance generate_instance(std::uint64_t seed, std::size_t d, std::size_t n_maps, double k,
                                  const ojson& step_spec, const ojson& mix_spec, const GenOptions& opts = {});

// ---------------------------------------------------------------------------
// Certification campaign.
// ---------------------------------------------------------------------------

struct CampaignParams {
    std::uint64_t seed = 1;
    std::vector<double> eps_grid_A = {1.0, 0.1, 0.01};
    std::vector<double> eps_grid_T = {1.0, 0.1};
    std::vector<double> liminf_eps = {1.0, 0.5, 0.1};
    std::vector<std::uint64_t> liminf_m = {0, 5, 25};
    double slack = 1e-9;
    std::uint64_t n_max_margin = 100;
    std::uint64_t step_budget = 800000;
    std::uint64_t step_cap = 5000000;  // refuse instances whose certificates exceed this
    std::uint64_t lemma_steps = 400;
    std::size_t operator_check_pairs = 1000;
    std::size_t trace_csv_rows = 1000;
};

CampaignParams params_from_json(const ojson& config);

/// Everything certified about one instance. `status` is "pass" only when every
/// check reported zero violations; any thrown certificate failure turns into
/// "error" with the message preserved.
struct InstanceCertification {
    std::string name;
    ojson descriptor;
    std::string status;
    std::vector<CheckReport> checks;
    ojson rate_table;
    ojson empirics;
    std::string trace_csv;
    std::string error_message;

    bool passed() const { return status == "pass"; }
    ojson to_json() const;
};

InstanceCertification certify_instance(const ProblemInstance& inst, const CampaignParams& params,
                                        std::uint64_t instance_seed, const std::string& name);

struct CertificationReport {
    ojson config_echo;
    std::vector<InstanceCertification> instances;

    bool passed() const;
    ojson to_json() const;
};

/// Instantiate and certify every instance described by the config (see
/// params_from_json and the "suite" array). Instances are generated and
/// certified independently of one another; the aggregation is a single merge.
CertificationReport run_campaign(const ojson& config);

/// The suite used for acceptance: 50 nonexpansive instances (d <= 8, N <= 4,
/// constant and geometric mixes) plus 6 instances each at k = 0.3, 0.5 and
/// 0.9 * k_ceiling.
ojson default_campaign_config(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Emission: summary JSON plus per-instance trace CSVs. Field order is fixed
// and doubles render with up to 17 significant digits, so re-emission of the
// same report is byte-identical.
// ---------------------------------------------------------------------------

void emit_report(const CertificationReport& report, const std::filesystem::path& out_dir);

std::string render_trace_csv(const Trace& trace, std::size_t max_rows = static_cast<std::size_t>(-1));

struct TraceCsv {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

TraceCsv parse_trace_csv(const std::string& text);
std::string render_trace_csv(const TraceCsv& doc);

/// Config seed, unless the REGRATE_SEED environment variable overrides it.
std::uint64_t effective_seed(const ojson& config);

}  // namespace regrate
