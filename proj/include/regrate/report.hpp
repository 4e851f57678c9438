#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace regrate {

using ojson = nlohmann::ordered_json;

/// One failed inequality: lhs <= rhs + slack was violated at `index`.
struct Violation {
    std::string check;
    std::uint64_t index = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;

    ojson to_json() const {
        ojson j;
        j["check"] = check;
        j["n"] = index;
        j["lhs"] = lhs;
        j["rhs"] = rhs;
        j["slack"] = slack;
        return j;
    }
};

/// Outcome of an empirical check: every comparison performed, violations found,
/// and the worst excess lhs - rhs seen (negative when everything held with margin).
class CheckReport {
public:
    explicit CheckReport(std::string name) : name_(std::move(name)) {}

    /// Record one comparison lhs <= rhs + slack.
    void record(std::uint64_t index, double lhs, double rhs, double slack) {
        ++checked_;
        const double excess = lhs - rhs;
        if (excess > max_excess_) max_excess_ = excess;
        if (lhs > rhs + slack) {
            ++violation_count_;
            if (samples_.size() < kMaxStoredViolations) {
                samples_.push_back(Violation{name_, index, lhs, rhs, slack});
            }
        }
    }

    void mark_skipped(std::string reason) {
        skipped_ = true;
        skip_reason_ = std::move(reason);
    }

    /// Fold another report of the same kind into this one.
    void merge(const CheckReport& other) {
        checked_ += other.checked_;
        violation_count_ += other.violation_count_;
        if (other.max_excess_ > max_excess_) max_excess_ = other.max_excess_;
        for (const auto& v : other.samples_) {
            if (samples_.size() >= kMaxStoredViolations) break;
            samples_.push_back(v);
        }
    }

    const std::string& name() const { return name_; }
    std::uint64_t checked() const { return checked_; }
    std::uint64_t violations() const { return violation_count_; }
    double max_excess() const { return max_excess_; }
    bool skipped() const { return skipped_; }
    const std::string& skip_reason() const { return skip_reason_; }
    const std::vector<Violation>& sample_violations() const { return samples_; }

    bool passed() const { return violation_count_ == 0; }

    ojson to_json() const {
        ojson j;
        j["check"] = name_;
        j["status"] = skipped_ ? "skipped" : (passed() ? "pass" : "fail");
        if (skipped_) j["skip_reason"] = skip_reason_;
        j["checked"] = checked_;
        j["violations"] = violation_count_;
        if (checked_ > 0) j["max_excess"] = max_excess_;
        if (!samples_.empty()) {
            ojson vs = ojson::array();
            for (const auto& v : samples_) vs.push_back(v.to_json());
            j["violation_samples"] = vs;
        }
        return j;
    }

private:
    static constexpr std::size_t kMaxStoredViolations = 8;

    std::string name_;
    std::uint64_t checked_ = 0;
    std::uint64_t violation_count_ = 0;
    double max_excess_ = -std::numeric_limits<double>::infinity();
    bool skipped_ = false;
    std::string skip_reason_;
    std::vector<Violation> samples_;
};

}  // namespace regrate
