#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>

#include "reach/model.hpp"

namespace reach {

enum class Status { Converged, Timeout, BudgetExhausted, NoConvergence, Unguaranteed };

std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view s);

struct SolverConfig {
    double epsilon = 1e-6;
    std::uint64_t max_iterations = std::numeric_limits<std::uint64_t>::max();
    std::optional<std::chrono::duration<double>> timeout;
};

struct SolverResult {
    double lower = 0.0;
    double upper = 1.0;
    std::uint64_t iterations = 0;
    std::uint64_t explored_states = 0;
    Status status = Status::BudgetExhausted;
    std::optional<double> estimate;  // point estimate of methods without bounds
    Policy policy;
};

// Read access to the current bounds, expressed on the states of the input
// model. Pair bounds are optional (num_pairs() may be 0).
class BoundsView {
public:
    virtual ~BoundsView() = default;
    virtual std::size_t num_states() const = 0;
    virtual double lower(StateId s) const = 0;
    virtual double upper(StateId s) const = 0;
    virtual std::size_t num_pairs() const { return 0; }
    virtual bool pair_active(ActionId) const { return false; }
    virtual double pair_lower(ActionId) const { return 0.0; }
    virtual double pair_upper(ActionId) const { return 1.0; }
};

// Called after each bound update; meant for instrumentation in tests.
using UpdateObserver = std::function<void(const BoundsView&)>;

class Deadline {
public:
    explicit Deadline(const SolverConfig& cfg) : start_(std::chrono::steady_clock::now()) {
        if (cfg.timeout)
            limit_ = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(*cfg.timeout);
    }
    bool expired() const { return limit_ && std::chrono::steady_clock::now() >= *limit_; }

private:
    std::chrono::steady_clock::time_point start_;
    std::optional<std::chrono::steady_clock::time_point> limit_;
};

}  // namespace reach
