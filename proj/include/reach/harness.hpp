#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reach/brtdp.hpp"
#include "reach/model.hpp"
#include "reach/solver.hpp"

namespace reach {

enum class Algorithm { Vi, Ii, Brtdp, Mcts, Bmcts, MctsBrtdp, BrtdpUcb };

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view s);

struct RunConfig {
    Algorithm algorithm = Algorithm::MctsBrtdp;
    double epsilon = 1e-6;
    double exploration = 25.0;
    std::optional<double> timeout_s = 600.0;
    std::uint64_t max_iterations = UINT64_MAX;
    std::uint64_t mec_period = 1000;
    std::optional<std::uint64_t> step_cap;
    SuccessorRule successor_rule = SuccessorRule::WeightedByGap;
    bool collapse_first = true;  // interval iteration only
};

SolverResult solve(const Mdp& mdp, const RunConfig& config, std::uint64_t seed,
                   const UpdateObserver& observer = {});

struct ExperimentRecord {
    std::string model;
    std::string algorithm;
    double C = 0.0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::uint32_t repetition = 0;
    double time_ms = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t explored_states = 0;
    double L_init = 0.0;
    double U_init = 1.0;
    Status status = Status::BudgetExhausted;
    bool operator==(const ExperimentRecord&) const = default;
};

struct ExperimentSummary {
    std::vector<ExperimentRecord> records;
    std::size_t successes = 0;  // Converged, or Unguaranteed for plain MCTS
    // Medians over successful runs, or over all runs when none succeeded.
    double median_time_ms = 0.0;
    double median_iterations = 0.0;
    double median_explored = 0.0;
    Status status = Status::Timeout;
};

double median(std::vector<double> values);

// Runs seeds seed_base .. seed_base + repetitions - 1; only the solve is timed.
ExperimentSummary run_experiment(const std::string& model_name, const Mdp& mdp,
                                 const RunConfig& config, std::uint64_t seed_base,
                                 std::uint32_t repetitions, unsigned jobs = 1);

struct SweepSpec {
    std::vector<double> constants;
    RunConfig base;
    std::uint64_t seed_base = 0;
    std::uint32_t repetitions = 1;
    unsigned jobs = 1;
};

struct SweepRow {
    double C = 0.0;
    double median_time_ms = 0.0;
    double median_iterations = 0.0;
    double median_explored = 0.0;
    std::size_t successes = 0;
    std::vector<ExperimentRecord> records;
};

std::vector<SweepRow> sweep_constant(const std::string& model_name, const Mdp& mdp,
                                     const SweepSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "model,algorithm,C,epsilon,seed,repetition,time_ms,iterations,explored_states,L_init,U_init,status";

void emit_csv(const std::vector<ExperimentRecord>& records, std::ostream& out);
std::string to_csv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> parse_csv(std::string_view text);

void emit_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace reach
