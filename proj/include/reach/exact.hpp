#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "reach/model.hpp"
#include "reach/solver.hpp"

namespace reach {

struct IterationConfig : SolverConfig {
    // Stop with NoConvergence as soon as a sweep leaves both bound vectors
    // bit-identical while the gap at init is still at least epsilon.
    bool stop_on_stagnation = true;
};

// Bellman backup of one action against state-level vectors.
double q_value(const Mdp& mdp, ActionId a, std::span<const double> values);

// Lower bound only, Jacobi sweeps, stops on max-norm change below epsilon.
SolverResult value_iteration(const Mdp& mdp, const IterationConfig& config,
                             const UpdateObserver& observer = {});

// Lower and upper bounds, stops when U(init) - L(init) < epsilon. With
// collapse_first the MEC quotient is built up front and iterated instead.
SolverResult interval_iteration(const Mdp& mdp, const IterationConfig& config, bool collapse_first,
                                const UpdateObserver& observer = {});

// Greedy in the lower bound; ties go to the earliest declared action.
Policy extract_policy(const Mdp& mdp, std::span<const double> lower);

class SizeLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kOracleStateLimit = 2000;

// Maximum reachability per state: graph precomputation followed by policy
// iteration with dense linear solves.
std::vector<double> exact_oracle(const Mdp& mdp);

// States that can reach goal with positive probability / with probability 1
// under some policy.
std::vector<char> reach_positive(const Mdp& mdp);
std::vector<char> reach_almost_surely(const Mdp& mdp);

}  // namespace reach
