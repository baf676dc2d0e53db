#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "reach/model.hpp"

namespace reach {

// Chain s_0..s_n: each s_i (i < n) moves on with probability p and falls
// back to s_0 otherwise; s_n is the goal, the sink is unreachable.
Mdp gen_adversary(std::uint32_t n, double p);

// s0 -a-> s1, s1 -b-> s0, s1 -c-> {goal: 0.5, sink: 0.5}. The upper bound of
// plain interval iteration stays at 1 here.
Mdp gen_upper_bound_trap();

// The adversary's initial state gets an extra action "b" into other's
// initial state. Goals and sinks of both parts are merged.
Mdp branch_compose(const Mdp& adversary, const Mdp& other);

enum class GoalRule { FirstComponent, EitherComponent };

// Interleaving product restricted to reachable pairs.
Mdp parallel_compose(const Mdp& m1, const Mdp& m2, GoalRule rule = GoalRule::FirstComponent);

// Regular states 0..N-3, goal N-2, sink N-1, init 0. Successors point
// forward except for back edges planted with probability ec_density.
Mdp gen_random_mdp(std::uint32_t states, std::uint32_t max_actions, std::uint32_t max_branching,
                   double ec_density, std::uint64_t seed);

// Builds a model from a spec such as
//   adversary:n=3,p=0.01
//   trap
//   random:states=50,actions=3,branching=3,ec=0.2,seed=7
//   branch:n=5,p=0.01,states=1000,actions=3,branching=3,ec=0,seed=1
//   parallel:n=20,p=0.01,states=50,actions=3,branching=3,ec=0.2,seed=1,goal=first
// Throws std::invalid_argument on malformed specs.
Mdp generate(std::string_view spec);

}  // namespace reach
