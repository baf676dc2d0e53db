#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "reach/benchgen.hpp"
#include "reach/exact.hpp"
#include "reach/model.hpp"
#include "reach/model_io.hpp"
#include "reach/solver.hpp"

namespace testing {

inline reach::Mdp chain_model() { return reach::gen_adversary(3, 0.01); }
inline reach::Mdp trap_model() { return reach::gen_upper_bound_trap(); }

inline constexpr const char* kChainText = R"(mdp
states 5
init 0
goal 3
sink 4
action 0 a
1 0.01
0 0.99
action 1 b
2 0.01
0 0.99
action 2 c
3 0.01
0 0.99
)";

inline reach::Mdp make(std::int64_t n, std::int64_t init, std::int64_t goal, std::int64_t sink,
                       std::vector<reach::RawAction> actions) {
    reach::RawModel raw;
    raw.num_states = n;
    raw.init = init;
    raw.goal = goal;
    raw.sink = sink;
    raw.actions = std::move(actions);
    return reach::validate(raw);
}

// Gauss-Seidel least fixpoint from zero, written independently of the
// library solvers. Runs until the residual is below tol or sweeps run out.
inline std::vector<double> plain_vi(const reach::Mdp& m, double tol = 1e-13,
                                    std::uint64_t sweeps = 2'000'000) {
    std::vector<double> v(m.num_states(), 0.0);
    v[m.goal()] = 1.0;
    for (std::uint64_t k = 0; k < sweeps; ++k) {
        double delta = 0.0;
        for (reach::StateId s = 0; s < m.num_states(); ++s) {
            if (m.is_terminal(s)) continue;
            double best = 0.0;
            for (auto a : m.actions(s)) {
                double q = 0.0;
                for (const auto& t : m.successors(a)) q += t.probability * v[t.target];
                best = std::max(best, q);
            }
            delta = std::max(delta, std::abs(best - v[s]));
            v[s] = best;
        }
        if (delta < tol) break;
    }
    return v;
}

struct BruteEc {
    std::vector<reach::StateId> states;
    std::vector<reach::ActionId> actions;
};

// Every maximal end component among the non-terminal states, found by
// trying all state subsets. Only for tiny models.
inline std::vector<BruteEc> brute_force_mecs(const reach::Mdp& m) {
    std::vector<reach::StateId> cand;
    for (reach::StateId s = 0; s < m.num_states(); ++s)
        if (!m.is_terminal(s)) cand.push_back(s);
    const std::size_t k = cand.size();
    std::vector<BruteEc> ecs;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
        std::vector<char> in(m.num_states(), 0);
        std::vector<reach::StateId> T;
        for (std::size_t i = 0; i < k; ++i)
            if (mask >> i & 1) {
                in[cand[i]] = 1;
                T.push_back(cand[i]);
            }
        std::vector<reach::ActionId> A;
        bool every_state_has_action = true;
        for (auto s : T) {
            bool any = false;
            for (auto a : m.actions(s)) {
                bool closed = true;
                for (const auto& t : m.successors(a)) closed = closed && in[t.target];
                if (closed) {
                    A.push_back(a);
                    any = true;
                }
            }
            every_state_has_action = every_state_has_action && any;
        }
        if (!every_state_has_action) continue;
        // Strong connectivity: every state reaches every other via A.
        bool strongly = true;
        for (auto src : T) {
            std::vector<char> seen(m.num_states(), 0);
            std::vector<reach::StateId> stack{src};
            seen[src] = 1;
            while (!stack.empty()) {
                auto s = stack.back();
                stack.pop_back();
                for (auto a : A) {
                    if (m.owner(a) != s) continue;
                    for (const auto& t : m.successors(a))
                        if (!seen[t.target]) {
                            seen[t.target] = 1;
                            stack.push_back(t.target);
                        }
                }
            }
            for (auto t : T) strongly = strongly && seen[t];
        }
        if (strongly) ecs.push_back({T, A});
    }
    std::vector<BruteEc> maximal;
    for (const auto& e : ecs) {
        bool dominated = false;
        for (const auto& f : ecs)
            if (f.states.size() > e.states.size() &&
                std::includes(f.states.begin(), f.states.end(), e.states.begin(), e.states.end()))
                dominated = true;
        if (!dominated) maximal.push_back(e);
    }
    return maximal;
}

// Watches every bound update: range, ordering, monotonicity of state and
// active pair bounds, and containment of a reference value at init.
// Comparisons allow `rounding`: members of a collapsed component share one
// true value, but their stored bounds may disagree by a few ulps.
struct BoundsMonitor {
    reach::StateId init = 0;
    double reference = 0.0;
    double slack = 1e-9;
    double rounding = 1e-12;
    std::vector<double> last_lower, last_upper, last_pair_lower, last_pair_upper;
    std::uint64_t updates = 0;
    std::uint64_t violations = 0;
    std::string first_violation;

    BoundsMonitor(reach::StateId init_state, double ref) : init(init_state), reference(ref) {}

    void fail(const std::string& what) {
        if (violations++ == 0) first_violation = what + " at update " + std::to_string(updates);
    }

    void operator()(const reach::BoundsView& b) {
        ++updates;
        const std::size_t n = b.num_states();
        if (last_lower.empty()) {
            last_lower.assign(n, 0.0);
            last_upper.assign(n, 1.0);
        }
        for (reach::StateId s = 0; s < n; ++s) {
            const double l = b.lower(s), u = b.upper(s);
            if (!(0.0 <= l && l <= u + rounding && u <= 1.0))
                fail("range at state " + std::to_string(s));
            if (l < last_lower[s] - rounding) fail("lower decreased at state " + std::to_string(s));
            if (u > last_upper[s] + rounding) fail("upper increased at state " + std::to_string(s));
            last_lower[s] = l;
            last_upper[s] = u;
        }
        const std::size_t np = b.num_pairs();
        if (last_pair_lower.size() != np) {
            last_pair_lower.assign(np, 0.0);
            last_pair_upper.assign(np, 1.0);
        }
        for (reach::ActionId a = 0; a < np; ++a) {
            if (!b.pair_active(a)) continue;
            const double l = b.pair_lower(a), u = b.pair_upper(a);
            if (!(0.0 <= l && l <= u + rounding && u <= 1.0))
                fail("pair range at " + std::to_string(a));
            if (l < last_pair_lower[a] - rounding) fail("pair lower decreased at " + std::to_string(a));
            if (u > last_pair_upper[a] + rounding) fail("pair upper increased at " + std::to_string(a));
            last_pair_lower[a] = l;
            last_pair_upper[a] = u;
        }
        if (b.lower(init) > reference + slack || b.upper(init) < reference - slack)
            fail("reference value outside [L,U] at init");
    }
};

}  // namespace testing
