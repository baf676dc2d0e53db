#include "reach/exact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "reach/bounds.hpp"
#include "reach/mec.hpp"

namespace reach {

double q_value(const Mdp& mdp, ActionId a, std::span<const double> values) {
    double sum = 0.0;
    for (const auto& t : mdp.successors(a)) sum += t.probability * values[t.target];
    return std::clamp(sum, 0.0, 1.0);
}

namespace {

class VectorView final : public BoundsView {
public:
    VectorView(const std::vector<double>& lo, const std::vector<double>* hi, StateId sink)
        : lo_(lo), hi_(hi), sink_(sink) {}
    std::size_t num_states() const override { return lo_.size(); }
    double lower(StateId s) const override { return lo_[s]; }
    double upper(StateId s) const override {
        if (hi_) return (*hi_)[s];
        return s == sink_ ? 0.0 : 1.0;
    }

private:
    const std::vector<double>& lo_;
    const std::vector<double>* hi_;
    StateId sink_;
};

// Re-expresses a quotient view on the states of the original model.
class LiftedView final : public BoundsView {
public:
    LiftedView(const BoundsView& inner, const std::vector<StateId>& map) : inner_(inner), map_(map) {}
    std::size_t num_states() const override { return map_.size(); }
    double lower(StateId s) const override { return inner_.lower(map_[s]); }
    double upper(StateId s) const override { return inner_.upper(map_[s]); }

private:
    const BoundsView& inner_;
    const std::vector<StateId>& map_;
};

constexpr std::uint64_t kClockStride = 64;

}  // namespace

SolverResult value_iteration(const Mdp& mdp, const IterationConfig& config,
                             const UpdateObserver& observer) {
    const auto n = mdp.num_states();
    std::vector<double> cur(n, 0.0), next(n, 0.0);
    cur[mdp.goal()] = next[mdp.goal()] = 1.0;
    const Deadline deadline(config);

    SolverResult r;
    r.explored_states = n;
    Status stop = Status::Unguaranteed;
    const StateId init = mdp.init();
    if (!mdp.is_terminal(init)) {
        for (;;) {
            if (r.iterations >= config.max_iterations) {
                stop = Status::BudgetExhausted;
                break;
            }
            if (r.iterations % kClockStride == 0 && deadline.expired()) {
                stop = Status::Timeout;
                break;
            }
            double delta = 0.0;
            for (StateId s = 0; s < n; ++s) {
                if (mdp.is_terminal(s)) continue;
                double best = 0.0;
                for (ActionId a : mdp.actions(s)) best = std::max(best, q_value(mdp, a, cur));
                best = std::max(best, cur[s]);
                delta = std::max(delta, best - cur[s]);
                next[s] = best;
            }
            cur.swap(next);
            ++r.iterations;
            if (observer) observer(VectorView(cur, nullptr, mdp.sink()));
            if (delta < config.epsilon) break;
        }
    }
    r.lower = cur[init];
    r.upper = init == mdp.sink() ? 0.0 : 1.0;
    r.status = r.upper - r.lower < config.epsilon ? Status::Converged : stop;
    r.policy = extract_policy(mdp, cur);
    return r;
}

namespace {

SolverResult iterate_bounds(const Mdp& mdp, const IterationConfig& config,
                            const std::function<void(const BoundsView&)>& emit) {
    const auto n = mdp.num_states();
    std::vector<double> lo(n, 0.0), hi(n, 1.0), lo2, hi2;
    lo[mdp.goal()] = 1.0;
    hi[mdp.sink()] = 0.0;
    lo2 = lo;
    hi2 = hi;
    const Deadline deadline(config);
    const StateId init = mdp.init();

    SolverResult r;
    r.explored_states = n;
    bool stagnant = false;
    for (;;) {
        if (hi[init] - lo[init] < config.epsilon) {
            r.status = Status::Converged;
            break;
        }
        if (stagnant && config.stop_on_stagnation) {
            r.status = Status::NoConvergence;
            break;
        }
        if (r.iterations >= config.max_iterations) {
            r.status = stagnant ? Status::NoConvergence : Status::BudgetExhausted;
            break;
        }
        if (r.iterations % kClockStride == 0 && deadline.expired()) {
            r.status = Status::Timeout;
            break;
        }
        bool changed = false;
        for (StateId s = 0; s < n; ++s) {
            if (mdp.is_terminal(s)) continue;
            double l = 0.0, u = 0.0;
            for (ActionId a : mdp.actions(s)) {
                l = std::max(l, q_value(mdp, a, lo));
                u = std::max(u, q_value(mdp, a, hi));
            }
            const Interval next = tighten({lo[s], hi[s]}, l, u);
            changed = changed || next.lower != lo[s] || next.upper != hi[s];
            lo2[s] = next.lower;
            hi2[s] = next.upper;
        }
        lo.swap(lo2);
        hi.swap(hi2);
        ++r.iterations;
        stagnant = !changed;
        if (emit) emit(VectorView(lo, &hi, mdp.sink()));
    }
    r.lower = lo[init];
    r.upper = hi[init];
    r.policy = extract_policy(mdp, lo);
    return r;
}

}  // namespace

SolverResult interval_iteration(const Mdp& mdp, const IterationConfig& config, bool collapse_first,
                                const UpdateObserver& observer) {
    if (!collapse_first) return iterate_bounds(mdp, config, observer);

    const QuotientMap q = quotient(mdp, find_mecs(mdp));
    std::function<void(const BoundsView&)> emit;
    if (observer)
        emit = [&](const BoundsView& inner) { observer(LiftedView(inner, q.state_map)); };
    SolverResult r = iterate_bounds(q.mdp, config, emit);
    r.policy = q.lift(mdp, r.policy);
    r.explored_states = mdp.num_states();
    return r;
}

Policy extract_policy(const Mdp& mdp, std::span<const double> lower) {
    Policy p;
    p.choice.assign(mdp.num_states(), kNoAction);
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        double best = -1.0;
        for (ActionId a : mdp.actions(s)) {
            const double q = q_value(mdp, a, lower);
            if (q > best) {
                best = q;
                p.choice[s] = a;
            }
        }
    }
    return p;
}

std::vector<char> reach_positive(const Mdp& mdp) {
    const auto n = mdp.num_states();
    std::vector<char> in(n, 0);
    in[mdp.goal()] = 1;
    for (bool grew = true; grew;) {
        grew = false;
        for (StateId s = 0; s < n; ++s) {
            if (in[s]) continue;
            for (ActionId a : mdp.actions(s)) {
                bool hit = false;
                for (const auto& t : mdp.successors(a)) hit = hit || in[t.target];
                if (hit) {
                    in[s] = 1;
                    grew = true;
                    break;
                }
            }
        }
    }
    return in;
}

std::vector<char> reach_almost_surely(const Mdp& mdp) {
    const auto n = mdp.num_states();
    std::vector<char> outer(n, 1);
    for (;;) {
        std::vector<char> inner(n, 0);
        inner[mdp.goal()] = 1;
        for (bool grew = true; grew;) {
            grew = false;
            for (StateId s = 0; s < n; ++s) {
                if (inner[s] || !outer[s]) continue;
                for (ActionId a : mdp.actions(s)) {
                    bool stays = true, hits = false;
                    for (const auto& t : mdp.successors(a)) {
                        stays = stays && outer[t.target];
                        hits = hits || inner[t.target];
                    }
                    if (stays && hits) {
                        inner[s] = 1;
                        grew = true;
                        break;
                    }
                }
            }
        }
        if (inner == outer) return outer;
        outer.swap(inner);
    }
}

std::vector<double> exact_oracle(const Mdp& mdp) {
    const auto n = mdp.num_states();
    if (n > kOracleStateLimit)
        throw SizeLimit("model has " + std::to_string(n) + " states, oracle limit is " +
                        std::to_string(kOracleStateLimit));

    const auto pos = reach_positive(mdp);
    const auto one = reach_almost_surely(mdp);
    std::vector<double> value(n, 0.0);
    std::vector<StateId> maybe;
    for (StateId s = 0; s < n; ++s) {
        if (one[s]) value[s] = 1.0;
        else if (pos[s]) maybe.push_back(s);
    }
    if (maybe.empty()) return value;

    // Initial policy: walk backwards from the almost-sure states so that each
    // maybe state gets an action with a successor closer to them.
    std::vector<ActionId> policy(n, kNoAction);
    std::vector<char> reached(one.begin(), one.end());
    for (bool grew = true; grew;) {
        grew = false;
        for (StateId s : maybe) {
            if (reached[s]) continue;
            for (ActionId a : mdp.actions(s)) {
                bool hit = false;
                for (const auto& t : mdp.successors(a)) hit = hit || reached[t.target];
                if (hit) {
                    policy[s] = a;
                    reached[s] = 1;
                    grew = true;
                    break;
                }
            }
        }
    }

    std::vector<std::int64_t> col(n, -1);
    for (int round = 0; round < 10000; ++round) {
        // Evaluate the current policy on states that can still reach the
        // almost-sure set under it; the rest get 0.
        std::vector<char> alive(one.begin(), one.end());
        for (bool grew = true; grew;) {
            grew = false;
            for (StateId s : maybe) {
                if (alive[s] || policy[s] == kNoAction) continue;
                for (const auto& t : mdp.successors(policy[s]))
                    if (alive[t.target]) {
                        alive[s] = 1;
                        grew = true;
                        break;
                    }
            }
        }
        std::vector<StateId> vars;
        for (StateId s : maybe) {
            col[s] = -1;
            if (alive[s]) {
                col[s] = static_cast<std::int64_t>(vars.size());
                vars.push_back(s);
            } else {
                value[s] = 0.0;
            }
        }
        const auto k = static_cast<Eigen::Index>(vars.size());
        if (k > 0) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Identity(k, k);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
            for (Eigen::Index i = 0; i < k; ++i)
                for (const auto& t : mdp.successors(policy[vars[i]])) {
                    if (one[t.target]) b[i] += t.probability;
                    else if (col[t.target] >= 0) A(i, col[t.target]) -= t.probability;
                }
            const Eigen::VectorXd x = A.partialPivLu().solve(b);
            for (Eigen::Index i = 0; i < k; ++i) value[vars[i]] = std::clamp(x[i], 0.0, 1.0);
        }

        bool switched = false;
        for (StateId s : maybe) {
            const double current = policy[s] == kNoAction ? 0.0 : q_value(mdp, policy[s], value);
            ActionId best = policy[s];
            double best_q = current;
            for (ActionId a : mdp.actions(s)) {
                const double q = q_value(mdp, a, value);
                if (q > best_q + 1e-12) {
                    best_q = q;
                    best = a;
                }
            }
            if (best != policy[s]) {
                policy[s] = best;
                switched = true;
            }
        }
        if (!switched) break;
    }
    return value;
}

}  // namespace reach
