#include "reach/brtdp.hpp"

namespace reach {

std::uint64_t default_step_cap(const Mdp& mdp) { return 10 * mdp.num_states() + 10000; }

ActionId brtdp_select_action(const WorkingModel& wm, StateId r, Rng& rng) {
    const auto avail = wm.available(r);
    if (avail.size() == 1) return avail[0];
    double best = -1.0;
    std::uint32_t ties = 0;
    for (ActionId a : avail) {
        const double u = wm.action_upper(a);
        if (u > best) {
            best = u;
            ties = 1;
        } else if (u == best) {
            ++ties;
        }
    }
    std::uint64_t pick = ties > 1 ? rng.below(ties) : 0;
    for (ActionId a : avail)
        if (wm.action_upper(a) == best && pick-- == 0) return a;
    return avail[0];
}

StateId sample_by_probability(const Mdp& mdp, ActionId a, Rng& rng) {
    const auto succ = mdp.successors(a);
    if (succ.size() == 1) return succ[0].target;
    double x = rng.uniform();
    for (const auto& t : succ) {
        x -= t.probability;
        if (x < 0.0) return t.target;
    }
    return succ.back().target;
}

StateId brtdp_select_successor(const WorkingModel& wm, ActionId a, Rng& rng, SuccessorRule rule) {
    const auto succ = wm.mdp().successors(a);
    if (rule == SuccessorRule::ByTransitionProbability) return sample_by_probability(wm.mdp(), a, rng);
    double total = 0.0;
    for (const auto& t : succ) total += t.probability * wm.gap(wm.rep(t.target));
    if (!(total > 0.0)) return sample_by_probability(wm.mdp(), a, rng);
    if (succ.size() == 1) return succ[0].target;
    double x = rng.uniform() * total;
    StateId last_positive = succ[0].target;
    for (const auto& t : succ) {
        const double w = t.probability * wm.gap(wm.rep(t.target));
        if (w <= 0.0) continue;
        last_positive = t.target;
        x -= w;
        if (x < 0.0) return t.target;
    }
    return last_positive;
}

StopReason run_episode(WorkingModel& wm, const SamplerConfig& config, Rng& rng, PathMarks& marks,
                       Path& path) {
    return walk(
        wm, wm.init(), step_cap(wm.mdp(), config), marks, path,
        [&](StateId r) { return brtdp_select_action(wm, r, rng); },
        [&](ActionId a) { return brtdp_select_successor(wm, a, rng, config.successor_rule); });
}

void backpropagate_path(WorkingModel& wm, const Path& path) {
    for (auto it = path.steps.rbegin(); it != path.steps.rend(); ++it) {
        wm.update_action(it->action);
        wm.refresh_state(it->state);
    }
}

SolverResult run_brtdp(const Mdp& mdp, const SamplerConfig& config, const UpdateObserver& observer) {
    WorkingModel wm(mdp);
    wm.set_observer(observer);
    Rng rng(config.seed);
    PathMarks marks(mdp.num_states());
    Path path;
    const Deadline deadline(config);
    wm.touch(mdp.init());

    SolverResult r;
    const std::uint64_t period = std::max<std::uint64_t>(1, config.mec_period);
    for (;;) {
        if (wm.gap(wm.init()) < config.epsilon) {
            r.status = Status::Converged;
            break;
        }
        if (r.iterations >= config.max_iterations) {
            r.status = Status::BudgetExhausted;
            break;
        }
        if (r.iterations % 256 == 0 && deadline.expired()) {
            r.status = Status::Timeout;
            break;
        }
        const StopReason why = run_episode(wm, config, rng, marks, path);
        backpropagate_path(wm, path);
        ++r.iterations;
        if (why == StopReason::CycleSuspect || r.iterations % period == 0) wm.collapse_explored();
    }
    r.lower = wm.lower(mdp.init());
    r.upper = wm.upper(mdp.init());
    r.explored_states = wm.explored_count();
    r.policy = wm.extract_policy();
    return r;
}

}  // namespace reach
