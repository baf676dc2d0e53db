#include "reach/mcts.hpp"

#include <cmath>

namespace reach {

void SearchTree::add_children(std::uint32_t parent, const std::vector<StateId>& states) {
    const auto first = static_cast<std::uint32_t>(nodes_.size());
    for (StateId s : states) {
        TreeNode n{s};
        n.parent = parent;
        nodes_.push_back(n);
    }
    nodes_[parent].first_child = first;
    nodes_[parent].child_count = static_cast<std::uint32_t>(states.size());
}

bool SearchTree::contains_state(StateId s) const {
    for (const auto& n : nodes_)
        if (n.state == s) return true;
    return false;
}

double ucb1(std::uint64_t v, std::uint64_t n, std::uint64_t n_parent, double c) {
    if (n == 0) return std::numeric_limits<double>::infinity();
    const double mean = static_cast<double>(v) / static_cast<double>(n);
    if (c == 0.0) return mean;
    return mean + c * std::sqrt(std::log(static_cast<double>(n_parent)) / static_cast<double>(n));
}

std::uint32_t select_node(const SearchTree& tree, const WorkingModel& wm, double c, Rng& rng,
                          PathMarks& on_path) {
    std::uint32_t x = tree.root();
    for (;;) {
        const TreeNode& node = tree[x];
        on_path.mark(node.state);
        if (node.child_count == 0 || wm.is_terminal(node.state)) return x;
        if (node.child_count == 1) {
            x = node.first_child;
            continue;
        }
        const double log_parent = node.visits > 0 ? std::log(static_cast<double>(node.visits)) : 0.0;
        double best = -1.0;
        std::uint32_t ties = 0;
        auto score = [&](const TreeNode& ch) {
            if (ch.visits == 0) return std::numeric_limits<double>::infinity();
            const double n = static_cast<double>(ch.visits);
            const double mean = static_cast<double>(ch.wins) / n;
            return c == 0.0 ? mean : mean + c * std::sqrt(log_parent / n);
        };
        const std::uint32_t end = node.first_child + node.child_count;
        for (std::uint32_t i = node.first_child; i < end; ++i) {
            const double s = score(tree[i]);
            if (s > best) {
                best = s;
                ties = 1;
            } else if (s == best) {
                ++ties;
            }
        }
        std::uint64_t pick = ties > 1 ? rng.below(ties) : 0;
        for (std::uint32_t i = node.first_child; i < end; ++i)
            if (score(tree[i]) == best && pick-- == 0) {
                x = i;
                break;
            }
    }
}

Expansion expand(SearchTree& tree, std::uint32_t leaf, WorkingModel& wm, const PathMarks& on_path,
                 Rng& rng, PathMarks& scratch, std::size_t max_nodes) {
    Expansion e{leaf, false};
    const StateId r = tree[leaf].state;
    if (wm.is_terminal(r)) return e;
    scratch.reset();
    std::vector<StateId> children;
    for (ActionId a : wm.available(r))
        for (const auto& t : wm.mdp().successors(a)) {
            const StateId q = wm.rep(t.target);
            if (on_path.marked(q)) {
                e.skipped_ancestor = true;
                continue;
            }
            if (scratch.marked(q)) continue;
            scratch.mark(q);
            wm.touch(t.target);
            children.push_back(q);
        }
    if (children.empty()) return e;
    if (tree.size() + children.size() > max_nodes) {
        e.out_of_nodes = true;
        return e;
    }
    tree.add_children(leaf, children);
    const auto pick = children.size() > 1 ? rng.below(children.size()) : 0;
    e.start = tree[leaf].first_child + static_cast<std::uint32_t>(pick);
    return e;
}

RolloutOutcome rollout(WorkingModel& wm, StateId from, RolloutPolicy policy, SuccessorRule rule,
                       std::uint64_t cap, Rng& rng, PathMarks& marks, Path& path) {
    RolloutOutcome out;
    if (policy == RolloutPolicy::Uniform) {
        out.reason = walk(
            wm, from, cap, marks, path,
            [&](StateId s) {
                const auto avail = wm.available(s);
                return avail.size() == 1 ? avail[0] : avail[rng.below(avail.size())];
            },
            [&](ActionId a) { return sample_by_probability(wm.mdp(), a, rng); });
    } else {
        out.reason = walk(
            wm, from, cap, marks, path, [&](StateId s) { return brtdp_select_action(wm, s, rng); },
            [&](ActionId a) { return brtdp_select_successor(wm, a, rng, rule); });
    }
    out.success = out.reason == StopReason::Terminal && wm.is_goal(path.last);
    return out;
}

void backup_on_rollout(WorkingModel& wm, const Path& path) { backpropagate_path(wm, path); }

void backup_on_tree(SearchTree& tree, std::uint32_t node, bool success, WorkingModel* bounds) {
    for (std::uint32_t x = node; x != kNoNode; x = tree[x].parent) {
        TreeNode& t = tree[x];
        ++t.visits;
        if (success) ++t.wins;
        if (bounds) bounds->bellman_update(t.state);
    }
}

ActionId ucb_select_action(const WorkingModel& wm, const UcbStats& stats, StateId r, double c,
                           Rng& rng) {
    const auto avail = wm.available(r);
    if (avail.size() == 1) return avail[0];
    std::uint64_t total = 0;
    for (ActionId a : avail) total += stats.visits[a];
    const double log_total = total > 0 ? std::log(static_cast<double>(total)) : 0.0;
    auto score = [&](ActionId a) {
        const std::uint64_t n = stats.visits[a];
        if (n == 0) return std::numeric_limits<double>::infinity();
        const double mean = static_cast<double>(stats.wins[a]) / static_cast<double>(n);
        return c == 0.0 ? mean : mean + c * std::sqrt(log_total / static_cast<double>(n));
    };
    double best = -1.0;
    std::uint32_t ties = 0;
    for (ActionId a : avail) {
        const double s = score(a);
        if (s > best) {
            best = s;
            ties = 1;
        } else if (s == best) {
            ++ties;
        }
    }
    std::uint64_t pick = ties > 1 ? rng.below(ties) : 0;
    for (ActionId a : avail)
        if (score(a) == best && pick-- == 0) return a;
    return avail[0];
}

SolverResult run_mcts(const Mdp& mdp, const MctsConfig& config, const MctsHooks& hooks,
                      SearchTree* final_tree) {
    WorkingModel wm(mdp);
    wm.set_observer(hooks.bounds);
    Rng rng(config.seed);
    const auto n = mdp.num_states();
    PathMarks on_path(n), scratch(n), walk_marks(n);
    Path path;
    SearchTree tree;
    UcbStats stats;
    const Deadline deadline(config);
    const std::uint64_t cap = step_cap(mdp, config);
    const std::uint64_t period = std::max<std::uint64_t>(1, config.mec_period);
    const bool bounded = config.variant != Variant::Mcts;
    const double c = config.exploration;

    wm.touch(mdp.init());
    if (config.variant == Variant::BrtdpUcb) {
        stats.visits.assign(mdp.num_actions(), 0);
        stats.wins.assign(mdp.num_actions(), 0);
    } else {
        tree.reset(wm.init());
    }

    SolverResult r;
    for (;;) {
        if (bounded && wm.gap(wm.init()) < config.epsilon) {
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

        bool check_mecs = false;
        if (config.variant == Variant::BrtdpUcb) {
            const StopReason why = walk(
                wm, wm.init(), cap, walk_marks, path,
                [&](StateId s) { return ucb_select_action(wm, stats, s, c, rng); },
                [&](ActionId a) { return sample_by_probability(mdp, a, rng); });
            const bool success = why == StopReason::Terminal && wm.is_goal(path.last);
            for (auto it = path.steps.rbegin(); it != path.steps.rend(); ++it) {
                ++stats.visits[it->action];
                if (success) ++stats.wins[it->action];
                wm.update_action(it->action);
                wm.refresh_state(it->state);
            }
            check_mecs = why == StopReason::CycleSuspect;
        } else {
            on_path.reset();
            const std::uint32_t leaf = select_node(tree, wm, c, rng, on_path);
            const Expansion e = expand(tree, leaf, wm, on_path, rng, scratch, config.max_tree_nodes);
            if (e.out_of_nodes) {
                r.status = Status::BudgetExhausted;
                break;
            }
            const auto policy =
                config.variant == Variant::MctsBrtdp ? RolloutPolicy::Brtdp : RolloutPolicy::Uniform;
            const RolloutOutcome out = rollout(wm, tree[e.start].state, policy, config.successor_rule,
                                               cap, rng, walk_marks, path);
            if (bounded) backup_on_rollout(wm, path);
            backup_on_tree(tree, e.start, out.success, bounded ? &wm : nullptr);
            check_mecs = out.reason == StopReason::CycleSuspect || e.skipped_ancestor;
        }
        ++r.iterations;
        if (hooks.after_iteration) hooks.after_iteration(r.iterations, tree);

        if (bounded && (check_mecs || r.iterations % period == 0) && wm.collapse_explored() &&
            config.variant != Variant::BrtdpUcb)
            tree.reset(wm.init());
    }

    if (bounded) {
        r.lower = wm.lower(mdp.init());
        r.upper = wm.upper(mdp.init());
    } else {
        r.lower = 0.0;
        r.upper = 1.0;
        r.status = Status::Unguaranteed;
        if (tree.size() > 0 && tree[tree.root()].visits > 0)
            r.estimate = static_cast<double>(tree[tree.root()].wins) /
                         static_cast<double>(tree[tree.root()].visits);
    }
    r.explored_states = wm.explored_count();
    r.policy = wm.extract_policy();
    if (final_tree) *final_tree = tree;
    return r;
}

}  // namespace reach
