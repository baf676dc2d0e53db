#include "reach/working_model.hpp"

#include <algorithm>
#include <limits>

#include "reach/mec.hpp"

namespace reach {

WorkingModel::WorkingModel(const Mdp& mdp) : mdp_(&mdp) {
    const auto n = mdp.num_states();
    const auto m = mdp.num_actions();
    rep_.resize(n);
    members_.resize(n);
    avail_begin_.resize(n);
    avail_len_.resize(n);
    state_.assign(n, Interval{0.0, 1.0});
    touched_.assign(n, 0);
    pool_.resize(m);
    removed_.assign(m, 0);
    pair_.assign(m, Interval{0.0, 1.0});
    for (ActionId a = 0; a < m; ++a) pool_[a] = a;
    for (StateId s = 0; s < n; ++s) {
        rep_[s] = s;
        const auto acts = mdp.actions(s);
        avail_begin_[s] = *acts.begin();
        avail_len_[s] = static_cast<std::uint32_t>(mdp.num_actions(s));
    }
    state_[mdp.goal()] = {1.0, 1.0};
    state_[mdp.sink()] = {0.0, 0.0};
    for (ActionId a : mdp.actions(mdp.goal())) pair_[a] = {1.0, 1.0};
    for (ActionId a : mdp.actions(mdp.sink())) pair_[a] = {0.0, 0.0};
}

void WorkingModel::update_action(ActionId a) {
    double l = 0.0, u = 0.0;
    for (const auto& t : mdp_->successors(a)) {
        const auto& b = state_[rep_[t.target]];
        l += t.probability * b.lower;
        u += t.probability * b.upper;
    }
    pair_[a] = tighten(pair_[a], l, u);
}

void WorkingModel::refresh_state(StateId r) {
    if (is_terminal(r)) return;
    double l = 0.0, u = 0.0;
    for (ActionId a : available(r)) {
        l = std::max(l, pair_[a].lower);
        u = std::max(u, pair_[a].upper);
    }
    state_[r] = tighten(state_[r], l, u);
    notify();
}

void WorkingModel::bellman_update(StateId r) {
    if (is_terminal(r)) return;
    for (ActionId a : available(r)) update_action(a);
    refresh_state(r);
}

bool WorkingModel::collapse_explored() {
    if (touched_list_.size() == last_check_count_) return false;
    last_check_count_ = touched_list_.size();

    constexpr auto kOut = ActionGraph::kOutside;
    const auto n = mdp_->num_states();
    std::vector<std::uint32_t> node_of(n, kOut);
    std::vector<StateId> nodes;
    for (StateId s : touched_list_) {
        const StateId r = rep_[s];
        if (is_terminal(r) || node_of[r] != kOut) continue;
        node_of[r] = static_cast<std::uint32_t>(nodes.size());
        nodes.push_back(r);
    }
    if (nodes.empty()) return false;

    ActionGraph g;
    std::vector<ActionId> origin;
    for (StateId r : nodes) {
        g.add_node();
        for (ActionId a : available(r)) {
            g.add_action();
            origin.push_back(a);
            for (const auto& t : mdp_->successors(a)) g.add_successor(node_of[rep_[t.target]]);
        }
    }
    const auto mecs = decompose(g);
    if (mecs.empty()) return false;

    std::vector<char> internal(mdp_->num_actions(), 0);
    for (const auto& mec : mecs) {
        for (auto ga : mec.actions) internal[origin[ga]] = 1;

        std::vector<StateId> reps;
        for (auto v : mec.nodes) reps.push_back(nodes[v]);
        StateId target = reps.front();
        for (StateId r : reps)
            if (members_size(r) > members_size(target) ||
                (members_size(r) == members_size(target) && r < target))
                target = r;

        std::vector<ActionId> leaving;
        double exit_l = 0.0, exit_u = 0.0;
        double member_l = 0.0, member_u = 1.0;
        for (StateId r : reps) {
            member_l = std::max(member_l, state_[r].lower);
            member_u = std::min(member_u, state_[r].upper);
            for (ActionId a : available(r)) {
                if (internal[a]) {
                    removed_[a] = 1;
                    continue;
                }
                leaving.push_back(a);
                exit_l = std::max(exit_l, pair_[a].lower);
                exit_u = std::max(exit_u, pair_[a].upper);
            }
        }

        const StateId dest = leaving.empty() ? mdp_->sink() : target;
        std::vector<StateId> all;
        for (StateId r : reps) {
            if (members_[r].empty()) all.push_back(r);
            else all.insert(all.end(), members_[r].begin(), members_[r].end());
            if (r != dest) {
                members_[r].clear();
                members_[r].shrink_to_fit();
                avail_len_[r] = 0;
            }
        }
        for (StateId s : all) rep_[s] = dest;
        if (members_[dest].empty()) members_[dest].push_back(dest);
        for (StateId s : all)
            if (s != dest) members_[dest].push_back(s);

        if (dest == target) {
            avail_begin_[target] = static_cast<std::uint32_t>(pool_.size());
            avail_len_[target] = static_cast<std::uint32_t>(leaving.size());
            pool_.insert(pool_.end(), leaving.begin(), leaving.end());
            Interval merged;
            // Pair bounds may sit an ulp above their state's U after
            // rounding; capping keeps every member's U from rising.
            merged.lower = std::max(member_l, std::min(exit_l, member_u));
            merged.upper = std::max(std::min(exit_u, member_u), merged.lower);
            state_[target] = merged;
        }
    }
    ++generation_;
    notify();
    return true;
}

Policy WorkingModel::extract_policy() const {
    const Mdp& m = *mdp_;
    const auto n = m.num_states();
    Policy p;
    p.choice.assign(n, kNoAction);

    std::vector<std::vector<ActionId>> inside(n);
    for (ActionId a = 0; a < m.num_actions(); ++a)
        if (removed_[a]) inside[rep_[m.owner(a)]].push_back(a);

    std::vector<char> done(n, 0);
    for (StateId r = 0; r < n; ++r) {
        if (rep_[r] != r) continue;
        if (is_terminal(r)) {
            p.choice[r] = *m.actions(r).begin();
            done[r] = 1;
        } else {
            ActionId best = kNoAction;
            for (ActionId a : available(r))
                if (best == kNoAction || pair_[a].lower > pair_[best].lower ||
                    (pair_[a].lower == pair_[best].lower && a < best))
                    best = a;
            if (best != kNoAction) {
                p.choice[m.owner(best)] = best;
                done[m.owner(best)] = 1;
            }
        }
        // Route the other members towards the chosen exit.
        auto& acts = inside[r];
        bool progress = true;
        while (progress) {
            progress = false;
            for (ActionId a : acts) {
                const StateId s = m.owner(a);
                if (done[s]) continue;
                for (const auto& t : m.successors(a))
                    if (done[t.target]) {
                        p.choice[s] = a;
                        done[s] = 1;
                        progress = true;
                        break;
                    }
            }
        }
        for (ActionId a : acts)
            if (!done[m.owner(a)]) {
                p.choice[m.owner(a)] = a;
                done[m.owner(a)] = 1;
            }
    }
    for (StateId s = 0; s < n; ++s)
        if (p.choice[s] == kNoAction) p.choice[s] = *m.actions(s).begin();
    return p;
}

}  // namespace reach
