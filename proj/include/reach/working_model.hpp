#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reach/bounds.hpp"
#include "reach/model.hpp"
#include "reach/solver.hpp"

namespace reach {

// Mutable view of an Mdp used by the sampling solvers: per-pair and
// per-state bounds plus the running MEC quotient of the explored part.
// States are addressed by representative; rep(s) maps any original state to
// the state currently standing for it.
class WorkingModel final : public BoundsView {
public:
    explicit WorkingModel(const Mdp& mdp);

    const Mdp& mdp() const { return *mdp_; }

    StateId rep(StateId s) const { return rep_[s]; }
    StateId init() const { return rep_[mdp_->init()]; }
    bool is_goal(StateId r) const { return r == mdp_->goal(); }
    bool is_sink(StateId r) const { return r == mdp_->sink(); }
    bool is_terminal(StateId r) const { return is_goal(r) || is_sink(r); }

    std::span<const ActionId> available(StateId r) const {
        return {pool_.data() + avail_begin_[r], avail_len_[r]};
    }

    double state_lower(StateId r) const { return state_[r].lower; }
    double state_upper(StateId r) const { return state_[r].upper; }
    double gap(StateId r) const { return state_[r].upper - state_[r].lower; }
    double action_lower(ActionId a) const { return pair_[a].lower; }
    double action_upper(ActionId a) const { return pair_[a].upper; }

    // One Bellman backup of a single pair; state values are not touched.
    void update_action(ActionId a);
    // Re-derives the state interval of r from its available pairs.
    void refresh_state(StateId r);
    // Backs up all available pairs of r, then refreshes r.
    void bellman_update(StateId r);

    // Marks an original state as explored.
    void touch(StateId s) {
        if (!touched_[s]) {
            touched_[s] = 1;
            touched_list_.push_back(s);
        }
    }
    bool touched(StateId s) const { return touched_[s] != 0; }
    std::uint64_t explored_count() const { return touched_list_.size(); }

    // Collapses the MECs of the explored fragment. Returns true if anything
    // was merged. Skips the work when nothing new was explored since the last
    // call, which cannot change the outcome.
    bool collapse_explored();
    std::uint64_t generation() const { return generation_; }

    Policy extract_policy() const;

    void set_observer(UpdateObserver obs) { observer_ = std::move(obs); }
    void notify() const {
        if (observer_) observer_(*this);
    }

    std::size_t num_states() const override { return mdp_->num_states(); }
    double lower(StateId s) const override { return state_[rep_[s]].lower; }
    double upper(StateId s) const override { return state_[rep_[s]].upper; }
    std::size_t num_pairs() const override { return mdp_->num_actions(); }
    bool pair_active(ActionId a) const override { return !removed_[a]; }
    double pair_lower(ActionId a) const override { return pair_[a].lower; }
    double pair_upper(ActionId a) const override { return pair_[a].upper; }

private:
    std::size_t members_size(StateId r) const {
        return members_[r].empty() ? 1 : members_[r].size();
    }

    const Mdp* mdp_;
    std::vector<StateId> rep_;
    std::vector<std::vector<StateId>> members_;  // empty means just {r}
    std::vector<ActionId> pool_;
    std::vector<std::uint32_t> avail_begin_;
    std::vector<std::uint32_t> avail_len_;
    std::vector<char> removed_;
    std::vector<Interval> pair_;
    std::vector<Interval> state_;
    std::vector<char> touched_;
    std::vector<StateId> touched_list_;
    std::uint64_t last_check_count_ = 0;
    std::uint64_t generation_ = 0;
    UpdateObserver observer_;
};

}  // namespace reach
