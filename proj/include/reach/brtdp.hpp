#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "reach/random.hpp"
#include "reach/solver.hpp"
#include "reach/working_model.hpp"

namespace reach {

enum class SuccessorRule { WeightedByGap, ByTransitionProbability };
enum class StopReason { Terminal, CycleSuspect, Cap };

struct SamplerConfig : SolverConfig {
    std::uint64_t seed = 0;
    std::uint64_t mec_period = 1000;       // episodes between forced MEC checks
    std::optional<std::uint64_t> step_cap;  // default: 10 * |S| + 10^4
    SuccessorRule successor_rule = SuccessorRule::WeightedByGap;
};

std::uint64_t default_step_cap(const Mdp& mdp);
inline std::uint64_t step_cap(const Mdp& mdp, const SamplerConfig& c) {
    return c.step_cap ? *c.step_cap : default_step_cap(mdp);
}

struct Step {
    StateId state;  // representative at the time of the step
    ActionId action;
};

struct Path {
    std::vector<Step> steps;
    StateId last = 0;
};

// Per-state stamps for "already on the current path" checks in O(1).
class PathMarks {
public:
    explicit PathMarks(std::size_t n) : stamp_(n, 0) {}
    void reset() {
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
    }
    void mark(StateId s) { stamp_[s] = epoch_; }
    bool marked(StateId s) const { return stamp_[s] == epoch_; }

private:
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

// Uniform choice among the available pairs of maximal U.
ActionId brtdp_select_action(const WorkingModel& wm, StateId r, Rng& rng);

// Returns an original-model successor of a.
StateId brtdp_select_successor(const WorkingModel& wm, ActionId a, Rng& rng, SuccessorRule rule);
StateId sample_by_probability(const Mdp& mdp, ActionId a, Rng& rng);

// Simulates from `start` until goal/sink, a repeated state, or `cap` steps.
// choose_action(r) -> ActionId, choose_successor(a) -> original StateId.
template <class ChooseAction, class ChooseSuccessor>
StopReason walk(WorkingModel& wm, StateId start, std::uint64_t cap, PathMarks& marks, Path& path,
                ChooseAction&& choose_action, ChooseSuccessor&& choose_successor) {
    path.steps.clear();
    marks.reset();
    StateId s = start;
    wm.touch(s);
    path.last = s;
    for (;;) {
        if (wm.is_terminal(s)) return StopReason::Terminal;
        if (path.steps.size() >= cap) return StopReason::Cap;
        marks.mark(s);
        const ActionId a = choose_action(s);
        const StateId t = choose_successor(a);
        wm.touch(t);
        path.steps.push_back({s, a});
        s = wm.rep(t);
        path.last = s;
        if (marks.marked(s)) return StopReason::CycleSuspect;
    }
}

StopReason run_episode(WorkingModel& wm, const SamplerConfig& config, Rng& rng, PathMarks& marks,
                       Path& path);

// Pair backups along the path, last transition first.
void backpropagate_path(WorkingModel& wm, const Path& path);

SolverResult run_brtdp(const Mdp& mdp, const SamplerConfig& config,
                       const UpdateObserver& observer = {});

}  // namespace reach
