#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "reach/brtdp.hpp"
#include "reach/random.hpp"
#include "reach/solver.hpp"
#include "reach/working_model.hpp"

namespace reach {

enum class Variant { Mcts, Bmcts, MctsBrtdp, BrtdpUcb };

struct MctsConfig : SamplerConfig {
    double exploration = 25.0;
    Variant variant = Variant::MctsBrtdp;
    std::size_t max_tree_nodes = 20'000'000;
};

inline constexpr std::uint32_t kNoNode = std::numeric_limits<std::uint32_t>::max();

struct TreeNode {
    StateId state;
    std::uint32_t parent = kNoNode;
    std::uint32_t first_child = 0;
    std::uint32_t child_count = 0;
    std::uint64_t visits = 0;
    std::uint64_t wins = 0;
    bool operator==(const TreeNode&) const = default;
};

// Nodes live in one arena; the children of a node are contiguous.
class SearchTree {
public:
    void reset(StateId root_state) {
        nodes_.clear();
        nodes_.push_back(TreeNode{root_state});
    }
    std::uint32_t root() const { return 0; }
    std::size_t size() const { return nodes_.size(); }
    const TreeNode& operator[](std::uint32_t i) const { return nodes_[i]; }
    TreeNode& operator[](std::uint32_t i) { return nodes_[i]; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    // Appends children for `parent`, which must have none yet.
    void add_children(std::uint32_t parent, const std::vector<StateId>& states);

    bool contains_state(StateId s) const;

private:
    std::vector<TreeNode> nodes_;
};

// v/n + C * sqrt(ln(n_parent) / n); +infinity for n = 0.
double ucb1(std::uint64_t v, std::uint64_t n, std::uint64_t n_parent, double c);

// Descends by UCB1 until a leaf or a goal/sink node. Every state on the way
// is marked in `on_path`.
std::uint32_t select_node(const SearchTree& tree, const WorkingModel& wm, double c, Rng& rng,
                          PathMarks& on_path);

struct Expansion {
    std::uint32_t start;         // roll-out node (the leaf itself if nothing was added)
    bool skipped_ancestor;       // a successor already on the tree path was left out
    bool out_of_nodes = false;
};

// Adds one child per distinct successor state of the leaf, leaving out
// states already on the path from the root, and picks one uniformly.
Expansion expand(SearchTree& tree, std::uint32_t leaf, WorkingModel& wm, const PathMarks& on_path,
                 Rng& rng, PathMarks& scratch, std::size_t max_nodes);

enum class RolloutPolicy { Uniform, Brtdp };

struct RolloutOutcome {
    bool success = false;
    StopReason reason = StopReason::Terminal;
};

RolloutOutcome rollout(WorkingModel& wm, StateId from, RolloutPolicy policy, SuccessorRule rule,
                       std::uint64_t cap, Rng& rng, PathMarks& marks, Path& path);

void backup_on_rollout(WorkingModel& wm, const Path& path);

// Counts on the chain from node to root; with bounds, a full Bellman backup
// of every chain state, leaf first.
void backup_on_tree(SearchTree& tree, std::uint32_t node, bool success, WorkingModel* bounds);

// Flat per-pair statistics for the tree-free variant.
struct UcbStats {
    std::vector<std::uint64_t> visits;
    std::vector<std::uint64_t> wins;
};

ActionId ucb_select_action(const WorkingModel& wm, const UcbStats& stats, StateId r, double c,
                           Rng& rng);

struct MctsHooks {
    UpdateObserver bounds;
    // Called after every completed iteration with the iteration count.
    std::function<void(std::uint64_t, const SearchTree&)> after_iteration;
};

SolverResult run_mcts(const Mdp& mdp, const MctsConfig& config, const MctsHooks& hooks = {},
                      SearchTree* final_tree = nullptr);

}  // namespace reach
