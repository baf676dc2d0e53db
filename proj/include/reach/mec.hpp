#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "reach/model.hpp"

namespace reach {

// Compact graph where every node owns a list of actions and every action a
// list of successor nodes. Successors outside the graph are kOutside, which
// makes the action leave any candidate end component.
class ActionGraph {
public:
    static constexpr std::uint32_t kOutside = std::numeric_limits<std::uint32_t>::max();

    std::uint32_t add_node();
    // Opens a new action on the most recently added node.
    std::uint32_t add_action();
    void add_successor(std::uint32_t node);

    std::size_t num_nodes() const { return node_offsets_.size() - 1; }
    std::size_t num_actions() const { return succ_offsets_.size() - 1; }
    std::uint32_t action_begin(std::uint32_t node) const { return node_offsets_[node]; }
    std::uint32_t action_end(std::uint32_t node) const { return node_offsets_[node + 1]; }
    std::span<const std::uint32_t> successors(std::uint32_t action) const {
        return {succ_.data() + succ_offsets_[action], succ_.data() + succ_offsets_[action + 1]};
    }

private:
    std::vector<std::uint32_t> node_offsets_{0};
    std::vector<std::uint32_t> succ_offsets_{0};
    std::vector<std::uint32_t> succ_;
};

struct GraphMec {
    std::vector<std::uint32_t> nodes;
    std::vector<std::uint32_t> actions;  // the actions staying inside
};

// Maximal end components by repeated SCC refinement.
std::vector<GraphMec> decompose(const ActionGraph& graph);

struct Mec {
    std::vector<StateId> states;    // ascending
    std::vector<ActionId> actions;  // ascending
    bool operator==(const Mec&) const = default;
};

struct MecDecomposition {
    std::vector<Mec> mecs;
};

// MECs of the sub-MDP induced by restricted_to (whole model if absent).
// Actions with support leaving the set are ignored. Goal and sink are always
// reported as their own singleton MECs.
MecDecomposition find_mecs(const Mdp& mdp,
                           std::optional<std::span<const StateId>> restricted_to = std::nullopt);

struct QuotientMap {
    std::vector<StateId> state_map;        // original -> quotient
    Mdp mdp;
    std::vector<StateId> representatives;  // quotient -> smallest original member
    std::vector<ActionId> action_origin;   // quotient action -> original action
    MecDecomposition decomposition;

    // Turns a quotient policy into one on the original model. Members of a
    // collapsed component are routed inside it towards the chosen exit.
    Policy lift(const Mdp& original, const Policy& quotient_policy) const;
};

QuotientMap quotient(const Mdp& mdp, const MecDecomposition& decomposition);

}  // namespace reach
