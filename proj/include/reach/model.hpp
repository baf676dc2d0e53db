#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ranges>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reach {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

inline constexpr ActionId kNoAction = std::numeric_limits<ActionId>::max();

inline constexpr double kDistributionTolerance = 1e-9;

struct Transition {
    StateId target;
    double probability;
    bool operator==(const Transition&) const = default;
};

enum class ErrorKind {
    Syntax,
    DistributionSum,
    DanglingState,
    NoActions,
    DuplicateAction,
    DuplicateSuccessor,
    InvalidProbability,
    InvalidDesignation,
};

std::string_view to_string(ErrorKind kind);

struct Violation {
    ErrorKind kind;
    std::string message;
    std::size_t line = 0;  // 0 when the violation has no source position
};

class ModelError : public std::runtime_error {
public:
    ModelError(ErrorKind kind, std::vector<Violation> violations);

    ErrorKind kind() const noexcept { return kind_; }
    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    ErrorKind kind_;
    std::vector<Violation> violations_;
};

#define REACH_MODEL_ERROR(Name, Kind)                                   \
    class Name : public ModelError {                                    \
    public:                                                             \
        explicit Name(std::vector<Violation> v) : ModelError(Kind, std::move(v)) {} \
    };

REACH_MODEL_ERROR(SyntaxError, ErrorKind::Syntax)
REACH_MODEL_ERROR(DistributionSumError, ErrorKind::DistributionSum)
REACH_MODEL_ERROR(DanglingState, ErrorKind::DanglingState)
REACH_MODEL_ERROR(NoActions, ErrorKind::NoActions)
REACH_MODEL_ERROR(DuplicateAction, ErrorKind::DuplicateAction)
REACH_MODEL_ERROR(DuplicateSuccessor, ErrorKind::DuplicateSuccessor)
REACH_MODEL_ERROR(InvalidProbability, ErrorKind::InvalidProbability)
REACH_MODEL_ERROR(InvalidDesignation, ErrorKind::InvalidDesignation)

#undef REACH_MODEL_ERROR

// Throws the subclass matching the first violation; the exception carries all of them.
[[noreturn]] void throw_violations(std::vector<Violation> violations);

struct RawSuccessor {
    std::int64_t target = 0;
    double probability = 0.0;
    std::size_t line = 0;
};

struct RawAction {
    std::int64_t state = 0;
    std::string label;
    std::vector<RawSuccessor> successors;
    std::size_t line = 0;
};

// Unchecked model description as produced by the parser or by generators.
struct RawModel {
    std::int64_t num_states = 0;
    std::optional<std::int64_t> init;
    std::optional<std::int64_t> goal;
    std::optional<std::int64_t> sink;
    std::vector<RawAction> actions;
};

// Immutable validated MDP. Actions are numbered densely; the actions of a
// state are contiguous and keep their declaration order.
class Mdp {
public:
    Mdp() = default;

    std::size_t num_states() const noexcept { return state_offsets_.size() - 1; }
    std::size_t num_actions() const noexcept { return labels_.size(); }
    std::size_t num_transitions() const noexcept { return transitions_.size(); }

    StateId init() const noexcept { return init_; }
    StateId goal() const noexcept { return goal_; }
    StateId sink() const noexcept { return sink_; }
    bool is_terminal(StateId s) const noexcept { return s == goal_ || s == sink_; }

    auto actions(StateId s) const noexcept {
        return std::views::iota(state_offsets_[s], state_offsets_[s + 1]);
    }
    std::size_t num_actions(StateId s) const noexcept {
        return state_offsets_[s + 1] - state_offsets_[s];
    }
    std::span<const Transition> successors(ActionId a) const noexcept {
        return {transitions_.data() + action_offsets_[a],
                transitions_.data() + action_offsets_[a + 1]};
    }
    const std::string& label(ActionId a) const noexcept { return labels_[a]; }
    StateId owner(ActionId a) const noexcept { return owners_[a]; }

    std::optional<ActionId> find_action(StateId s, std::string_view label) const;

    bool operator==(const Mdp&) const = default;

    friend Mdp validate(const RawModel& raw);

private:
    std::vector<ActionId> state_offsets_{0};
    std::vector<std::uint32_t> action_offsets_{0};
    std::vector<std::string> labels_;
    std::vector<StateId> owners_;
    std::vector<Transition> transitions_;
    StateId init_ = 0;
    StateId goal_ = 0;
    StateId sink_ = 0;
};

Mdp validate(const RawModel& raw);

// Rebuilds a raw description, e.g. to derive a modified model.
RawModel to_raw(const Mdp& mdp);

// Memoryless deterministic policy; kNoAction where nothing was chosen.
struct Policy {
    std::vector<ActionId> choice;

    bool operator==(const Policy&) const = default;
};

}  // namespace reach
