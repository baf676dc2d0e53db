#include "reach/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace reach {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::DistributionSum: return "DistributionSumError";
    case ErrorKind::DanglingState: return "DanglingState";
    case ErrorKind::NoActions: return "NoActions";
    case ErrorKind::DuplicateAction: return "DuplicateAction";
    case ErrorKind::DuplicateSuccessor: return "DuplicateSuccessor";
    case ErrorKind::InvalidProbability: return "InvalidProbability";
    case ErrorKind::InvalidDesignation: return "InvalidDesignation";
    }
    return "ModelError";
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += to_string(v.kind);
        if (v.line != 0) out += " (line " + std::to_string(v.line) + ")";
        out += ": " + v.message;
    }
    return out;
}

}  // namespace

ModelError::ModelError(ErrorKind kind, std::vector<Violation> violations)
    : std::runtime_error(describe(violations)), kind_(kind), violations_(std::move(violations)) {}

void throw_violations(std::vector<Violation> violations) {
    const ErrorKind kind = violations.empty() ? ErrorKind::Syntax : violations.front().kind;
    switch (kind) {
    case ErrorKind::Syntax: throw SyntaxError(std::move(violations));
    case ErrorKind::DistributionSum: throw DistributionSumError(std::move(violations));
    case ErrorKind::DanglingState: throw DanglingState(std::move(violations));
    case ErrorKind::NoActions: throw NoActions(std::move(violations));
    case ErrorKind::DuplicateAction: throw DuplicateAction(std::move(violations));
    case ErrorKind::DuplicateSuccessor: throw DuplicateSuccessor(std::move(violations));
    case ErrorKind::InvalidProbability: throw InvalidProbability(std::move(violations));
    case ErrorKind::InvalidDesignation: throw InvalidDesignation(std::move(violations));
    }
    throw SyntaxError(std::move(violations));
}

std::optional<ActionId> Mdp::find_action(StateId s, std::string_view label) const {
    for (ActionId a : actions(s))
        if (labels_[a] == label) return a;
    return std::nullopt;
}

namespace {

bool is_self_loop(const RawAction& a, std::int64_t s) {
    return a.successors.size() == 1 && a.successors[0].target == s &&
           std::abs(a.successors[0].probability - 1.0) <= kDistributionTolerance;
}

}  // namespace

Mdp validate(const RawModel& raw) {
    std::vector<Violation> errs;
    auto fail = [&](ErrorKind k, std::string msg, std::size_t line = 0) {
        errs.push_back({k, std::move(msg), line});
    };

    if (raw.num_states <= 0) {
        fail(ErrorKind::InvalidDesignation, "model must have at least one state");
        throw_violations(std::move(errs));
    }
    std::int64_t n = raw.num_states;
    const bool synth_sink = !raw.sink.has_value();
    if (synth_sink) ++n;

    auto check_designated = [&](const std::optional<std::int64_t>& v, const char* what) {
        if (!v) {
            fail(ErrorKind::InvalidDesignation, std::string(what) + " state missing");
            return false;
        }
        if (*v < 0 || *v >= raw.num_states) {
            fail(ErrorKind::InvalidDesignation,
                 std::string(what) + " state " + std::to_string(*v) + " out of range");
            return false;
        }
        return true;
    };
    bool ok = check_designated(raw.init, "init");
    ok = check_designated(raw.goal, "goal") && ok;
    if (!synth_sink) ok = check_designated(raw.sink, "sink") && ok;
    if (!ok) throw_violations(std::move(errs));

    const std::int64_t goal = *raw.goal;
    const std::int64_t sink = synth_sink ? raw.num_states : *raw.sink;
    if (goal == sink) fail(ErrorKind::InvalidDesignation, "goal and sink must differ");

    // Stable bucket of actions by state keeps declaration order within a state.
    std::vector<std::vector<const RawAction*>> by_state(static_cast<std::size_t>(n));
    for (const auto& a : raw.actions) {
        if (a.state < 0 || a.state >= raw.num_states) {
            fail(ErrorKind::DanglingState,
                 "action '" + a.label + "' declared for unknown state " + std::to_string(a.state),
                 a.line);
            continue;
        }
        by_state[static_cast<std::size_t>(a.state)].push_back(&a);
    }

    for (const auto& a : raw.actions) {
        if (a.successors.empty()) {
            fail(ErrorKind::DistributionSum, "action '" + a.label + "' has no successors", a.line);
            continue;
        }
        double sum = 0.0;
        for (const auto& t : a.successors) sum += t.probability;
        if (!(std::abs(sum - 1.0) <= kDistributionTolerance))
            fail(ErrorKind::DistributionSum,
                 "action '" + a.label + "' of state " + std::to_string(a.state) +
                     " sums to " + std::to_string(sum),
                 a.line);
        std::unordered_set<std::int64_t> seen;
        for (const auto& t : a.successors) {
            if (t.target < 0 || t.target >= raw.num_states)
                fail(ErrorKind::DanglingState,
                     "successor " + std::to_string(t.target) + " out of range", t.line);
            if (!std::isfinite(t.probability) || t.probability <= 0.0 ||
                t.probability > 1.0 + kDistributionTolerance)
                fail(ErrorKind::InvalidProbability,
                     "probability " + std::to_string(t.probability) + " outside (0,1]", t.line);
            if (!seen.insert(t.target).second)
                fail(ErrorKind::DuplicateSuccessor,
                     "successor " + std::to_string(t.target) + " listed twice", t.line);
        }
    }

    for (std::int64_t s = 0; s < n; ++s) {
        const auto& acts = by_state[static_cast<std::size_t>(s)];
        std::unordered_set<std::string_view> labels;
        for (const RawAction* a : acts)
            if (!labels.insert(a->label).second)
                fail(ErrorKind::DuplicateAction,
                     "state " + std::to_string(s) + " declares '" + a->label + "' twice", a->line);
        const bool designated = s == goal || s == sink;
        if (designated) {
            if (acts.size() > 1 || (acts.size() == 1 && !is_self_loop(*acts[0], s)))
                fail(ErrorKind::InvalidDesignation,
                     std::string(s == goal ? "goal" : "sink") + " state " + std::to_string(s) +
                         " must be absorbing",
                     acts.empty() ? 0 : acts[0]->line);
        } else if (acts.empty()) {
            fail(ErrorKind::NoActions, "state " + std::to_string(s) + " has no actions");
        }
    }

    if (!errs.empty()) throw_violations(std::move(errs));

    Mdp m;
    m.state_offsets_.assign(1, 0);
    m.action_offsets_.assign(1, 0);
    for (std::int64_t s = 0; s < n; ++s) {
        const auto sid = static_cast<StateId>(s);
        auto add = [&](const std::string& label, auto&& fill) {
            m.labels_.push_back(label);
            m.owners_.push_back(sid);
            fill();
            m.action_offsets_.push_back(static_cast<std::uint32_t>(m.transitions_.size()));
        };
        const auto& acts = by_state[static_cast<std::size_t>(s)];
        if (acts.empty()) {
            // Only goal and sink reach here; give them their absorbing loop.
            add("loop", [&] { m.transitions_.push_back({sid, 1.0}); });
        } else {
            for (const RawAction* a : acts)
                add(a->label, [&] {
                    for (const auto& t : a->successors)
                        m.transitions_.push_back({static_cast<StateId>(t.target), t.probability});
                });
        }
        m.state_offsets_.push_back(static_cast<ActionId>(m.labels_.size()));
    }
    m.init_ = static_cast<StateId>(*raw.init);
    m.goal_ = static_cast<StateId>(goal);
    m.sink_ = static_cast<StateId>(sink);
    return m;
}

RawModel to_raw(const Mdp& mdp) {
    RawModel raw;
    raw.num_states = static_cast<std::int64_t>(mdp.num_states());
    raw.init = mdp.init();
    raw.goal = mdp.goal();
    raw.sink = mdp.sink();
    for (StateId s = 0; s < mdp.num_states(); ++s)
        for (ActionId a : mdp.actions(s)) {
            RawAction ra;
            ra.state = s;
            ra.label = mdp.label(a);
            for (const auto& t : mdp.successors(a)) ra.successors.push_back({t.target, t.probability, 0});
            raw.actions.push_back(std::move(ra));
        }
    return raw;
}

}  // namespace reach
