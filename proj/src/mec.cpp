#include "reach/mec.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace reach {

std::uint32_t ActionGraph::add_node() {
    node_offsets_.push_back(node_offsets_.back());
    return static_cast<std::uint32_t>(node_offsets_.size() - 2);
}

std::uint32_t ActionGraph::add_action() {
    succ_offsets_.push_back(succ_offsets_.back());
    ++node_offsets_.back();
    return static_cast<std::uint32_t>(succ_offsets_.size() - 2);
}

void ActionGraph::add_successor(std::uint32_t node) {
    succ_.push_back(node);
    ++succ_offsets_.back();
}

namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

// Tarjan over the edges of alive actions, without recursion.
std::vector<std::uint32_t> strongly_connected(const ActionGraph& g, const std::vector<char>& alive) {
    const auto n = static_cast<std::uint32_t>(g.num_nodes());
    std::vector<std::uint32_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    struct Frame {
        std::uint32_t node, action, succ;
    };
    std::vector<Frame> calls;
    std::uint32_t counter = 0, comps = 0;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        calls.push_back({root, g.action_begin(root), 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!calls.empty()) {
            Frame& f = calls.back();
            const std::uint32_t v = f.node;
            bool descended = false;
            while (f.action < g.action_end(v)) {
                if (!alive[f.action]) {
                    ++f.action;
                    f.succ = 0;
                    continue;
                }
                auto succ = g.successors(f.action);
                if (f.succ >= succ.size()) {
                    ++f.action;
                    f.succ = 0;
                    continue;
                }
                const std::uint32_t w = succ[f.succ++];
                if (w == ActionGraph::kOutside) continue;
                if (index[w] == kUnset) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    calls.push_back({w, g.action_begin(w), 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = comps;
                } while (w != v);
                ++comps;
            }
            calls.pop_back();
            if (!calls.empty()) {
                const std::uint32_t parent = calls.back().node;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return comp;
}

}  // namespace

std::vector<GraphMec> decompose(const ActionGraph& g) {
    const auto n = static_cast<std::uint32_t>(g.num_nodes());
    std::vector<char> alive(g.num_actions(), 1);
    for (std::uint32_t a = 0; a < g.num_actions(); ++a)
        for (auto t : g.successors(a))
            if (t == ActionGraph::kOutside) alive[a] = 0;

    std::vector<std::uint32_t> comp;
    for (;;) {
        comp = strongly_connected(g, alive);
        bool changed = false;
        for (std::uint32_t v = 0; v < n; ++v)
            for (auto a = g.action_begin(v); a < g.action_end(v); ++a) {
                if (!alive[a]) continue;
                for (auto t : g.successors(a))
                    if (comp[t] != comp[v]) {
                        alive[a] = 0;
                        changed = true;
                        break;
                    }
            }
        if (!changed) break;
    }

    std::uint32_t num_comps = 0;
    for (auto c : comp) num_comps = std::max(num_comps, c + 1);
    std::vector<GraphMec> by_comp(num_comps);
    for (std::uint32_t v = 0; v < n; ++v) {
        by_comp[comp[v]].nodes.push_back(v);
        for (auto a = g.action_begin(v); a < g.action_end(v); ++a)
            if (alive[a]) by_comp[comp[v]].actions.push_back(a);
    }
    std::vector<GraphMec> out;
    for (auto& m : by_comp)
        if (!m.actions.empty()) out.push_back(std::move(m));
    std::sort(out.begin(), out.end(),
              [](const GraphMec& x, const GraphMec& y) { return x.nodes.front() < y.nodes.front(); });
    return out;
}

MecDecomposition find_mecs(const Mdp& mdp, std::optional<std::span<const StateId>> restricted_to) {
    const auto n = mdp.num_states();
    std::vector<StateId> states;
    if (restricted_to) {
        states.assign(restricted_to->begin(), restricted_to->end());
        std::sort(states.begin(), states.end());
        states.erase(std::unique(states.begin(), states.end()), states.end());
    } else {
        states.resize(n);
        for (StateId s = 0; s < n; ++s) states[s] = s;
    }
    std::erase_if(states, [&](StateId s) { return mdp.is_terminal(s); });

    std::vector<std::uint32_t> node_of(n, ActionGraph::kOutside);
    for (std::uint32_t i = 0; i < states.size(); ++i) node_of[states[i]] = i;

    ActionGraph g;
    std::vector<ActionId> origin;
    for (StateId s : states) {
        g.add_node();
        for (ActionId a : mdp.actions(s)) {
            g.add_action();
            origin.push_back(a);
            for (const auto& t : mdp.successors(a)) g.add_successor(node_of[t.target]);
        }
    }

    MecDecomposition out;
    for (const auto& gm : decompose(g)) {
        Mec m;
        for (auto v : gm.nodes) m.states.push_back(states[v]);
        for (auto a : gm.actions) m.actions.push_back(origin[a]);
        std::sort(m.states.begin(), m.states.end());
        std::sort(m.actions.begin(), m.actions.end());
        out.mecs.push_back(std::move(m));
    }
    for (StateId t : {mdp.goal(), mdp.sink()}) {
        Mec m;
        m.states = {t};
        for (ActionId a : mdp.actions(t)) m.actions.push_back(a);
        out.mecs.push_back(std::move(m));
    }
    std::sort(out.mecs.begin(), out.mecs.end(),
              [](const Mec& x, const Mec& y) { return x.states.front() < y.states.front(); });
    return out;
}

QuotientMap quotient(const Mdp& mdp, const MecDecomposition& decomposition) {
    const auto n = mdp.num_states();
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> mec_of(n, kNone);
    std::vector<char> internal(mdp.num_actions(), 0);
    std::vector<char> empty_mec(decomposition.mecs.size(), 0);

    for (std::uint32_t i = 0; i < decomposition.mecs.size(); ++i) {
        const auto& m = decomposition.mecs[i];
        if (m.states.size() == 1 && mdp.is_terminal(m.states[0])) continue;
        for (StateId s : m.states) mec_of[s] = i;
        for (ActionId a : m.actions) internal[a] = 1;
    }
    for (std::uint32_t i = 0; i < decomposition.mecs.size(); ++i) {
        const auto& m = decomposition.mecs[i];
        if (m.states.size() == 1 && mdp.is_terminal(m.states[0])) continue;
        bool any_exit = false;
        for (StateId s : m.states)
            for (ActionId a : mdp.actions(s)) any_exit = any_exit || !internal[a];
        empty_mec[i] = !any_exit;
    }

    QuotientMap q;
    q.decomposition = decomposition;
    q.state_map.assign(n, kNone);
    std::vector<std::uint32_t> mec_id(decomposition.mecs.size(), kNone);
    std::vector<std::vector<StateId>> members;
    for (StateId s = 0; s < n; ++s) {
        const auto m = mec_of[s];
        if (m != kNone && empty_mec[m]) continue;
        if (m != kNone && mec_id[m] != kNone) {
            q.state_map[s] = mec_id[m];
            members[mec_id[m]].push_back(s);
            continue;
        }
        const auto id = static_cast<StateId>(members.size());
        members.push_back({s});
        q.representatives.push_back(s);
        q.state_map[s] = id;
        if (m != kNone) mec_id[m] = id;
    }
    for (StateId s = 0; s < n; ++s)
        if (q.state_map[s] == kNone) q.state_map[s] = q.state_map[mdp.sink()];

    RawModel raw;
    raw.num_states = static_cast<std::int64_t>(members.size());
    raw.init = q.state_map[mdp.init()];
    raw.goal = q.state_map[mdp.goal()];
    raw.sink = q.state_map[mdp.sink()];
    for (StateId qs = 0; qs < members.size(); ++qs) {
        std::vector<std::string> used;
        for (StateId s : members[qs])
            for (ActionId a : mdp.actions(s)) {
                if (internal[a]) continue;
                RawAction ra;
                ra.state = qs;
                ra.label = mdp.label(a);
                if (std::find(used.begin(), used.end(), ra.label) != used.end())
                    ra.label += "@" + std::to_string(s);
                used.push_back(ra.label);
                for (const auto& t : mdp.successors(a)) {
                    const auto target = static_cast<std::int64_t>(q.state_map[t.target]);
                    auto it = std::find_if(ra.successors.begin(), ra.successors.end(),
                                           [&](const RawSuccessor& r) { return r.target == target; });
                    if (it == ra.successors.end())
                        ra.successors.push_back({target, t.probability, 0});
                    else
                        it->probability += t.probability;
                }
                raw.actions.push_back(std::move(ra));
                q.action_origin.push_back(a);
            }
    }
    q.mdp = validate(raw);
    return q;
}

namespace {

// Routes every member of a component towards the states already assigned,
// using only the component's own actions.
void route_inside(const Mdp& mdp, const Mec& mec, std::vector<ActionId>& choice) {
    std::vector<char> done(mdp.num_states(), 0);
    std::size_t remaining = 0;
    for (StateId s : mec.states) {
        if (choice[s] != kNoAction) done[s] = 1;
        else ++remaining;
    }
    if (remaining == mec.states.size()) {
        // No exit chosen; any internal action keeps the play inside.
        for (ActionId a : mec.actions)
            if (choice[mdp.owner(a)] == kNoAction) choice[mdp.owner(a)] = a;
        return;
    }
    while (remaining > 0) {
        bool progress = false;
        for (ActionId a : mec.actions) {
            const StateId s = mdp.owner(a);
            if (done[s]) continue;
            for (const auto& t : mdp.successors(a))
                if (done[t.target]) {
                    choice[s] = a;
                    done[s] = 1;
                    --remaining;
                    progress = true;
                    break;
                }
        }
        if (!progress) break;
    }
}

}  // namespace

Policy QuotientMap::lift(const Mdp& original, const Policy& quotient_policy) const {
    Policy out;
    out.choice.assign(original.num_states(), kNoAction);
    for (StateId q = 0; q < quotient_policy.choice.size(); ++q) {
        const ActionId qa = quotient_policy.choice[q];
        if (qa == kNoAction) continue;
        const ActionId a = action_origin[qa];
        out.choice[original.owner(a)] = a;
    }
    for (const auto& m : decomposition.mecs) {
        if (m.states.size() == 1 && original.is_terminal(m.states[0])) continue;
        route_inside(original, m, out.choice);
    }
    for (StateId s = 0; s < original.num_states(); ++s)
        if (out.choice[s] == kNoAction) out.choice[s] = *original.actions(s).begin();
    return out;
}

}  // namespace reach
