#include "reach/benchgen.hpp"

#include <charconv>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "reach/random.hpp"

namespace reach {

namespace {

std::string letter_label(std::uint32_t i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "a" + std::to_string(i);
}

void add_successor(RawAction& a, std::int64_t target, double p) {
    for (auto& s : a.successors)
        if (s.target == target) {
            s.probability += p;
            return;
        }
    a.successors.push_back({target, p, 0});
}

}  // namespace

Mdp gen_adversary(std::uint32_t n, double p) {
    if (n < 1) throw std::invalid_argument("adversary needs at least one segment");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("adversary probability must be in (0,1)");
    RawModel raw;
    raw.num_states = n + 2;
    raw.init = 0;
    raw.goal = n;
    raw.sink = n + 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        RawAction a;
        a.state = i;
        a.label = letter_label(i);
        a.successors.push_back({i + 1, p, 0});
        a.successors.push_back({0, 1.0 - p, 0});
        raw.actions.push_back(std::move(a));
    }
    RawAction loop;
    loop.state = n;
    loop.label = letter_label(n);
    loop.successors.push_back({n, 1.0, 0});
    raw.actions.push_back(std::move(loop));
    return validate(raw);
}

Mdp gen_upper_bound_trap() {
    RawModel raw;
    raw.num_states = 4;
    raw.init = 0;
    raw.goal = 2;
    raw.sink = 3;
    raw.actions.push_back({0, "a", {{1, 1.0, 0}}, 0});
    raw.actions.push_back({1, "b", {{0, 1.0, 0}}, 0});
    raw.actions.push_back({1, "c", {{2, 0.5, 0}, {3, 0.5, 0}}, 0});
    return validate(raw);
}

Mdp branch_compose(const Mdp& adv, const Mdp& other) {
    if (adv.is_terminal(adv.init()))
        throw std::invalid_argument("branch composition needs a non-terminal initial state");
    const auto na = static_cast<std::int64_t>(adv.num_states());
    std::vector<std::int64_t> map(other.num_states());
    std::int64_t next = na;
    for (StateId o = 0; o < other.num_states(); ++o) {
        if (o == other.goal()) map[o] = adv.goal();
        else if (o == other.sink()) map[o] = adv.sink();
        else map[o] = next++;
    }

    RawModel raw = to_raw(adv);
    raw.num_states = next;
    std::string label = "b";
    while (adv.find_action(adv.init(), label)) label += "'";
    RawAction branch;
    branch.state = adv.init();
    branch.label = label;
    branch.successors.push_back({map[other.init()], 1.0, 0});
    raw.actions.push_back(std::move(branch));

    for (StateId o = 0; o < other.num_states(); ++o) {
        if (other.is_terminal(o)) continue;
        for (ActionId a : other.actions(o)) {
            RawAction ra;
            ra.state = map[o];
            ra.label = other.label(a);
            for (const auto& t : other.successors(a)) add_successor(ra, map[t.target], t.probability);
            raw.actions.push_back(std::move(ra));
        }
    }
    return validate(raw);
}

Mdp parallel_compose(const Mdp& m1, const Mdp& m2, GoalRule rule) {
    const std::uint64_t n2 = m2.num_states();
    auto is_goal = [&](StateId x, StateId y) {
        return x == m1.goal() || (rule == GoalRule::EitherComponent && y == m2.goal());
    };
    auto is_sink = [&](StateId x, StateId y) { return x == m1.sink() && y == m2.sink(); };

    std::unordered_map<std::uint64_t, std::int64_t> ids;
    std::vector<std::pair<StateId, StateId>> regular;
    std::int64_t count = 0, goal_id = -1, sink_id = -1;

    auto id_of = [&](StateId x, StateId y) -> std::int64_t {
        if (is_goal(x, y)) {
            if (goal_id < 0) goal_id = count++;
            return goal_id;
        }
        if (is_sink(x, y)) {
            if (sink_id < 0) sink_id = count++;
            return sink_id;
        }
        const std::uint64_t key = static_cast<std::uint64_t>(x) * n2 + y;
        auto [it, fresh] = ids.emplace(key, count);
        if (fresh) {
            ++count;
            regular.push_back({x, y});
        }
        return it->second;
    };

    RawModel raw;
    raw.init = id_of(m1.init(), m2.init());
    std::size_t processed = 0;
    while (processed < regular.size()) {
        const auto [x, y] = regular[processed++];
        const std::int64_t id = ids[static_cast<std::uint64_t>(x) * n2 + y];
        for (ActionId a : m1.actions(x)) {
            RawAction ra;
            ra.state = id;
            ra.label = "1:" + m1.label(a);
            for (const auto& t : m1.successors(a)) add_successor(ra, id_of(t.target, y), t.probability);
            raw.actions.push_back(std::move(ra));
        }
        for (ActionId a : m2.actions(y)) {
            RawAction ra;
            ra.state = id;
            ra.label = "2:" + m2.label(a);
            for (const auto& t : m2.successors(a)) add_successor(ra, id_of(x, t.target), t.probability);
            raw.actions.push_back(std::move(ra));
        }
    }
    if (goal_id < 0) goal_id = count++;
    if (sink_id < 0) sink_id = count++;
    raw.num_states = count;
    raw.goal = goal_id;
    raw.sink = sink_id;
    return validate(raw);
}

Mdp gen_random_mdp(std::uint32_t states, std::uint32_t max_actions, std::uint32_t max_branching,
                   double ec_density, std::uint64_t seed) {
    if (states < 3) throw std::invalid_argument("random model needs at least 3 states");
    if (max_actions < 1 || max_branching < 1)
        throw std::invalid_argument("random model needs at least one action and one successor");
    Rng rng(seed);
    const std::int64_t goal = states - 2, sink = states - 1;
    const std::int64_t last = states - 3;  // last regular state
    RawModel raw;
    raw.num_states = states;
    raw.init = 0;
    raw.goal = goal;
    raw.sink = sink;
    for (std::int64_t i = 0; i <= last; ++i) {
        const auto k = 1 + rng.below(max_actions);
        for (std::uint64_t j = 0; j < k; ++j) {
            RawAction a;
            a.state = i;
            a.label = "a" + std::to_string(j);
            const auto b = 1 + rng.below(max_branching);
            // The first action always moves one step towards the goal, which
            // keeps the goal reachable from every state.
            if (j == 0) a.successors.push_back({i < last ? i + 1 : goal, 0.0, 0});
            for (std::uint64_t tries = 0; a.successors.size() < b && tries < 4 * b; ++tries) {
                std::int64_t t;
                if (ec_density > 0.0 && rng.chance(ec_density)) {
                    t = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
                } else {
                    const auto forward = static_cast<std::uint64_t>(last - i);
                    const auto idx = rng.below(forward + 2);
                    t = idx < forward ? i + 1 + static_cast<std::int64_t>(idx)
                                      : (idx == forward ? goal : sink);
                }
                bool dup = false;
                for (const auto& s : a.successors) dup = dup || s.target == t;
                if (!dup) a.successors.push_back({t, 0.0, 0});
            }
            double total = 0.0;
            for (auto& s : a.successors) {
                s.probability = 0.1 + rng.uniform();
                total += s.probability;
            }
            for (auto& s : a.successors) s.probability /= total;
            raw.actions.push_back(std::move(a));
        }
    }
    return validate(raw);
}

namespace {

using Params = std::map<std::string, std::string, std::less<>>;

Params parse_params(std::string_view s) {
    Params out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const auto item = s.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw std::invalid_argument("expected key=value, got '" + std::string(item) + "'");
        out[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

template <class T>
T get(const Params& p, std::string_view key, T fallback) {
    auto it = p.find(key);
    if (it == p.end()) return fallback;
    T v{};
    const auto& str = it->second;
    auto [ptr, ec] = std::from_chars(str.data(), str.data() + str.size(), v);
    if (ec != std::errc() || ptr != str.data() + str.size())
        throw std::invalid_argument("bad value for '" + std::string(key) + "': " + str);
    return v;
}

Mdp random_from(const Params& p) {
    return gen_random_mdp(get<std::uint32_t>(p, "states", 20), get<std::uint32_t>(p, "actions", 3),
                          get<std::uint32_t>(p, "branching", 3), get<double>(p, "ec", 0.0),
                          get<std::uint64_t>(p, "seed", 0));
}

Mdp adversary_from(const Params& p) {
    return gen_adversary(get<std::uint32_t>(p, "n", 3), get<double>(p, "p", 0.01));
}

void check_keys(const Params& p, std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, v] : p) {
        bool ok = false;
        for (auto a : allowed) ok = ok || k == a;
        if (!ok) throw std::invalid_argument("unknown parameter '" + k + "'");
    }
}

}  // namespace

Mdp generate(std::string_view spec) {
    const auto colon = spec.find(':');
    const auto kind = spec.substr(0, colon);
    const Params p = colon == std::string_view::npos ? Params{} : parse_params(spec.substr(colon + 1));
    if (kind == "adversary") {
        check_keys(p, {"n", "p"});
        return adversary_from(p);
    }
    if (kind == "trap") {
        check_keys(p, {});
        return gen_upper_bound_trap();
    }
    if (kind == "random") {
        check_keys(p, {"states", "actions", "branching", "ec", "seed"});
        return random_from(p);
    }
    if (kind == "branch") {
        check_keys(p, {"n", "p", "states", "actions", "branching", "ec", "seed"});
        return branch_compose(adversary_from(p), random_from(p));
    }
    if (kind == "parallel") {
        check_keys(p, {"n", "p", "states", "actions", "branching", "ec", "seed", "goal"});
        GoalRule rule = GoalRule::FirstComponent;
        if (auto it = p.find("goal"); it != p.end()) {
            if (it->second == "either") rule = GoalRule::EitherComponent;
            else if (it->second != "first") throw std::invalid_argument("goal must be first or either");
        }
        return parallel_compose(adversary_from(p), random_from(p), rule);
    }
    throw std::invalid_argument("unknown generator '" + std::string(kind) + "'");
}

}  // namespace reach
