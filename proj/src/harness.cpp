#include "reach/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "reach/exact.hpp"
#include "reach/mcts.hpp"
#include "reach/model_io.hpp"

namespace reach {

namespace {

struct AlgorithmName {
    Algorithm algorithm;
    std::string_view name;
};

constexpr AlgorithmName kAlgorithms[] = {
    {Algorithm::Vi, "vi"},         {Algorithm::Ii, "ii"},
    {Algorithm::Brtdp, "brtdp"},   {Algorithm::Mcts, "mcts"},
    {Algorithm::Bmcts, "bmcts"},   {Algorithm::MctsBrtdp, "mcts-brtdp"},
    {Algorithm::BrtdpUcb, "brtdp-ucb"},
};

}  // namespace

std::string_view to_string(Algorithm a) {
    for (const auto& e : kAlgorithms)
        if (e.algorithm == a) return e.name;
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view s) {
    for (const auto& e : kAlgorithms)
        if (e.name == s) return e.algorithm;
    return std::nullopt;
}

SolverResult solve(const Mdp& mdp, const RunConfig& rc, std::uint64_t seed,
                   const UpdateObserver& observer) {
    std::optional<std::chrono::duration<double>> timeout;
    if (rc.timeout_s) timeout = std::chrono::duration<double>(*rc.timeout_s);

    if (rc.algorithm == Algorithm::Vi || rc.algorithm == Algorithm::Ii) {
        IterationConfig ic;
        ic.epsilon = rc.epsilon;
        ic.max_iterations = rc.max_iterations;
        ic.timeout = timeout;
        return rc.algorithm == Algorithm::Vi ? value_iteration(mdp, ic, observer)
                                             : interval_iteration(mdp, ic, rc.collapse_first, observer);
    }

    MctsConfig mc;
    mc.epsilon = rc.epsilon;
    mc.max_iterations = rc.max_iterations;
    mc.timeout = timeout;
    mc.seed = seed;
    mc.mec_period = rc.mec_period;
    mc.step_cap = rc.step_cap;
    mc.successor_rule = rc.successor_rule;
    mc.exploration = rc.exploration;
    switch (rc.algorithm) {
    case Algorithm::Brtdp: return run_brtdp(mdp, mc, observer);
    case Algorithm::Mcts: mc.variant = Variant::Mcts; break;
    case Algorithm::Bmcts: mc.variant = Variant::Bmcts; break;
    case Algorithm::MctsBrtdp: mc.variant = Variant::MctsBrtdp; break;
    case Algorithm::BrtdpUcb: mc.variant = Variant::BrtdpUcb; break;
    default: break;
    }
    MctsHooks hooks;
    hooks.bounds = observer;
    return run_mcts(mdp, mc, hooks);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ExperimentSummary run_experiment(const std::string& model_name, const Mdp& mdp, const RunConfig& rc,
                                 std::uint64_t seed_base, std::uint32_t repetitions, unsigned jobs) {
    ExperimentSummary summary;
    summary.records.resize(repetitions);
    auto run_one = [&](std::uint32_t i) {
        const std::uint64_t seed = seed_base + i;
        const auto t0 = std::chrono::steady_clock::now();
        const SolverResult res = solve(mdp, rc, seed);
        const auto t1 = std::chrono::steady_clock::now();
        ExperimentRecord& rec = summary.records[i];
        rec.model = model_name;
        rec.algorithm = std::string(to_string(rc.algorithm));
        rec.C = rc.exploration;
        rec.epsilon = rc.epsilon;
        rec.seed = seed;
        rec.repetition = i;
        rec.time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        rec.iterations = res.iterations;
        rec.explored_states = res.explored_states;
        rec.L_init = res.lower;
        rec.U_init = res.upper;
        rec.status = res.status;
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, repetitions == 0 ? 1 : repetitions));
    if (jobs == 1) {
        for (std::uint32_t i = 0; i < repetitions; ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back([&, t] {
                for (std::uint32_t i = t; i < repetitions; i += jobs) run_one(i);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<double> times, iters, explored, all_times, all_iters, all_explored;
    bool any_timeout = false;
    for (const auto& rec : summary.records) {
        all_times.push_back(rec.time_ms);
        all_iters.push_back(static_cast<double>(rec.iterations));
        all_explored.push_back(static_cast<double>(rec.explored_states));
        any_timeout = any_timeout || rec.status == Status::Timeout;
        if (rec.status == Status::Converged || rec.status == Status::Unguaranteed) {
            ++summary.successes;
            times.push_back(rec.time_ms);
            iters.push_back(static_cast<double>(rec.iterations));
            explored.push_back(static_cast<double>(rec.explored_states));
        }
    }
    if (summary.successes > 0) {
        summary.median_time_ms = median(times);
        summary.median_iterations = median(iters);
        summary.median_explored = median(explored);
        summary.status = rc.algorithm == Algorithm::Mcts ? Status::Unguaranteed : Status::Converged;
    } else {
        summary.median_time_ms = median(all_times);
        summary.median_iterations = median(all_iters);
        summary.median_explored = median(all_explored);
        summary.status = any_timeout || summary.records.empty() ? Status::Timeout
                                                                : summary.records.front().status;
    }
    return summary;
}

std::vector<SweepRow> sweep_constant(const std::string& model_name, const Mdp& mdp,
                                     const SweepSpec& spec) {
    if (spec.constants.empty()) throw std::invalid_argument("sweep needs at least one constant");
    if (spec.repetitions == 0) throw std::invalid_argument("sweep needs at least one repetition");
    std::vector<SweepRow> rows;
    for (double c : spec.constants) {
        if (!(c >= 0.0)) throw std::invalid_argument("exploration constants must be non-negative");
        RunConfig rc = spec.base;
        rc.exploration = c;
        auto s = run_experiment(model_name, mdp, rc, spec.seed_base, spec.repetitions, spec.jobs);
        SweepRow row;
        row.C = c;
        row.median_time_ms = s.median_time_ms;
        row.median_iterations = s.median_iterations;
        row.median_explored = s.median_explored;
        row.successes = s.successes;
        row.records = std::move(s.records);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        any = true;
        if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class T>
T parse_number(const std::string& s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("bad CSV number '" + s + "'");
    return v;
}

}  // namespace

void emit_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << csv_field(r.model) << ',' << csv_field(r.algorithm) << ',' << format_double(r.C) << ','
            << format_double(r.epsilon) << ',' << r.seed << ',' << r.repetition << ','
            << format_double(r.time_ms) << ',' << r.iterations << ',' << r.explored_states << ','
            << format_double(r.L_init) << ',' << format_double(r.U_init) << ',' << to_string(r.status)
            << '\n';
    }
    if (!out) throw std::runtime_error("failed to write CSV");
}

std::string to_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream ss;
    emit_csv(records, ss);
    return ss.str();
}

std::vector<ExperimentRecord> parse_csv(std::string_view text) {
    const auto rows = split_csv(text);
    if (rows.empty()) throw std::invalid_argument("empty CSV");
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
    if (header != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
    std::vector<ExperimentRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 12) throw std::invalid_argument("CSV row with wrong field count");
        ExperimentRecord r;
        r.model = f[0];
        r.algorithm = f[1];
        r.C = parse_number<double>(f[2]);
        r.epsilon = parse_number<double>(f[3]);
        r.seed = parse_number<std::uint64_t>(f[4]);
        r.repetition = parse_number<std::uint32_t>(f[5]);
        r.time_ms = parse_number<double>(f[6]);
        r.iterations = parse_number<std::uint64_t>(f[7]);
        r.explored_states = parse_number<std::uint64_t>(f[8]);
        r.L_init = parse_number<double>(f[9]);
        r.U_init = parse_number<double>(f[10]);
        const auto st = parse_status(f[11]);
        if (!st) throw std::invalid_argument("unknown status '" + f[11] + "'");
        r.status = *st;
        out.push_back(std::move(r));
    }
    return out;
}

void emit_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "C,median_time_ms,median_iterations,median_explored,successes\n";
    for (const auto& r : rows)
        out << format_double(r.C) << ',' << format_double(r.median_time_ms) << ','
            << format_double(r.median_iterations) << ',' << format_double(r.median_explored) << ','
            << r.successes << '\n';
    if (!out) throw std::runtime_error("failed to write CSV");
}

}  // namespace reach
