// reach: command-line front end for the solvers, generators and experiments.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "reach/benchgen.hpp"
#include "reach/harness.hpp"
#include "reach/model_io.hpp"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitNotConverged = 2;
constexpr int kExitUnguaranteed = 3;
constexpr int kExitInput = 4;

struct ModelSource {
    std::string path;
    std::string generator;
    std::string goal_rule;

    void attach(CLI::App* app) {
        auto* m = app->add_option("--model", path, "Model file");
        auto* g = app->add_option("--generate", generator, "Generator spec, e.g. adversary:n=3,p=0.01");
        m->excludes(g);
        app->add_option("--goal-rule", goal_rule, "Target of parallel compositions: first or either")
            ->check(CLI::IsMember({"first", "either"}));
    }
    std::string spec() const {
        if (goal_rule.empty()) return generator;
        if (generator.rfind("parallel", 0) != 0)
            throw std::invalid_argument("--goal-rule only applies to parallel generators");
        return generator + (generator.find(':') == std::string::npos ? ":" : ",") + "goal=" + goal_rule;
    }
    reach::Mdp load() const {
        if (!path.empty()) {
            if (!goal_rule.empty()) throw std::invalid_argument("--goal-rule needs --generate parallel:...");
            return reach::read_model_file(path);
        }
        if (!generator.empty()) return reach::generate(spec());
        throw std::invalid_argument("one of --model or --generate is required");
    }
    std::string name() const { return !path.empty() ? path : spec(); }
};

struct RunOptions {
    std::string algorithm = "mcts-brtdp";
    std::string successor_rule = "gap";
    reach::RunConfig config;
    double timeout_s = 600.0;
    std::uint64_t seed = 0;
    std::uint64_t step_cap = 0;

    void attach(CLI::App* app) {
        app->add_option("--algorithm", algorithm, "vi, ii, brtdp, mcts, bmcts, mcts-brtdp, brtdp-ucb")
            ->check(CLI::IsMember({"vi", "ii", "brtdp", "mcts", "bmcts", "mcts-brtdp", "brtdp-ucb"}))
            ->capture_default_str();
        app->add_option("--epsilon", config.epsilon, "Required precision")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--exploration-constant", config.exploration, "UCB1 constant C")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        app->add_option("--seed", seed, "Random seed (base seed for repetitions)")->capture_default_str();
        app->add_option("--timeout-s", timeout_s, "Per-run timeout in seconds")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--max-iterations", config.max_iterations, "Iteration budget");
        app->add_option("--mec-period", config.mec_period, "Iterations between MEC checks")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--step-cap", step_cap, "Maximum roll-out length (default 10*|S|+10000)");
        app->add_option("--successor-rule", successor_rule, "gap or probability")
            ->check(CLI::IsMember({"gap", "probability"}))
            ->capture_default_str();
        app->add_flag("--collapse-first,!--no-collapse-first", config.collapse_first,
                      "Interval iteration on the MEC quotient")
            ->capture_default_str();
    }
    reach::RunConfig resolve() const {
        reach::RunConfig c = config;
        c.algorithm = *reach::parse_algorithm(algorithm);
        c.timeout_s = timeout_s;
        if (step_cap > 0) c.step_cap = step_cap;
        c.successor_rule = successor_rule == "gap" ? reach::SuccessorRule::WeightedByGap
                                                   : reach::SuccessorRule::ByTransitionProbability;
        return c;
    }
};

int exit_code(reach::Status s) {
    switch (s) {
    case reach::Status::Converged: return kExitConverged;
    case reach::Status::Unguaranteed: return kExitUnguaranteed;
    default: return kExitNotConverged;
    }
}

void write_records(const std::string& path, const std::vector<reach::ExperimentRecord>& recs) {
    if (path.empty() || path == "-") {
        reach::emit_csv(recs, std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    reach::emit_csv(recs, out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum reachability in MDPs with guaranteed bounds"};
    app.require_subcommand(1);

    ModelSource check_src, exp_src, sweep_src;
    RunOptions check_opt, exp_opt, sweep_opt;

    auto* check = app.add_subcommand("check", "Run one algorithm once on one model");
    check_src.attach(check);
    check_opt.attach(check);

    auto* experiment = app.add_subcommand("experiment", "Repeated runs with medians and CSV output");
    exp_src.attach(experiment);
    exp_opt.attach(experiment);
    std::uint32_t exp_reps = 15;
    unsigned exp_jobs = 1;
    std::string exp_output;
    experiment->add_option("--repetitions", exp_reps, "Number of seeded runs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    experiment->add_option("--jobs", exp_jobs, "Concurrent runs")->capture_default_str();
    experiment->add_option("--output", exp_output, "CSV path ('-' for stdout)");

    auto* sweep = app.add_subcommand("sweep", "Median cost across exploration constants");
    sweep_src.attach(sweep);
    sweep_opt.attach(sweep);
    std::vector<double> constants;
    std::uint32_t sweep_reps = 10;
    unsigned sweep_jobs = 1;
    std::string sweep_output, sweep_records;
    sweep->add_option("--constants", constants, "Values of C to try")->required()->delimiter(',');
    sweep->add_option("--repetitions", sweep_reps, "Runs per constant")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--jobs", sweep_jobs, "Concurrent runs")->capture_default_str();
    sweep->add_option("--output", sweep_output, "Summary CSV path (default stdout)");
    sweep->add_option("--records", sweep_records, "Also write per-run records here");

    auto* gen = app.add_subcommand("generate", "Write a generated model in the text format");
    std::string gen_spec, gen_output;
    gen->add_option("spec", gen_spec, "Generator spec, e.g. adversary:n=3,p=0.01")->required();
    gen->add_option("--output", gen_output, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    reach::Mdp mdp;
    try {
        if (*gen) {
            mdp = reach::generate(gen_spec);
            if (gen_output.empty()) std::cout << reach::serialize_model(mdp);
            else reach::write_model_file(gen_output, mdp);
            return kExitConverged;
        }
        const ModelSource& src = *check ? check_src : *experiment ? exp_src : sweep_src;
        mdp = src.load();
    } catch (const reach::ModelError& e) {
        std::cerr << "invalid model: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }

    try {
        if (*check) {
            const auto rc = check_opt.resolve();
            const auto t0 = std::chrono::steady_clock::now();
            const auto r = reach::solve(mdp, rc, check_opt.seed);
            const auto t1 = std::chrono::steady_clock::now();
            std::cout << "algorithm: " << reach::to_string(rc.algorithm) << '\n'
                      << "status: " << reach::to_string(r.status) << '\n'
                      << "lower: " << reach::format_double(r.lower) << '\n'
                      << "upper: " << reach::format_double(r.upper) << '\n';
            if (r.estimate) std::cout << "estimate: " << reach::format_double(*r.estimate) << '\n';
            std::cout << "iterations: " << r.iterations << '\n'
                      << "explored_states: " << r.explored_states << " / " << mdp.num_states() << '\n'
                      << "time_ms: "
                      << reach::format_double(std::chrono::duration<double, std::milli>(t1 - t0).count())
                      << '\n';
            return exit_code(r.status);
        }
        if (*experiment) {
            const auto rc = exp_opt.resolve();
            const auto s = reach::run_experiment(exp_src.name(), mdp, rc, exp_opt.seed, exp_reps, exp_jobs);
            write_records(exp_output, s.records);
            std::cerr << "runs: " << s.records.size() << ", successful: " << s.successes
                      << ", median time_ms: " << reach::format_double(s.median_time_ms)
                      << ", median iterations: " << reach::format_double(s.median_iterations)
                      << ", median explored: " << reach::format_double(s.median_explored) << '\n';
            return exit_code(s.status);
        }
        reach::SweepSpec spec;
        spec.constants = constants;
        spec.base = sweep_opt.resolve();
        spec.seed_base = sweep_opt.seed;
        spec.repetitions = sweep_reps;
        spec.jobs = sweep_jobs;
        const auto rows = reach::sweep_constant(sweep_src.name(), mdp, spec);
        if (sweep_output.empty()) {
            reach::emit_sweep_csv(rows, std::cout);
        } else {
            std::ofstream out(sweep_output, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + sweep_output);
            reach::emit_sweep_csv(rows, out);
        }
        if (!sweep_records.empty()) {
            std::vector<reach::ExperimentRecord> all;
            for (const auto& r : rows) all.insert(all.end(), r.records.begin(), r.records.end());
            write_records(sweep_records, all);
        }
        bool all_ok = true;
        for (const auto& r : rows) all_ok = all_ok && r.successes == sweep_reps;
        return all_ok ? kExitConverged : kExitNotConverged;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNotConverged;
    }
}
