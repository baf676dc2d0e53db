#include <doctest.h>

#include <sstream>

#include "reach/harness.hpp"
#include "support.hpp"

using namespace reach;

namespace {

constexpr Algorithm kGuaranteed[] = {Algorithm::Ii, Algorithm::Brtdp, Algorithm::Bmcts,
                                     Algorithm::MctsBrtdp, Algorithm::BrtdpUcb};

RunConfig run_config(Algorithm a) {
    RunConfig rc;
    rc.algorithm = a;
    rc.timeout_s = 60.0;
    return rc;
}

std::vector<ExperimentRecord> without_time(std::vector<ExperimentRecord> recs) {
    for (auto& r : recs) r.time_ms = 0.0;
    return recs;
}

// Drops the time_ms column from CSV text.
std::string strip_time_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        fields.erase(fields.begin() + 6);
        for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
        out += '\n';
    }
    return out;
}

}  // namespace

TEST_CASE("algorithm names") {
    for (auto a : {Algorithm::Vi, Algorithm::Ii, Algorithm::Brtdp, Algorithm::Mcts, Algorithm::Bmcts,
                   Algorithm::MctsBrtdp, Algorithm::BrtdpUcb})
        CHECK(parse_algorithm(to_string(a)) == a);
    CHECK(!parse_algorithm("uct").has_value());
    CHECK(to_string(Algorithm::MctsBrtdp) == "mcts-brtdp");
}

TEST_CASE("median") {
    CHECK(median({}) == 0.0);
    CHECK(median({3.0}) == 3.0);
    CHECK(median({5.0, 1.0, 3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
}

TEST_CASE("every guaranteed algorithm on the chain, fifteen repetitions") {
    const Mdp m = testing::chain_model();
    for (auto a : kGuaranteed) {
        CAPTURE(to_string(a));
        const auto s = run_experiment("adversary3", m, run_config(a), 0, 15);
        CHECK(s.records.size() == 15);
        CHECK(s.successes == 15);
        CHECK(s.status == Status::Converged);
        for (const auto& r : s.records) {
            CHECK(r.status == Status::Converged);
            CHECK(r.L_init <= 1.0);
            CHECK(r.U_init >= 1.0 - 1e-9);
            CHECK(r.U_init - r.L_init < 1e-6);
            CHECK(r.explored_states <= m.num_states());
        }
    }
}

TEST_CASE("one repetition: the median is that run") {
    const auto s = run_experiment("trap", testing::trap_model(), run_config(Algorithm::Brtdp), 7, 1);
    REQUIRE(s.records.size() == 1);
    CHECK(s.records[0].seed == 7);
    CHECK(s.median_time_ms == s.records[0].time_ms);
    CHECK(s.median_iterations == static_cast<double>(s.records[0].iterations));
    CHECK(s.median_explored == static_cast<double>(s.records[0].explored_states));
}

TEST_CASE("trap without collapsing is recorded as not converging") {
    RunConfig rc = run_config(Algorithm::Ii);
    rc.collapse_first = false;
    const auto s = run_experiment("trap", testing::trap_model(), rc, 0, 3);
    CHECK(s.successes == 0);
    for (const auto& r : s.records) CHECK(r.status == Status::NoConvergence);
    CHECK(s.status == Status::NoConvergence);
}

TEST_CASE("all runs out of time") {
    RunConfig rc = run_config(Algorithm::MctsBrtdp);
    rc.timeout_s = 0.0;
    const auto s = run_experiment("chain", testing::chain_model(), rc, 0, 3);
    CHECK(s.successes == 0);
    CHECK(s.status == Status::Timeout);
    for (const auto& r : s.records) CHECK(r.status == Status::Timeout);
}

TEST_CASE("pure MCTS runs count as successful but unguaranteed") {
    RunConfig rc = run_config(Algorithm::Mcts);
    rc.max_iterations = 1000;
    const auto s = run_experiment("chain", testing::chain_model(), rc, 0, 3);
    CHECK(s.successes == 3);
    CHECK(s.status == Status::Unguaranteed);
}

TEST_CASE("explored states") {
    const Mdp m = gen_random_mdp(60, 3, 3, 0.2, 3);
    for (auto a : {Algorithm::Vi, Algorithm::Ii})
        CHECK(solve(m, run_config(a), 0).explored_states == m.num_states());
    for (auto a : {Algorithm::Brtdp, Algorithm::Bmcts, Algorithm::MctsBrtdp, Algorithm::BrtdpUcb}) {
        const auto r = solve(m, run_config(a), 0);
        CHECK(r.explored_states >= 1);
        CHECK(r.explored_states <= m.num_states());
    }
}

TEST_CASE("CSV output") {
    std::ostringstream empty;
    emit_csv({}, empty);
    CHECK(empty.str() == std::string(kCsvHeader) + "\n");

    ExperimentRecord r;
    r.model = "adversary:n=3,p=0.01";
    r.algorithm = "bmcts";
    r.C = 25;
    r.epsilon = 1e-6;
    r.seed = 3;
    r.repetition = 2;
    r.time_ms = 12.5;
    r.iterations = 1234567;
    r.explored_states = 4;
    r.L_init = 0.9999990000001693;
    r.U_init = 1.0;
    r.status = Status::Converged;
    const std::string text = to_csv({r});
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.find("\"adversary:n=3,p=0.01\",bmcts,25,1e-06,3,2,12.5,1234567,4,0.9999990000001693,1,Converged") !=
          std::string::npos);
    const auto back = parse_csv(text);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == r);

    r.model = "say \"hi\"";
    CHECK(parse_csv(to_csv({r, r}))[1] == r);
    CHECK_THROWS_AS(parse_csv("model,algorithm\n"), std::invalid_argument);
}

TEST_CASE("CSV round trip of real records") {
    const auto s = run_experiment("trap", testing::trap_model(), run_config(Algorithm::Bmcts), 0, 5);
    CHECK(parse_csv(to_csv(s.records)) == s.records);
}

TEST_CASE("fixed seeds give the same CSV apart from timing") {
    const Mdp m = gen_random_mdp(40, 3, 3, 0.3, 9);
    for (auto a : {Algorithm::Ii, Algorithm::Brtdp, Algorithm::Mcts, Algorithm::Bmcts,
                   Algorithm::MctsBrtdp, Algorithm::BrtdpUcb}) {
        RunConfig rc = run_config(a);
        rc.max_iterations = 20000;
        const auto x = run_experiment("m", m, rc, 100, 4);
        const auto y = run_experiment("m", m, rc, 100, 4, 2);
        CHECK(without_time(x.records) == without_time(y.records));
        CHECK(strip_time_column(to_csv(x.records)) == strip_time_column(to_csv(y.records)));
    }
}

TEST_CASE("sweep") {
    SweepSpec spec;
    spec.base = run_config(Algorithm::MctsBrtdp);
    spec.constants = {4, 25};
    spec.repetitions = 3;
    const auto rows = sweep_constant("trap", testing::trap_model(), spec);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].C == 4);
    CHECK(rows[1].C == 25);
    for (const auto& row : rows) {
        CHECK(row.successes == 3);
        CHECK(row.records.size() == 3);
        for (const auto& r : row.records) CHECK(r.C == row.C);
    }
    std::ostringstream out;
    emit_sweep_csv(rows, out);
    CHECK(out.str().rfind("C,median_time_ms,median_iterations,median_explored,successes\n4,", 0) == 0);

    const auto again = sweep_constant("trap", testing::trap_model(), spec);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(without_time(rows[i].records) == without_time(again[i].records));

    spec.constants.clear();
    CHECK_THROWS_AS(sweep_constant("trap", testing::trap_model(), spec), std::invalid_argument);
    spec.constants = {-1.0};
    CHECK_THROWS_AS(sweep_constant("trap", testing::trap_model(), spec), std::invalid_argument);
}
