#include "doctest.h"

#include <cmath>
#include <cstring>

#include "nonconv/experiments.hpp"
#include "oracles.hpp"

using namespace nonconv;

namespace {

DataDistribution coin() {
    return DataDistribution::discrete(
        {Atom{{0.0}, {0.0}, 0.5}, Atom{{1.0}, {1.0}, 0.5}}, 0.0, 1.0);
}

DataDistribution const_target(double c) {
    return DataDistribution::discrete(
        {Atom{{0.0}, {c}, 0.5}, Atom{{1.0}, {c}, 0.5}}, 0.0, 1.0);
}

// dead hidden layers with the output pinned at the given constant:
// the generalized gradient vanishes identically along the whole run
TrialConfig stationary_dead_config(double target) {
    Architecture a({1, 2, 2, 1});
    TrialConfig cfg(a, ActivationFamily::relu(), Loss::mse(), const_target(target),
                    InitDistribution::standard_normal());
    cfg.force_dead_layers = {1, 2};
    cfg.init_overrides = {{a.bias_index(3, 1), target}};
    cfg.steps = 200;
    cfg.batch_size = 2;
    cfg.eval_every = 20;
    cfg.ref_optimum = 0.0;
    cfg.delta_gap = 0.0;
    return cfg;
}

TrialConfig coin_dead_config() {
    Architecture a({1, 2, 2, 1});
    TrialConfig cfg(a, ActivationFamily::relu(), Loss::mse(), coin(),
                    InitDistribution::standard_normal());
    cfg.force_dead_layers = {1, 2};
    cfg.steps = 300;
    cfg.batch_size = 4;
    cfg.eval_every = 50;
    cfg.ref_optimum = 0.0;
    cfg.delta_gap = 0.125;
    return cfg;
}

} // namespace

TEST_CASE("stationary dead trial: frozen prefix and a constant risk trace") {
    TrialConfig cfg = stationary_dead_config(3.0);
    cfg.method = Method::Adam;
    TrialRecord r = run_training_trial(cfg, 12);
    CHECK(r.first_dead_layer == 1);
    CHECK(r.last_dead_layer == 2);
    CHECK(r.frozen_prefix_ok);
    CHECK(!r.downstream_moved);
    for (double v : r.risk_trace) CHECK(v == r.risk_trace.front());
    CHECK(r.risk_trace.front() == 0.0);
}

TEST_CASE("dead trial under training pressure: prefix frozen, downstream moves") {
    TrialConfig cfg = coin_dead_config();
    cfg.method = Method::Sgd;
    cfg.schedule = Schedule::constant(0.1);
    TrialRecord r = run_training_trial(cfg, 9);
    CHECK(r.last_dead_layer == 2);
    CHECK(r.frozen_prefix_ok);
    CHECK(r.downstream_moved);
    // a constant-output network cannot beat the best constant risk
    for (double v : r.risk_trace) CHECK(v >= 0.25 - 1e-12);
    CHECK(r.nonconvergent);
}

TEST_CASE("scalar linear regression converges to the least-squares optimum") {
    Architecture a({1, 1});
    TrialConfig cfg(a, ActivationFamily::relu(), Loss::mse(),
                    DataDistribution::affine({2.0}, 0.0, 0.0, 0.0, 1.0),
                    InitDistribution::standard_normal());
    cfg.method = Method::Sgd;
    cfg.schedule = Schedule::constant(0.1);
    cfg.steps = 1500;
    cfg.batch_size = 4;
    cfg.eval_every = 500;
    cfg.eval_samples = 512;
    TrialRecord r = run_training_trial(cfg, 4);
    CHECK(r.risk_trace.back() < 1e-8);
}

TEST_CASE("trials are a pure function of (config, seed)") {
    TrialConfig cfg = coin_dead_config();
    cfg.method = Method::Rmsprop;
    TrialRecord r1 = run_training_trial(cfg, 77);
    TrialRecord r2 = run_training_trial(cfg, 77);
    REQUIRE(r1.risk_trace.size() == r2.risk_trace.size());
    CHECK(std::memcmp(r1.risk_trace.data(), r2.risk_trace.data(),
                      r1.risk_trace.size() * sizeof(double)) == 0);
    CHECK(r1.final_gap == r2.final_gap);
    CHECK(r1.logged_steps == r2.logged_steps);
}

TEST_CASE("config validation failures are reported") {
    Architecture a({2, 2, 1});
    TrialConfig bad(a, ActivationFamily::relu(), Loss::mse(), coin(),
                    InitDistribution::standard_normal());
    CHECK_THROWS_AS(run_training_trial(bad, 1), std::invalid_argument); // dim mismatch

    TrialConfig b2 = coin_dead_config();
    b2.batch_size = 0;
    CHECK_THROWS_AS(run_training_trial(b2, 1), std::invalid_argument);

    TrialConfig b3 = coin_dead_config();
    b3.force_dead_layers = {3}; // not a hidden layer of (1,2,2,1)
    CHECK_THROWS_AS(run_training_trial(b3, 1), std::invalid_argument);
}

TEST_CASE("dead-certain ensembles are fully nonconvergent") {
    TrialConfig cfg = coin_dead_config();
    cfg.method = Method::Adam;
    cfg.steps = 50;
    BoundInputs bin = default_bound_inputs(cfg.act, Box{0.0, 1.0});
    FrequencyResult res = nonconvergence_frequency(cfg, bin, 40, 5, 2);
    CHECK(res.freq == 1.0);
    CHECK(res.dead_at_init_freq == 1.0);
}

TEST_CASE("degenerate targets are flagged before the experiment runs") {
    // E[Y|X] constant: the non-convergence machinery does not apply
    CHECK(!check_target_nondegeneracy(const_target(1.0)));
    CHECK(check_target_nondegeneracy(coin()));

    TrialConfig cfg = stationary_dead_config(1.0);
    cfg.steps = 10;
    BoundInputs bin = default_bound_inputs(cfg.act, Box{0.0, 1.0});
    FrequencyResult res = nonconvergence_frequency(cfg, bin, 8, 3, 1);
    CHECK(!res.hypothesis_ok);

    TrialConfig ok = coin_dead_config();
    ok.steps = 10;
    FrequencyResult res2 = nonconvergence_frequency(ok, bin, 8, 3, 1);
    CHECK(res2.hypothesis_ok);
}

TEST_CASE("gap estimator: dead ensemble, validation, decomposition") {
    TrialConfig cfg = coin_dead_config();
    // pin the constant output at the best constant prediction
    Architecture& a = cfg.arch;
    cfg.init_overrides = {{a.weight_index(3, 1, 1), 0.0},
                          {a.weight_index(3, 1, 2), 0.0},
                          {a.bias_index(3, 1), 0.5}};
    cfg.steps = 0;
    std::vector<TrialRecord> dead(30);
    for (std::size_t i = 0; i < dead.size(); ++i)
        dead[i] = run_training_trial(cfg, 1000 + i);

    GapEstimate inf_est = gap_expectation_estimator(dead, 1e300, 0.0);
    CHECK(inf_est.value.back() == doctest::Approx(0.25).epsilon(1e-12));
    GapEstimate small = gap_expectation_estimator(dead, 0.1, 0.0);
    CHECK(small.value.back() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(small.running_inf.back() <= small.value.back());

    CHECK_THROWS_AS(gap_expectation_estimator(dead, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gap_expectation_estimator(dead, -1.0, 0.0), std::invalid_argument);

    // mixture of converged and dead trials: the estimator dominates the
    // dead fraction times the floor
    TrialConfig conv = coin_dead_config();
    conv.force_dead_layers = {};
    conv.init_overrides = {{a.weight_index(1, 1, 1), 1.0},
                           {a.bias_index(1, 1), 0.0},
                           {a.weight_index(2, 1, 1), 1.0},
                           {a.bias_index(2, 1), 0.0},
                           {a.weight_index(3, 1, 1), 1.0},
                           {a.bias_index(3, 1), 0.0}};
    // identity-like start: zero out cross weights so the net computes relu(x)
    conv.init_overrides.push_back({a.weight_index(1, 2, 1), 0.0});
    conv.init_overrides.push_back({a.bias_index(1, 2), 0.0});
    conv.init_overrides.push_back({a.weight_index(2, 1, 2), 0.0});
    conv.init_overrides.push_back({a.weight_index(2, 2, 1), 0.0});
    conv.init_overrides.push_back({a.weight_index(2, 2, 2), 0.0});
    conv.init_overrides.push_back({a.bias_index(2, 2), 0.0});
    conv.init_overrides.push_back({a.weight_index(3, 1, 2), 0.0});
    conv.steps = 0;
    std::vector<TrialRecord> mixed = dead;
    for (std::size_t i = 0; i < 10; ++i)
        mixed.push_back(run_training_trial(conv, 2000 + i));

    double dead_fraction = 30.0 / 40.0;
    GapEstimate mix = gap_expectation_estimator(mixed, 0.1, 0.0);
    CHECK(mix.value.back() >= dead_fraction * 0.1 - 1e-12);
}

TEST_CASE("depth sweep: frequencies track the closed-form product") {
    DepthSweepConfig sc(ActivationFamily::relu(), InitDistribution::standard_normal());
    sc.depths = {2, 3, 10};
    sc.n_trials = 20000;
    sc.box = Box{0.0, 1.0};
    std::vector<DepthSweepRow> rows = depth_sweep_experiment(sc, 31, 2);

    CHECK(rows[0].analytic_bound == 0.0);
    CHECK(rows[0].witness_freq == 0.0);

    CHECK(rows[1].analytic_bound == doctest::Approx(0.25));
    CHECK(std::fabs(rows[1].witness_freq - 0.25) <= rows[1].ci3);

    double want10 = 1.0 - std::pow(0.75, 8);
    CHECK(rows[2].analytic_bound == doctest::Approx(want10));
    CHECK(std::fabs(rows[2].witness_freq - want10) <= rows[2].ci3);

    // certified inactivity covers at least the witness region
    for (const auto& r : rows) CHECK(r.certified_freq >= r.witness_freq);
    // trend
    CHECK(rows[0].witness_freq <= rows[1].witness_freq + rows[0].ci3 + rows[1].ci3);
    CHECK(rows[1].witness_freq <= rows[2].witness_freq + rows[1].ci3 + rows[2].ci3);
}

TEST_CASE("experiment output does not depend on the thread count") {
    TrialConfig cfg = coin_dead_config();
    cfg.method = Method::Adamax;
    cfg.steps = 100;
    BoundInputs bin = default_bound_inputs(cfg.act, Box{0.0, 1.0});
    FrequencyResult a = nonconvergence_frequency(cfg, bin, 32, 17, 1);
    FrequencyResult b = nonconvergence_frequency(cfg, bin, 32, 17, 4);
    REQUIRE(a.records.size() == b.records.size());
    CHECK(a.freq == b.freq);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].final_gap == b.records[i].final_gap);
        CHECK(std::memcmp(a.records[i].risk_trace.data(), b.records[i].risk_trace.data(),
                          a.records[i].risk_trace.size() * sizeof(double)) == 0);
    }

    DepthSweepConfig sc(ActivationFamily::relu(), InitDistribution::standard_normal());
    sc.depths = {3, 5};
    sc.n_trials = 5000;
    sc.box = Box{0.0, 1.0};
    auto r1 = depth_sweep_experiment(sc, 23, 1);
    auto r4 = depth_sweep_experiment(sc, 23, 4);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].witness_freq == r4[i].witness_freq);
        CHECK(r1[i].certified_freq == r4[i].certified_freq);
    }
}
