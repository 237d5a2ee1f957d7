#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nonconv/activation.hpp"
#include "nonconv/arch.hpp"
#include "nonconv/autodiff.hpp"
#include "nonconv/bounds.hpp"
#include "nonconv/data.hpp"
#include "nonconv/inactivity.hpp"
#include "nonconv/init_dist.hpp"
#include "nonconv/loss.hpp"
#include "nonconv/optimizers.hpp"
#include "nonconv/risk.hpp"

namespace nonconv {

// One training run: architecture, data, optimizer, initialization and
// the evaluation/accounting knobs.  A trial is a pure function of
// (config, seed).
struct TrialConfig {
    Architecture arch;
    ActivationFamily act;
    Loss loss;
    DataDistribution dist;
    InitDistribution init;

    // layers overwritten with jittered closed-form dead-region values
    // after the initialization draw
    std::vector<std::size_t> force_dead_layers;
    // exact per-coordinate overrides applied last (flat index, value)
    std::vector<std::pair<std::size_t, double>> init_overrides;

    Method method = Method::Sgd;
    Hyper hyper;
    Schedule schedule = Schedule::constant(0.1);

    std::size_t steps = 0;
    std::size_t batch_size = 1;
    std::size_t eval_every = 100;   // risk logged at 0, every eval_every, and the end
    std::size_t eval_samples = 4096; // held-out size when the distribution only samples

    double ref_optimum = 0.0; // documented reference for the true-risk infimum
    double delta_gap = 0.0;   // non-convergence margin on the final gap

    std::size_t cert_falsifier_samples = 64;

    TrialConfig(Architecture a, ActivationFamily ac, Loss l, DataDistribution d,
                InitDistribution i)
        : arch(std::move(a)), act(std::move(ac)), loss(std::move(l)),
          dist(std::move(d)), init(std::move(i)) {}
};

struct TrialRecord {
    std::uint64_t seed = 0;
    Method method = Method::Sgd;
    std::vector<LayerVerdict> dead_at_init; // hidden layers 1..L-1
    std::size_t first_dead_layer = 0;       // 0 = none certified
    std::size_t last_dead_layer = 0;        // largest certified layer, 0 = none
    std::size_t frozen_prefix_len = 0;      // parameters required to stay frozen
    std::vector<std::uint64_t> logged_steps;
    std::vector<double> risk_trace;
    double final_gap = 0.0;      // min logged risk minus ref_optimum
    bool frozen_prefix_ok = true;
    bool downstream_moved = false;
    bool nonconvergent = false;  // final_gap > delta_gap
};

TrialRecord run_training_trial(const TrialConfig& config, std::uint64_t seed);

// Overwrites the layer-k parameters with jittered values from the
// closed-form dead region (window-centered for layer 1, the
// negative-weight witness for deeper layers), leaving every other
// coordinate untouched.
void overlay_dead_layer(const Architecture& arch, const ActivationFamily& act,
                        Box box, std::size_t layer, std::vector<double>& theta,
                        CounterRng& rng);

struct FrequencyResult {
    std::size_t n_trials = 0;
    double freq = 0.0;
    double ci3 = 0.0; // three binomial standard errors
    double analytic_bound = 0.0;
    double layer1_bound = 0.0;
    double deep_bound = 0.0;
    double dead_at_init_freq = 0.0;
    // false when the discrete target has a constant conditional mean;
    // the non-convergence conclusion is vacuous there
    bool hypothesis_ok = true;
    std::vector<TrialRecord> records;
};

// Runs n_trials independent trials (trial i uses stream (seed, i)) and
// compares the measured non-convergence frequency with the closed-form
// bound.  Deterministic for any thread count.
FrequencyResult nonconvergence_frequency(const TrialConfig& config,
                                         const BoundInputs& bound_in,
                                         std::size_t n_trials, std::uint64_t seed,
                                         std::size_t threads = 1);

struct GapEstimate {
    std::vector<std::uint64_t> logged_steps;
    std::vector<double> value;       // estimator of E[min(delta, risk_n - ref)]
    std::vector<double> std_error;
    std::vector<double> running_inf;
};

// Estimator of E[min(delta, L(theta_n) - ref)] across records at every
// logged step; delta must lie in (0, inf].
GapEstimate gap_expectation_estimator(std::span<const TrialRecord> records,
                                      double delta, double ref_optimum);

struct DepthSweepConfig {
    std::size_t input_dim = 1;
    std::size_t hidden_width = 1;
    std::size_t output_dim = 1;
    std::vector<std::size_t> depths; // values of L
    ActivationFamily act;
    InitDistribution init;
    Box box;
    double gamma; // inactivity threshold
    std::size_t n_trials = 10000;

    // optional training stage measuring the inf-risk event directly
    std::size_t steps = 0;
    std::optional<DataDistribution> dist;
    std::optional<Loss> loss;
    Method method = Method::Sgd;
    Hyper hyper;
    Schedule schedule = Schedule::constant(0.1);
    std::size_t batch_size = 1;
    std::size_t eval_every = 100;
    double ref_optimum = 0.0;
    double delta_gap = 0.0;

    DepthSweepConfig(ActivationFamily a, InitDistribution i)
        : act(std::move(a)), init(std::move(i)), gamma(act.default_threshold()) {}
};

struct DepthSweepRow {
    std::size_t depth = 0;
    double analytic_bound = 0.0;   // closed-form witness-union probability
    double witness_freq = 0.0;     // measured frequency of the witness event
    double certified_freq = 0.0;   // measured frequency of certified inactivity
    double nonconv_freq = 0.0;     // trained measurement, or certified_freq when steps == 0
    bool trained = false;
    double ci3 = 0.0;              // 3 sigma of the analytic witness probability
    std::size_t n_trials = 0;
};

std::vector<DepthSweepRow> depth_sweep_experiment(const DepthSweepConfig& config,
                                                  std::uint64_t seed,
                                                  std::size_t threads = 1);

// deterministic work distribution: f(i) for i in 0..n-1, any thread count
void parallel_for_index(std::size_t n, std::size_t threads,
                        const std::function<void(std::size_t)>& f);

} // namespace nonconv
