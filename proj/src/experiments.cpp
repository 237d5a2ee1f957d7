#include "nonconv/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <thread>

namespace nonconv {

namespace {

// stream ids inside one trial
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamBatch = 2;
constexpr std::uint64_t kStreamOverlay = 3;
constexpr std::uint64_t kStreamEval = 4;
constexpr std::uint64_t kStreamCert = 5;

void validate_trial_config(const TrialConfig& cfg) {
    if (cfg.arch.input_dim() != cfg.dist.input_dim())
        throw std::invalid_argument("architecture input width differs from data");
    if (cfg.arch.output_dim() != cfg.dist.output_dim())
        throw std::invalid_argument("architecture output width differs from data");
    if (cfg.batch_size == 0) throw std::invalid_argument("batch size must be positive");
    if (cfg.loss.kind() == Loss::Kind::Psi && cfg.arch.output_dim() != 1)
        throw std::invalid_argument("psi loss supports one-dimensional output only");
    for (auto [idx, v] : cfg.init_overrides)
        if (idx >= cfg.arch.param_count())
            throw std::invalid_argument("init override index out of range");
}

} // namespace

void overlay_dead_layer(const Architecture& arch, const ActivationFamily& act,
                        Box box, std::size_t layer, std::vector<double>& theta,
                        CounterRng& rng) {
    if (layer == 0 || layer >= arch.depth())
        throw std::invalid_argument("forced dead layer out of hidden range");
    const double threshold = act.default_threshold();
    if (layer == 1) {
        const double maxabs = std::max(std::fabs(box.lo), std::fabs(box.hi));
        for (std::size_t i = 1; i <= arch.width(1); ++i) {
            double wsum = 0.0;
            for (std::size_t j = 1; j <= arch.input_dim(); ++j) {
                double w = rng.uniform(-0.3, 0.3);
                theta[arch.weight_index(1, i, j)] = w;
                wsum += std::fabs(w);
            }
            theta[arch.bias_index(1, i)] =
                threshold - wsum * maxabs - rng.uniform(0.25, 1.0);
        }
        return;
    }
    const double rho = witness_rho(arch, act.inf_bound());
    const double lo = std::isinf(rho) ? -1.0 : rho;
    const double bias_cap = threshold - (act.inf_bound() < 0.0 ? 1.0 : 0.0);
    for (std::size_t i = 1; i <= arch.width(layer); ++i) {
        for (std::size_t j = 1; j <= arch.width(layer - 1); ++j)
            theta[arch.weight_index(layer, i, j)] = lo * rng.uniform(0.05, 0.95);
        theta[arch.bias_index(layer, i)] = bias_cap - rng.uniform(0.25, 1.0);
    }
}

TrialRecord run_training_trial(const TrialConfig& cfg, std::uint64_t seed) {
    validate_trial_config(cfg);
    const Architecture& arch = cfg.arch;
    const std::size_t L = arch.depth();
    const Box box{cfg.dist.box_lo(), cfg.dist.box_hi()};

    TrialRecord rec;
    rec.seed = seed;
    rec.method = cfg.method;

    CounterRng init_rng(seed, kStreamInit);
    std::vector<double> theta = cfg.init.sample_vector(arch.param_count(), init_rng);
    {
        CounterRng overlay_rng(seed, kStreamOverlay);
        for (std::size_t k : cfg.force_dead_layers)
            overlay_dead_layer(arch, cfg.act, box, k, theta, overlay_rng);
    }
    for (auto [idx, v] : cfg.init_overrides) theta[idx] = v;

    // certify inactivity per hidden layer
    rec.dead_at_init.resize(L - 1, LayerVerdict::Unknown);
    for (std::size_t k = 1; k + 1 <= L; ++k) {
        LayerVerdict v;
        if (k == 1) {
            v = certify_layer1_inactive(arch, theta, cfg.act.flat_lo(),
                                        cfg.act.default_threshold(), box)
                    ? LayerVerdict::CertifiedInactive
                    : LayerVerdict::CertifiedActive;
        } else {
            v = certify_layer_inactive(arch, theta, k, cfg.act, box,
                                       cfg.cert_falsifier_samples,
                                       CounterRng(seed, kStreamCert).next_u64());
        }
        rec.dead_at_init[k - 1] = v;
        if (v == LayerVerdict::CertifiedInactive) {
            if (rec.first_dead_layer == 0) rec.first_dead_layer = k;
            rec.last_dead_layer = k;
        }
    }

    // evaluation closure: exact on discrete support, held-out otherwise
    std::vector<Sample> holdout;
    if (!cfg.dist.has_exact_support()) {
        CounterRng eval_rng(seed, kStreamEval);
        holdout.reserve(cfg.eval_samples);
        for (std::size_t i = 0; i < cfg.eval_samples; ++i)
            holdout.push_back(cfg.dist.sample(eval_rng));
    }
    auto eval_risk = [&](std::span<const double> th) {
        if (cfg.dist.has_exact_support())
            return true_risk(arch, th, cfg.act, cfg.loss, cfg.dist, 2, 0).value;
        return empirical_risk(arch, th, cfg.act, cfg.loss, holdout);
    };

    const std::size_t frozen =
        rec.last_dead_layer == 0 ? 0 : arch.prefix_count(rec.last_dead_layer);
    rec.frozen_prefix_len = frozen;
    std::vector<double> theta0 = theta;

    auto log_point = [&](std::uint64_t n) {
        rec.logged_steps.push_back(n);
        rec.risk_trace.push_back(eval_risk(theta));
    };
    log_point(0);

    OptimizerState opt(cfg.method, cfg.hyper, cfg.schedule, arch.param_count());
    CounterRng batch_rng(seed, kStreamBatch);
    std::vector<Sample> batch(cfg.batch_size);
    for (std::uint64_t n = 1; n <= cfg.steps; ++n) {
        for (std::size_t m = 0; m < cfg.batch_size; ++m)
            batch[m] = cfg.dist.sample(batch_rng);
        std::vector<double> g =
            generalized_gradient(arch, theta, cfg.act, cfg.loss, batch);
        opt.step(theta, g);

        if (frozen > 0 && rec.frozen_prefix_ok &&
            std::memcmp(theta.data(), theta0.data(), frozen * sizeof(double)) != 0)
            rec.frozen_prefix_ok = false;

        if ((cfg.eval_every > 0 && n % cfg.eval_every == 0) || n == cfg.steps)
            log_point(n);
    }

    rec.downstream_moved =
        std::memcmp(theta.data() + frozen, theta0.data() + frozen,
                    (arch.param_count() - frozen) * sizeof(double)) != 0;

    double best = rec.risk_trace.front();
    for (double r : rec.risk_trace) best = std::min(best, r);
    rec.final_gap = best - cfg.ref_optimum;
    rec.nonconvergent = rec.final_gap > cfg.delta_gap;
    return rec;
}

void parallel_for_index(std::size_t n, std::size_t threads,
                        const std::function<void(std::size_t)>& f) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t workers = std::min(threads, n);
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                f(i);
        });
    for (auto& th : pool) th.join();
}

FrequencyResult nonconvergence_frequency(const TrialConfig& cfg,
                                         const BoundInputs& bound_in,
                                         std::size_t n_trials, std::uint64_t seed,
                                         std::size_t threads) {
    FrequencyResult out;
    out.n_trials = n_trials;
    out.records.resize(n_trials);
    parallel_for_index(n_trials, threads, [&](std::size_t i) {
        out.records[i] = run_training_trial(cfg, CounterRng(seed, i).next_u64());
    });

    std::size_t hits = 0, dead = 0;
    for (const TrialRecord& r : out.records) {
        hits += r.nonconvergent ? 1 : 0;
        dead += r.first_dead_layer > 0 ? 1 : 0;
    }
    const double n = static_cast<double>(n_trials);
    out.freq = static_cast<double>(hits) / n;
    out.dead_at_init_freq = static_cast<double>(dead) / n;
    out.ci3 = 3.0 * std::sqrt(std::max(out.freq * (1.0 - out.freq), 1.0 / n) / n);

    BoundReport rep = combined_bound(cfg.init, cfg.arch, cfg.act, bound_in);
    out.analytic_bound = rep.combined;
    out.layer1_bound = rep.layer1;
    out.deep_bound = rep.deep;
    if (cfg.dist.has_exact_support())
        out.hypothesis_ok = check_target_nondegeneracy(cfg.dist);
    return out;
}

GapEstimate gap_expectation_estimator(std::span<const TrialRecord> records,
                                      double delta, double ref_optimum) {
    if (!(delta > 0.0))
        throw std::invalid_argument("delta must lie in (0, inf]");
    if (records.empty()) throw std::invalid_argument("no records");
    const std::size_t n_steps = records[0].logged_steps.size();
    for (const TrialRecord& r : records)
        if (r.logged_steps != records[0].logged_steps)
            throw std::invalid_argument("records disagree on logged steps");

    GapEstimate est;
    est.logged_steps = records[0].logged_steps;
    est.value.resize(n_steps);
    est.std_error.resize(n_steps);
    est.running_inf.resize(n_steps);

    const double n = static_cast<double>(records.size());
    for (std::size_t s = 0; s < n_steps; ++s) {
        double sum = 0.0, sumsq = 0.0;
        for (const TrialRecord& r : records) {
            double v = std::min(delta, r.risk_trace[s] - ref_optimum);
            sum += v;
            sumsq += v * v;
        }
        est.value[s] = sum / n;
        double var = n > 1.0 ? std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0)) : 0.0;
        est.std_error[s] = std::sqrt(var / n);
        est.running_inf[s] =
            s == 0 ? est.value[0] : std::min(est.running_inf[s - 1], est.value[s]);
    }
    return est;
}

std::vector<DepthSweepRow> depth_sweep_experiment(const DepthSweepConfig& cfg,
                                                  std::uint64_t seed,
                                                  std::size_t threads) {
    std::vector<DepthSweepRow> rows;
    rows.reserve(cfg.depths.size());

    for (std::size_t di = 0; di < cfg.depths.size(); ++di) {
        const std::size_t L = cfg.depths[di];
        if (L < 2) throw std::invalid_argument("sweep depths must be >= 2");
        std::vector<std::size_t> widths(L + 1, cfg.hidden_width);
        widths.front() = cfg.input_dim;
        widths.back() = cfg.output_dim;
        Architecture arch(widths);

        BoundInputs bin = default_bound_inputs(cfg.act, cfg.box);
        bin.gamma = cfg.gamma;
        DepthSweepRow row;
        row.depth = L;
        row.n_trials = cfg.n_trials;
        row.analytic_bound = deep_layer_bound(cfg.init, arch, cfg.act, bin);
        row.ci3 = 3.0 * std::sqrt(
            std::max(row.analytic_bound * (1.0 - row.analytic_bound),
                     1e-12) / static_cast<double>(cfg.n_trials));

        const double rho = witness_rho(arch, cfg.act.inf_bound());
        std::vector<std::uint8_t> witness(cfg.n_trials, 0), certified(cfg.n_trials, 0);
        parallel_for_index(cfg.n_trials, threads, [&](std::size_t i) {
            CounterRng rng(seed, (di << 32) ^ i);
            std::vector<double> theta = cfg.init.sample_vector(arch.param_count(), rng);
            bool wit = false;
            for (std::size_t k = 2; k + 1 <= L && !wit; ++k)
                wit = witness_layer_dead(arch, theta, k, rho, cfg.gamma,
                                         cfg.act.inf_bound());
            witness[i] = wit ? 1 : 0;
            certified[i] =
                first_interval_certified_layer(arch, theta, cfg.act, cfg.box) > 0 ? 1
                                                                                  : 0;
        });
        std::size_t nw = 0, nc = 0;
        for (std::size_t i = 0; i < cfg.n_trials; ++i) {
            nw += witness[i];
            nc += certified[i];
        }
        row.witness_freq = static_cast<double>(nw) / static_cast<double>(cfg.n_trials);
        row.certified_freq = static_cast<double>(nc) / static_cast<double>(cfg.n_trials);

        if (cfg.steps > 0 && cfg.dist && cfg.loss) {
            TrialConfig tc(arch, cfg.act, *cfg.loss, *cfg.dist, cfg.init);
            tc.method = cfg.method;
            tc.hyper = cfg.hyper;
            tc.schedule = cfg.schedule;
            tc.steps = cfg.steps;
            tc.batch_size = cfg.batch_size;
            tc.eval_every = cfg.eval_every;
            tc.ref_optimum = cfg.ref_optimum;
            tc.delta_gap = cfg.delta_gap;
            FrequencyResult fr = nonconvergence_frequency(
                tc, bin, cfg.n_trials, seed ^ (0x5eedULL + di), threads);
            row.nonconv_freq = fr.freq;
            row.trained = true;
        } else {
            // certified inactivity forces the risk floor, so this is a
            // measured lower bound on the non-convergence frequency
            row.nonconv_freq = row.certified_freq;
            row.trained = false;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace nonconv
