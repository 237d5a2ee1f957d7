#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "nonconv/config.hpp"
#include "nonconv/report.hpp"

namespace fs = std::filesystem;
using namespace nonconv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitInternal = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";
    std::size_t trials = 0; // 0 = take from config
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
    if (needs_config)
        cmd->add_option("config", o.config_path, "configuration file")->required();
    cmd->add_option("--out-dir", o.out_dir, "directory for result files");
    cmd->add_option("--format", o.format, "stdout format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--trials", o.trials, "override trial count");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--threads", o.threads, "parallel trial workers");
}

void emit(const CommonOpts& o, const std::string& name, const std::string& content) {
    fs::create_directories(o.out_dir);
    write_file((fs::path(o.out_dir) / name).string(), content);
}

int cmd_bound(const CommonOpts& o) {
    ConfigMap cm = ConfigMap::parse_file(o.config_path);
    LoadedConfig cfg = load_config(cm);
    BoundReport rep = combined_bound(cfg.trial.init, cfg.trial.arch, cfg.trial.act,
                                     cfg.bound);
    std::string json = bound_report_json(rep, cfg.trial.arch, cfg.trial.act.name(),
                                         cm.get("data").value_or("coin"), cfg.bound);
    std::cout << json;
    emit(o, "bound.json", json);
    return kExitOk;
}

int cmd_mc_init(const CommonOpts& o) {
    ConfigMap cm = ConfigMap::parse_file(o.config_path);
    LoadedConfig cfg = load_config(cm);
    const Architecture& arch = cfg.trial.arch;
    const ActivationFamily& act = cfg.trial.act;
    const InitDistribution& init = cfg.trial.init;
    const Box box{cfg.trial.dist.box_lo(), cfg.trial.dist.box_hi()};
    const std::size_t n = o.trials ? o.trials : cfg.trials;
    const std::size_t L = arch.depth();
    const double rho = witness_rho(arch, act.inf_bound());

    std::vector<std::uint8_t> layer1_hit(n), any_hit(n);
    std::vector<std::vector<std::uint8_t>> witness_hit(L, std::vector<std::uint8_t>(n));
    std::vector<std::uint8_t> deep_hit(n);
    parallel_for_index(n, o.threads, [&](std::size_t i) {
        CounterRng rng(o.seed, i);
        std::vector<double> theta = init.sample_vector(arch.param_count(), rng);
        bool l1 = certify_layer1_inactive(arch, theta, cfg.bound.window_lo,
                                          cfg.bound.window_hi, box);
        layer1_hit[i] = l1 ? 1 : 0;
        for (std::size_t k = 2; k + 1 <= L; ++k)
            witness_hit[k][i] = witness_layer_dead(arch, theta, k, rho, cfg.bound.gamma,
                                                   act.inf_bound())
                                    ? 1
                                    : 0;
        bool deep = first_interval_certified_layer(arch, theta, act, box) > 0;
        deep_hit[i] = deep ? 1 : 0;
        any_hit[i] = (l1 || deep) ? 1 : 0;
    });

    auto freq_of = [&](const std::vector<std::uint8_t>& hits) {
        std::size_t c = 0;
        for (std::uint8_t h : hits) c += h;
        return static_cast<double>(c) / static_cast<double>(n);
    };

    BoundReport rep = combined_bound(init, arch, act, cfg.bound);
    std::vector<std::string> labels = {"layer1_window"};
    std::vector<double> freqs = {freq_of(layer1_hit)};
    std::vector<double> bounds = {rep.layer1};
    for (std::size_t k = 2; k + 1 <= L; ++k) {
        double layer_p = 1.0;
        const double bias_cap = cfg.bound.gamma - (act.inf_bound() < 0.0 ? 1.0 : 0.0);
        for (std::size_t i = 1; i <= arch.width(k); ++i) {
            for (std::size_t j = 1; j <= arch.width(k - 1); ++j)
                layer_p *= init.prob_open(arch.weight_index(k, i, j), rho, 0.0);
            layer_p *= init.prob_lt(arch.bias_index(k, i), bias_cap);
        }
        labels.push_back("layer" + std::to_string(k) + "_witness");
        freqs.push_back(freq_of(witness_hit[k]));
        bounds.push_back(layer_p);
    }
    labels.push_back("deep_union");
    freqs.push_back(freq_of(deep_hit));
    bounds.push_back(rep.deep);
    labels.push_back("combined");
    freqs.push_back(freq_of(any_hit));
    bounds.push_back(rep.combined);

    std::string csv = mc_init_csv(labels, freqs, bounds);
    nlohmann::ordered_json j;
    j["schema"] = "nonconv.mc_init/1";
    j["n_trials"] = n;
    j["seed"] = o.seed;
    for (std::size_t i = 0; i < labels.size(); ++i)
        j["rows"].push_back({{"layer", labels[i]},
                             {"empirical_freq", freqs[i]},
                             {"analytic_bound", bounds[i]}});
    std::string json = j.dump(2) + "\n";

    emit(o, "mc_init.csv", csv);
    emit(o, "mc_init.json", json);
    std::cout << (o.format == "json" ? json : csv);
    return kExitOk;
}

int cmd_train(const CommonOpts& o) {
    ConfigMap cm = ConfigMap::parse_file(o.config_path);
    LoadedConfig cfg = load_config(cm);
    const std::size_t n = o.trials ? o.trials : cfg.trials;
    FrequencyResult res =
        nonconvergence_frequency(cfg.trial, cfg.bound, n, o.seed, o.threads);

    std::string csv = trials_csv(res.records);
    std::string json = frequency_json(res, cm.get("data").value_or("coin"));
    emit(o, "trials.csv", csv);
    emit(o, "summary.json", json);
    emit(o, "risk_traces.svg", risk_traces_svg(res.records));
    std::cout << (o.format == "json" ? json : csv);
    return kExitOk;
}

int cmd_sweep(const CommonOpts& o) {
    ConfigMap cm = ConfigMap::parse_file(o.config_path);
    LoadedConfig cfg = load_config(cm);
    if (cfg.sweep_depths.empty())
        throw ConfigError("field 'sweep.depths': missing");

    DepthSweepConfig sc(cfg.trial.act, cfg.trial.init);
    sc.input_dim = cfg.sweep_input_dim;
    sc.hidden_width = cfg.sweep_width;
    sc.output_dim = cfg.sweep_output_dim;
    sc.depths = cfg.sweep_depths;
    sc.box = Box{cfg.trial.dist.box_lo(), cfg.trial.dist.box_hi()};
    sc.gamma = cfg.bound.gamma;
    sc.n_trials = o.trials ? o.trials : cfg.sweep_trials;
    if (cfg.sweep_train) {
        sc.steps = cfg.trial.steps;
        sc.dist = cfg.trial.dist;
        sc.loss = cfg.trial.loss;
        sc.method = cfg.trial.method;
        sc.hyper = cfg.trial.hyper;
        sc.schedule = cfg.trial.schedule;
        sc.batch_size = cfg.trial.batch_size;
        sc.eval_every = cfg.trial.eval_every;
        sc.ref_optimum = cfg.trial.ref_optimum;
        sc.delta_gap = cfg.trial.delta_gap;
    }

    std::vector<DepthSweepRow> rows = depth_sweep_experiment(sc, o.seed, o.threads);

    DepthSweepBoundResult analytic;
    bool have_analytic = false;
    if (cfg.sweep_p > 0.0) {
        try {
            analytic = depth_sweep_bound(sc.hidden_width, sc.depths, cfg.sweep_p,
                                         sc.act.inf_bound(),
                                         cfg.trial.init.scale_bound(), cfg.sweep_eps,
                                         cfg.trial.init, sc.gamma);
            have_analytic = true;
        } catch (const std::invalid_argument& e) {
            throw PreconditionError(e.what());
        }
    }

    std::string csv = sweep_csv(rows);
    std::string json = sweep_json(rows, have_analytic ? &analytic : nullptr);
    emit(o, "sweep.csv", csv);
    emit(o, "sweep.json", json);
    emit(o, "sweep.svg", sweep_svg(rows));
    std::cout << (o.format == "json" ? json : csv);
    return kExitOk;
}

int cmd_selftest(const CommonOpts& o) {
    struct Check {
        std::string name;
        bool ok;
    };
    std::vector<Check> checks;
    auto run = [&](const std::string& name, bool ok) {
        checks.push_back({name, ok});
    };

    for (Method m : shipped_methods())
        run("phi-condition " + method_name(m),
            verify_phi_condition(m, Hyper{}, 200, o.seed));
    run("phi-condition drift-control fails",
        !verify_phi_condition(Method::DriftControl, Hyper{}, 200, o.seed));

    run("normal-cdf symmetry center", normal_cdf(0.0) == 0.5);
    run("normal-cdf 1.96", std::fabs(normal_cdf(1.96) - 0.9750021048517795) < 1e-12);

    {
        ActivationFamily relu = ActivationFamily::relu();
        bool flat_ok = true;
        for (int i = 0; i < 10000; ++i) {
            double x = -1e6 + (1e6 - 1e-9) * static_cast<double>(i) / 10000.0;
            if (relu.gen_deriv(x) != 0.0) flat_ok = false;
        }
        run("relu flat region derivative", flat_ok);
    }

    {
        Architecture arch({2, 3, 1});
        ActivationFamily act = ActivationFamily::repu(2);
        Loss loss = Loss::mse();
        CounterRng rng(o.seed, 77);
        std::vector<double> theta(arch.param_count());
        for (double& t : theta) t = rng.normal();
        std::vector<Sample> batch(4);
        for (Sample& s : batch)
            s = Sample{{rng.uniform(), rng.uniform()}, {rng.normal()}};
        auto g = generalized_gradient(arch, theta, act, loss, batch);
        auto fd = finite_difference_gradient(arch, theta, act, loss, batch, 1e-5);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            worst = std::max(worst, std::fabs(g[i] - fd[i]) /
                                        std::max(1.0, std::fabs(g[i])));
        run("gradient matches finite differences", worst < 1e-5);
    }

    {
        Architecture arch({1, 1, 1});
        InitDistribution init = InitDistribution::standard_normal();
        BoundInputs in = default_bound_inputs(ActivationFamily::relu(), Box{0.0, 1.0});
        in.window_lo = -2.0;
        in.window_hi = -1.0;
        double bound = layer1_bound(init, arch, in);
        std::size_t n = 20000, hits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            CounterRng rng(o.seed, i);
            std::vector<double> theta = init.sample_vector(arch.param_count(), rng);
            if (certify_layer1_inactive(arch, theta, -2.0, -1.0, Box{0.0, 1.0})) ++hits;
        }
        double f = static_cast<double>(hits) / static_cast<double>(n);
        double s3 = 3.0 * std::sqrt(bound * (1.0 - bound) / static_cast<double>(n));
        run("layer-1 window frequency above bound", f >= bound - s3);
    }

    bool all = true;
    for (const Check& c : checks) {
        std::printf("%-45s %s\n", c.name.c_str(), c.ok ? "PASS" : "FAIL");
        if (!c.ok) all = false;
    }
    std::printf("%zu checks, %s\n", checks.size(), all ? "all passed" : "FAILURES");
    return all ? kExitOk : kExitInternal;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dead-layer analysis and non-convergence bounds for feedforward nets"};
    app.require_subcommand(1);

    CommonOpts ob, om, ot, os, oself;
    CLI::App* bound = app.add_subcommand("bound", "closed-form inactivity bounds");
    add_common(bound, ob, true);
    CLI::App* mcinit = app.add_subcommand("mc-init", "Monte Carlo dead-layer frequency");
    add_common(mcinit, om, true);
    CLI::App* train = app.add_subcommand("train", "training trials vs analytic bound");
    add_common(train, ot, true);
    CLI::App* sweep = app.add_subcommand("sweep", "dead-layer frequency across depths");
    add_common(sweep, os, true);
    CLI::App* selftest = app.add_subcommand("selftest", "run the invariant suite");
    add_common(selftest, oself, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (bound->parsed()) return cmd_bound(ob);
        if (mcinit->parsed()) return cmd_mc_init(om);
        if (train->parsed()) return cmd_train(ot);
        if (sweep->parsed()) return cmd_sweep(os);
        if (selftest->parsed()) return cmd_selftest(oself);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition not met: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitConfig;
}
