#include "nonconv/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace nonconv {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool is_repeatable(const std::string& key) {
    return key == "data.atom" || key == "init.override";
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("field '" + key + "': not a number: '" + s + "'");
    }
}

} // namespace

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    for (const std::string& tok : split_ws(s)) out.push_back(to_double(tok, "list"));
    return out;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

ConfigMap ConfigMap::parse_text(const std::string& text, const std::string& origin) {
    ConfigMap cm;
    cm.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
        if (e.key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (!is_repeatable(e.key))
            for (const Entry& prev : cm.entries_)
                if (prev.key == e.key)
                    throw ConfigError(origin + ":" + std::to_string(lineno) +
                                      ": duplicate key '" + e.key + "' (first at line " +
                                      std::to_string(prev.line) + ")");
        cm.entries_.push_back(std::move(e));
    }
    return cm;
}

void ConfigMap::fail(const std::string& key, const std::string& what) const {
    throw ConfigError(origin_ + ": field '" + key + "': " + what);
}

std::optional<std::string> ConfigMap::get(const std::string& key) const {
    for (const Entry& e : entries_)
        if (e.key == key) return e.value;
    return std::nullopt;
}

std::vector<std::string> ConfigMap::get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const Entry& e : entries_)
        if (e.key == key) out.push_back(e.value);
    return out;
}

std::string ConfigMap::require(const std::string& key) const {
    auto v = get(key);
    if (!v) fail(key, "missing");
    return *v;
}

double ConfigMap::require_double(const std::string& key) const {
    return to_double(require(key), key);
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    return v ? to_double(*v, key) : fallback;
}

std::size_t ConfigMap::get_size(const std::string& key, std::size_t fallback) const {
    double d = get_double(key, static_cast<double>(fallback));
    if (d < 0 || d != std::floor(d)) fail(key, "expected a nonnegative integer");
    return static_cast<std::size_t>(d);
}

std::vector<double> ConfigMap::get_doubles(const std::string& key) const {
    auto v = get(key);
    if (!v) fail(key, "missing");
    std::vector<double> out;
    for (const std::string& tok : split_ws(*v)) out.push_back(to_double(tok, key));
    return out;
}

namespace {

Architecture parse_arch(const ConfigMap& cm, const std::string& key) {
    std::vector<double> w = cm.get_doubles(key);
    std::vector<std::size_t> widths;
    for (double x : w) {
        if (x < 1 || x != std::floor(x))
            throw ConfigError("field '" + key + "': widths must be positive integers");
        widths.push_back(static_cast<std::size_t>(x));
    }
    if (widths.size() < 2)
        throw ConfigError("field '" + key + "': need at least input and output widths");
    return Architecture(widths);
}

ActivationFamily parse_activation(const ConfigMap& cm) {
    std::vector<std::string> toks = split_ws(cm.get("activation").value_or("relu"));
    if (toks.empty()) throw ConfigError("field 'activation': empty");
    try {
        if (toks[0] == "relu" && toks.size() == 1) return ActivationFamily::relu();
        if (toks[0] == "clip" && toks.size() == 3)
            return ActivationFamily::clip(to_double(toks[1], "activation"),
                                          to_double(toks[2], "activation"));
        if (toks[0] == "repu" && toks.size() == 2) {
            double p = to_double(toks[1], "activation");
            if (p < 2 || p != std::floor(p))
                throw ConfigError("field 'activation': repu power must be >= 2");
            return ActivationFamily::repu(static_cast<int>(p));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field 'activation': ") + e.what());
    }
    throw ConfigError("field 'activation': expected relu | clip u v | repu p");
}

Loss parse_loss(const ConfigMap& cm) {
    std::string kind = cm.get("loss").value_or("mse");
    if (kind == "mse") return Loss::mse();
    if (kind == "sqrt1p")
        return Loss::psi_loss(
            "sqrt1p", [](double x) { return std::sqrt(x + 1.0); },
            [](double x) { return 0.5 / std::sqrt(x + 1.0); });
    throw ConfigError("field 'loss': expected mse | sqrt1p");
}

DataDistribution parse_data(const ConfigMap& cm, const ActivationFamily& act) {
    std::vector<double> box = cm.has("data.box") ? cm.get_doubles("data.box")
                                                 : std::vector<double>{0.0, 1.0};
    if (box.size() != 2 || !(box[0] <= box[1]))
        throw ConfigError("field 'data.box': expected 'lo hi' with lo <= hi");

    std::string kind = cm.get("data").value_or("coin");
    if (kind == "coin") {
        // X uniform on {0,1}, Y = X
        return DataDistribution::discrete(
            {Atom{{0.0}, {0.0}, 0.5}, Atom{{1.0}, {1.0}, 0.5}}, box[0], box[1]);
    }
    if (kind == "discrete") {
        std::vector<Atom> atoms;
        for (const std::string& atom_line : cm.get_all("data.atom")) {
            // x values | y values | probability
            std::vector<std::string> parts;
            std::string cur;
            std::istringstream is(atom_line);
            std::string tok;
            parts.push_back("");
            while (is >> tok) {
                if (tok == "|")
                    parts.push_back("");
                else
                    parts.back() += tok + " ";
            }
            if (parts.size() != 3)
                throw ConfigError("field 'data.atom': expected 'x.. | y.. | p'");
            Atom a;
            a.x = parse_number_list(parts[0]);
            a.y = parse_number_list(parts[1]);
            std::vector<double> p = parse_number_list(parts[2]);
            if (p.size() != 1)
                throw ConfigError("field 'data.atom': probability must be one number");
            a.p = p[0];
            atoms.push_back(std::move(a));
        }
        if (atoms.empty()) throw ConfigError("data = discrete needs data.atom lines");
        try {
            return DataDistribution::discrete(std::move(atoms), box[0], box[1]);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("field 'data.atom': ") + e.what());
        }
    }
    if (kind == "teacher") {
        Architecture tarch = parse_arch(cm, "data.teacher.widths");
        double noise = cm.get_double("data.teacher.noise", 0.0);
        std::size_t seed = cm.get_size("data.teacher.seed", 1);
        std::vector<std::size_t> widths = tarch.widths();
        return DataDistribution::teacher(widths, act, noise, seed, box[0], box[1]);
    }
    if (kind == "affine") {
        std::vector<double> slope = cm.get_doubles("data.affine.slope");
        double intercept = cm.get_double("data.affine.intercept", 0.0);
        double noise = cm.get_double("data.affine.noise", 0.0);
        return DataDistribution::affine(slope, intercept, noise, box[0], box[1]);
    }
    throw ConfigError("field 'data': expected coin | discrete | teacher | affine");
}

InitDistribution parse_init(const ConfigMap& cm) {
    std::vector<std::string> toks = split_ws(cm.get("init").value_or("normal 1 0"));
    try {
        if (!toks.empty() && toks[0] == "normal" && toks.size() == 3)
            return InitDistribution::normal(to_double(toks[1], "init"),
                                            to_double(toks[2], "init"));
        if (!toks.empty() && toks[0] == "uniform" && toks.size() == 3)
            return InitDistribution::uniform(to_double(toks[1], "init"),
                                             to_double(toks[2], "init"));
        if (!toks.empty() && toks[0] == "point" && toks.size() >= 2) {
            std::vector<double> vals;
            for (std::size_t i = 1; i < toks.size(); ++i)
                vals.push_back(to_double(toks[i], "init"));
            return InitDistribution::point(std::move(vals));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field 'init': ") + e.what());
    }
    throw ConfigError("field 'init': expected normal sigma mu | uniform lo hi | point v..");
}

Schedule parse_schedule(const ConfigMap& cm) {
    std::vector<std::string> toks =
        split_ws(cm.get("optimizer.gamma").value_or("constant 0.1"));
    if (toks.size() >= 2 && toks[0] == "constant")
        return Schedule::constant(to_double(toks[1], "optimizer.gamma"));
    if (toks.size() >= 2 && toks[0] == "harmonic")
        return Schedule::harmonic(to_double(toks[1], "optimizer.gamma"));
    if (toks.size() >= 2 && toks[0] == "list") {
        std::vector<double> gs;
        for (std::size_t i = 1; i < toks.size(); ++i)
            gs.push_back(to_double(toks[i], "optimizer.gamma"));
        return Schedule::list(std::move(gs));
    }
    throw ConfigError("field 'optimizer.gamma': expected constant g | harmonic g0 | list g..");
}

} // namespace

LoadedConfig load_config(const ConfigMap& cm) {
    ActivationFamily act = parse_activation(cm);
    Architecture arch = cm.has("arch") ? parse_arch(cm, "arch")
                                       : Architecture({1, 1, 1});
    Loss loss = parse_loss(cm);
    DataDistribution dist = parse_data(cm, act);
    InitDistribution init = parse_init(cm);

    TrialConfig trial(arch, act, loss, dist, init);

    if (cm.has("init.force_dead_layers")) {
        for (double k : cm.get_doubles("init.force_dead_layers")) {
            if (k < 1 || k != std::floor(k))
                throw ConfigError("field 'init.force_dead_layers': layer indices >= 1");
            trial.force_dead_layers.push_back(static_cast<std::size_t>(k));
        }
    }
    for (const std::string& ov : cm.get_all("init.override")) {
        std::vector<double> kv = parse_number_list(ov);
        if (kv.size() != 2 || kv[0] < 0 || kv[0] != std::floor(kv[0]))
            throw ConfigError("field 'init.override': expected 'flat_index value'");
        trial.init_overrides.emplace_back(static_cast<std::size_t>(kv[0]), kv[1]);
    }

    try {
        trial.method = method_from_name(cm.get("optimizer").value_or("sgd"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field 'optimizer': ") + e.what());
    }
    trial.hyper.beta1 = cm.get_double("optimizer.beta1", trial.hyper.beta1);
    trial.hyper.beta2 = cm.get_double("optimizer.beta2", trial.hyper.beta2);
    trial.hyper.eps_stab = cm.get_double("optimizer.eps", trial.hyper.eps_stab);
    trial.hyper.rho = cm.get_double("optimizer.rho", trial.hyper.rho);
    trial.schedule = parse_schedule(cm);

    trial.steps = cm.get_size("train.steps", 1000);
    trial.batch_size = cm.get_size("train.batch", 1);
    if (trial.batch_size == 0)
        throw ConfigError("field 'train.batch': must be positive");
    trial.eval_every = cm.get_size("train.eval_every", 100);
    trial.eval_samples = cm.get_size("train.eval_samples", 4096);
    trial.ref_optimum = cm.get_double("train.ref_optimum", 0.0);

    if (loss.kind() == Loss::Kind::Psi && dist.output_dim() != 1)
        throw PreconditionError("psi losses support one-dimensional output only");

    if (cm.has("train.delta_gap")) {
        trial.delta_gap = cm.require_double("train.delta_gap");
    } else if (dist.has_exact_support()) {
        // default margin: half the gap between the best constant risk
        // and the reference optimum
        ConstantRisk c = best_constant_risk(dist, loss);
        trial.delta_gap = 0.5 * (c.value - trial.ref_optimum);
    }

    LoadedConfig out(std::move(trial));
    out.bound = default_bound_inputs(act, Box{dist.box_lo(), dist.box_hi()});
    if (cm.has("bound.window")) {
        std::vector<double> w = cm.get_doubles("bound.window");
        if (w.size() != 2) throw ConfigError("field 'bound.window': expected 'eta zeta'");
        out.bound.window_lo = w[0];
        out.bound.window_hi = w[1];
    }
    out.bound.gamma = cm.get_double("bound.gamma", out.bound.gamma);
    out.bound.chi = cm.get_size("bound.chi", 0);
    try {
        validate_bound_inputs(act, out.bound);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(cm.origin()) + ": " + e.what());
    }

    out.trials = cm.get_size("train.trials", 100);

    out.sweep_width = cm.get_size("sweep.width", 1);
    out.sweep_input_dim = cm.get_size("sweep.input_dim", 1);
    out.sweep_output_dim = cm.get_size("sweep.output_dim", 1);
    if (cm.has("sweep.depths"))
        for (double d : cm.get_doubles("sweep.depths")) {
            if (d < 2 || d != std::floor(d))
                throw ConfigError("field 'sweep.depths': depths must be integers >= 2");
            out.sweep_depths.push_back(static_cast<std::size_t>(d));
        }
    out.sweep_trials = cm.get_size("sweep.trials", 10000);
    out.sweep_p = cm.get_double("sweep.p", 0.0);
    out.sweep_eps = cm.get_double("sweep.eps", 0.5);
    out.sweep_train = cm.get_size("sweep.train", 0) != 0;

    return out;
}

} // namespace nonconv
