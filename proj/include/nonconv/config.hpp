#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonconv/bounds.hpp"
#include "nonconv/experiments.hpp"

namespace nonconv {

// configuration-file problem: malformed syntax, unknown field, bad value
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// structurally valid configuration that a bound or experiment cannot
// consume (violated mathematical precondition)
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-based key tree: one `key = value` per line, `#` comments,
// dotted keys for grouping.  Repeatable keys (data.atom,
// init.override) accumulate; all other keys must be unique.
class ConfigMap {
public:
    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_text(const std::string& text, const std::string& origin);

    std::optional<std::string> get(const std::string& key) const;
    std::vector<std::string> get_all(const std::string& key) const;
    std::string require(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;

    bool has(const std::string& key) const { return get(key).has_value(); }
    const std::string& origin() const { return origin_; }

private:
    struct Entry {
        std::string key;
        std::string value;
        int line;
    };
    std::vector<Entry> entries_;
    std::string origin_;

    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

// Fully-built experiment pieces from one configuration file.
struct LoadedConfig {
    explicit LoadedConfig(TrialConfig t) : trial(std::move(t)) {}

    TrialConfig trial;
    BoundInputs bound;
    std::size_t trials = 100;

    // depth sweep
    std::size_t sweep_width = 1;
    std::size_t sweep_input_dim = 1;
    std::size_t sweep_output_dim = 1;
    std::vector<std::size_t> sweep_depths;
    std::size_t sweep_trials = 10000;
    double sweep_p = 0.0; // 0 = no analytic overlay requested
    double sweep_eps = 0.5;
    bool sweep_train = false;
};

LoadedConfig load_config(const ConfigMap& cm);

std::vector<double> parse_number_list(const std::string& s);

} // namespace nonconv
