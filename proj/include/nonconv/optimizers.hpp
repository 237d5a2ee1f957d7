#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nonconv {

enum class Method {
    Sgd,
    Momentum,
    Nesterov,
    Adagrad,
    Rmsprop,
    Adadelta,
    Adam,
    Adamax,
    Amsgrad,
    Nadam,    // experimental: named but not pinned by the analysis
    Nadamax,  // experimental
    DriftControl, // negative control: adds a constant drift, breaks the
                  // zero-gradient invariance on purpose; not for training
};

Method method_from_name(const std::string& name);
std::string method_name(Method m);

// every shipped training method (excludes the negative control)
std::span<const Method> shipped_methods();

// the nine methods pinned by the acceptance suite
std::span<const Method> core_methods();

struct Hyper {
    double beta1 = 0.9;      // first-moment decay (adam family), momentum coefficient
    double beta2 = 0.999;    // second-moment decay / squared-average decay
    double eps_stab = 1e-8;  // added outside the square root
    double rho = 0.95;       // adadelta averaging coefficient
};

// Learning-rate schedule: gamma(n) for the n-th step, n >= 1.
class Schedule {
public:
    static Schedule constant(double g) { return Schedule(KindConstant, g, {}); }
    static Schedule harmonic(double g0) { return Schedule(KindHarmonic, g0, {}); }
    // 1/n^2 decay; summable, so the iterates barely move
    static Schedule harmonic_sq(double g0) { return Schedule(KindHarmonicSq, g0, {}); }
    static Schedule list(std::vector<double> gs) {
        if (gs.empty()) throw std::invalid_argument("empty schedule list");
        return Schedule(KindList, 0.0, std::move(gs));
    }

    double gamma(std::uint64_t n) const {
        switch (kind_) {
        case KindConstant: return g0_;
        case KindHarmonic: return g0_ / static_cast<double>(n);
        case KindHarmonicSq: return g0_ / (static_cast<double>(n) * static_cast<double>(n));
        case KindList: return list_[std::min<std::size_t>(n - 1, list_.size() - 1)];
        }
        return g0_;
    }

private:
    enum KindT { KindConstant, KindHarmonic, KindHarmonicSq, KindList };
    Schedule(KindT k, double g0, std::vector<double> l)
        : kind_(k), g0_(g0), list_(std::move(l)) {}
    KindT kind_;
    double g0_;
    std::vector<double> list_;
};

// Per-run optimizer state.  All shipped methods are per-coordinate
// state-space realizations of history-dependent update rules; a
// coordinate whose gradient history is identically zero keeps its
// accumulators at zero and its parameter value bit-identical.
class OptimizerState {
public:
    OptimizerState(Method method, Hyper hyper, Schedule schedule, std::size_t dim);

    // one update in place; grad length must match dim
    void step(std::span<double> theta, std::span<const double> grad);

    Method method() const { return method_; }
    std::uint64_t steps_taken() const { return n_; }

private:
    Method method_;
    Hyper hyper_;
    Schedule schedule_;
    std::uint64_t n_ = 0;
    std::vector<double> m_;    // first moment / velocity
    std::vector<double> v_;    // second moment / squared accumulator
    std::vector<double> vmax_; // amsgrad max moment
    std::vector<double> dacc_; // adadelta squared-update average
};

// Simulates random gradient histories (length <= 50) in which a random
// nonempty subset of coordinates has identically zero gradients, and
// checks that those coordinates stay bit-identical through every step.
// Returns false on the first violation.
bool verify_phi_condition(Method method, const Hyper& hyper, std::size_t trials,
                          std::uint64_t seed);

} // namespace nonconv
