#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nonconv/activation.hpp"
#include "nonconv/arch.hpp"
#include "nonconv/inactivity.hpp"
#include "nonconv/init_dist.hpp"

namespace nonconv {

// Everything the closed-form inactivity bounds consume.
struct BoundInputs {
    double window_lo = 0.0; // (eta, zeta), inside the flat region minus kinks
    double window_hi = 0.0;
    double gamma = 0.0;     // threshold, at most min(S u {flat_hi})
    Box box;                // input box (a, b)
    std::size_t chi = 0;    // independent-coordinate count; 0 means all
};

// Defaults: gamma = min(S u {flat_hi}); window = (gamma - 2, gamma - 1)
// clipped into the flat region minus kinks; chi = all coordinates.
BoundInputs default_bound_inputs(const ActivationFamily& act, Box box);

// throws invalid_argument with a field name when the window or the
// threshold violates its constraint
void validate_bound_inputs(const ActivationFamily& act, const BoundInputs& in);

// Product over first-layer neurons of
//   P(bias in the middle half of the window) *
//   prod_j P(|weight_j| < half-window / (l_0 * max(1,|a|,|b|))),
// a lower bound on the probability that layer 1 is inactive on the box.
double layer1_bound(const InitDistribution& dist, const Architecture& arch,
                    const BoundInputs& in);

// Lower bound on the probability that some hidden layer k in 2..L-1 is
// inactive: one minus the product over k of one minus the per-layer
// witness probability (weights in (rho, 0), biases below
// gamma - [inf A < 0]).  Requires flat_lo == -inf and chi covering all
// but the output layer; otherwise returns 0 and sets the diagnostic.
double deep_layer_bound(const InitDistribution& dist, const Architecture& arch,
                        const ActivationFamily& act, const BoundInputs& in,
                        std::string* diagnostic = nullptr);

struct BoundReport {
    double layer1 = 0.0;
    double deep = 0.0;
    double combined = 0.0;
    bool deep_applicable = true;
    std::string diagnostic;
};

// max of the two bounds, with the deep branch gated by its
// applicability conditions
BoundReport combined_bound(const InitDistribution& dist, const Architecture& arch,
                           const ActivationFamily& act, const BoundInputs& in);

// Largest admissible p for the depth-asymptotics bound, evaluated on
// the base law of the initialization:
//   min( inf-density-on-[-eps,0] * eps           if inf A < 0,
//        F(0)                                     if inf A >= 0,
//        F(min(0, c * (gamma - [inf A < 0]))) ).
double admissible_p_sup(const InitDistribution& dist, double gamma, double inf_bound,
                        double c_bound, double eps);

struct DepthBoundRow {
    std::size_t depth = 0;          // L
    double bound = 0.0;             // 1 - (1 - q^{l(l+1)})^{L-2}
    double hypothesis_value = 0.0;  // L * q^{l(l+1)}
};

struct DepthSweepBoundResult {
    double q = 0.0;
    bool hypothesis_diverging = false; // hypothesis values strictly increase
    std::vector<DepthBoundRow> rows;
};

// Per-depth lower bounds for hidden width l with
// q = p * eps / (eps - l * c * min(inf A, 0)) (q = p when inf A >= 0).
// p must satisfy the admissibility inequality for the given law.
DepthSweepBoundResult depth_sweep_bound(std::size_t width,
                                        const std::vector<std::size_t>& depths,
                                        double p, double inf_bound, double c_bound,
                                        double eps, const InitDistribution& dist,
                                        double gamma);

} // namespace nonconv
