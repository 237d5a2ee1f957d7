#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nonconv/activation.hpp"
#include "nonconv/arch.hpp"
#include "nonconv/rng.hpp"

namespace nonconv {

// Closed interval with outward-rounded arithmetic; safe against the
// rounding of both the interval computation itself and the pointwise
// double-precision forward pass it encloses.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

Interval interval_add(Interval a, Interval b);
Interval interval_scale(double c, Interval a);

enum class LayerVerdict { CertifiedInactive, CertifiedActive, Unknown };

struct Box {
    double lo = 0.0;
    double hi = 1.0;
};

// Exact layer-1 decision: each first-layer pre-activation is affine in
// the inputs, so its range over the box is bias + sum_j min/max of
// w_j * lo, w_j * hi.  Returns true iff every neuron's range lies
// strictly inside (window_lo, window_hi), with a relative guard of
// 1e-9 against rounding.
bool certify_layer1_inactive(const Architecture& arch, std::span<const double> theta,
                             double window_lo, double window_hi, Box box);

// Pre-activation enclosures of layer k over the box, by exact affine
// intervals at layer 1 and outward-rounded propagation (activation
// ranges via the kink decomposition) through layers 2..k.
std::vector<Interval> layer_preactivation_bounds(const Architecture& arch,
                                                 std::span<const double> theta,
                                                 const ActivationFamily& act,
                                                 std::size_t k, Box box);

// Certification for hidden layer k >= 2 against the activation's flat
// region minus its kink set.  Interval containment certifies
// inactivity; otherwise up to falsifier_samples random box points are
// evaluated and any escape certifies activity; otherwise Unknown.
LayerVerdict certify_layer_inactive(const Architecture& arch,
                                    std::span<const double> theta,
                                    std::size_t k, const ActivationFamily& act,
                                    Box box, std::size_t falsifier_samples,
                                    std::uint64_t falsifier_seed);

// Smallest hidden layer k >= 2 whose pre-activation enclosure lies in
// the flat region minus the kink set, found in one interval sweep
// through the network; 0 when no layer certifies.
std::size_t first_interval_certified_layer(const Architecture& arch,
                                           std::span<const double> theta,
                                           const ActivationFamily& act, Box box);

// rho from the closed-form deep-layer witness: -inf when the
// activation is bounded below by 0; 1/(A * max interior width) when
// A < 0 and depth > 2; 0 when A < 0 and depth == 2
double witness_rho(const Architecture& arch, double inf_bound);

// True iff the layer-k parameters lie in the closed-form dead region:
// all weights in (rho, 0) and all biases below
// threshold - [inf_bound < 0].  This region is contained in the
// inactive set of layer k whenever threshold <= min(S u {flat_hi}).
bool witness_layer_dead(const Architecture& arch, std::span<const double> theta,
                        std::size_t k, double rho, double threshold,
                        double inf_bound);

} // namespace nonconv
