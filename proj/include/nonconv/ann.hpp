#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nonconv/activation.hpp"
#include "nonconv/arch.hpp"

namespace nonconv {

// Result of one forward pass.  pre[v-1] holds the layer-v values
// before the activation is applied (v = 1..L); the network output is
// the last entry, since no activation is applied on the output layer.
struct ForwardTrace {
    std::vector<std::vector<double>> pre;

    const std::vector<double>& output() const { return pre.back(); }
    const std::vector<double>& layer(std::size_t v) const { return pre[v - 1]; }
};

// Forward pass with activation level r (r = 0 is the activation
// itself, r >= 1 its C^1 approximation).
ForwardTrace forward(const Architecture& arch, std::span<const double> theta,
                     const ActivationFamily& act, std::span<const double> x,
                     int r = 0);

// Scalar chain through repeated scalar affine/activation steps:
// chain(0, t) = A(t), chain(v, t) = A(scale[v-1] * chain(v-1, t) + shift[v-1]).
double scalar_chain(const ActivationFamily& act, std::span<const double> scale,
                    std::span<const double> shift, std::size_t v, double t);

// Parameter vector realizing x |-> y + r_scale * e * chain(L-2, w.x + z),
// the constant-plus-scalar-chain family: the chain runs through the
// first neuron of each hidden layer and every unlisted parameter is
// zero.  For L == 2 the chain degenerates to a single activation and
// eta/zeta are ignored.
std::vector<double> embed_scalar_chain(const Architecture& arch, double r_scale,
                                       std::span<const double> w, double z,
                                       std::span<const double> eta,
                                       std::span<const double> zeta,
                                       std::span<const double> y,
                                       std::span<const double> e);

// Searches the probe points for x with A(x) != A(0) and, if found,
// returns (a, b) such that x |-> A(a * A(x) + b) provably separates 0
// from the witness probe (a*A(x)+b == x and a*A(0)+b == 0).
std::optional<std::pair<double, double>>
find_nonconstancy_composition(const ActivationFamily& act,
                              std::span<const double> probe_points);

} // namespace nonconv
