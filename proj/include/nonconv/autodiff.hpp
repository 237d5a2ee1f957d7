#pragma once

#include <span>
#include <vector>

#include "nonconv/activation.hpp"
#include "nonconv/arch.hpp"
#include "nonconv/data.hpp"
#include "nonconv/loss.hpp"

namespace nonconv {

// Gradient of the batch risk by reverse-mode differentiation, using
// the generalized derivative of the activation at the stored hidden
// pre-activations.  For C^1 activations this is the classical
// gradient; for kinked activations it is the limit of the gradients
// of the C^1-approximated risks.
std::vector<double> generalized_gradient(const Architecture& arch,
                                         std::span<const double> theta,
                                         const ActivationFamily& act, const Loss& loss,
                                         std::span<const Sample> batch);

// Classical gradient of the batch risk built from the level-r
// activation approximation (r >= 1).
std::vector<double> mollified_gradient(const Architecture& arch,
                                       std::span<const double> theta,
                                       const ActivationFamily& act, const Loss& loss,
                                       std::span<const Sample> batch, int r);

// Central finite differences of the batch risk, coordinate by coordinate.
std::vector<double> finite_difference_gradient(const Architecture& arch,
                                               std::span<const double> theta,
                                               const ActivationFamily& act,
                                               const Loss& loss,
                                               std::span<const Sample> batch,
                                               double step);

} // namespace nonconv
