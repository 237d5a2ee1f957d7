#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nonconv/activation.hpp"
#include "nonconv/ann.hpp"
#include "nonconv/arch.hpp"
#include "nonconv/data.hpp"
#include "nonconv/loss.hpp"

namespace nonconv {

struct RiskEstimate {
    double value = 0.0;
    double std_error = 0.0; // 0 when computed exactly
    bool exact = false;
};

struct ConstantRisk {
    std::vector<double> z; // minimizing constant prediction
    double value = 0.0;
};

// mean loss over the batch, network evaluated with activation level r
double empirical_risk(const Architecture& arch, std::span<const double> theta,
                      const ActivationFamily& act, const Loss& loss,
                      std::span<const Sample> batch, int r = 0);

// Expected loss under the distribution: exact atom sum when the
// distribution is discrete, Monte Carlo with a standard error otherwise.
RiskEstimate true_risk(const Architecture& arch, std::span<const double> theta,
                       const ActivationFamily& act, const Loss& loss,
                       const DataDistribution& dist, std::size_t n_samples,
                       std::uint64_t seed);

// Minimizer of z |-> E[loss(z, Y)] over constant predictions.  Exact
// (mean of Y) for squared loss; for psi losses with one-dimensional
// output, golden-section search over [min y - 1, max y + 1] (the
// minimizer of an increasing psi of the squared distance cannot lie
// outside the target hull).  Requires a discrete distribution.
ConstantRisk best_constant_risk(const DataDistribution& dist, const Loss& loss);

// true iff some conditional mean E[Y | X = x-atom] differs from E[Y]
// by more than 1e-12 in some coordinate
bool check_target_nondegeneracy(const DataDistribution& dist);

} // namespace nonconv
