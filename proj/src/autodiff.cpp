#include "nonconv/autodiff.hpp"

#include <stdexcept>

#include "nonconv/risk.hpp"

namespace nonconv {

namespace {

// Shared reverse pass; r == 0 uses the activation and its generalized
// derivative, r >= 1 the level-r approximation pair.
std::vector<double> backprop(const Architecture& arch, std::span<const double> theta,
                             const ActivationFamily& act, const Loss& loss,
                             std::span<const Sample> batch, int r) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    const std::size_t L = arch.depth();
    std::vector<double> grad(arch.param_count(), 0.0);

    std::vector<std::vector<double>> activations(L); // post-activation per hidden layer
    std::vector<double> delta, delta_prev;

    for (const Sample& s : batch) {
        ForwardTrace t = forward(arch, theta, act, s.x, r);
        for (std::size_t v = 1; v < L; ++v) {
            const auto& pre = t.layer(v);
            activations[v - 1].resize(pre.size());
            for (std::size_t i = 0; i < pre.size(); ++i)
                activations[v - 1][i] = act.moll_value(r, pre[i]);
        }

        delta.resize(arch.output_dim());
        loss.grad_pred(t.output(), s.y, delta);

        for (std::size_t k = L; k >= 1; --k) {
            const std::size_t n_out = arch.width(k);
            const std::size_t n_in = arch.width(k - 1);
            const std::vector<double>* input =
                (k == 1) ? &s.x : &activations[k - 2];

            for (std::size_t i = 1; i <= n_out; ++i) {
                const double d = delta[i - 1];
                grad[arch.bias_index(k, i)] += d;
                const std::size_t w0 = arch.weight_index(k, i, 1);
                for (std::size_t j = 0; j < n_in; ++j)
                    grad[w0 + j] += d * (*input)[j];
            }
            if (k == 1) break;

            delta_prev.assign(n_in, 0.0);
            for (std::size_t i = 1; i <= n_out; ++i) {
                const double d = delta[i - 1];
                const std::size_t w0 = arch.weight_index(k, i, 1);
                for (std::size_t j = 0; j < n_in; ++j)
                    delta_prev[j] += theta[w0 + j] * d;
            }
            const auto& pre_in = t.layer(k - 1);
            for (std::size_t j = 0; j < n_in; ++j)
                delta_prev[j] *= act.moll_deriv(r, pre_in[j]);
            delta.swap(delta_prev);
        }
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double& g : grad) g *= inv;
    return grad;
}

} // namespace

std::vector<double> generalized_gradient(const Architecture& arch,
                                         std::span<const double> theta,
                                         const ActivationFamily& act, const Loss& loss,
                                         std::span<const Sample> batch) {
    return backprop(arch, theta, act, loss, batch, 0);
}

std::vector<double> mollified_gradient(const Architecture& arch,
                                       std::span<const double> theta,
                                       const ActivationFamily& act, const Loss& loss,
                                       std::span<const Sample> batch, int r) {
    if (r < 1) throw std::invalid_argument("mollified gradient needs r >= 1");
    return backprop(arch, theta, act, loss, batch, r);
}

std::vector<double> finite_difference_gradient(const Architecture& arch,
                                               std::span<const double> theta,
                                               const ActivationFamily& act,
                                               const Loss& loss,
                                               std::span<const Sample> batch,
                                               double step) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    std::vector<double> work(theta.begin(), theta.end());
    std::vector<double> grad(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double orig = work[i];
        work[i] = orig + step;
        const double up = empirical_risk(arch, work, act, loss, batch);
        work[i] = orig - step;
        const double dn = empirical_risk(arch, work, act, loss, batch);
        work[i] = orig;
        grad[i] = (up - dn) / (2.0 * step);
    }
    return grad;
}

} // namespace nonconv
