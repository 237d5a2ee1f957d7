#include "nonconv/ann.hpp"

#include <cmath>
#include <stdexcept>

namespace nonconv {

ForwardTrace forward(const Architecture& arch, std::span<const double> theta,
                     const ActivationFamily& act, std::span<const double> x,
                     int r) {
    if (theta.size() != arch.param_count())
        throw std::invalid_argument("parameter vector length mismatch");
    if (x.size() != arch.input_dim())
        throw std::invalid_argument("input dimension mismatch");

    const std::size_t L = arch.depth();
    ForwardTrace trace;
    trace.pre.resize(L);

    std::vector<double> in(x.begin(), x.end());
    for (std::size_t k = 1; k <= L; ++k) {
        const std::size_t n_out = arch.width(k);
        const std::size_t n_in = arch.width(k - 1);
        std::vector<double>& out = trace.pre[k - 1];
        out.resize(n_out);
        for (std::size_t i = 1; i <= n_out; ++i) {
            double acc = theta[arch.bias_index(k, i)];
            const std::size_t w0 = arch.weight_index(k, i, 1);
            for (std::size_t j = 0; j < n_in; ++j)
                acc += theta[w0 + j] * in[j];
            out[i - 1] = acc;
        }
        if (k < L) {
            in.resize(n_out);
            for (std::size_t i = 0; i < n_out; ++i)
                in[i] = act.moll_value(r, out[i]);
        }
    }
    return trace;
}

double scalar_chain(const ActivationFamily& act, std::span<const double> scale,
                    std::span<const double> shift, std::size_t v, double t) {
    double cur = act.value(t);
    for (std::size_t i = 0; i < v; ++i)
        cur = act.value(scale[i] * cur + shift[i]);
    return cur;
}

std::vector<double> embed_scalar_chain(const Architecture& arch, double r_scale,
                                       std::span<const double> w, double z,
                                       std::span<const double> eta,
                                       std::span<const double> zeta,
                                       std::span<const double> y,
                                       std::span<const double> e) {
    const std::size_t L = arch.depth();
    if (L < 2) throw std::invalid_argument("embedding needs depth >= 2");
    if (w.size() != arch.input_dim())
        throw std::invalid_argument("w length must equal input width");
    if (y.size() != arch.output_dim() || e.size() != arch.output_dim())
        throw std::invalid_argument("y/e length must equal output width");
    if (L > 2 && (eta.size() != L - 2 || zeta.size() != L - 2))
        throw std::invalid_argument("eta/zeta must have length depth-2");

    std::vector<double> theta(arch.param_count(), 0.0);

    // first hidden neuron reads w.x + z
    for (std::size_t j = 1; j <= arch.input_dim(); ++j)
        theta[arch.weight_index(1, 1, j)] = w[j - 1];
    theta[arch.bias_index(1, 1)] = z;

    // chain steps through the first neuron of each interior hidden layer
    for (std::size_t i = 1; i + 2 <= L; ++i) {
        theta[arch.weight_index(i + 1, 1, 1)] = eta[i - 1];
        theta[arch.bias_index(i + 1, 1)] = zeta[i - 1];
    }

    // output layer: y + r_scale * e * (chain value)
    for (std::size_t g = 1; g <= arch.output_dim(); ++g) {
        theta[arch.weight_index(L, g, 1)] = r_scale * e[g - 1];
        theta[arch.bias_index(L, g)] = y[g - 1];
    }
    return theta;
}

std::optional<std::pair<double, double>>
find_nonconstancy_composition(const ActivationFamily& act,
                              std::span<const double> probe_points) {
    const double a0 = act.value(0.0);
    for (double x : probe_points) {
        const double ax = act.value(x);
        if (ax != a0) {
            const double denom = ax - a0;
            const double a = x / denom;
            const double b = -x * a0 / denom;
            if (act.value(a * ax + b) != act.value(a * a0 + b))
                return std::make_pair(a, b);
        }
    }
    return std::nullopt;
}

} // namespace nonconv
