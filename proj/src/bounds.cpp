#include "nonconv/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nonconv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

BoundInputs default_bound_inputs(const ActivationFamily& act, Box box) {
    BoundInputs in;
    in.box = box;
    in.gamma = act.default_threshold();
    double hi = in.gamma; // right edge of the usable flat window
    in.window_lo = hi - 2.0;
    in.window_hi = hi - 1.0;
    if (std::isfinite(act.flat_lo())) {
        in.window_lo = std::max(in.window_lo, act.flat_lo());
        in.window_hi = std::max(in.window_hi, in.window_lo + 0.5 * (hi - in.window_lo));
    }
    return in;
}

void validate_bound_inputs(const ActivationFamily& act, const BoundInputs& in) {
    if (!(in.window_lo < in.window_hi))
        throw std::invalid_argument("window: lower edge must be below upper edge");
    if (!(in.window_lo >= act.flat_lo() && in.window_hi <= act.flat_hi()))
        throw std::invalid_argument("window: must lie inside the flat region");
    for (double s : act.exception_set())
        if (s > in.window_lo && s < in.window_hi)
            throw std::invalid_argument("window: must avoid the kink set");
    if (!(in.gamma <= act.default_threshold()))
        throw std::invalid_argument("gamma: must be at most min(kinks, flat edge)");
    if (!(in.box.lo <= in.box.hi))
        throw std::invalid_argument("box: lower bound above upper bound");
}

double layer1_bound(const InitDistribution& dist, const Architecture& arch,
                    const BoundInputs& in) {
    const double eta = in.window_lo, zeta = in.window_hi;
    const double bias_lo = (3.0 * eta + zeta) / 4.0;
    const double bias_hi = (eta + 3.0 * zeta) / 4.0;
    const double scale = std::max({1.0, std::fabs(in.box.lo), std::fabs(in.box.hi)});
    const double weight_cap =
        (zeta - eta) / (2.0 * static_cast<double>(arch.input_dim()) * scale);

    double prod = 1.0;
    for (std::size_t i = 1; i <= arch.width(1); ++i) {
        double rho_i = dist.prob_open(arch.bias_index(1, i), bias_lo, bias_hi);
        for (std::size_t j = 1; j <= arch.input_dim(); ++j)
            rho_i *= dist.prob_abs_lt(arch.weight_index(1, i, j), weight_cap);
        prod *= rho_i;
    }
    return prod;
}

double deep_layer_bound(const InitDistribution& dist, const Architecture& arch,
                        const ActivationFamily& act, const BoundInputs& in,
                        std::string* diagnostic) {
    const std::size_t L = arch.depth();
    if (!std::isinf(act.flat_lo()) || act.flat_lo() > 0.0) {
        if (diagnostic)
            *diagnostic = "deep bound needs a flat region unbounded below";
        return 0.0;
    }
    const std::size_t needed =
        arch.param_count() - arch.width(L) * arch.width(L - 1) - arch.width(L);
    const std::size_t chi = in.chi == 0 ? arch.param_count() : in.chi;
    if (chi < needed) {
        if (diagnostic)
            *diagnostic = "deep bound needs independence through the last hidden layer";
        return 0.0;
    }

    const double A = act.inf_bound();
    const double rho = witness_rho(arch, A);
    const double bias_cap = in.gamma - (A < 0.0 ? 1.0 : 0.0);

    double prod = 1.0;
    for (std::size_t k = 2; k + 1 <= L; ++k) {
        double layer_p = 1.0;
        for (std::size_t i = 1; i <= arch.width(k); ++i) {
            for (std::size_t j = 1; j <= arch.width(k - 1); ++j)
                layer_p *= dist.prob_open(arch.weight_index(k, i, j), rho, 0.0);
            layer_p *= dist.prob_lt(arch.bias_index(k, i), bias_cap);
        }
        prod *= 1.0 - layer_p;
    }
    return 1.0 - prod;
}

BoundReport combined_bound(const InitDistribution& dist, const Architecture& arch,
                           const ActivationFamily& act, const BoundInputs& in) {
    BoundReport rep;
    rep.layer1 = layer1_bound(dist, arch, in);
    rep.deep = deep_layer_bound(dist, arch, act, in, &rep.diagnostic);
    rep.deep_applicable = rep.diagnostic.empty();
    rep.combined = std::max(rep.layer1, rep.deep);
    return rep;
}

double admissible_p_sup(const InitDistribution& dist, double gamma, double inf_bound,
                        double c_bound, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    double first;
    if (inf_bound < 0.0)
        first = dist.base_density_inf(-eps, 0.0) * eps;
    else
        first = dist.base_cdf(0.0);
    const double ind = inf_bound < 0.0 ? 1.0 : 0.0;
    const double second = dist.base_cdf(std::min(0.0, c_bound * (gamma - ind)));
    return std::min(first, second);
}

DepthSweepBoundResult depth_sweep_bound(std::size_t width,
                                        const std::vector<std::size_t>& depths,
                                        double p, double inf_bound, double c_bound,
                                        double eps, const InitDistribution& dist,
                                        double gamma) {
    if (width == 0) throw std::invalid_argument("width must be positive");
    const double p_sup = admissible_p_sup(dist, gamma, inf_bound, c_bound, eps);
    if (!(p > 0.0 && p < p_sup))
        throw std::invalid_argument("p outside the admissible range (0, " +
                                    std::to_string(p_sup) + ")");

    DepthSweepBoundResult res;
    const double l = static_cast<double>(width);
    res.q = p * eps / (eps - l * c_bound * std::min(inf_bound, 0.0));
    const double expo = l * (l + 1.0);

    res.rows.reserve(depths.size());
    for (std::size_t L : depths) {
        if (L < 2) throw std::invalid_argument("depths must be >= 2");
        DepthBoundRow row;
        row.depth = L;
        const double per_layer = std::pow(res.q, expo);
        row.bound = 1.0 - std::pow(1.0 - per_layer, static_cast<double>(L - 2));
        row.hypothesis_value = static_cast<double>(L) * per_layer;
        res.rows.push_back(row);
    }
    res.hypothesis_diverging = res.rows.size() >= 2;
    for (std::size_t i = 0; i + 1 < res.rows.size(); ++i)
        if (!(res.rows[i].hypothesis_value < res.rows[i + 1].hypothesis_value))
            res.hypothesis_diverging = false;
    return res;
}

} // namespace nonconv
