#include "nonconv/inactivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nonconv/ann.hpp"

namespace nonconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double next_down(double x) {
    return std::nextafter(x, -kInf);
}
double next_up(double x) {
    return std::nextafter(x, kInf);
}

// relative guard separating enclosure from window edges
double guard(double magnitude) { return 1e-9 * std::max(1.0, std::fabs(magnitude)); }

bool inside_flat(Interval iv, const ActivationFamily& act) {
    const double g = guard(std::max(std::fabs(iv.lo), std::fabs(iv.hi)));
    if (!(iv.lo > act.flat_lo() + (std::isinf(act.flat_lo()) ? 0.0 : g))) return false;
    if (!(iv.hi < act.flat_hi() - g)) return false;
    for (double s : act.exception_set())
        if (s >= iv.lo - g && s <= iv.hi + g) return false;
    return true;
}

} // namespace

Interval interval_add(Interval a, Interval b) {
    return {next_down(a.lo + b.lo), next_up(a.hi + b.hi)};
}

Interval interval_scale(double c, Interval a) {
    double p = c * a.lo, q = c * a.hi;
    return {next_down(std::min(p, q)), next_up(std::max(p, q))};
}

bool certify_layer1_inactive(const Architecture& arch, std::span<const double> theta,
                             double window_lo, double window_hi, Box box) {
    const std::size_t n_in = arch.width(0);
    for (std::size_t i = 1; i <= arch.width(1); ++i) {
        double lo = theta[arch.bias_index(1, i)];
        double hi = lo;
        const std::size_t w0 = arch.weight_index(1, i, 1);
        for (std::size_t j = 0; j < n_in; ++j) {
            const double w = theta[w0 + j];
            lo = next_down(lo + std::min(w * box.lo, w * box.hi));
            hi = next_up(hi + std::max(w * box.lo, w * box.hi));
        }
        const double g = guard(std::max(std::fabs(lo), std::fabs(hi)));
        if (!(lo > window_lo + (std::isinf(window_lo) ? 0.0 : g))) return false;
        if (!(hi < window_hi - (std::isinf(window_hi) ? 0.0 : g))) return false;
    }
    return true;
}

std::vector<Interval> layer_preactivation_bounds(const Architecture& arch,
                                                 std::span<const double> theta,
                                                 const ActivationFamily& act,
                                                 std::size_t k, Box box) {
    std::vector<Interval> cur(arch.width(0), Interval{box.lo, box.hi});
    std::vector<Interval> next;
    for (std::size_t layer = 1; layer <= k; ++layer) {
        if (layer > 1) {
            for (Interval& iv : cur) {
                double alo, ahi;
                act.range_on(iv.lo, iv.hi, alo, ahi);
                iv = {next_down(alo), next_up(ahi)};
            }
        }
        next.assign(arch.width(layer), Interval{});
        for (std::size_t i = 1; i <= arch.width(layer); ++i) {
            double b = theta[arch.bias_index(layer, i)];
            Interval acc{b, b};
            const std::size_t w0 = arch.weight_index(layer, i, 1);
            for (std::size_t j = 0; j < arch.width(layer - 1); ++j)
                acc = interval_add(acc, interval_scale(theta[w0 + j], cur[j]));
            next[i - 1] = acc;
        }
        cur.swap(next);
    }
    return cur;
}

std::size_t first_interval_certified_layer(const Architecture& arch,
                                           std::span<const double> theta,
                                           const ActivationFamily& act, Box box) {
    const std::size_t L = arch.depth();
    std::vector<Interval> cur(arch.width(0), Interval{box.lo, box.hi});
    std::vector<Interval> next;
    for (std::size_t layer = 1; layer + 1 <= L; ++layer) {
        if (layer > 1) {
            for (Interval& iv : cur) {
                double alo, ahi;
                act.range_on(iv.lo, iv.hi, alo, ahi);
                iv = {next_down(alo), next_up(ahi)};
            }
        }
        next.assign(arch.width(layer), Interval{});
        for (std::size_t i = 1; i <= arch.width(layer); ++i) {
            double b = theta[arch.bias_index(layer, i)];
            Interval acc{b, b};
            const std::size_t w0 = arch.weight_index(layer, i, 1);
            for (std::size_t j = 0; j < arch.width(layer - 1); ++j)
                acc = interval_add(acc, interval_scale(theta[w0 + j], cur[j]));
            next[i - 1] = acc;
        }
        cur.swap(next);
        if (layer >= 2) {
            bool all_inside = true;
            for (const Interval& iv : cur)
                if (!inside_flat(iv, act)) {
                    all_inside = false;
                    break;
                }
            if (all_inside) return layer;
        }
    }
    return 0;
}

LayerVerdict certify_layer_inactive(const Architecture& arch,
                                    std::span<const double> theta,
                                    std::size_t k, const ActivationFamily& act,
                                    Box box, std::size_t falsifier_samples,
                                    std::uint64_t falsifier_seed) {
    std::vector<Interval> bounds = layer_preactivation_bounds(arch, theta, act, k, box);
    bool all_inside = true;
    for (const Interval& iv : bounds)
        if (!inside_flat(iv, act)) {
            all_inside = false;
            break;
        }
    if (all_inside) return LayerVerdict::CertifiedInactive;

    if (falsifier_samples > 0) {
        CounterRng rng(falsifier_seed, 0xfa15);
        std::vector<double> x(arch.width(0));
        for (std::size_t s = 0; s < falsifier_samples; ++s) {
            if (s < (std::size_t{1} << std::min<std::size_t>(arch.width(0), 16))) {
                // corners first: affine pieces attain extrema there
                for (std::size_t j = 0; j < x.size(); ++j)
                    x[j] = (s >> j) & 1 ? box.hi : box.lo;
            } else {
                for (double& xj : x) xj = rng.uniform(box.lo, box.hi);
            }
            ForwardTrace t = forward(arch, theta, act, x);
            for (double pre : t.layer(k))
                if (!act.in_flat_region(pre)) return LayerVerdict::CertifiedActive;
        }
    }
    return LayerVerdict::Unknown;
}

double witness_rho(const Architecture& arch, double inf_bound) {
    if (inf_bound >= 0.0) return -kInf;
    if (arch.depth() == 2) return 0.0;
    std::size_t wmax = 1;
    for (std::size_t i = 1; i + 2 <= arch.depth(); ++i)
        wmax = std::max(wmax, arch.width(i));
    return 1.0 / (inf_bound * static_cast<double>(wmax));
}

bool witness_layer_dead(const Architecture& arch, std::span<const double> theta,
                        std::size_t k, double rho, double threshold,
                        double inf_bound) {
    const double bias_cap = threshold - (inf_bound < 0.0 ? 1.0 : 0.0);
    for (std::size_t i = 1; i <= arch.width(k); ++i) {
        for (std::size_t j = 1; j <= arch.width(k - 1); ++j) {
            const double w = theta[arch.weight_index(k, i, j)];
            if (!(w > rho && w < 0.0)) return false;
        }
        if (!(theta[arch.bias_index(k, i)] < bias_cap)) return false;
    }
    return true;
}

} // namespace nonconv
