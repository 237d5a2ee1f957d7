#include "nonconv/risk.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace nonconv {

double empirical_risk(const Architecture& arch, std::span<const double> theta,
                      const ActivationFamily& act, const Loss& loss,
                      std::span<const Sample> batch, int r) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    double acc = 0.0;
    for (const Sample& s : batch) {
        ForwardTrace t = forward(arch, theta, act, s.x, r);
        acc += loss.value(t.output(), s.y);
    }
    return acc / static_cast<double>(batch.size());
}

RiskEstimate true_risk(const Architecture& arch, std::span<const double> theta,
                       const ActivationFamily& act, const Loss& loss,
                       const DataDistribution& dist, std::size_t n_samples,
                       std::uint64_t seed) {
    RiskEstimate est;
    if (dist.has_exact_support()) {
        double acc = 0.0;
        for (const Atom& a : dist.atoms()) {
            ForwardTrace t = forward(arch, theta, act, a.x);
            acc += a.p * loss.value(t.output(), a.y);
        }
        est.value = acc;
        est.exact = true;
        return est;
    }
    if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
    CounterRng rng(seed, 0x51a9u);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        Sample s = dist.sample(rng);
        ForwardTrace t = forward(arch, theta, act, s.x);
        double v = loss.value(t.output(), s.y);
        sum += v;
        sumsq += v * v;
    }
    double n = static_cast<double>(n_samples);
    est.value = sum / n;
    double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
    return est;
}

ConstantRisk best_constant_risk(const DataDistribution& dist, const Loss& loss) {
    if (!dist.has_exact_support())
        throw std::invalid_argument("best constant risk needs a discrete distribution");
    const auto& atoms = dist.atoms();
    const std::size_t dy = dist.output_dim();

    ConstantRisk out;
    if (loss.kind() == Loss::Kind::Mse) {
        out.z.assign(dy, 0.0);
        for (const Atom& a : atoms)
            for (std::size_t i = 0; i < dy; ++i) out.z[i] += a.p * a.y[i];
        double v = 0.0;
        for (const Atom& a : atoms) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < dy; ++i) {
                double d = out.z[i] - a.y[i];
                d2 += d * d;
            }
            v += a.p * d2;
        }
        out.value = v;
        return out;
    }

    if (dy != 1)
        throw std::invalid_argument("psi loss constant risk supports 1-d output only");

    auto risk_at = [&](double z) {
        double v = 0.0;
        for (const Atom& a : atoms) {
            double d = z - a.y[0];
            v += a.p * loss.psi(d * d);
        }
        return v;
    };

    double lo = atoms[0].y[0], hi = atoms[0].y[0];
    for (const Atom& a : atoms) {
        lo = std::min(lo, a.y[0]);
        hi = std::max(hi, a.y[0]);
    }
    lo -= 1.0;
    hi += 1.0;

    const double gr = 0.6180339887498948482;
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = risk_at(c), fd = risk_at(d);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = risk_at(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = risk_at(d);
        }
    }
    double z = 0.5 * (lo + hi);
    out.z = {z};
    out.value = risk_at(z);
    return out;
}

bool check_target_nondegeneracy(const DataDistribution& dist) {
    if (!dist.has_exact_support())
        throw std::invalid_argument("nondegeneracy check needs a discrete distribution");
    const auto& atoms = dist.atoms();
    const std::size_t dy = dist.output_dim();

    std::vector<double> global(dy, 0.0);
    for (const Atom& a : atoms)
        for (std::size_t i = 0; i < dy; ++i) global[i] += a.p * a.y[i];

    // group atoms by identical x
    std::map<std::vector<double>, std::pair<std::vector<double>, double>> groups;
    for (const Atom& a : atoms) {
        auto& g = groups[a.x];
        if (g.first.empty()) g.first.assign(dy, 0.0);
        for (std::size_t i = 0; i < dy; ++i) g.first[i] += a.p * a.y[i];
        g.second += a.p;
    }
    for (const auto& [x, g] : groups) {
        if (g.second <= 0.0) continue;
        for (std::size_t i = 0; i < dy; ++i) {
            double cond = g.first[i] / g.second;
            if (std::fabs(cond - global[i]) > 1e-12) return true;
        }
    }
    return false;
}

bool psi_condition_check(const std::function<double(double)>& psi,
                         const std::function<double(double)>& dpsi,
                         std::span<const double> grid) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1])) return false;
        if (!(psi(grid[i]) < psi(grid[i + 1]))) return false;
        double gi = dpsi(grid[i]) * std::sqrt(grid[i]);
        double gj = dpsi(grid[i + 1]) * std::sqrt(grid[i + 1]);
        if (!(gi < gj)) return false;
    }
    return true;
}

} // namespace nonconv
