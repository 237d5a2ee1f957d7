#include "nonconv/data.hpp"

#include <cmath>
#include <stdexcept>

#include "nonconv/ann.hpp"

namespace nonconv {

DataDistribution DataDistribution::discrete(std::vector<Atom> atoms, double box_lo,
                                            double box_hi) {
    if (atoms.empty()) throw std::invalid_argument("discrete distribution needs atoms");
    double total = 0.0;
    for (const Atom& a : atoms) {
        if (a.p < 0.0) throw std::invalid_argument("atom probability must be >= 0");
        if (a.x.size() != atoms[0].x.size() || a.y.size() != atoms[0].y.size())
            throw std::invalid_argument("atom dimensions must agree");
        for (double xi : a.x)
            if (xi < box_lo || xi > box_hi)
                throw std::invalid_argument("atom input outside the box");
        total += a.p;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("atom probabilities must sum to 1");

    DataDistribution d;
    d.input_dim_ = atoms[0].x.size();
    d.output_dim_ = atoms[0].y.size();
    d.atoms_ = std::move(atoms);
    d.box_lo_ = box_lo;
    d.box_hi_ = box_hi;
    return d;
}

DataDistribution DataDistribution::teacher(const std::vector<std::size_t>& widths,
                                           const ActivationFamily& act,
                                           double noise_sigma, std::uint64_t seed,
                                           double box_lo, double box_hi) {
    DataDistribution d;
    d.teacher_arch_.emplace(widths);
    d.teacher_act_ = act;
    d.input_dim_ = d.teacher_arch_->input_dim();
    d.output_dim_ = d.teacher_arch_->output_dim();
    d.box_lo_ = box_lo;
    d.box_hi_ = box_hi;
    d.noise_sigma_ = noise_sigma;
    CounterRng rng(seed, 0x7e4c9e5u);
    d.teacher_theta_.resize(d.teacher_arch_->param_count());
    for (double& t : d.teacher_theta_) t = rng.normal();
    return d;
}

DataDistribution DataDistribution::affine(std::vector<double> slope, double intercept,
                                          double noise_sigma, double box_lo,
                                          double box_hi) {
    DataDistribution d;
    d.is_affine_ = true;
    d.input_dim_ = slope.size();
    d.output_dim_ = 1;
    d.slope_ = std::move(slope);
    d.intercept_ = intercept;
    d.noise_sigma_ = noise_sigma;
    d.box_lo_ = box_lo;
    d.box_hi_ = box_hi;
    return d;
}

Sample DataDistribution::sample(CounterRng& rng) const {
    Sample s;
    if (!atoms_.empty()) {
        double u = rng.uniform();
        double acc = 0.0;
        for (const Atom& a : atoms_) {
            acc += a.p;
            if (u < acc || &a == &atoms_.back()) {
                s.x = a.x;
                s.y = a.y;
                return s;
            }
        }
    }
    s.x.resize(input_dim_);
    for (double& xi : s.x) xi = rng.uniform(box_lo_, box_hi_);
    if (teacher_arch_) {
        ForwardTrace t = forward(*teacher_arch_, teacher_theta_, *teacher_act_, s.x);
        s.y = t.output();
    } else if (is_affine_) {
        double y = intercept_;
        for (std::size_t j = 0; j < slope_.size(); ++j) y += slope_[j] * s.x[j];
        s.y = {y};
    } else {
        throw std::logic_error("distribution has no generator");
    }
    if (noise_sigma_ > 0.0)
        for (double& yi : s.y) yi += noise_sigma_ * rng.normal();
    return s;
}

} // namespace nonconv
