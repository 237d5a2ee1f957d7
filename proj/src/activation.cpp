#include "nonconv/activation.hpp"

#include <cmath>
#include <stdexcept>

namespace nonconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// C^1 ramp spline on [0, h]: q(0)=0, q'(0)=0, q(h)=h, q'(h)=1,
// monotone nondecreasing on [0, h].
inline double ramp_spline(double t, double h) {
    return t * t * (2.0 * h - t) / (h * h);
}
inline double ramp_spline_deriv(double t, double h) {
    return t * (4.0 * h - 3.0 * t) / (h * h);
}

} // namespace

ActivationFamily ActivationFamily::relu() {
    ActivationFamily a;
    a.kind_ = Kind::Relu;
    a.name_ = "relu";
    a.kinks_ = {0.0};
    a.flat_lo_ = -kInf;
    a.flat_hi_ = 0.0;
    a.inf_bound_ = 0.0;
    return a;
}

ActivationFamily ActivationFamily::clip(double u, double v) {
    if (!(u < v)) throw std::invalid_argument("clip requires u < v");
    ActivationFamily a;
    a.kind_ = Kind::Clip;
    a.name_ = "clip";
    a.kinks_ = {u, v};
    a.flat_lo_ = -kInf;
    a.flat_hi_ = u;
    a.inf_bound_ = u;
    a.clip_lo_ = u;
    a.clip_hi_ = v;
    return a;
}

ActivationFamily ActivationFamily::repu(int p) {
    if (p < 2) throw std::invalid_argument("repu requires power >= 2");
    ActivationFamily a;
    a.kind_ = Kind::Repu;
    a.name_ = "repu";
    a.kinks_ = {};
    a.flat_lo_ = -kInf;
    a.flat_hi_ = 0.0;
    a.inf_bound_ = 0.0;
    a.power_ = p;
    return a;
}

ActivationFamily ActivationFamily::custom(std::string name,
                                          std::function<double(double)> value,
                                          std::function<double(double)> gen_deriv,
                                          std::vector<double> kinks,
                                          double flat_lo, double flat_hi,
                                          double inf_bound) {
    ActivationFamily a;
    a.kind_ = Kind::Custom;
    a.name_ = std::move(name);
    a.fn_ = std::move(value);
    a.dfn_ = std::move(gen_deriv);
    a.kinks_ = std::move(kinks);
    std::sort(a.kinks_.begin(), a.kinks_.end());
    a.flat_lo_ = flat_lo;
    a.flat_hi_ = flat_hi;
    a.inf_bound_ = inf_bound;
    return a;
}

double ActivationFamily::value(double x) const {
    switch (kind_) {
    case Kind::Relu:
        return x > 0.0 ? x : 0.0;
    case Kind::Clip:
        return std::max(clip_lo_, std::min(x, clip_hi_));
    case Kind::Repu:
        return x > 0.0 ? std::pow(x, power_) : 0.0;
    case Kind::Custom:
        return fn_(x);
    }
    return 0.0;
}

double ActivationFamily::gen_deriv(double x) const {
    switch (kind_) {
    case Kind::Relu:
        // value 0 at the kink, matching the framework convention
        return x > 0.0 ? 1.0 : 0.0;
    case Kind::Clip:
        return (x > clip_lo_ && x < clip_hi_) ? 1.0 : 0.0;
    case Kind::Repu:
        return x > 0.0 ? power_ * std::pow(x, power_ - 1) : 0.0;
    case Kind::Custom:
        return dfn_(x);
    }
    return 0.0;
}

double ActivationFamily::moll_value(int r, double x) const {
    if (r <= 0) return value(x);
    switch (kind_) {
    case Kind::Relu: {
        double h = 1.0 / static_cast<double>(r);
        if (x <= 0.0) return 0.0;
        if (x >= h) return x;
        return ramp_spline(x, h);
    }
    case Kind::Clip: {
        double h = std::min(1.0 / static_cast<double>(r), 0.5 * (clip_hi_ - clip_lo_));
        if (x <= clip_lo_) return clip_lo_;
        if (x < clip_lo_ + h) return clip_lo_ + ramp_spline(x - clip_lo_, h);
        if (x <= clip_hi_ - h) return x;
        if (x < clip_hi_) return clip_hi_ - ramp_spline(clip_hi_ - x, h);
        return clip_hi_;
    }
    case Kind::Repu:
        return value(x); // already C^1
    case Kind::Custom:
        return value(x);
    }
    return 0.0;
}

double ActivationFamily::moll_deriv(int r, double x) const {
    if (r <= 0) return gen_deriv(x);
    switch (kind_) {
    case Kind::Relu: {
        double h = 1.0 / static_cast<double>(r);
        if (x <= 0.0) return 0.0;
        if (x >= h) return 1.0;
        return ramp_spline_deriv(x, h);
    }
    case Kind::Clip: {
        double h = std::min(1.0 / static_cast<double>(r), 0.5 * (clip_hi_ - clip_lo_));
        if (x <= clip_lo_) return 0.0;
        if (x < clip_lo_ + h) return ramp_spline_deriv(x - clip_lo_, h);
        if (x <= clip_hi_ - h) return 1.0;
        if (x < clip_hi_) return ramp_spline_deriv(clip_hi_ - x, h);
        return 0.0;
    }
    case Kind::Repu:
        return gen_deriv(x);
    case Kind::Custom:
        return gen_deriv(x);
    }
    return 0.0;
}

void ActivationFamily::range_on(double lo, double hi, double& out_lo, double& out_hi) const {
    double v0 = value(lo), v1 = value(hi);
    out_lo = std::min(v0, v1);
    out_hi = std::max(v0, v1);
    for (double s : kinks_) {
        if (s > lo && s < hi) {
            double vs = value(s);
            out_lo = std::min(out_lo, vs);
            out_hi = std::max(out_hi, vs);
        }
    }
}

} // namespace nonconv
