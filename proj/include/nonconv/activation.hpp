#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace nonconv {

// Activation together with everything the dead-layer analysis needs:
// the generalized derivative (defined on all of R, equal to the
// classical derivative off the kink set), the kink set itself, the
// flat interval (flat_lo, flat_hi) on which the generalized derivative
// vanishes, a lower bound inf_bound on the activation values, and a
// C^1 approximation sequence indexed by r that agrees with the
// activation (value and derivative) outside a window of radius 1/r
// around each kink.
//
// The approximations are eventually exact at every fixed point: for
// any x there is an R with moll_value(r, x) == value(x) and
// moll_deriv(r, x) == gen_deriv(x) for all r >= R.  Kink points are
// exact for every r (value matches, derivative is the generalized one).
class ActivationFamily {
public:
    enum class Kind { Relu, Clip, Repu, Custom };

    static ActivationFamily relu();
    static ActivationFamily clip(double u, double v);
    static ActivationFamily repu(int p);

    // Custom piecewise-monotone activation.  kinks must list every
    // non-differentiability point; the function must be monotone
    // between consecutive kinks (the interval image computation relies
    // on this).
    static ActivationFamily custom(std::string name,
                                   std::function<double(double)> value,
                                   std::function<double(double)> gen_deriv,
                                   std::vector<double> kinks,
                                   double flat_lo, double flat_hi,
                                   double inf_bound);

    double value(double x) const;
    double gen_deriv(double x) const;

    // C^1 approximation at level r >= 1; r == 0 means the activation itself.
    double moll_value(int r, double x) const;
    double moll_deriv(int r, double x) const;

    const std::vector<double>& exception_set() const { return kinks_; }
    double flat_lo() const { return flat_lo_; } // may be -infinity
    double flat_hi() const { return flat_hi_; }
    double inf_bound() const { return inf_bound_; }
    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    // min(S u {flat_hi}), the default inactivity threshold
    double default_threshold() const {
        double g = flat_hi_;
        for (double s : kinks_) g = std::min(g, s);
        return g;
    }

    // true iff x lies in the flat region minus the kink set
    bool in_flat_region(double x) const {
        if (!(x > flat_lo_ && x < flat_hi_)) return false;
        for (double s : kinks_)
            if (x == s) return false;
        return true;
    }

    // [min, max] of the activation over [lo, hi], by evaluating at the
    // interval endpoints and at every kink inside (exact for functions
    // monotone between kinks)
    void range_on(double lo, double hi, double& out_lo, double& out_hi) const;

private:
    ActivationFamily() = default;

    Kind kind_ = Kind::Custom;
    std::string name_;
    std::vector<double> kinks_;
    double flat_lo_ = -std::numeric_limits<double>::infinity();
    double flat_hi_ = 0.0;
    double inf_bound_ = 0.0;
    double clip_lo_ = 0.0, clip_hi_ = 0.0; // clip parameters
    int power_ = 2;                        // repu parameter
    std::function<double(double)> fn_;
    std::function<double(double)> dfn_;
};

} // namespace nonconv
