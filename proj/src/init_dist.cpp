#include "nonconv/init_dist.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nonconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rational Chebyshev coefficients for erf/erfc (Cody, Math. Comp. 23, 1969).
constexpr double A[5] = {3.16112374387056560e0, 1.13864154151050156e2,
                         3.77485237685302021e2, 3.20937758913846947e3,
                         1.85777706184603153e-1};
constexpr double B[4] = {2.36012909523441209e1, 2.44024637934444173e2,
                         1.28261652607737228e3, 2.84423683343917062e3};
constexpr double C[9] = {5.64188496988670089e-1, 8.88314979438837594e0,
                         6.61191906371416295e1,  2.98635138197400131e2,
                         8.81952221241769090e2,  1.71204761263407058e3,
                         2.05107837782607147e3,  1.23033935479799725e3,
                         2.15311535474403846e-8};
constexpr double D[8] = {1.57449261107098347e1, 1.17693950891312499e2,
                         5.37181101862009858e2, 1.62138957456669019e3,
                         3.29079923573345963e3, 4.36261909014324716e3,
                         3.43936767414372164e3, 1.23033935480374942e3};
constexpr double P[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                         1.25781726111229246e-1, 1.60837851487422766e-2,
                         6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr double Q[5] = {2.56852019228982242e0, 1.87295284992346047e0,
                         5.27905102951428412e-1, 6.05183413124413191e-2,
                         2.33520497626869185e-3};

constexpr double kInvSqrtPi = 5.6418958354775628695e-1;

double erf_small(double x) {
    // |x| <= 0.46875
    double z = x * x;
    double num = A[4] * z;
    double den = z;
    for (int i = 0; i < 3; ++i) {
        num = (num + A[i]) * z;
        den = (den + B[i]) * z;
    }
    return x * (num + A[3]) / (den + B[3]);
}

// exp(-y^2) with the argument split to preserve accuracy of the tail
double exp_msq(double y) {
    double ysq = std::trunc(y * 16.0) / 16.0;
    double del = (y - ysq) * (y + ysq);
    return std::exp(-ysq * ysq) * std::exp(-del);
}

double erfc_mid(double y) {
    // 0.46875 < y <= 4
    double num = C[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
        num = (num + C[i]) * y;
        den = (den + D[i]) * y;
    }
    return exp_msq(y) * (num + C[7]) / (den + D[7]);
}

double erfc_tail(double y) {
    // y > 4
    double z = 1.0 / (y * y);
    double num = P[5] * z;
    double den = z;
    for (int i = 0; i < 4; ++i) {
        num = (num + P[i]) * z;
        den = (den + Q[i]) * z;
    }
    double r = z * (num + P[4]) / (den + Q[4]);
    r = (kInvSqrtPi - r) / y;
    return exp_msq(y) * r;
}

} // namespace

double erfc_rational(double x) {
    double y = std::fabs(x);
    double res;
    if (y <= 0.46875)
        res = 1.0 - erf_small(x); // handles the sign directly
    else if (y <= 4.0)
        res = x > 0.0 ? erfc_mid(y) : 2.0 - erfc_mid(y);
    else if (y < 26.6)
        res = x > 0.0 ? erfc_tail(y) : 2.0 - erfc_tail(y);
    else
        res = x > 0.0 ? 0.0 : 2.0;
    return res;
}

double normal_cdf(double x) { return 0.5 * erfc_rational(-x * 7.071067811865475244e-1); }

double normal_pdf(double x) {
    return 3.9894228040143267794e-1 * std::exp(-0.5 * x * x);
}

InitDistribution InitDistribution::normal(double sigma, double mu) {
    if (!(sigma > 0.0)) throw std::invalid_argument("normal init needs sigma > 0");
    InitDistribution d;
    d.kind_ = Kind::Normal;
    d.sigma_ = sigma;
    d.mu_ = mu;
    return d;
}

InitDistribution InitDistribution::uniform(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("uniform init needs lo < hi");
    InitDistribution d;
    d.kind_ = Kind::Uniform;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
}

InitDistribution InitDistribution::point(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("point init needs values");
    InitDistribution d;
    d.kind_ = Kind::Point;
    d.values_ = std::move(values);
    return d;
}

InitDistribution InitDistribution::with_scales(std::vector<double> c) const {
    for (double ci : c)
        if (!(ci > 0.0)) throw std::invalid_argument("scales must be positive");
    InitDistribution d = *this;
    d.scales_ = std::move(c);
    return d;
}

double InitDistribution::base_cdf(double x) const {
    switch (kind_) {
    case Kind::Normal:
        return normal_cdf(x);
    case Kind::Uniform:
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        return (x - lo_) / (hi_ - lo_);
    case Kind::Point:
        return x > values_[0] ? 1.0 : 0.0;
    }
    return 0.0;
}

double InitDistribution::base_density_inf(double lo, double hi) const {
    switch (kind_) {
    case Kind::Normal: {
        // density is unimodal at 0: the infimum sits at the endpoint
        // farther from the mode
        double far = std::fabs(lo) > std::fabs(hi) ? lo : hi;
        return normal_pdf(far);
    }
    case Kind::Uniform: {
        if (lo < lo_ || hi > hi_) return 0.0;
        return 1.0 / (hi_ - lo_);
    }
    case Kind::Point:
        return 0.0;
    }
    return 0.0;
}

double InitDistribution::scale_bound() const {
    double base = 1.0;
    if (kind_ == Kind::Normal) base = sigma_;
    double worst = base + 1.0 / base;
    for (double c : scales_) {
        double eff = base * c;
        worst = std::max(worst, eff + 1.0 / eff);
    }
    return worst;
}

double InitDistribution::prob_lt(std::size_t i, double x) const {
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    const double c = coord_scale(i);
    switch (kind_) {
    case Kind::Normal:
        // P((Z - mu)/(sigma c) < x) = Phi(sigma c x + mu)
        return normal_cdf(sigma_ * c * x + mu_);
    case Kind::Uniform: {
        double lo = lo_ / c, hi = hi_ / c;
        if (x <= lo) return 0.0;
        if (x >= hi) return 1.0;
        return (x - lo) / (hi - lo);
    }
    case Kind::Point:
        return values_[i % values_.size()] < x ? 1.0 : 0.0;
    }
    return 0.0;
}

double InitDistribution::prob_open(std::size_t i, double a, double b) const {
    if (!(a < b)) return 0.0;
    if (kind_ == Kind::Point) {
        double v = values_[i % values_.size()];
        return (a < v && v < b) ? 1.0 : 0.0;
    }
    return std::max(0.0, prob_lt(i, b) - prob_lt(i, a));
}

double InitDistribution::prob_abs_lt(std::size_t i, double m) const {
    if (!(m > 0.0)) return 0.0;
    return prob_open(i, -m, m);
}

double InitDistribution::sample(std::size_t i, CounterRng& rng) const {
    const double c = coord_scale(i);
    switch (kind_) {
    case Kind::Normal:
        return (rng.normal() - mu_) / (sigma_ * c);
    case Kind::Uniform:
        return rng.uniform(lo_ / c, hi_ / c);
    case Kind::Point:
        return values_[i % values_.size()];
    }
    return 0.0;
}

std::vector<double> InitDistribution::sample_vector(std::size_t dim,
                                                    CounterRng& rng) const {
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = sample(i, rng);
    return out;
}

} // namespace nonconv
