#pragma once

#include <cstdint>
#include <vector>

#include "nonconv/rng.hpp"

namespace nonconv {

// Standard normal distribution function to absolute error below 1e-15,
// via Cody-style rational Chebyshev approximations of erf/erfc
// (three-regime rational fits with the split-exponential tail scaling).
double normal_cdf(double x);
double normal_pdf(double x);
double erfc_rational(double x);

// Per-coordinate initialization law with distribution-function access.
// Coordinates are independent by construction.  An optional scale
// vector c turns a base law B into coordinate laws with
// P(theta_i < x) = F_B(c_i * x).
class InitDistribution {
public:
    enum class Kind { Normal, Uniform, Point };

    // theta = (Z - mu) / sigma with Z standard normal, so that
    // sigma * theta + mu is standard normal; sigma > 0
    static InitDistribution normal(double sigma, double mu);
    static InitDistribution standard_normal() { return normal(1.0, 0.0); }
    static InitDistribution uniform(double lo, double hi);
    // deterministic init; values are recycled if shorter than the
    // sampled dimension
    static InitDistribution point(std::vector<double> values);

    InitDistribution with_scales(std::vector<double> c) const;

    Kind kind() const { return kind_; }

    double prob_lt(std::size_t i, double x) const;          // P(theta_i < x)
    double prob_open(std::size_t i, double a, double b) const; // P(a < theta_i < b)
    double prob_abs_lt(std::size_t i, double m) const;      // P(|theta_i| < m)

    double sample(std::size_t i, CounterRng& rng) const;
    std::vector<double> sample_vector(std::size_t dim, CounterRng& rng) const;

    // base-law quantities used by the depth-asymptotics admissibility check
    double base_cdf(double x) const;
    double base_density_inf(double lo, double hi) const;
    // sup over coordinates of c_i + 1/c_i (2 for unscaled laws)
    double scale_bound() const;

    bool is_continuous() const { return kind_ != Kind::Point; }

private:
    InitDistribution() = default;
    double coord_scale(std::size_t i) const {
        return scales_.empty() ? 1.0 : scales_[i % scales_.size()];
    }

    Kind kind_ = Kind::Normal;
    double sigma_ = 1.0, mu_ = 0.0; // normal
    double lo_ = 0.0, hi_ = 1.0;    // uniform
    std::vector<double> values_;    // point
    std::vector<double> scales_;
};

} // namespace nonconv
