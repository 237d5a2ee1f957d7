#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nonconv/activation.hpp"
#include "nonconv/arch.hpp"
#include "nonconv/rng.hpp"

namespace nonconv {

struct Atom {
    std::vector<double> x;
    std::vector<double> y;
    double p = 0.0;
};

struct Sample {
    std::vector<double> x;
    std::vector<double> y;
};

// Input/output data distribution.  Inputs always live in the box
// [lo, hi]^dim.  Discrete distributions expose their atoms so risks
// can be computed exactly; generator-backed distributions (teacher
// network, affine target) only sample.
class DataDistribution {
public:
    static DataDistribution discrete(std::vector<Atom> atoms, double box_lo, double box_hi);

    // y = N_teacher(x) + noise_sigma * N(0, I); teacher parameters are
    // drawn standard normal from the given seed at construction
    static DataDistribution teacher(const std::vector<std::size_t>& widths,
                                    const ActivationFamily& act, double noise_sigma,
                                    std::uint64_t seed, double box_lo, double box_hi);

    // scalar target y = intercept + slope . x + noise_sigma * N(0,1)
    static DataDistribution affine(std::vector<double> slope, double intercept,
                                   double noise_sigma, double box_lo, double box_hi);

    Sample sample(CounterRng& rng) const;

    bool has_exact_support() const { return !atoms_.empty(); }
    const std::vector<Atom>& atoms() const { return atoms_; }

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }
    double box_lo() const { return box_lo_; }
    double box_hi() const { return box_hi_; }
    double noise_sigma() const { return noise_sigma_; }

    const std::vector<double>* teacher_theta() const {
        return teacher_theta_.empty() ? nullptr : &teacher_theta_;
    }

private:
    DataDistribution() = default;

    std::vector<Atom> atoms_;
    double box_lo_ = 0.0, box_hi_ = 1.0;
    std::size_t input_dim_ = 1, output_dim_ = 1;
    double noise_sigma_ = 0.0;

    // teacher
    std::optional<Architecture> teacher_arch_;
    std::optional<ActivationFamily> teacher_act_;
    std::vector<double> teacher_theta_;

    // affine
    std::vector<double> slope_;
    double intercept_ = 0.0;
    bool is_affine_ = false;
};

} // namespace nonconv
