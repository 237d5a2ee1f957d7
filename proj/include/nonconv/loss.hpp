#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nonconv {

// Loss on (prediction, target) pairs.  Either the plain squared
// Euclidean distance or psi(||pred - target||^2) for a strictly
// increasing C^1 reshaping psi.  grad_pred is the gradient in the
// prediction argument.
class Loss {
public:
    enum class Kind { Mse, Psi };

    static Loss mse() { return Loss(Kind::Mse, "mse", {}, {}); }

    static Loss psi_loss(std::string name, std::function<double(double)> psi,
                         std::function<double(double)> dpsi) {
        return Loss(Kind::Psi, std::move(name), std::move(psi), std::move(dpsi));
    }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    double value(std::span<const double> pred, std::span<const double> target) const {
        double s = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            double d = pred[i] - target[i];
            s += d * d;
        }
        return kind_ == Kind::Mse ? s : psi_(s);
    }

    void grad_pred(std::span<const double> pred, std::span<const double> target,
                   std::span<double> out) const {
        double scale = 2.0;
        if (kind_ == Kind::Psi) {
            double s = 0.0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                double d = pred[i] - target[i];
                s += d * d;
            }
            scale = 2.0 * dpsi_(s);
        }
        for (std::size_t i = 0; i < pred.size(); ++i)
            out[i] = scale * (pred[i] - target[i]);
    }

    double psi(double x) const { return kind_ == Kind::Mse ? x : psi_(x); }
    double dpsi(double x) const { return kind_ == Kind::Mse ? 1.0 : dpsi_(x); }

private:
    Loss(Kind kind, std::string name, std::function<double(double)> psi,
         std::function<double(double)> dpsi)
        : kind_(kind), name_(std::move(name)), psi_(std::move(psi)), dpsi_(std::move(dpsi)) {}

    Kind kind_;
    std::string name_;
    std::function<double(double)> psi_;
    std::function<double(double)> dpsi_;
};

// true iff psi is strictly increasing along the grid and x |-> psi'(x) sqrt(x)
// is strictly increasing along the grid (the shape condition under which
// constant predictions are provably suboptimal for non-degenerate targets)
bool psi_condition_check(const std::function<double(double)>& psi,
                         const std::function<double(double)>& dpsi,
                         std::span<const double> grid);

} // namespace nonconv
