#include "nonconv/optimizers.hpp"

#include <array>
#include <cmath>
#include <cstring>

#include "nonconv/rng.hpp"

namespace nonconv {

namespace {
constexpr std::array<Method, 11> kShipped = {
    Method::Sgd,     Method::Momentum, Method::Nesterov, Method::Adagrad,
    Method::Rmsprop, Method::Adadelta, Method::Adam,     Method::Adamax,
    Method::Amsgrad, Method::Nadam,    Method::Nadamax,
};
constexpr std::array<Method, 9> kCore = {
    Method::Sgd,     Method::Momentum, Method::Nesterov, Method::Adagrad,
    Method::Rmsprop, Method::Adadelta, Method::Adam,     Method::Adamax,
    Method::Amsgrad,
};
} // namespace

std::span<const Method> shipped_methods() { return kShipped; }
std::span<const Method> core_methods() { return kCore; }

std::string method_name(Method m) {
    switch (m) {
    case Method::Sgd: return "sgd";
    case Method::Momentum: return "momentum";
    case Method::Nesterov: return "nesterov";
    case Method::Adagrad: return "adagrad";
    case Method::Rmsprop: return "rmsprop";
    case Method::Adadelta: return "adadelta";
    case Method::Adam: return "adam";
    case Method::Adamax: return "adamax";
    case Method::Amsgrad: return "amsgrad";
    case Method::Nadam: return "nadam";
    case Method::Nadamax: return "nadamax";
    case Method::DriftControl: return "drift-control";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    for (Method m : kShipped)
        if (method_name(m) == name) return m;
    if (name == "drift-control") return Method::DriftControl;
    throw std::invalid_argument("unknown optimizer: " + name);
}

OptimizerState::OptimizerState(Method method, Hyper hyper, Schedule schedule,
                               std::size_t dim)
    : method_(method), hyper_(hyper), schedule_(std::move(schedule)) {
    m_.assign(dim, 0.0);
    v_.assign(dim, 0.0);
    if (method == Method::Amsgrad) vmax_.assign(dim, 0.0);
    if (method == Method::Adadelta) dacc_.assign(dim, 0.0);
}

void OptimizerState::step(std::span<double> theta, std::span<const double> grad) {
    if (theta.size() != m_.size() || grad.size() != m_.size())
        throw std::invalid_argument("dimension mismatch in optimizer step");
    ++n_;
    const double g = schedule_.gamma(n_);
    const double b1 = hyper_.beta1;
    const double b2 = hyper_.beta2;
    const double eps = hyper_.eps_stab;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(n_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(n_));

    switch (method_) {
    case Method::Sgd:
        for (std::size_t i = 0; i < theta.size(); ++i)
            theta[i] -= g * grad[i];
        break;
    case Method::Momentum:
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = b1 * m_[i] + grad[i];
            theta[i] -= g * m_[i];
        }
        break;
    case Method::Nesterov:
        // lookahead form: v <- b1 v + grad, step along grad + b1 v
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = b1 * m_[i] + grad[i];
            theta[i] -= g * (grad[i] + b1 * m_[i]);
        }
        break;
    case Method::Adagrad:
        for (std::size_t i = 0; i < theta.size(); ++i) {
            v_[i] += grad[i] * grad[i];
            theta[i] -= g * grad[i] / (std::sqrt(v_[i]) + eps);
        }
        break;
    case Method::Rmsprop:
        for (std::size_t i = 0; i < theta.size(); ++i) {
            v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
            theta[i] -= g * grad[i] / (std::sqrt(v_[i]) + eps);
        }
        break;
    case Method::Adadelta:
        for (std::size_t i = 0; i < theta.size(); ++i) {
            v_[i] = hyper_.rho * v_[i] + (1.0 - hyper_.rho) * grad[i] * grad[i];
            double upd = -std::sqrt(dacc_[i] + eps) / std::sqrt(v_[i] + eps) * grad[i];
            dacc_[i] = hyper_.rho * dacc_[i] + (1.0 - hyper_.rho) * upd * upd;
            theta[i] += g * upd;
        }
        break;
    case Method::Adam:
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
            v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
            theta[i] -= g * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps);
        }
        break;
    case Method::Adamax:
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
            v_[i] = std::max(b2 * v_[i], std::fabs(grad[i]));
            theta[i] -= g * (m_[i] / bc1) / (v_[i] + eps);
        }
        break;
    case Method::Amsgrad:
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
            v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
            vmax_[i] = std::max(vmax_[i], v_[i] / bc2);
            theta[i] -= g * (m_[i] / bc1) / (std::sqrt(vmax_[i]) + eps);
        }
        break;
    case Method::Nadam:
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
            v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
            double mhat = b1 * (m_[i] / bc1) + (1.0 - b1) / bc1 * grad[i];
            theta[i] -= g * mhat / (std::sqrt(v_[i] / bc2) + eps);
        }
        break;
    case Method::Nadamax:
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
            v_[i] = std::max(b2 * v_[i], std::fabs(grad[i]));
            double mhat = b1 * (m_[i] / bc1) + (1.0 - b1) / bc1 * grad[i];
            theta[i] -= g * mhat / (v_[i] + eps);
        }
        break;
    case Method::DriftControl:
        for (std::size_t i = 0; i < theta.size(); ++i)
            theta[i] -= g * (grad[i] + 1e-8);
        break;
    }
}

bool verify_phi_condition(Method method, const Hyper& hyper, std::size_t trials,
                          std::uint64_t seed) {
    CounterRng rng(seed, 0xf1c0de);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t dim = 2 + rng.below(7);
        const std::size_t steps = 1 + rng.below(50);

        std::vector<char> zeroed(dim, 0);
        std::size_t n_zero = 1 + rng.below(dim); // nonempty subset
        for (std::size_t z = 0; z < n_zero; ++z) zeroed[rng.below(dim)] = 1;
        zeroed[rng.below(dim)] = 1;

        std::vector<double> theta(dim), theta0(dim), grad(dim);
        for (std::size_t i = 0; i < dim; ++i) theta[i] = rng.normal();
        theta0 = theta;

        double g0 = std::exp(rng.uniform(-4.0, 0.0));
        OptimizerState st(method, hyper, Schedule::constant(g0), dim);
        for (std::size_t s = 0; s < steps; ++s) {
            for (std::size_t i = 0; i < dim; ++i)
                grad[i] = zeroed[i] ? 0.0 : rng.normal();
            st.step(theta, grad);
            for (std::size_t i = 0; i < dim; ++i) {
                if (!zeroed[i]) continue;
                // bit-identical, not merely equal
                if (std::memcmp(&theta[i], &theta0[i], sizeof(double)) != 0)
                    return false;
            }
        }
    }
    return true;
}

} // namespace nonconv
