#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nonconv {

// Fully-connected feedforward architecture given as the layer-width
// vector (l_0, ..., l_L), L >= 1.  Parameters of layer k (affine map
// from width l_{k-1} to l_k) occupy one contiguous block of the flat
// parameter vector: first the l_k x l_{k-1} weights row by row, then
// the l_k biases.
class Architecture {
public:
    explicit Architecture(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
        if (widths_.size() < 2)
            throw std::invalid_argument("architecture needs at least two layers");
        for (std::size_t w : widths_)
            if (w == 0)
                throw std::invalid_argument("layer widths must be positive");
        prefix_.resize(widths_.size(), 0);
        for (std::size_t k = 1; k < widths_.size(); ++k)
            prefix_[k] = prefix_[k - 1] + widths_[k] * (widths_[k - 1] + 1);
    }

    std::size_t depth() const { return widths_.size() - 1; } // L
    std::size_t width(std::size_t v) const { return widths_[v]; }
    const std::vector<std::size_t>& widths() const { return widths_; }
    std::size_t input_dim() const { return widths_.front(); }
    std::size_t output_dim() const { return widths_.back(); }

    // total number of parameters
    std::size_t param_count() const { return prefix_.back(); }

    // number of parameters in layers 1..k
    std::size_t prefix_count(std::size_t k) const { return prefix_[k]; }

    // 0-based flat index of weight (layer k, target neuron i, source neuron j);
    // all of k, i, j are 1-based as in the usual indexing of layer maps.
    std::size_t weight_index(std::size_t k, std::size_t i, std::size_t j) const {
        check_layer(k);
        return (i - 1) * widths_[k - 1] + (j - 1) + prefix_[k - 1];
    }

    // 0-based flat index of bias (layer k, neuron i)
    std::size_t bias_index(std::size_t k, std::size_t i) const {
        check_layer(k);
        return widths_[k] * widths_[k - 1] + (i - 1) + prefix_[k - 1];
    }

    // 1-based counterparts matching the flat-vector convention used in the
    // closed-form bound formulas (which index parameters from 1).
    std::size_t weight_index_1based(std::size_t k, std::size_t i, std::size_t j) const {
        return weight_index(k, i, j) + 1;
    }
    std::size_t bias_index_1based(std::size_t k, std::size_t i) const {
        return bias_index(k, i) + 1;
    }

    bool operator==(const Architecture& o) const { return widths_ == o.widths_; }

private:
    void check_layer(std::size_t k) const {
        if (k < 1 || k > depth())
            throw std::out_of_range("layer index out of range");
    }

    std::vector<std::size_t> widths_;
    std::vector<std::size_t> prefix_;
};

} // namespace nonconv
