#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rrlm {

// Dense row-major tensor. Parameters and activations are float; the double
// instantiation exists only as the shadow path for finite-difference oracles.
template <typename T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> data;
    bool requires_grad = false;

    TensorT() = default;

    explicit TensorT(std::vector<int> shape_in, T fill = T(0)) : shape(std::move(shape_in)) {
        data.assign(element_count(shape), fill);
    }

    TensorT(std::vector<int> shape_in, std::vector<T> data_in)
        : shape(std::move(shape_in)), data(std::move(data_in)) {
        if (data.size() != element_count(shape)) {
            throw std::invalid_argument("tensor data length does not match shape");
        }
    }

    static size_t element_count(const std::vector<int>& shape) {
        size_t n = 1;
        for (int d : shape) {
            if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
            n *= static_cast<size_t>(d);
        }
        return n;
    }

    size_t size() const { return data.size(); }

    int rows() const { return shape.size() == 2 ? shape[0] : (shape.size() == 1 ? 1 : -1); }
    int cols() const { return shape.size() == 2 ? shape[1] : (shape.size() == 1 ? shape[0] : -1); }

    T& at(int r, int c) { return data[static_cast<size_t>(r) * shape[1] + c]; }
    const T& at(int r, int c) const { return data[static_cast<size_t>(r) * shape[1] + c]; }

    bool same_shape(const TensorT& other) const { return shape == other.shape; }

    bool all_finite() const {
        for (T v : data) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }

    template <typename U>
    TensorT<U> cast() const {
        TensorT<U> out;
        out.shape = shape;
        out.requires_grad = requires_grad;
        out.data.resize(data.size());
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

inline std::string shape_to_string(const std::vector<int>& shape) {
    std::string s = "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    s += ")";
    return s;
}

}  // namespace rrlm
