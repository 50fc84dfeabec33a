#include "naphtha/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "naphtha/error.hpp"

namespace naphtha {

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    if (shape.empty() || shape.size() > 3)
        raise(ErrorCode::ShapeMismatch, "tensor rank must be 1..3");
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) raise(ErrorCode::ShapeMismatch, "tensor dimension must be positive");
        n *= d;
    }
    data.assign(n, 0.0);
}

std::string Tensor::shape_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

void Tensor::fill(double v) {
    std::fill(data.begin(), data.end(), v);
}

void require_finite(const Tensor& t, const char* where) {
    for (double v : t.data) {
        if (!std::isfinite(v))
            raise(ErrorCode::NonFiniteValue, std::string(where) + " produced a non-finite value");
    }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* where) {
    if (!a.same_shape(b))
        raise(ErrorCode::ShapeMismatch,
              std::string(where) + ": " + a.shape_string() + " vs " + b.shape_string());
}

} // namespace naphtha
