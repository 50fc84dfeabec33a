#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace naphtha {

// Dense row-major tensor of doubles, rank 1..3. Shapes in this project are
// (batch, features) for dense paths and (batch, channels, length) for the
// convolutional stem.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s);

    static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

    std::size_t size() const { return data.size(); }
    std::size_t dim(std::size_t i) const { return shape[i]; }
    std::size_t rank() const { return shape.size(); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    double& at(std::size_t b, std::size_t f) { return data[b * shape[1] + f]; }
    const double& at(std::size_t b, std::size_t f) const { return data[b * shape[1] + f]; }
    double& at(std::size_t b, std::size_t c, std::size_t l) { return data[(b * shape[1] + c) * shape[2] + l]; }
    const double& at(std::size_t b, std::size_t c, std::size_t l) const {
        return data[(b * shape[1] + c) * shape[2] + l];
    }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    std::string shape_string() const;

    void fill(double v);
};

// Raises NonFiniteValue if any element is NaN or infinite.
void require_finite(const Tensor& t, const char* where);
void require_same_shape(const Tensor& a, const Tensor& b, const char* where);

} // namespace naphtha
