#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "genbound/seeded_stream.hpp"

namespace genbound {

// Flat parameter vector. All model weights, gradients and noise vectors are
// ParamVectors of the model's dimension d; mixing dimensions is a bug and is
// rejected eagerly.
class ParamVector {
  public:
    ParamVector() = default;
    explicit ParamVector(std::size_t dim, double fill = 0.0) : v_(dim, fill) {}
    explicit ParamVector(std::vector<double> values) : v_(std::move(values)) {}

    std::size_t dim() const { return v_.size(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    const std::vector<double>& values() const { return v_; }
    std::vector<double> take() && { return std::move(v_); }

    auto begin() { return v_.begin(); }
    auto end() { return v_.end(); }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }

    ParamVector& operator+=(const ParamVector& o) {
        check_dim(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    ParamVector& operator-=(const ParamVector& o) {
        check_dim(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    ParamVector& operator*=(double s) {
        for (double& x : v_) x *= s;
        return *this;
    }

    friend ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
    friend ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
    friend ParamVector operator*(double s, ParamVector a) { return a *= s; }

    // this += s * o, the only vector op the training loop needs per step.
    void axpy(double s, const ParamVector& o) {
        check_dim(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += s * o.v_[i];
    }

    double dot(const ParamVector& o) const {
        check_dim(o);
        double acc = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i) acc += v_[i] * o.v_[i];
        return acc;
    }

    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }

    bool is_finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    bool operator==(const ParamVector& o) const { return v_ == o.v_; }

  private:
    void check_dim(const ParamVector& o) const {
        if (v_.size() != o.v_.size())
            throw std::invalid_argument("ParamVector dimension mismatch: " +
                                        std::to_string(v_.size()) + " vs " +
                                        std::to_string(o.v_.size()));
    }

    std::vector<double> v_;
};

// N(0, std^2 I) sample of the given dimension. std = 0 yields the zero vector
// while still consuming the same number of stream words as any other std.
inline ParamVector gaussian_vector(SeededStream& stream, std::size_t dim, double std_dev) {
    if (dim < 1) throw std::invalid_argument("gaussian_vector: dim must be >= 1");
    if (!std::isfinite(std_dev)) throw std::invalid_argument("gaussian_vector: std must be finite");
    if (std_dev < 0.0) throw std::invalid_argument("gaussian_vector: std must be >= 0");
    ParamVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        double z = stream.next_gaussian();
        v[i] = std_dev == 0.0 ? 0.0 : std_dev * z;
    }
    return v;
}

// Uniform +-1 entries, one stream word per coordinate.
inline ParamVector rademacher_vector(SeededStream& stream, std::size_t dim) {
    if (dim < 1) throw std::invalid_argument("rademacher_vector: dim must be >= 1");
    ParamVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = (stream.next_u64() >> 63) ? 1.0 : -1.0;
    return v;
}

}  // namespace genbound
