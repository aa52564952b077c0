#pragma once

#include <cmath>

#include "genbound/model.hpp"

namespace genbound {

// Width-m ReLU network f(W, x) = (1/sqrt(m)) sum_r A_r * max(W_r . x, 0) with
// the output signs A_r in {+-1} frozen at construction; only the first layer
// trains. Weights flatten row-major, row r occupying [r*d0, (r+1)*d0). A unit
// sitting exactly on its kink counts as active, in the value's subgradient and
// in the activation statistics alike.
class TwoLayerRelu : public Model {
  public:
    TwoLayerRelu(std::size_t input_dim, std::size_t width, std::uint64_t signs_seed)
        : d0_(input_dim), m_(width), signs_seed_(signs_seed) {
        if (input_dim < 1 || width < 1)
            throw std::invalid_argument("TwoLayerRelu: input_dim and width must be >= 1");
        SeededStream stream = SeededStream(signs_seed).derive("signs");
        ParamVector a = rademacher_vector(stream, m_);
        signs_.assign(a.begin(), a.end());
    }

    std::string kind() const override { return "relu2"; }
    std::size_t dim() const override { return d0_ * m_; }
    std::size_t input_dim() const override { return d0_; }
    TaskKind task() const override { return TaskKind::regression; }
    std::size_t width() const { return m_; }
    std::uint64_t signs_seed() const { return signs_seed_; }
    const std::vector<double>& signs() const { return signs_; }

    double forward(const ParamVector& w, const std::vector<double>& x) const {
        double f = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            double u = row_dot(w, r, x);
            if (u >= 0.0) f += signs_[r] * u;
        }
        return f / std::sqrt(static_cast<double>(m_));
    }

    double loss(const ParamVector& w, const Example& z) const override {
        check_weights(w);
        check_example(z);
        double r = forward(w, z.x) - z.y;
        return 0.5 * r * r;
    }

    void add_grad(const ParamVector& w, const Example& z, double scale,
                  ParamVector& acc) const override {
        check_weights(w);
        check_example(z);
        double res = forward(w, z.x) - z.y;
        double c = scale * res / std::sqrt(static_cast<double>(m_));
        for (std::size_t r = 0; r < m_; ++r) {
            if (row_dot(w, r, z.x) < 0.0) continue;
            double cr = c * signs_[r];
            for (std::size_t i = 0; i < d0_; ++i) acc[r * d0_ + i] += cr * z.x[i];
        }
    }

    // The network is piecewise linear in w, so away from kinks the loss
    // Hessian is grad f grad f^T with trace (|x|^2 / m) * (active rows).
    double hessian_trace(const ParamVector& w, const Example& z) const override {
        check_weights(w);
        check_example(z);
        double xsq = 0.0;
        for (double xi : z.x) xsq += xi * xi;
        std::size_t active = 0;
        for (std::size_t r = 0; r < m_; ++r)
            if (row_dot(w, r, z.x) >= 0.0) ++active;
        return xsq * static_cast<double>(active) / static_cast<double>(m_);
    }

    std::pair<std::size_t, std::size_t> active_units(const ParamVector& w,
                                                     const Example& z) const override {
        check_weights(w);
        check_example(z);
        std::size_t active = 0;
        for (std::size_t r = 0; r < m_; ++r)
            if (row_dot(w, r, z.x) >= 0.0) ++active;
        return {active, m_};
    }

    double kink_margin(const ParamVector& w, const Example& z) const override {
        check_weights(w);
        check_example(z);
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m_; ++r) margin = std::min(margin, std::fabs(row_dot(w, r, z.x)));
        return margin;
    }

  private:
    double row_dot(const ParamVector& w, std::size_t r, const std::vector<double>& x) const {
        const double* row = w.data() + r * d0_;
        double u = 0.0;
        for (std::size_t i = 0; i < d0_; ++i) u += row[i] * x[i];
        return u;
    }

    std::size_t d0_, m_;
    std::uint64_t signs_seed_;
    std::vector<double> signs_;
};

}  // namespace genbound
