#pragma once

#include "genbound/model.hpp"

namespace genbound {

// Scalar linear predictor f(w, x) = <w, x> under squared loss. The loss
// Hessian is x x^T for every example, so its trace is |x|^2 exactly.
class LinearNet : public Model {
  public:
    explicit LinearNet(std::size_t input_dim) : d0_(input_dim) {
        if (input_dim < 1) throw std::invalid_argument("LinearNet: input_dim must be >= 1");
    }

    std::string kind() const override { return "linear"; }
    std::size_t dim() const override { return d0_; }
    std::size_t input_dim() const override { return d0_; }
    TaskKind task() const override { return TaskKind::regression; }

    double forward(const ParamVector& w, const std::vector<double>& x) const {
        double f = 0.0;
        for (std::size_t i = 0; i < d0_; ++i) f += w[i] * x[i];
        return f;
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
        double r = scale * (forward(w, z.x) - z.y);
        for (std::size_t i = 0; i < d0_; ++i) acc[i] += r * z.x[i];
    }

    double hessian_trace(const ParamVector& w, const Example& z) const override {
        check_weights(w);
        check_example(z);
        double s = 0.0;
        for (double xi : z.x) s += xi * xi;
        return s;
    }

  private:
    std::size_t d0_;
};

}  // namespace genbound
