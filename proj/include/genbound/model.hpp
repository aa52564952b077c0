#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "genbound/errors.hpp"
#include "genbound/example.hpp"
#include "genbound/param_vector.hpp"
#include "genbound/seeded_stream.hpp"

namespace genbound {

// A model is an immutable architecture description; weights travel separately
// as ParamVectors of dimension dim(). Losses are per example: squared error
// l = (y - f)^2 / 2 for regression, cross entropy for classification.
class Model {
  public:
    virtual ~Model() = default;

    virtual std::string kind() const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual TaskKind task() const = 0;

    virtual double loss(const ParamVector& w, const Example& z) const = 0;

    // acc += scale * grad of loss at (w, z). Accumulating in place keeps batch
    // means free of temporaries and summed in a fixed order.
    virtual void add_grad(const ParamVector& w, const Example& z, double scale,
                          ParamVector& acc) const = 0;

    virtual int predict_label(const ParamVector&, const Example&) const {
        throw UnsupportedModelError(kind() + ": no class predictions");
    }

    // Trace of the per-example loss Hessian where a closed form exists.
    virtual double hessian_trace(const ParamVector&, const Example&) const {
        throw UnsupportedModelError(kind() + ": no analytic Hessian trace");
    }

    // (active hidden units, total hidden units) for the example; a unit with
    // pre-activation exactly 0 counts as active, matching the gradient rule.
    virtual std::pair<std::size_t, std::size_t> active_units(const ParamVector&,
                                                             const Example&) const {
        throw UnsupportedModelError(kind() + ": no ReLU units");
    }

    // Smallest |pre-activation| over hidden units, +inf for kink-free models.
    // Finite-difference probes use this to stay clear of ReLU corners.
    virtual double kink_margin(const ParamVector&, const Example&) const {
        return std::numeric_limits<double>::infinity();
    }

    // Fresh weight draw. Default is W0 ~ N(0, init_std^2 I).
    virtual ParamVector init_weights(SeededStream& stream, double init_std) const {
        return gaussian_vector(stream, dim(), init_std);
    }

  protected:
    void check_example(const Example& z) const {
        if (z.x.size() != input_dim())
            throw std::invalid_argument(kind() + ": feature dim " + std::to_string(z.x.size()) +
                                        " != " + std::to_string(input_dim()));
    }
    void check_weights(const ParamVector& w) const {
        if (w.dim() != dim())
            throw std::invalid_argument(kind() + ": weight dim " + std::to_string(w.dim()) +
                                        " != " + std::to_string(dim()));
    }
};

inline ParamVector per_example_grad(const Model& model, const ParamVector& w, const Example& z) {
    ParamVector g(model.dim());
    model.add_grad(w, z, 1.0, g);
    return g;
}

// Mean gradient over the batch, accumulated in ascending index order and
// scaled once at the end. A batch is a set, so fixing the summation order
// costs nothing semantically and makes the result independent of shuffle
// order; in particular a full batch reproduces the full-set reference mean
// bit for bit, so its dispersion is exactly zero.
inline ParamVector batch_grad(const Model& model, const ParamVector& w,
                              const std::vector<Example>& examples,
                              const std::vector<std::size_t>& batch) {
    if (batch.empty()) throw std::invalid_argument("batch_grad: empty batch");
    std::vector<std::size_t> order(batch);
    std::sort(order.begin(), order.end());
    ParamVector g(model.dim());
    for (std::size_t idx : order) g += per_example_grad(model, w, examples[idx]);
    g *= 1.0 / static_cast<double>(order.size());
    return g;
}

inline ParamVector batch_grad(const Model& model, const ParamVector& w,
                              const std::vector<Example>& examples) {
    if (examples.empty()) throw std::invalid_argument("batch_grad: empty batch");
    ParamVector g(model.dim());
    for (const Example& z : examples) g += per_example_grad(model, w, z);
    g *= 1.0 / static_cast<double>(examples.size());
    return g;
}

inline double mean_loss(const Model& model, const ParamVector& w,
                        const std::vector<Example>& examples) {
    if (examples.empty()) throw EmptyDatasetError("mean_loss: no examples");
    double acc = 0.0;
    for (const Example& z : examples) acc += model.loss(w, z);
    return acc / static_cast<double>(examples.size());
}

// Fraction of (example, hidden unit) pairs whose pre-activation is >= 0.
inline double activation_fraction(const Model& model, const ParamVector& w,
                                  const std::vector<Example>& examples) {
    if (examples.empty()) throw std::invalid_argument("activation_fraction: empty batch");
    std::size_t active = 0, total = 0;
    for (const Example& z : examples) {
        auto [a, t] = model.active_units(w, z);
        active += a;
        total += t;
    }
    return static_cast<double>(active) / static_cast<double>(total);
}

inline double analytic_hessian_trace(const Model& model, const ParamVector& w,
                                     const std::vector<Example>& examples) {
    if (examples.empty()) throw std::invalid_argument("analytic_hessian_trace: empty batch");
    double acc = 0.0;
    for (const Example& z : examples) acc += model.hessian_trace(w, z);
    return acc / static_cast<double>(examples.size());
}

}  // namespace genbound
