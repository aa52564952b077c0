#pragma once

#include <algorithm>
#include <cmath>

#include "genbound/model.hpp"

namespace genbound {

// Fully connected ReLU classifier with a softmax cross-entropy loss. dims runs
// input, hidden..., classes. Each layer flattens as its weight matrix in
// row-major order (out x in) followed by its bias vector, layers in order.
class MlpClassifier : public Model {
  public:
    explicit MlpClassifier(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        if (dims_.size() < 2) throw std::invalid_argument("MlpClassifier: need input and output dims");
        for (std::size_t d : dims_)
            if (d < 1) throw std::invalid_argument("MlpClassifier: zero layer width");
        if (dims_.back() < 2) throw std::invalid_argument("MlpClassifier: need >= 2 classes");
        offsets_.push_back(0);
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l)
            offsets_.push_back(offsets_.back() + dims_[l] * dims_[l + 1] + dims_[l + 1]);
    }

    std::string kind() const override { return "mlp"; }
    std::size_t dim() const override { return offsets_.back(); }
    std::size_t input_dim() const override { return dims_.front(); }
    TaskKind task() const override { return TaskKind::classification; }
    std::size_t num_classes() const { return dims_.back(); }
    const std::vector<std::size_t>& layer_dims() const { return dims_; }

    double loss(const ParamVector& w, const Example& z) const override {
        check_weights(w);
        check_example(z);
        check_label(z);
        std::vector<std::vector<double>> pre, post;
        forward(w, z.x, pre, post);
        const std::vector<double>& logits = pre.back();
        return log_sum_exp(logits) - logits[static_cast<std::size_t>(z.label)];
    }

    int predict_label(const ParamVector& w, const Example& z) const override {
        check_weights(w);
        check_example(z);
        std::vector<std::vector<double>> pre, post;
        forward(w, z.x, pre, post);
        const std::vector<double>& logits = pre.back();
        return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    }

    std::vector<double> class_probabilities(const ParamVector& w, const Example& z) const {
        check_weights(w);
        check_example(z);
        std::vector<std::vector<double>> pre, post;
        forward(w, z.x, pre, post);
        std::vector<double> p = pre.back();
        double lse = log_sum_exp(p);
        for (double& v : p) v = std::exp(v - lse);
        return p;
    }

    void add_grad(const ParamVector& w, const Example& z, double scale,
                  ParamVector& acc) const override {
        check_weights(w);
        check_example(z);
        check_label(z);
        std::vector<std::vector<double>> pre, post;
        forward(w, z.x, pre, post);

        // softmax minus one-hot at the output, then plain backprop
        std::vector<double> delta = pre.back();
        double lse = log_sum_exp(delta);
        for (double& v : delta) v = std::exp(v - lse);
        delta[static_cast<std::size_t>(z.label)] -= 1.0;

        for (std::size_t l = dims_.size() - 1; l-- > 0;) {
            std::size_t in = dims_[l], out = dims_[l + 1];
            const std::vector<double>& a = l == 0 ? z.x : post[l - 1];
            double* gw = acc.data() + offsets_[l];
            double* gb = gw + in * out;
            for (std::size_t j = 0; j < out; ++j) {
                double dj = scale * delta[j];
                for (std::size_t i = 0; i < in; ++i) gw[j * in + i] += dj * a[i];
                gb[j] += dj;
            }
            if (l == 0) break;
            const double* wl = w.data() + offsets_[l];
            std::vector<double> prev(in, 0.0);
            for (std::size_t j = 0; j < out; ++j)
                for (std::size_t i = 0; i < in; ++i) prev[i] += wl[j * in + i] * delta[j];
            for (std::size_t i = 0; i < in; ++i)
                if (pre[l - 1][i] < 0.0) prev[i] = 0.0;
            delta = std::move(prev);
        }
    }

    std::pair<std::size_t, std::size_t> active_units(const ParamVector& w,
                                                     const Example& z) const override {
        check_weights(w);
        check_example(z);
        std::vector<std::vector<double>> pre, post;
        forward(w, z.x, pre, post);
        std::size_t active = 0, total = 0;
        for (std::size_t l = 0; l + 1 < pre.size(); ++l)
            for (double u : pre[l]) {
                ++total;
                if (u >= 0.0) ++active;
            }
        return {active, total};
    }

    double kink_margin(const ParamVector& w, const Example& z) const override {
        check_weights(w);
        check_example(z);
        std::vector<std::vector<double>> pre, post;
        forward(w, z.x, pre, post);
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l + 1 < pre.size(); ++l)
            for (double u : pre[l]) margin = std::min(margin, std::fabs(u));
        return margin;
    }

    // He initialization: layer weights N(0, 2/fan_in), biases zero. init_std
    // is ignored; classifier training is not stable under plain isotropic init.
    ParamVector init_weights(SeededStream& stream, double) const override {
        ParamVector w(dim());
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
            std::size_t in = dims_[l], out = dims_[l + 1];
            double sd = std::sqrt(2.0 / static_cast<double>(in));
            double* wl = w.data() + offsets_[l];
            for (std::size_t k = 0; k < in * out; ++k) wl[k] = sd * stream.next_gaussian();
        }
        return w;
    }

  private:
    void check_label(const Example& z) const {
        if (z.label < 0 || static_cast<std::size_t>(z.label) >= dims_.back())
            throw std::invalid_argument("mlp: label " + std::to_string(z.label) +
                                        " outside 0.." + std::to_string(dims_.back() - 1));
    }

    void forward(const ParamVector& w, const std::vector<double>& x,
                 std::vector<std::vector<double>>& pre, std::vector<std::vector<double>>& post) const {
        std::size_t layers = dims_.size() - 1;
        pre.resize(layers);
        post.resize(layers - 1);
        const std::vector<double>* a = &x;
        for (std::size_t l = 0; l < layers; ++l) {
            std::size_t in = dims_[l], out = dims_[l + 1];
            const double* wl = w.data() + offsets_[l];
            const double* bl = wl + in * out;
            pre[l].assign(out, 0.0);
            for (std::size_t j = 0; j < out; ++j) {
                double u = bl[j];
                for (std::size_t i = 0; i < in; ++i) u += wl[j * in + i] * (*a)[i];
                pre[l][j] = u;
            }
            if (l + 1 < layers) {
                post[l].resize(out);
                for (std::size_t j = 0; j < out; ++j) post[l][j] = std::max(pre[l][j], 0.0);
                a = &post[l];
            }
        }
    }

    static double log_sum_exp(const std::vector<double>& v) {
        double hi = *std::max_element(v.begin(), v.end());
        double s = 0.0;
        for (double x : v) s += std::exp(x - hi);
        return hi + std::log(s);
    }

    std::vector<std::size_t> dims_;
    std::vector<std::size_t> offsets_;
};

}  // namespace genbound
