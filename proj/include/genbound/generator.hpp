#pragma once

#include <algorithm>
#include <cmath>

#include "genbound/dataset.hpp"
#include "genbound/two_layer_relu.hpp"

namespace genbound {

// Synthetic teacher-student data. Inputs are standard Gaussians projected to
// the unit sphere; targets come from a wide frozen ReLU teacher squashed
// through tanh, so regression targets live in (-1, 1). Classification mode
// bins the same teacher score into `classes` balanced bands using quantile
// thresholds fitted on the train split and reused verbatim for the test split.
struct GenConfig {
    TaskKind task = TaskKind::regression;
    std::size_t d0 = 20;
    std::size_t teacher_width = 1000;
    std::size_t n_train = 2000;
    std::size_t n_test = 2000;
    std::size_t classes = 2;       // classification only
    double noise_level = 0.0;      // classification label noise after binning
};

struct GeneratedData {
    Dataset train;
    Dataset test;
    std::vector<double> thresholds;  // classification bin edges, empty otherwise
    std::size_t noisy_count = 0;
};

namespace detail {

inline std::vector<double> unit_sphere_point(SeededStream& stream, std::size_t d0) {
    std::vector<double> x(d0);
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (double& v : x) {
            v = stream.next_gaussian();
            norm_sq += v * v;
        }
    } while (norm_sq < 1e-24);
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : x) v *= inv;
    return x;
}

}  // namespace detail

inline GeneratedData gen_teacher_student(const GenConfig& cfg, std::uint64_t seed) {
    if (cfg.d0 < 1 || cfg.teacher_width < 1)
        throw std::invalid_argument("gen_teacher_student: d0 and teacher_width must be >= 1");
    if (cfg.n_train < 1) throw std::invalid_argument("gen_teacher_student: n_train must be >= 1");
    if (cfg.task == TaskKind::classification && cfg.classes < 2)
        throw std::invalid_argument("gen_teacher_student: classes must be >= 2");

    SeededStream root(seed);
    TwoLayerRelu teacher(cfg.d0, cfg.teacher_width, root.derive("teacher-signs").seed());
    SeededStream teacher_stream = root.derive("teacher-weights");
    ParamVector teacher_w = gaussian_vector(teacher_stream, teacher.dim(), 1.0);

    auto fill = [&](Dataset& ds, std::size_t n, const char* label) {
        ds.task = cfg.task;
        ds.input_dim = cfg.d0;
        SeededStream stream = root.derive(label);
        ds.examples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            ds.examples[i].x = detail::unit_sphere_point(stream, cfg.d0);
            ds.examples[i].y = std::tanh(teacher.forward(teacher_w, ds.examples[i].x));
        }
    };

    GeneratedData out;
    fill(out.train, cfg.n_train, "train-x");
    fill(out.test, cfg.n_test, "test-x");

    if (cfg.task == TaskKind::classification) {
        std::vector<double> sorted(out.train.n());
        for (std::size_t i = 0; i < sorted.size(); ++i) sorted[i] = out.train.examples[i].y;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 1; k < cfg.classes; ++k)
            out.thresholds.push_back(sorted[k * sorted.size() / cfg.classes]);

        auto bin = [&](Dataset& ds) {
            ds.num_classes = cfg.classes;
            for (Example& z : ds.examples) {
                std::size_t label = 0;
                for (double t : out.thresholds)
                    if (z.y >= t) ++label;
                z.label = static_cast<int>(label);
                z.y = 0.0;
            }
        };
        bin(out.train);
        bin(out.test);

        if (cfg.noise_level > 0.0) {
            SeededStream noise = root.derive("label-noise");
            out.noisy_count = inject_label_noise(out.train, cfg.noise_level, noise);
        }
    }
    return out;
}

}  // namespace genbound
