#pragma once

#include <memory>
#include <sstream>

#include "genbound/linear_net.hpp"
#include "genbound/mlp_classifier.hpp"
#include "genbound/two_layer_relu.hpp"

namespace genbound {

// Plain-data description of an architecture, round-trippable through config
// files and checkpoint headers.
struct ModelSpec {
    std::string kind;                 // linear | relu2 | mlp
    std::size_t input_dim = 0;
    std::size_t width = 0;            // relu2 hidden width
    std::vector<std::size_t> hidden;  // mlp hidden layer sizes
    std::size_t classes = 0;          // mlp output classes
    std::uint64_t signs_seed = 0;     // relu2 fixed output signs
};

inline std::unique_ptr<Model> make_model(const ModelSpec& spec) {
    if (spec.kind == "linear") return std::make_unique<LinearNet>(spec.input_dim);
    if (spec.kind == "relu2")
        return std::make_unique<TwoLayerRelu>(spec.input_dim, spec.width, spec.signs_seed);
    if (spec.kind == "mlp") {
        std::vector<std::size_t> dims;
        dims.push_back(spec.input_dim);
        dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
        dims.push_back(spec.classes);
        return std::make_unique<MlpClassifier>(dims);
    }
    throw std::invalid_argument("make_model: unknown kind '" + spec.kind + "'");
}

inline ModelSpec spec_of(const Model& model) {
    ModelSpec s;
    s.kind = model.kind();
    s.input_dim = model.input_dim();
    if (const auto* relu = dynamic_cast<const TwoLayerRelu*>(&model)) {
        s.width = relu->width();
        s.signs_seed = relu->signs_seed();
    } else if (const auto* mlp = dynamic_cast<const MlpClassifier*>(&model)) {
        const auto& dims = mlp->layer_dims();
        s.hidden.assign(dims.begin() + 1, dims.end() - 1);
        s.classes = dims.back();
    }
    return s;
}

}  // namespace genbound
