#pragma once

#include <vector>

namespace genbound {

enum class TaskKind { regression, classification };

// One supervised example. Regression tasks read y, classification tasks read
// label; the unused field keeps its default. noisy marks labels that were
// resampled by noise injection, for diagnostics only.
struct Example {
    std::vector<double> x;
    double y = 0.0;
    int label = -1;
    bool noisy = false;
};

}  // namespace genbound
