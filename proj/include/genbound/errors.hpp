#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace genbound {

// Thrown when a finite-difference or estimator evaluation produces NaN/Inf.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file. line is 1-based, 0 when not tied to a line.
struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& msg, int line_no)
        : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

// Structurally valid input with inconsistent shape (feature count drift etc).
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyDatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested quantity has no rule for this model family.
struct UnsupportedModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A trace directory or in-memory trace is missing artifacts a computation needs.
struct InsufficientTraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by the training loop when the batch loss explodes or turns non-finite.
// Carries the step index and the last finite weights for post-mortem dumps.
struct DivergenceError : std::runtime_error {
    std::int64_t step;
    std::vector<double> last_weights;
    DivergenceError(std::int64_t at_step, std::vector<double> weights)
        : std::runtime_error("training diverged at step " + std::to_string(at_step)),
          step(at_step),
          last_weights(std::move(weights)) {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace genbound
