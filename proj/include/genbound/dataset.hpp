#pragma once

#include <fstream>

#include "genbound/csv.hpp"
#include "genbound/example.hpp"
#include "genbound/seeded_stream.hpp"

namespace genbound {

struct Dataset {
    TaskKind task = TaskKind::regression;
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;  // classification only
    std::vector<Example> examples;

    std::size_t n() const { return examples.size(); }
};

// Rows are d0 feature floats followed by the target: a float for regression,
// a non-negative integer class for classification. The feature width is fixed
// by the first data row; later drift is a schema error, not a parse error.
inline Dataset load_csv_dataset(const std::string& path, TaskKind task, bool has_header = false) {
    std::ifstream in(path);
    if (!in) throw IoError("load_csv_dataset: cannot open " + path);

    Dataset ds;
    ds.task = task;
    std::string line;
    int line_no = 0;
    if (has_header) {
        if (!std::getline(in, line)) throw EmptyDatasetError("load_csv_dataset: " + path);
        ++line_no;
    }
    long long max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() < 2) throw ParseError("need features and a target", line_no);

        Example z;
        z.x.reserve(cells.size() - 1);
        for (std::size_t i = 0; i + 1 < cells.size(); ++i)
            z.x.push_back(parse_double(cells[i], line_no));
        if (ds.examples.empty()) {
            ds.input_dim = z.x.size();
        } else if (z.x.size() != ds.input_dim) {
            throw SchemaError("load_csv_dataset: row at line " + std::to_string(line_no) +
                              " has " + std::to_string(z.x.size()) + " features, expected " +
                              std::to_string(ds.input_dim));
        }
        const std::string& target = cells.back();
        if (task == TaskKind::regression) {
            z.y = parse_double(target, line_no);
        } else {
            long long label = parse_int(target, line_no);
            if (label < 0) throw ParseError("negative class label '" + target + "'", line_no);
            z.label = static_cast<int>(label);
            max_label = std::max(max_label, label);
        }
        ds.examples.push_back(std::move(z));
    }
    if (ds.examples.empty()) throw EmptyDatasetError("load_csv_dataset: " + path);
    if (task == TaskKind::classification) ds.num_classes = static_cast<std::size_t>(max_label + 1);
    return ds;
}

inline void save_csv_dataset(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw IoError("save_csv_dataset: cannot open " + path);
    for (const Example& z : ds.examples) {
        for (double v : z.x) out << format_double(v) << ',';
        if (ds.task == TaskKind::regression)
            out << format_double(z.y) << '\n';
        else
            out << z.label << '\n';
    }
    if (!out) throw IoError("save_csv_dataset: write failed for " + path);
}

// Uniformly resample the labels of exactly round(eps * n) distinct examples.
// A resample may reproduce the old label; the example still counts as noisy.
inline std::size_t inject_label_noise(Dataset& ds, double eps, SeededStream& stream) {
    if (ds.task != TaskKind::classification)
        throw std::invalid_argument("inject_label_noise: classification datasets only");
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("inject_label_noise: eps must lie in [0,1]");
    if (ds.num_classes < 2)
        throw std::invalid_argument("inject_label_noise: need >= 2 classes");

    std::size_t n = ds.n();
    auto count = static_cast<std::size_t>(std::llround(eps * static_cast<double>(n)));
    if (count == 0) return 0;

    // partial Fisher-Yates: the first `count` slots end up a uniform subset
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + static_cast<std::size_t>(stream.next_below(n - i));
        std::swap(idx[i], idx[j]);
    }
    for (std::size_t i = 0; i < count; ++i) {
        Example& z = ds.examples[idx[i]];
        z.label = static_cast<int>(stream.next_below(ds.num_classes));
        z.noisy = true;
    }
    return count;
}

}  // namespace genbound
