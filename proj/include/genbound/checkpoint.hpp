#pragma once

#include <bit>
#include <cstring>
#include <fstream>

#include "genbound/models.hpp"

namespace genbound {

// Checkpoint file: one ASCII header line describing the architecture, then
// dim() raw little-endian float64 words in the documented flattening order.

namespace detail {

inline void write_le64(std::ostream& out, std::uint64_t bits) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(buf, 8);
}

inline std::uint64_t read_le64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return bits;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const Model& model, const ParamVector& w) {
    if (w.dim() != model.dim())
        throw std::invalid_argument("save_checkpoint: weight dim mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_checkpoint: cannot open " + path);

    ModelSpec spec = spec_of(model);
    out << "genbound-ckpt v1 kind=" << spec.kind << " input_dim=" << spec.input_dim;
    if (spec.kind == "relu2")
        out << " width=" << spec.width << " signs_seed=" << spec.signs_seed;
    if (spec.kind == "mlp") {
        out << " hidden=";
        for (std::size_t i = 0; i < spec.hidden.size(); ++i)
            out << (i ? "," : "") << spec.hidden[i];
        out << " classes=" << spec.classes;
    }
    out << " dim=" << model.dim() << "\n";

    for (double v : w) detail::write_le64(out, std::bit_cast<std::uint64_t>(v));
    if (!out) throw IoError("save_checkpoint: write failed for " + path);
}

struct Checkpoint {
    ModelSpec spec;
    ParamVector weights;
};

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_checkpoint: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("load_checkpoint: missing header", 1);

    std::istringstream hs(header);
    std::string magic, version;
    hs >> magic >> version;
    if (magic != "genbound-ckpt" || version != "v1")
        throw ParseError("load_checkpoint: bad magic in " + path, 1);

    ModelSpec spec;
    std::size_t dim = 0;
    std::string field;
    while (hs >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw ParseError("load_checkpoint: bad field " + field, 1);
        std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "kind") spec.kind = val;
        else if (key == "input_dim") spec.input_dim = std::stoull(val);
        else if (key == "width") spec.width = std::stoull(val);
        else if (key == "signs_seed") spec.signs_seed = std::stoull(val);
        else if (key == "classes") spec.classes = std::stoull(val);
        else if (key == "dim") dim = std::stoull(val);
        else if (key == "hidden") {
            std::istringstream hl(val);
            std::string part;
            while (std::getline(hl, part, ',')) spec.hidden.push_back(std::stoull(part));
        } else {
            throw ParseError("load_checkpoint: unknown field " + key, 1);
        }
    }
    if (spec.kind.empty() || dim == 0)
        throw ParseError("load_checkpoint: incomplete header in " + path, 1);

    ParamVector w(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        w[i] = std::bit_cast<double>(detail::read_le64(in));
        if (!in) throw ParseError("load_checkpoint: truncated payload in " + path, 2);
    }
    return Checkpoint{std::move(spec), std::move(w)};
}

}  // namespace genbound
