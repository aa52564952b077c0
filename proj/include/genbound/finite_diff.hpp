#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "genbound/errors.hpp"
#include "genbound/param_vector.hpp"

namespace genbound {

// Central-difference gradient of a scalar function, one coordinate at a time:
// g_i = (f(w + eps e_i) - f(w - eps e_i)) / (2 eps). Exact (up to rounding)
// for polynomials of degree <= 2, which is what the gradient tests lean on.
inline ParamVector central_diff_gradient(const std::function<double(const ParamVector&)>& f,
                                         const ParamVector& w, double eps = 1e-4) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("central_diff_gradient: eps must be positive and finite");
    ParamVector g(w.dim());
    ParamVector probe = w;
    for (std::size_t i = 0; i < w.dim(); ++i) {
        double saved = probe[i];
        probe[i] = saved + eps;
        double up = f(probe);
        probe[i] = saved - eps;
        double down = f(probe);
        probe[i] = saved;
        if (!std::isfinite(up) || !std::isfinite(down))
            throw NumericError("central_diff_gradient: non-finite f at coordinate " +
                               std::to_string(i));
        g[i] = (up - down) / (2.0 * eps);
    }
    return g;
}

}  // namespace genbound
