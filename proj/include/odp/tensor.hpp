#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "odp/errors.hpp"

namespace odp {

using Vec = std::vector<double>;

// Row-major matrix: rows x cols doubles in one contiguous buffer.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    std::size_t numel() const { return rows * cols; }
};

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline void require_finite(const Vec& v, const std::string& what) {
    if (!all_finite(v)) throw ValidationError(what + ": non-finite value");
}

inline void require_same_size(const Vec& a, const Vec& b, const std::string& what) {
    if (a.size() != b.size())
        throw DimensionError(what + ": size mismatch " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
}

inline double dot(const Vec& a, const Vec& b) {
    require_same_size(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const Vec& x, Vec& y) {
    require_same_size(x, y, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(Vec& x, double alpha) {
    for (double& v : x) v *= alpha;
}

inline double mean(const Vec& v) {
    if (v.empty()) throw ValidationError("mean: empty vector");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance(const Vec& v) {
    if (v.size() < 2) throw ValidationError("variance: need at least 2 samples");
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

} // namespace odp
