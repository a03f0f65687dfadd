#include "insar/grid.hpp"

#include <cmath>

namespace insar {

cdouble inner(std::span<const cdouble> a, std::span<const cdouble> b) {
    if (a.size() != b.size()) throw ShapeError("inner: length mismatch");
    cdouble acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double squared_norm(std::span<const cdouble> a) {
    double acc = 0.0;
    for (const cdouble& v : a) acc += std::norm(v);
    return acc;
}

double norm2(std::span<const cdouble> a) { return std::sqrt(squared_norm(a)); }

}  // namespace insar
