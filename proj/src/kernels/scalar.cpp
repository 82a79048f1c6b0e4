#include "oams/kernels.hpp"

#include <cmath>
#include <limits>

namespace oams::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

MinMax min_max_scalar(const double* a, std::size_t n) {
    MinMax mm{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < mm.min) mm.min = a[i];
        if (a[i] > mm.max) mm.max = a[i];
    }
    return mm;
}

double l1_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

} // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{"scalar", dot_scalar, min_max_scalar, l1_scalar, sum_scalar};
    return table;
}

} // namespace oams::kernels
