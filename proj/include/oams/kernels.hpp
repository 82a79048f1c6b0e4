#pragma once
// Data-parallel inner loops used by the solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is chosen once per process from CPUID; set
// OAMS_KERNELS=scalar in the environment to force the reference path.

#include <cstddef>
#include <span>

namespace oams::kernels {

struct MinMax {
    double min;
    double max;
};

struct KernelTable {
    const char* name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    MinMax (*min_max)(const double* a, std::size_t n);
    double (*l1_distance)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the binary or CPU lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

/// The table selected for this process.
const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return active().dot(a.data(), b.data(), a.size());
}

inline MinMax min_max(std::span<const double> a) noexcept {
    return active().min_max(a.data(), a.size());
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) noexcept {
    return active().l1_distance(a.data(), b.data(), a.size());
}

inline double sum(std::span<const double> a) noexcept {
    return active().sum(a.data(), a.size());
}

} // namespace oams::kernels
