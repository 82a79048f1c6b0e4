#include "oams/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace oams::kernels {

const KernelTable* avx2_table_impl() noexcept;

const KernelTable* avx2_table() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_table_impl();
#endif
    return nullptr;
}

const KernelTable& active() noexcept {
    static const KernelTable& table = [] () -> const KernelTable& {
        const char* env = std::getenv("OAMS_KERNELS");
        if (env != nullptr && std::strcmp(env, "scalar") == 0) return scalar_table();
        if (const KernelTable* t = avx2_table()) return *t;
        return scalar_table();
    }();
    return table;
}

} // namespace oams::kernels
