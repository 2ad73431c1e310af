#include "supres/kernels/nsc_kernel.hpp"

namespace supres::kernels {

const char* isa_name(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    }
    return "unknown";
}

namespace {

bool cpu_has_avx2() noexcept
{
#if defined(SUPRES_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

} // namespace

bool isa_available(Isa isa) noexcept
{
    static const bool avx2 = cpu_has_avx2();
    return isa == Isa::scalar || (isa == Isa::avx2 && avx2);
}

Isa best_isa() noexcept
{
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

void nsc_grid(const BasisPlanes& basis, const TwiddleTable& twiddles, std::size_t first,
              std::span<double> out, Isa isa)
{
#if defined(SUPRES_HAVE_AVX2_TU)
    if (isa == Isa::avx2 && isa_available(Isa::avx2)) {
        nsc_grid_avx2(basis, twiddles, first, out);
        return;
    }
#else
    (void)isa;
#endif
    nsc_grid_scalar(basis, twiddles, first, out);
}

} // namespace supres::kernels
