#pragma once

// Grid evaluation of the noise-space correlation
//
//     R(omega_n) = || (I - U U^*) phi(omega_n) || / sqrt(M),   omega_n = n / G,
//
// for an orthonormal basis U. This is the inner loop of MUSIC: for every grid
// point it costs 2*M*S complex multiply-adds. A portable scalar reference and
// an AVX2/FMA variant (four grid points per register) are provided; the
// variant is chosen at runtime and both must agree to rounding.

#include <cstddef>
#include <span>
#include <vector>

#include "supres/types.hpp"

namespace supres::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;
/// Widest ISA supported by both this build and the running CPU.
Isa best_isa() noexcept;

/// Split-complex, column-major copy of an M x S basis.
struct BasisPlanes {
    std::vector<double> re;
    std::vector<double> im;
    std::size_t M = 0;
    std::size_t S = 0;

    static BasisPlanes from(const CMatrix& basis);
};

/// exp(-2 pi i m / G) for m = 0..G-1. Steering entries on the grid are exact
/// table lookups at index (k * n) mod G, so no phase error accumulates in k.
struct TwiddleTable {
    std::vector<double> re;
    std::vector<double> im;

    explicit TwiddleTable(std::size_t grid_size);
    std::size_t size() const noexcept { return re.size(); }
};

/// out[i] = R(omega_{first + i}). Requires first + out.size() <= G.
void nsc_grid_scalar(const BasisPlanes& basis, const TwiddleTable& twiddles, std::size_t first,
                     std::span<double> out);

#if defined(SUPRES_HAVE_AVX2_TU)
void nsc_grid_avx2(const BasisPlanes& basis, const TwiddleTable& twiddles, std::size_t first,
                   std::span<double> out);
#endif

/// Dispatches to the requested variant; falls back to scalar when the ISA is
/// not available.
void nsc_grid(const BasisPlanes& basis, const TwiddleTable& twiddles, std::size_t first,
              std::span<double> out, Isa isa);

} // namespace supres::kernels
