// AVX2 + FMA variant of the noise-space correlation grid kernel.
// This translation unit alone is compiled with -mavx2 -mfma; it must only be
// entered after the dispatcher has confirmed CPU support.

#include "supres/kernels/nsc_kernel.hpp"

#include <immintrin.h>

#include <stdexcept>

namespace supres::kernels {

void nsc_grid_avx2(const BasisPlanes& basis, const TwiddleTable& twiddles, std::size_t first,
                   std::span<double> out)
{
    const std::size_t M = basis.M;
    const std::size_t S = basis.S;
    const std::size_t G = twiddles.size();
    if (first + out.size() > G) {
        throw std::out_of_range("grid range exceeds the grid size");
    }

    constexpr std::size_t W = 4; // doubles per __m256d, one grid point per lane
    std::vector<double> phr(W * M), phi(W * M), cr(W * S), ci(W * S);

    const __m256i grid = _mm256_set1_epi64x(static_cast<long long>(G));
    const __m256i grid_minus_one = _mm256_set1_epi64x(static_cast<long long>(G - 1));
    const __m256d inv_m = _mm256_set1_pd(1.0 / static_cast<double>(M));
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);

    const std::size_t blocks = out.size() / W;
    for (std::size_t b = 0; b < blocks; ++b) {
        const auto n0 = static_cast<long long>(first + b * W);
        const __m256i step = _mm256_setr_epi64x(n0, n0 + 1, n0 + 2, n0 + 3);
        __m256i idx = _mm256_setzero_si256();

        // Steering entries for the four grid points, gathered from the table.
        for (std::size_t k = 0; k < M; ++k) {
            _mm256_storeu_pd(&phr[W * k], _mm256_i64gather_pd(twiddles.re.data(), idx, 8));
            _mm256_storeu_pd(&phi[W * k], _mm256_i64gather_pd(twiddles.im.data(), idx, 8));
            idx = _mm256_add_epi64(idx, step);
            const __m256i wrap = _mm256_cmpgt_epi64(idx, grid_minus_one);
            idx = _mm256_sub_epi64(idx, _mm256_and_si256(wrap, grid));
        }

        // c = U^* phi
        for (std::size_t j = 0; j < S; ++j) {
            const double* ur = &basis.re[j * M];
            const double* ui = &basis.im[j * M];
            __m256d sr = zero;
            __m256d si = zero;
            for (std::size_t k = 0; k < M; ++k) {
                const __m256d a = _mm256_broadcast_sd(&ur[k]);
                const __m256d c = _mm256_broadcast_sd(&ui[k]);
                const __m256d pr = _mm256_loadu_pd(&phr[W * k]);
                const __m256d pi = _mm256_loadu_pd(&phi[W * k]);
                sr = _mm256_fmadd_pd(a, pr, sr);
                sr = _mm256_fmadd_pd(c, pi, sr);
                si = _mm256_fmadd_pd(a, pi, si);
                si = _mm256_fnmadd_pd(c, pr, si);
            }
            _mm256_storeu_pd(&cr[W * j], sr);
            _mm256_storeu_pd(&ci[W * j], si);
        }

        // || phi - U c ||^2
        __m256d energy = zero;
        for (std::size_t k = 0; k < M; ++k) {
            __m256d rr = _mm256_loadu_pd(&phr[W * k]);
            __m256d ri = _mm256_loadu_pd(&phi[W * k]);
            for (std::size_t j = 0; j < S; ++j) {
                const __m256d a = _mm256_broadcast_sd(&basis.re[j * M + k]);
                const __m256d c = _mm256_broadcast_sd(&basis.im[j * M + k]);
                const __m256d vr = _mm256_loadu_pd(&cr[W * j]);
                const __m256d vi = _mm256_loadu_pd(&ci[W * j]);
                rr = _mm256_fnmadd_pd(a, vr, rr);
                rr = _mm256_fmadd_pd(c, vi, rr);
                ri = _mm256_fnmadd_pd(a, vi, ri);
                ri = _mm256_fnmadd_pd(c, vr, ri);
            }
            energy = _mm256_fmadd_pd(rr, rr, energy);
            energy = _mm256_fmadd_pd(ri, ri, energy);
        }
        __m256d r2 = _mm256_mul_pd(energy, inv_m);
        r2 = _mm256_min_pd(_mm256_max_pd(r2, zero), one);
        _mm256_storeu_pd(&out[b * W], _mm256_sqrt_pd(r2));
    }

    if (blocks * W < out.size()) {
        nsc_grid_scalar(basis, twiddles, first + blocks * W, out.subspan(blocks * W));
    }
}

} // namespace supres::kernels
