#include "supres/kernels/nsc_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace supres::kernels {

BasisPlanes BasisPlanes::from(const CMatrix& basis)
{
    BasisPlanes p;
    p.M = static_cast<std::size_t>(basis.rows());
    p.S = static_cast<std::size_t>(basis.cols());
    p.re.resize(p.M * p.S);
    p.im.resize(p.M * p.S);
    for (std::size_t j = 0; j < p.S; ++j) {
        for (std::size_t k = 0; k < p.M; ++k) {
            const auto z = basis(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
            p.re[j * p.M + k] = z.real();
            p.im[j * p.M + k] = z.imag();
        }
    }
    return p;
}

TwiddleTable::TwiddleTable(std::size_t grid_size) : re(grid_size), im(grid_size)
{
    if (grid_size == 0) {
        throw std::invalid_argument("twiddle table needs a positive grid size");
    }
    const double g = static_cast<double>(grid_size);
    for (std::size_t m = 0; m < grid_size; ++m) {
        const double angle = -kTwoPi * static_cast<double>(m) / g;
        re[m] = std::cos(angle);
        im[m] = std::sin(angle);
    }
}

void nsc_grid_scalar(const BasisPlanes& basis, const TwiddleTable& twiddles, std::size_t first,
                     std::span<double> out)
{
    const std::size_t M = basis.M;
    const std::size_t S = basis.S;
    const std::size_t G = twiddles.size();
    if (first + out.size() > G) {
        throw std::out_of_range("grid range exceeds the grid size");
    }
    std::vector<double> phr(M), phi(M), cr(S), ci(S);

    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::size_t n = first + i;
        std::size_t idx = 0;
        for (std::size_t k = 0; k < M; ++k) {
            phr[k] = twiddles.re[idx];
            phi[k] = twiddles.im[idx];
            idx += n;
            if (idx >= G) {
                idx -= G;
            }
        }
        // c = U^* phi
        for (std::size_t j = 0; j < S; ++j) {
            const double* ur = &basis.re[j * M];
            const double* ui = &basis.im[j * M];
            double sr = 0.0;
            double si = 0.0;
            for (std::size_t k = 0; k < M; ++k) {
                sr += ur[k] * phr[k] + ui[k] * phi[k];
                si += ur[k] * phi[k] - ui[k] * phr[k];
            }
            cr[j] = sr;
            ci[j] = si;
        }
        // || phi - U c ||^2
        double energy = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
            double rr = phr[k];
            double ri = phi[k];
            for (std::size_t j = 0; j < S; ++j) {
                const double ur = basis.re[j * M + k];
                const double ui = basis.im[j * M + k];
                rr -= ur * cr[j] - ui * ci[j];
                ri -= ur * ci[j] + ui * cr[j];
            }
            energy += rr * rr + ri * ri;
        }
        out[i] = std::sqrt(std::clamp(energy / static_cast<double>(M), 0.0, 1.0));
    }
}

} // namespace supres::kernels
