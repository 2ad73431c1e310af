#pragma once

#include <memory>
#include <string>
#include <vector>

#include "supres/kernels/nsc_kernel.hpp"
#include "supres/subspace.hpp"

namespace supres {

/// Noise-space correlation R(omega) = ||(I - P_U) phi(omega)|| / sqrt(M),
/// evaluated directly (no grid). Always in [0, 1].
double noise_space_correlation(const SubspaceBasis& basis, double omega);

/// R sampled on the circular grid omega_k = k / G.
struct NscProfile {
    std::vector<double> values;
    // Basis the profile was computed from. Kept so that peak refinement can
    // evaluate R between grid points; may be null for profiles built by hand.
    std::shared_ptr<const SubspaceBasis> basis;
    std::string tag;

    std::size_t grid_size() const noexcept { return values.size(); }
    double omega(std::size_t k) const noexcept
    {
        return static_cast<double>(k) / static_cast<double>(values.size());
    }
    /// Imaging function J = 1/R at grid point k (infinite where R == 0).
    double imaging(std::size_t k) const;
};

/// max(4096, 64 M): 64 grid points per Rayleigh length.
int default_grid_size(int M) noexcept;

/// Grid evaluation of R. Requires G >= 4M.
NscProfile sample_nsc(std::shared_ptr<const SubspaceBasis> basis, int grid_size,
                      kernels::Isa isa = kernels::best_isa(), std::string tag = {});
NscProfile sample_nsc(const SubspaceBasis& basis, int grid_size,
                      kernels::Isa isa = kernels::best_isa(), std::string tag = {});

struct SupportEstimate {
    SupportSet support;
    // Fewer than S local minima of R were found; the remainder was padded
    // with the smallest-R grid points.
    bool degenerate_peaks = false;
    int peaks_found = 0;
};

/// Picks the S largest circular local maxima of J = 1/R (equivalently the S
/// deepest local minima of R). A local minimum is strictly below both
/// neighbours; on a plateau the leftmost index is taken.
///
/// With `refine`, every peak is moved off-grid by three-point parabolic
/// interpolation of R^2 (which, unlike R, is smooth at a zero), and, when the
/// profile still carries its basis, polished by successive parabolic steps on
/// the exact R^2 with shrinking stencils. A refined peak never leaves its
/// grid cell (|shift| < half a cell).
SupportEstimate extract_support(const NscProfile& profile, int S, bool refine);

/// Grid sup-norm max_k |R_hat(omega_k) - R(omega_k)|. A lower bound on the
/// continuum L-infinity distance.
double nsc_sup_perturbation(const NscProfile& truth, const NscProfile& estimate);

} // namespace supres
