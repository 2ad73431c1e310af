#include "supres/music.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace supres {

namespace {

// ||(I - P_U) phi||^2 / M, formed from the residual vector so that values
// near zero keep full absolute precision.
double residual_energy(const SubspaceBasis& basis, double omega)
{
    const CVector phi = steering_vector(omega, basis.M());
    const CVector residual = phi - basis.basis * (basis.basis.adjoint() * phi);
    return residual.squaredNorm() / static_cast<double>(basis.M());
}

// Vertex of the parabola through (-1, fm), (0, f0), (1, fp), in stencil units.
double parabola_vertex(double fm, double f0, double fp)
{
    const double curvature = fm - 2.0 * f0 + fp;
    if (!(curvature > 0.0)) {
        return 0.0;
    }
    return 0.5 * (fm - fp) / curvature;
}

constexpr double kMaxCellShift = 0.49;

} // namespace

double noise_space_correlation(const SubspaceBasis& basis, double omega)
{
    return std::sqrt(std::clamp(residual_energy(basis, omega), 0.0, 1.0));
}

double NscProfile::imaging(std::size_t k) const
{
    const double r = values.at(k);
    return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
}

int default_grid_size(int M) noexcept
{
    return std::max(4096, 64 * M);
}

NscProfile sample_nsc(std::shared_ptr<const SubspaceBasis> basis, int grid_size, kernels::Isa isa,
                      std::string tag)
{
    if (!basis) {
        throw ValidationError("sample_nsc needs a basis");
    }
    if (grid_size < 4 * basis->M()) {
        std::ostringstream msg;
        msg << "grid size " << grid_size << " is below 4M = " << 4 * basis->M();
        throw ValidationError(msg.str());
    }
    const auto planes = kernels::BasisPlanes::from(basis->basis);
    const kernels::TwiddleTable twiddles(static_cast<std::size_t>(grid_size));

    NscProfile profile;
    profile.values.resize(static_cast<std::size_t>(grid_size));
    kernels::nsc_grid(planes, twiddles, 0, profile.values, isa);
    profile.basis = std::move(basis);
    profile.tag = std::move(tag);
    return profile;
}

NscProfile sample_nsc(const SubspaceBasis& basis, int grid_size, kernels::Isa isa, std::string tag)
{
    return sample_nsc(std::make_shared<const SubspaceBasis>(basis), grid_size, isa, std::move(tag));
}

SupportEstimate extract_support(const NscProfile& profile, int S, bool refine)
{
    const std::size_t G = profile.grid_size();
    if (S < 1 || static_cast<std::size_t>(S) > G) {
        throw ValidationError("extract_support needs 1 <= S <= grid size");
    }
    const auto& R = profile.values;
    auto at = [&](std::size_t k) { return R[k % G]; };

    std::vector<std::size_t> minima;
    for (std::size_t k = 0; k < G; ++k) {
        const double v = R[k];
        if (!(v < at(k + G - 1))) {
            continue;
        }
        std::size_t j = k + 1;
        while (at(j) == v) {
            ++j;
        }
        if (at(j) > v) {
            minima.push_back(k);
        }
    }

    auto deeper = [&](std::size_t a, std::size_t b) { return R[a] < R[b] || (R[a] == R[b] && a < b); };
    std::sort(minima.begin(), minima.end(), deeper);

    SupportEstimate est{SupportSet{0.0}, false, static_cast<int>(minima.size())};
    const std::size_t take = std::min(minima.size(), static_cast<std::size_t>(S));
    std::vector<std::size_t> chosen(minima.begin(), minima.begin() + static_cast<std::ptrdiff_t>(take));

    std::vector<double> points;
    const double cell = 1.0 / static_cast<double>(G);
    for (std::size_t k : chosen) {
        double shift = 0.0;
        if (refine) {
            const double fm = at(k + G - 1) * at(k + G - 1);
            const double f0 = R[k] * R[k];
            const double fp = at(k + 1) * at(k + 1);
            shift = std::clamp(parabola_vertex(fm, f0, fp), -kMaxCellShift, kMaxCellShift);
            if (profile.basis) {
                double h = 1.0;
                for (int iter = 0; iter < 5; ++iter) {
                    h /= 8.0;
                    const double c = (static_cast<double>(k) + shift) * cell;
                    const double gm = residual_energy(*profile.basis, c - h * cell);
                    const double g0 = residual_energy(*profile.basis, c);
                    const double gp = residual_energy(*profile.basis, c + h * cell);
                    const double step = std::clamp(parabola_vertex(gm, g0, gp), -1.0, 1.0);
                    shift = std::clamp(shift + step * h, -kMaxCellShift, kMaxCellShift);
                }
            }
        }
        points.push_back((static_cast<double>(k) + shift) * cell);
    }

    if (chosen.size() < static_cast<std::size_t>(S)) {
        est.degenerate_peaks = true;
        std::vector<std::size_t> order(G);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return R[a] < R[b]; });
        for (std::size_t k : order) {
            if (points.size() == static_cast<std::size_t>(S)) {
                break;
            }
            if (std::find(chosen.begin(), chosen.end(), k) == chosen.end()) {
                points.push_back(static_cast<double>(k) * cell);
            }
        }
    }
    est.support = SupportSet(std::move(points));
    return est;
}

double nsc_sup_perturbation(const NscProfile& truth, const NscProfile& estimate)
{
    if (truth.grid_size() != estimate.grid_size()) {
        std::ostringstream msg;
        msg << "profile grids differ: " << truth.grid_size() << " vs " << estimate.grid_size();
        throw ValidationError(msg.str());
    }
    double sup = 0.0;
    for (std::size_t k = 0; k < truth.grid_size(); ++k) {
        sup = std::max(sup, std::abs(estimate.values[k] - truth.values[k]));
    }
    return sup;
}

} // namespace supres
