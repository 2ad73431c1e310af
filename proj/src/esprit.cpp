#include "supres/esprit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace supres {

namespace {

constexpr double kPinvCutoff = 1e-12;
constexpr int kExhaustiveLimit = 8;

void require_same_size(const SupportSet& a, const SupportSet& b)
{
    if (a.size() != b.size()) {
        std::ostringstream msg;
        msg << "matching distance needs equal cardinalities (" << a.size() << " vs " << b.size() << ")";
        throw ValidationError(msg.str());
    }
}

// Principal argument in (-pi, pi] mapped to a frequency in [0, 1).
double frequency_of(cdouble z)
{
    double angle = std::arg(z);
    if (angle <= -kPi) {
        angle = kPi;
    }
    return wrap_unit(-angle / kTwoPi);
}

} // namespace

EspritSolution esprit_estimate(const SubspaceBasis& basis)
{
    const int M = basis.M();
    const int S = basis.S();
    if (M < S + 1) {
        std::ostringstream msg;
        msg << "ESPRIT needs M >= S + 1 (M = " << M << ", S = " << S << ")";
        throw ValidationError(msg.str());
    }
    const CMatrix u0 = basis.basis.topRows(M - 1);
    const CMatrix u1 = basis.basis.bottomRows(M - 1);

    Eigen::JacobiSVD<CMatrix> svd(u0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector& sv = svd.singularValues();
    const double cutoff = kPinvCutoff * sv(0);
    if (!(sv(S - 1) > cutoff)) {
        std::ostringstream msg;
        msg << "U0 is rank deficient (sigma_S = " << sv(S - 1) << ", sigma_1 = " << sv(0) << ")";
        throw EstimatorError("shift_invariance_degenerate", msg.str());
    }
    // Psi = V Sigma^-1 U^* U1
    const CMatrix psi = svd.matrixV() * sv.cwiseInverse().asDiagonal() * (svd.matrixU().adjoint() * u1);

    Eigen::ComplexEigenSolver<CMatrix> eig(psi, false);
    if (eig.info() != Eigen::Success) {
        throw EstimatorError("shift_invariance_degenerate", "eigenvalues of Psi did not converge");
    }

    std::vector<cdouble> eigenvalues;
    std::vector<double> freqs;
    for (int j = 0; j < S; ++j) {
        eigenvalues.push_back(eig.eigenvalues()(j));
        freqs.push_back(frequency_of(eig.eigenvalues()(j)));
    }
    try {
        return EspritSolution{psi, std::move(eigenvalues), SupportSet(std::move(freqs))};
    } catch (const ValidationError& e) {
        throw EstimatorError("shift_invariance_degenerate", e.what());
    }
}

double matching_distance_bruteforce(const SupportSet& truth, const SupportSet& estimate)
{
    require_same_size(truth, estimate);
    const auto n = static_cast<std::size_t>(truth.size());
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = 0.5;
    do {
        double worst = 0.0;
        for (std::size_t j = 0; j < n && worst < best; ++j) {
            worst = std::max(worst, torus_distance(estimate.points()[perm[j]], truth.points()[j]));
        }
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double matching_distance_cyclic(const SupportSet& truth, const SupportSet& estimate)
{
    require_same_size(truth, estimate);
    const auto n = static_cast<std::size_t>(truth.size());
    const auto& a = truth.points();
    const auto& b = estimate.points();
    double best = 0.5;
    for (std::size_t shift = 0; shift < n; ++shift) {
        double worst = 0.0;
        for (std::size_t j = 0; j < n && worst < best; ++j) {
            worst = std::max(worst, torus_distance(b[(j + shift) % n], a[j]));
        }
        best = std::min(best, worst);
    }
    return best;
}

double matching_distance(const SupportSet& truth, const SupportSet& estimate)
{
    if (truth.size() <= kExhaustiveLimit) {
        return matching_distance_bruteforce(truth, estimate);
    }
    return matching_distance_cyclic(truth, estimate);
}

EspritRun esprit_pipeline(const SnapshotBatch& batch, int S)
{
    const auto cov = empirical_covariance(batch);
    const auto basis = signal_space(cov, S);
    EspritRun run{esprit_estimate(basis), std::nullopt};
    if (batch.truth) {
        run.md = matching_distance(batch.truth->support, run.solution.estimated_support);
    }
    return run;
}

} // namespace supres
