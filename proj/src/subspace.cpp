#include "supres/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace supres {

namespace {

void require_same_shape(const SubspaceBasis& a, const SubspaceBasis& b)
{
    if (a.M() != b.M() || a.S() != b.S()) {
        std::ostringstream msg;
        msg << "subspace dimension mismatch: " << a.M() << "x" << a.S() << " vs " << b.M() << "x"
            << b.S();
        throw ValidationError(msg.str());
    }
}

} // namespace

CovarianceMatrix empirical_covariance(const SnapshotBatch& batch)
{
    const auto M = batch.data.rows();
    CovarianceMatrix cov;
    cov.L = batch.L;
    cov.matrix = CMatrix::Zero(M, M);
    cov.matrix.selfadjointView<Eigen::Lower>().rankUpdate(batch.data);
    cov.matrix.triangularView<Eigen::StrictlyUpper>() =
        cov.matrix.triangularView<Eigen::StrictlyLower>().adjoint();
    return cov;
}

SubspaceBasis signal_space(const CovarianceMatrix& cov, int S)
{
    const int M = cov.M();
    if (S < 1 || S > M) {
        std::ostringstream msg;
        msg << "signal space dimension must satisfy 1 <= S <= M (S = " << S << ", M = " << M << ")";
        throw ValidationError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov.matrix);
    if (eig.info() != Eigen::Success) {
        throw EstimatorError("eigensolver_failed", "Hermitian eigendecomposition did not converge");
    }
    // Eigen returns ascending eigenvalues; the signal space is the top S.
    SubspaceBasis out;
    out.basis.resize(M, S);
    out.eigenvalues.resize(S);
    for (int j = 0; j < S; ++j) {
        out.basis.col(j) = eig.eigenvectors().col(M - 1 - j);
        out.eigenvalues(j) = eig.eigenvalues()(M - 1 - j);
    }
    if (S < M) {
        const double top = std::max(std::abs(eig.eigenvalues()(M - 1)), 1.0);
        const double gap = eig.eigenvalues()(M - S) - eig.eigenvalues()(M - S - 1);
        out.ambiguous_gap = std::abs(gap) <= 1e-12 * top;
    }
    return out;
}

SubspaceBasis orthonormal_basis(const CMatrix& columns)
{
    if (columns.cols() < 1 || columns.rows() < columns.cols()) {
        throw ValidationError("orthonormal basis needs a tall, non-empty matrix");
    }
    Eigen::JacobiSVD<CMatrix> svd(columns, Eigen::ComputeThinU);
    const RVector& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 0.0)) {
        throw ValidationError("columns are rank deficient");
    }
    SubspaceBasis out;
    out.basis = svd.matrixU();
    out.eigenvalues = sv.array().square();
    return out;
}

SubspaceBasis true_signal_space(const SteeringMatrix& phi)
{
    return orthonormal_basis(phi.matrix());
}

double sin_theta_distance(const SubspaceBasis& a, const SubspaceBasis& b)
{
    require_same_shape(a, b);
    const CMatrix residual = b.basis - a.basis * (a.basis.adjoint() * b.basis);
    Eigen::JacobiSVD<CMatrix> svd(residual);
    return std::clamp(svd.singularValues()(0), 0.0, 1.0);
}

double projector_distance(const SubspaceBasis& a, const SubspaceBasis& b)
{
    require_same_shape(a, b);
    const CMatrix diff = a.basis * a.basis.adjoint() - b.basis * b.basis.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(diff, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double cosine_form_distance(const SubspaceBasis& a, const SubspaceBasis& b)
{
    require_same_shape(a, b);
    Eigen::JacobiSVD<CMatrix> svd(a.basis.adjoint() * b.basis);
    const double smallest = svd.singularValues()(svd.singularValues().size() - 1);
    return std::sqrt(std::max(0.0, 1.0 - smallest * smallest));
}

} // namespace supres
