#pragma once

#include "supres/signal_model.hpp"
#include "supres/types.hpp"

namespace supres {

/// Empirical covariance Y_hat = Y_L Y_L^* of a snapshot batch.
struct CovarianceMatrix {
    CMatrix matrix;
    int L = 0;

    int M() const noexcept { return static_cast<int>(matrix.rows()); }
};

/// Orthonormal basis (M x S) of an S-dimensional subspace of C^M with the S
/// eigenvalues it was selected by, in descending order.
struct SubspaceBasis {
    CMatrix basis;
    RVector eigenvalues;
    // Set when the S-th and (S+1)-th eigenvalues coincide to 1e-12, i.e. the
    // eigenspace, and therefore the basis, is not uniquely determined.
    bool ambiguous_gap = false;

    int M() const noexcept { return static_cast<int>(basis.rows()); }
    int S() const noexcept { return static_cast<int>(basis.cols()); }
};

CovarianceMatrix empirical_covariance(const SnapshotBatch& batch);

/// Eigenvectors of the S largest eigenvalues of a Hermitian covariance.
SubspaceBasis signal_space(const CovarianceMatrix& cov, int S);

/// Orthonormal basis of R(A) from the thin SVD of A (eigenvalues are the
/// squared singular values). A must have full column rank.
SubspaceBasis orthonormal_basis(const CMatrix& columns);

/// Signal space R(Phi).
SubspaceBasis true_signal_space(const SteeringMatrix& phi);

/// Largest canonical-angle sine between two equal-dimension subspaces,
/// evaluated as ||(I - P_A) B||_2 so small angles keep full precision.
double sin_theta_distance(const SubspaceBasis& a, const SubspaceBasis& b);

/// ||P_A - P_B||_2 formed from the M x M projectors. Cross-check only.
double projector_distance(const SubspaceBasis& a, const SubspaceBasis& b);

/// sqrt(1 - sigma_S(A^* B)^2). Cross-check only; loses precision for tiny angles.
double cosine_form_distance(const SubspaceBasis& a, const SubspaceBasis& b);

} // namespace supres
