#pragma once

#include <optional>
#include <string>
#include <vector>

#include "supres/signal_model.hpp"

namespace supres {

/// S-th largest singular value of Phi, by direct SVD.
double sigma_s(const SteeringMatrix& phi);

struct BoundInputs {
    int M = 0;
    int S = 0;
    int L = 0;
    double nu = 0.0;
    double lambda_s = 0.0;  // smallest eigenvalue of the amplitude covariance X
    double sigma_s = 0.0;   // sigma_S(Phi)
    std::optional<double> delta; // minimum separation; absent for S == 1
};

/// A theoretical error bound or regime quantity. constant_free marks
/// expressions whose unknown leading constant has been dropped: only their
/// shape (the dependence on the inputs) is meaningful.
struct TheoryBound {
    std::string name;
    double value = 0.0;
    bool constant_free = false;
    BoundInputs inputs;
};

/// Evaluates, in order:
///   subspace_distance_sq      M nu^2 / (lambda_S sigma_S^2 L)          (shape)
///   nsc_perturbation_sq       M nu^2 / (lambda_S sigma_S^2 L)          (shape)
///   esprit_md_sq_moderate_snr 16^(S+2) S^3 M^2 nu^2 / (lambda_S sigma_S^4 L) (shape)
///   esprit_md_sq_large_snr    M nu^2 / (sigma_S^2 lambda_S L)          (shape)
///   xi                        sigma_S^2 lambda_S L / (M nu^2)
///   rho                       4^(S+2) sigma_S^2 Delta / (sqrt(6) S^2 M)  (only with Delta)
std::vector<TheoryBound> bound_shapes(const BoundInputs& in);

struct CrbResult {
    RMatrix matrix;             // (nu^2 / 2L) Re(Psi^* (I - P_Phi) Psi .* X)^{-1}
    double trace_bound = 0.0;   // Tr(matrix) / S
    double reciprocal_condition = 0.0; // of the Fisher block before inversion
    std::optional<double> scaling_reference;
};

/// Cramer-Rao matrix for unbiased support estimators. X is the S x S amplitude
/// covariance and must be Hermitian positive definite.
/// Throws EstimatorError("fisher_singular") when the Fisher block has
/// reciprocal condition below 1e-14.
CrbResult crb(const SupportSet& support, const CMatrix& X, double nu, int L, int M);

/// Same, additionally filling scaling_reference from crb_clumps_scaling.
CrbResult crb(const ClumpsSpec& spec, const CMatrix& X, double nu, int L);

/// SRF^(2 lambda - 2) nu^2 / (L (M-1)^3 ||X||_2) with SRF = 1/alpha, the
/// constant-free lower-bound shape for equal-size, equally spaced clumps.
double crb_clumps_scaling(const ClumpsSpec& spec, const CMatrix& X, double nu, int L);

} // namespace supres
