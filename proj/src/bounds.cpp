#include "supres/bounds.hpp"

#include <cmath>
#include <sstream>

namespace supres {

double sigma_s(const SteeringMatrix& phi)
{
    Eigen::JacobiSVD<CMatrix> svd(phi.matrix());
    return svd.singularValues()(phi.S() - 1);
}

std::vector<TheoryBound> bound_shapes(const BoundInputs& in)
{
    if (in.M < 1 || in.S < 1 || in.L < 1 || !(in.nu > 0.0) || !(in.lambda_s > 0.0) ||
        !(in.sigma_s > 0.0) || (in.delta && !(*in.delta > 0.0))) {
        throw ValidationError("bound_shapes needs positive M, S, L, nu, lambda_S, sigma_S and Delta");
    }
    const double M = in.M;
    const double S = in.S;
    const double L = in.L;
    const double nu2 = in.nu * in.nu;
    const double sig2 = in.sigma_s * in.sigma_s;

    std::vector<TheoryBound> out;
    const double variance_shape = M * nu2 / (in.lambda_s * sig2 * L);
    out.push_back({"subspace_distance_sq", variance_shape, true, in});
    out.push_back({"nsc_perturbation_sq", variance_shape, true, in});
    out.push_back({"esprit_md_sq_moderate_snr",
                   std::pow(16.0, S + 2.0) * S * S * S * M * M * nu2 / (in.lambda_s * sig2 * sig2 * L),
                   true, in});
    out.push_back({"esprit_md_sq_large_snr", variance_shape, true, in});
    out.push_back({"xi", sig2 * in.lambda_s * L / (M * nu2), false, in});
    if (in.delta) {
        out.push_back({"rho", std::pow(4.0, S + 2.0) * sig2 * *in.delta / (std::sqrt(6.0) * S * S * M),
                       false, in});
    }
    return out;
}

CrbResult crb(const SupportSet& support, const CMatrix& X, double nu, int L, int M)
{
    const int S = support.size();
    if (X.rows() != S || X.cols() != S) {
        std::ostringstream msg;
        msg << "amplitude covariance must be " << S << " x " << S;
        throw ValidationError(msg.str());
    }
    if (!(nu > 0.0) || L < 1) {
        throw ValidationError("CRB needs nu > 0 and L >= 1");
    }
    if (!X.isApprox(X.adjoint(), 1e-12) || Eigen::LLT<CMatrix>(X).info() != Eigen::Success) {
        throw ValidationError("amplitude covariance must be Hermitian positive definite");
    }
    const SteeringMatrix phi(support, M);
    const CMatrix psi = derivative_steering_matrix(support, M);

    // I - P_Phi through a thin orthonormal factor of Phi.
    Eigen::HouseholderQR<CMatrix> qr(phi.matrix());
    const CMatrix q = qr.householderQ() * CMatrix::Identity(M, S);
    const CMatrix psi_perp = psi - q * (q.adjoint() * psi);

    const CMatrix gram = psi.adjoint() * psi_perp;
    RMatrix fisher = gram.cwiseProduct(X).real();
    fisher = 0.5 * (fisher + fisher.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<RMatrix> eig(fisher, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    // A block that vanishes against the scale of Psi and X has numerical rank zero.
    const double scale = psi.squaredNorm() * X.cwiseAbs().maxCoeff();
    const double rcond = hi > 1e-14 * scale ? lo / hi : 0.0;
    if (!(rcond >= 1e-14)) {
        std::ostringstream msg;
        msg << "Fisher block is singular to working precision (rcond = " << rcond << ")";
        throw EstimatorError("fisher_singular", msg.str());
    }

    CrbResult out;
    out.matrix = (nu * nu / (2.0 * L)) * fisher.ldlt().solve(RMatrix::Identity(S, S));
    out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
    out.trace_bound = out.matrix.trace() / S;
    out.reciprocal_condition = rcond;
    return out;
}

CrbResult crb(const ClumpsSpec& spec, const CMatrix& X, double nu, int L)
{
    CrbResult out = crb(generate_clumps_support(spec), X, nu, L, spec.M);
    out.scaling_reference = crb_clumps_scaling(spec, X, nu, L);
    return out;
}

double crb_clumps_scaling(const ClumpsSpec& spec, const CMatrix& X, double nu, int L)
{
    validate(spec);
    if (!spec.equal_sizes()) {
        throw ValidationError("clump CRB scaling needs equal clump sizes");
    }
    if (L < 1) {
        throw ValidationError("L must be >= 1");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(X, Eigen::EigenvaluesOnly);
    const double norm_x = eig.eigenvalues().maxCoeff();
    if (!(norm_x > 0.0)) {
        throw ValidationError("amplitude covariance must be non-zero");
    }
    const double lambda = spec.clump_sizes.front();
    const double srf_value = 1.0 / spec.alpha;
    const double m1 = spec.M - 1.0;
    return std::pow(srf_value, 2.0 * lambda - 2.0) * nu * nu / (L * m1 * m1 * m1 * norm_x);
}

} // namespace supres
