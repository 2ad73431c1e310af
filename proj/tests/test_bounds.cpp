#include <catch_amalgamated.hpp>

#include <cmath>

#include "supres/bounds.hpp"

using namespace supres;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const TheoryBound& find(const std::vector<TheoryBound>& all, const std::string& name)
{
    for (const auto& b : all) {
        if (b.name == name) {
            return b;
        }
    }
    FAIL("missing bound " << name);
    throw std::logic_error("unreachable");
}

// Fisher block with the projector formed from an explicit pseudo-inverse and
// the Hadamard product written out entry by entry.
RMatrix crb_oracle(const SupportSet& support, const CMatrix& X, double nu, int L, int M)
{
    const CMatrix phi = SteeringMatrix(support, M).matrix();
    const CMatrix psi = derivative_steering_matrix(support, M);
    const CMatrix gram = phi.adjoint() * phi;
    const CMatrix proj = phi * gram.inverse() * phi.adjoint();
    const CMatrix g = psi.adjoint() * (CMatrix::Identity(M, M) - proj) * psi;
    const int S = support.size();
    RMatrix fisher(S, S);
    for (int a = 0; a < S; ++a) {
        for (int b = 0; b < S; ++b) {
            fisher(a, b) = (g(a, b) * X(a, b)).real();
        }
    }
    return nu * nu / (2.0 * L) * fisher.inverse();
}

CMatrix random_pd(int S, Engine& engine)
{
    const CMatrix a = circular_gaussian(S, S + 3, engine);
    return a * a.adjoint() / static_cast<double>(S + 3) + 0.1 * CMatrix::Identity(S, S);
}

ClumpsSpec two_clumps(int lambda, double alpha, int M = 100)
{
    return ClumpsSpec::equispaced(2, {lambda, lambda}, alpha, 20.0, M, 0.2);
}

} // namespace

TEST_CASE("sigma_S of orthogonal and clustered columns")
{
    const int M = 16;
    CHECK_THAT(sigma_s(SteeringMatrix(SupportSet{0.0, 0.25, 0.5, 0.75}, M)), WithinRel(4.0, 1e-12));
    Engine engine = make_engine(41);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> pts;
        for (int j = 0; j < 1 + i % 5; ++j) {
            pts.push_back(unit(engine));
        }
        CHECK(sigma_s(SteeringMatrix(SupportSet(pts), M)) <= std::sqrt(double(M)) + 1e-12);
    }
    CHECK_THAT(sigma_s(SteeringMatrix(SupportSet{0.0, 0.01}, 16)), WithinRel(0.8141139576174647, 1e-12));
}

TEST_CASE("bound shapes")
{
    BoundInputs in{16, 4, 100, 0.1, 1.0, 4.0, 0.25};
    const auto all = bound_shapes(in);
    REQUIRE(all.size() == 6);
    CHECK(all[0].name == "subspace_distance_sq");
    CHECK_THAT(find(all, "xi").value, WithinRel(16.0 * 100.0 / (16.0 * 0.01), 1e-12));
    CHECK_FALSE(find(all, "xi").constant_free);
    CHECK(find(all, "subspace_distance_sq").constant_free);

    // sigma_S^2 = M, lambda_S = 1, nu = 1, L = M: xi = M.
    CHECK_THAT(find(bound_shapes({16, 4, 16, 1.0, 1.0, 4.0, 0.25}), "xi").value, WithinRel(16.0, 1e-12));

    BoundInputs doubled = in;
    doubled.L = 200;
    const auto half = bound_shapes(doubled);
    for (const std::string name : {"subspace_distance_sq", "nsc_perturbation_sq", "esprit_md_sq_moderate_snr",
                                   "esprit_md_sq_large_snr"}) {
        CHECK_THAT(find(half, name).value, WithinRel(find(all, name).value / 2.0, 1e-12));
    }

    BoundInputs single = in;
    single.S = 1;
    single.delta.reset();
    for (const auto& b : bound_shapes(single)) {
        CHECK(b.name != "rho");
    }

    BoundInputs bad = in;
    bad.sigma_s = 0.0;
    CHECK_THROWS_AS(bound_shapes(bad), ValidationError);
}

TEST_CASE("bound values on a two-clump configuration")
{
    const double d = 1.0 / 495.0;
    const SupportSet support{0.2, 0.2 + d, 0.7, 0.7 + d};
    const double s = sigma_s(SteeringMatrix(support, 100));
    CHECK_THAT(s, WithinRel(2.564547887841556, 1e-9));
    const auto all = bound_shapes({100, 4, 1000, 0.1, 1.0, s, d});
    CHECK_THAT(find(all, "esprit_md_sq_moderate_snr").value, WithinRel(2482313.434117916, 1e-9));
    CHECK_THAT(find(all, "xi").value, WithinRel(6576.905869032586, 1e-9));
    CHECK_THAT(find(all, "rho").value, WithinRel(0.013886115310283253, 1e-9));
}

TEST_CASE("CRB agrees with the explicit-projector oracle")
{
    Engine engine = make_engine(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    while (checked < 20) {
        const int S = 1 + checked % 4;
        const int M = 2 * S + 4 + checked;
        std::vector<double> pts;
        for (int j = 0; j < S; ++j) {
            pts.push_back(unit(engine));
        }
        const SupportSet support(pts);
        if (S > 1 && min_separation(support) < 1.0 / M) {
            continue;
        }
        const CMatrix X = random_pd(S, engine);
        const CrbResult r = crb(support, X, 0.3, 50, M);
        const RMatrix ref = crb_oracle(support, X, 0.3, 50, M);
        CHECK((r.matrix - ref).norm() <= 1e-9 * ref.norm());
        CHECK_THAT(r.trace_bound, WithinRel(ref.trace() / S, 1e-9));
        CHECK((r.matrix - r.matrix.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<RMatrix> eig(r.matrix);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
        ++checked;
    }
}

TEST_CASE("CRB rescaling")
{
    const SupportSet support{0.1, 0.12, 0.6};
    const CMatrix X = CMatrix::Identity(3, 3);
    const CrbResult base = crb(support, X, 0.1, 100, 32);
    CHECK_THAT(crb(support, X, 0.3, 100, 32).trace_bound, WithinRel(9.0 * base.trace_bound, 1e-12));
    CHECK_THAT(crb(support, X, 0.1, 400, 32).trace_bound, WithinRel(base.trace_bound / 4.0, 1e-12));
    CHECK_THAT(crb(support, 2.0 * X, 0.1, 100, 32).trace_bound, WithinRel(base.trace_bound / 2.0, 1e-12));
}

TEST_CASE("CRB input checks")
{
    const SupportSet support{0.1, 0.6};
    CHECK_THROWS_AS(crb(support, CMatrix::Identity(3, 3), 0.1, 10, 16), ValidationError);
    CMatrix indefinite = CMatrix::Identity(2, 2);
    indefinite(1, 1) = -1.0;
    CHECK_THROWS_AS(crb(support, indefinite, 0.1, 10, 16), ValidationError);
    CMatrix skew = CMatrix::Identity(2, 2);
    skew(0, 1) = 0.5;
    CHECK_THROWS_AS(crb(support, skew, 0.1, 10, 16), ValidationError);
    CHECK_THROWS_AS(crb(support, CMatrix::Identity(2, 2), 0.0, 10, 16), ValidationError);
    CHECK_THROWS_AS(crb(support, CMatrix::Identity(2, 2), 0.1, 0, 16), ValidationError);
}

TEST_CASE("a Fisher block without signal-space complement is singular")
{
    // M = S: Psi lies inside R(Phi), so (I - P_Phi) Psi vanishes.
    try {
        crb(SupportSet{0.1, 0.6}, CMatrix::Identity(2, 2), 0.1, 10, 2);
        FAIL("expected fisher_singular");
    } catch (const EstimatorError& e) {
        CHECK(e.code() == "fisher_singular");
    }
    // Close points with nearly collinear amplitudes degrade the conditioning.
    CMatrix X(2, 2);
    X << 1.0, 1.0 - 1e-13, 1.0 - 1e-13, 1.0;
    const double wide = crb(SupportSet{0.3, 0.31}, X, 0.1, 10, 8).reciprocal_condition;
    const double tight = crb(SupportSet{0.3, 0.3001}, X, 0.1, 10, 8).reciprocal_condition;
    CHECK(tight < 1e-3 * wide);
}

TEST_CASE("clumps scaling reference")
{
    const ClumpsSpec isolated = ClumpsSpec::equispaced(2, {1, 1}, 0.5, 4.0, 11, 0.0);
    CHECK_THAT(crb_clumps_scaling(isolated, 2.0 * CMatrix::Identity(2, 2), 0.1, 10),
               WithinRel(0.01 / (10.0 * 1000.0 * 2.0), 1e-12));

    for (int lambda : {2, 3}) {
        const CMatrix X = CMatrix::Identity(2 * lambda, 2 * lambda);
        const double coarse = crb_clumps_scaling(two_clumps(lambda, 0.25), X, 0.1, 100);
        const double fine = crb_clumps_scaling(two_clumps(lambda, 0.125), X, 0.1, 100);
        CHECK_THAT(fine / coarse, WithinRel(std::pow(2.0, 2 * lambda - 2), 1e-12));
    }

    const ClumpsSpec uneven = ClumpsSpec::equispaced(2, {2, 1}, 0.5, 20.0, 100, 0.2);
    CHECK_THROWS_AS(crb_clumps_scaling(uneven, CMatrix::Identity(3, 3), 0.1, 100), ValidationError);

    const ClumpsSpec spec = two_clumps(2, 0.5);
    const CrbResult r = crb(spec, CMatrix::Identity(4, 4), 0.1, 100);
    REQUIRE(r.scaling_reference);
    CHECK_THAT(*r.scaling_reference,
               WithinRel(crb_clumps_scaling(spec, CMatrix::Identity(4, 4), 0.1, 100), 1e-15));
}
