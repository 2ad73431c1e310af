#include <catch_amalgamated.hpp>

#include <cmath>

#include "supres/esprit.hpp"

using namespace supres;
using Catch::Matchers::WithinAbs;

namespace {

SubspaceBasis noiseless_basis(const SupportSet& support, int M, std::uint64_t seed = 1)
{
    const auto b = synthesize_snapshots(support, M, support.size() + 1, CircularGaussianAmplitudes{},
                                        NoiseModel{0.0}, seed);
    return signal_space(empirical_covariance(b), support.size());
}

} // namespace

TEST_CASE("noiseless ESPRIT is exact")
{
    const SupportSet truth{0.2, 0.7};
    const EspritSolution sol = esprit_estimate(noiseless_basis(truth, 16));
    CHECK(matching_distance(truth, sol.estimated_support) <= 1e-10);
    REQUIRE(sol.eigenvalues.size() == 2);
    for (const cdouble& z : sol.eigenvalues) {
        CHECK_THAT(std::abs(z), WithinAbs(1.0, 1e-10));
    }
    for (int j = 0; j < 2; ++j) {
        const double w = sol.estimated_support[j];
        CHECK(w >= 0.0);
        CHECK(w < 1.0);
    }
}

TEST_CASE("scalar ESPRIT")
{
    const EspritSolution sol = esprit_estimate(noiseless_basis(SupportSet{0.25}, 3));
    CHECK(std::abs(sol.psi_hat(0, 0) - cdouble(0.0, -1.0)) < 1e-12);
    CHECK_THAT(sol.estimated_support[0], WithinAbs(0.25, 1e-12));
}

TEST_CASE("frequencies map from the principal argument into [0,1)")
{
    // omega near 0 from both sides.
    const SupportSet truth{0.999, 0.001, 0.5};
    const EspritSolution sol = esprit_estimate(noiseless_basis(truth, 12));
    CHECK(matching_distance(truth, sol.estimated_support) < 1e-10);
    CHECK(sol.estimated_support[2] < 1.0);
}

TEST_CASE("ESPRIT is invariant to the basis choice")
{
    Engine engine = make_engine(31);
    const SupportSet truth{0.1, 0.13, 0.55, 0.8};
    const auto batch = synthesize_snapshots(truth, 24, 200, CircularGaussianAmplitudes{}, NoiseModel{0.05}, 9);
    const SubspaceBasis u = signal_space(empirical_covariance(batch), 4);
    const SupportSet ref = esprit_estimate(u).estimated_support;
    for (int i = 0; i < 10; ++i) {
        Eigen::HouseholderQR<CMatrix> qr(circular_gaussian(4, 4, engine));
        SubspaceBasis rotated = u;
        rotated.basis = u.basis * (qr.householderQ() * CMatrix::Identity(4, 4));
        CHECK(matching_distance(ref, esprit_estimate(rotated).estimated_support) < 1e-9);
    }
}

TEST_CASE("ESPRIT preconditions and degeneracy")
{
    const SubspaceBasis full = orthonormal_basis(SteeringMatrix(SupportSet{0.0, 0.5}, 2).matrix());
    CHECK_THROWS_AS(esprit_estimate(full), ValidationError);

    // Rank-deficient U0: the first M-1 rows of e_M vanish.
    SubspaceBasis spike;
    spike.basis = CMatrix::Zero(5, 1);
    spike.basis(4, 0) = 1.0;
    spike.eigenvalues = RVector::Ones(1);
    try {
        esprit_estimate(spike);
        FAIL("expected an estimator error");
    } catch (const EstimatorError& e) {
        CHECK(e.code() == "shift_invariance_degenerate");
    }
}

TEST_CASE("matching distance examples")
{
    CHECK(matching_distance(SupportSet{0.1, 0.5}, SupportSet{0.1, 0.5}) == 0.0);
    CHECK_THAT(matching_distance(SupportSet{0.95, 0.05}, SupportSet{0.97, 0.03}), WithinAbs(0.02, 1e-15));
    CHECK_THAT(matching_distance(SupportSet{0.0, 0.4}, SupportSet{0.5, 0.9}), WithinAbs(0.1, 1e-15));
    CHECK_THROWS_AS(matching_distance(SupportSet{0.1}, SupportSet{0.1, 0.2}), ValidationError);
}

TEST_CASE("matching distance is a metric")
{
    Engine engine = make_engine(32);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](int S) {
        std::vector<double> v;
        for (int j = 0; j < S; ++j) {
            v.push_back(unit(engine));
        }
        return SupportSet(v);
    };
    for (int i = 0; i < 300; ++i) {
        const int S = 1 + i % 6;
        const SupportSet a = draw(S), b = draw(S), c = draw(S);
        const double ab = matching_distance(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab <= 0.5);
        CHECK(matching_distance(b, a) == ab);
        CHECK(matching_distance(a, a) == 0.0);
        CHECK(ab > 0.0);
        CHECK(matching_distance(a, c) <= ab + matching_distance(b, c) + 1e-15);
    }
}

TEST_CASE("cyclic matcher agrees with brute force")
{
    Engine engine = make_engine(33);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const int S = 1 + i % 8;
        std::vector<double> a, b;
        for (int j = 0; j < S; ++j) {
            a.push_back(unit(engine));
            b.push_back(i % 2 ? unit(engine) : a.back() + 0.05 * normal(engine));
        }
        const SupportSet ta(a), tb(b);
        CHECK(matching_distance_cyclic(ta, tb) == matching_distance_bruteforce(ta, tb));
    }
}

TEST_CASE("pipeline")
{
    const SupportSet truth{0.3, 0.32, 0.8};
    const auto clean = synthesize_snapshots(truth, 20, 5, CircularGaussianAmplitudes{}, NoiseModel{0.0}, 3);
    const EspritRun run = esprit_pipeline(clean, 3);
    REQUIRE(run.md);
    CHECK(*run.md <= 1e-9);

    SnapshotBatch anonymous = clean;
    anonymous.truth.reset();
    CHECK_FALSE(esprit_pipeline(anonymous, 3).md);
}
