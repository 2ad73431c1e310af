#include <catch_amalgamated.hpp>

#include <vector>

#include "supres/kernels/nsc_kernel.hpp"
#include "supres/music.hpp"
#include "supres/rng.hpp"

using namespace supres;
using namespace supres::kernels;

namespace {

SubspaceBasis random_basis(int M, int S, Engine& engine)
{
    return orthonormal_basis(circular_gaussian(M, S, engine));
}

std::vector<double> evaluate(const SubspaceBasis& b, std::size_t G, std::size_t first, std::size_t count, Isa isa)
{
    const BasisPlanes planes = BasisPlanes::from(b.basis);
    const TwiddleTable tw(G);
    std::vector<double> out(count);
    nsc_grid(planes, tw, first, out, isa);
    return out;
}

} // namespace

TEST_CASE("isa reporting")
{
    CHECK(isa_available(Isa::scalar));
    CHECK(std::string(isa_name(Isa::scalar)) == "scalar");
    CHECK(std::string(isa_name(Isa::avx2)) == "avx2");
    CHECK(isa_available(best_isa()));
}

TEST_CASE("twiddle table")
{
    const TwiddleTable tw(8);
    REQUIRE(tw.size() == 8);
    CHECK(tw.re[0] == 1.0);
    CHECK(std::abs(tw.re[2]) < 1e-16);
    CHECK(tw.im[2] == Catch::Approx(-1.0));
    CHECK_THROWS(TwiddleTable(0));
}

TEST_CASE("scalar kernel matches the direct NSC evaluation")
{
    Engine engine = make_engine(3);
    for (int M : {1, 2, 5, 16, 33}) {
        for (int S : {1, 2, 4}) {
            if (S > M) {
                continue;
            }
            const SubspaceBasis b = random_basis(M, S, engine);
            const std::size_t G = 4 * static_cast<std::size_t>(M) + 13;
            const auto got = evaluate(b, G, 0, G, Isa::scalar);
            for (std::size_t k = 0; k < G; ++k) {
                CHECK(got[k] == Catch::Approx(noise_space_correlation(b, double(k) / double(G))).margin(1e-12));
            }
        }
    }
}

TEST_CASE("avx2 kernel is equivalent to the scalar kernel")
{
    if (!isa_available(Isa::avx2)) {
        SKIP("AVX2/FMA not available on this machine");
    }
    Engine engine = make_engine(4);
    double worst = 0.0;
    for (int M : {1, 3, 8, 17, 64, 100}) {
        for (int S : {1, 2, 3, 6}) {
            if (S > M) {
                continue;
            }
            const SubspaceBasis b = random_basis(M, S, engine);
            for (std::size_t G : {std::size_t(4 * M), std::size_t(4 * M + 3), std::size_t(4099)}) {
                // Offsets and lengths that exercise the scalar tail.
                for (auto [first, count] : {std::pair<std::size_t, std::size_t>{0, G}, {1, G - 1}, {G / 3, G / 3 + 2}}) {
                    const auto s = evaluate(b, G, first, count, Isa::scalar);
                    const auto v = evaluate(b, G, first, count, Isa::avx2);
                    for (std::size_t i = 0; i < count; ++i) {
                        worst = std::max(worst, std::abs(s[i] - v[i]));
                    }
                }
            }
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("kernel rejects out-of-range requests")
{
    Engine engine = make_engine(5);
    const SubspaceBasis b = random_basis(4, 1, engine);
    const BasisPlanes planes = BasisPlanes::from(b.basis);
    const TwiddleTable tw(16);
    std::vector<double> out(10);
    CHECK_THROWS(nsc_grid(planes, tw, 8, out, Isa::scalar));
    CHECK_THROWS(nsc_grid(planes, tw, 8, out, best_isa()));
}

TEST_CASE("sample_nsc gives identical profiles on every ISA")
{
    Engine engine = make_engine(6);
    const SubspaceBasis b = random_basis(40, 3, engine);
    const NscProfile s = sample_nsc(b, 4096, Isa::scalar);
    const NscProfile v = sample_nsc(b, 4096, best_isa());
    REQUIRE(s.grid_size() == v.grid_size());
    CHECK(nsc_sup_perturbation(s, v) < 1e-12);
}
