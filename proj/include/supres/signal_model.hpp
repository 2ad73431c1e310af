#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "supres/rng.hpp"
#include "supres/types.hpp"

namespace supres {

// ---------------------------------------------------------------------------
// Torus helpers. Points live on [0,1) with the wrap-around metric
// |x|_T = min_n |x - n|.
// ---------------------------------------------------------------------------

double wrap_unit(double x) noexcept;
double torus_distance(double a, double b) noexcept;

// ---------------------------------------------------------------------------
// SupportSet
// ---------------------------------------------------------------------------

/// Ordered set of source locations on the torus.
///
/// Points are reduced mod 1 into [0,1) and sorted on construction. Duplicates
/// (after reduction) are rejected, so every SupportSet has S >= 1 distinct
/// points.
class SupportSet {
public:
    explicit SupportSet(std::vector<double> points);
    SupportSet(std::initializer_list<double> points)
        : SupportSet(std::vector<double>(points)) {}

    const std::vector<double>& points() const noexcept { return points_; }
    int size() const noexcept { return static_cast<int>(points_.size()); }
    double operator[](int j) const { return points_.at(static_cast<std::size_t>(j)); }

    friend bool operator==(const SupportSet&, const SupportSet&) = default;

private:
    std::vector<double> points_;
};

/// Minimum pairwise torus distance. Throws UndefinedSeparation when S == 1.
double min_separation(const SupportSet& support);

/// Super-resolution factor 1/((M-1) * Delta).
double srf(const SupportSet& support, int M);

// ---------------------------------------------------------------------------
// Separated clumps
// ---------------------------------------------------------------------------

/// R clumps, clump r holding clump_sizes[r] points spaced alpha/(M-1) apart
/// starting at anchors[r]. Gaps between clumps must be at least beta/(M-1).
struct ClumpsSpec {
    int num_clumps = 1;
    std::vector<int> clump_sizes;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> anchors;
    int M = 0;

    /// Anchors placed at offset + r/R for r = 0..R-1.
    static ClumpsSpec equispaced(int num_clumps, std::vector<int> clump_sizes, double alpha,
                                 double beta, int M, double offset = 0.0);

    int largest_clump() const;
    int total_points() const;
    bool equal_sizes() const;
    /// Spacing inside a clump, alpha/(M-1).
    double spacing() const { return alpha / static_cast<double>(M - 1); }
};

/// Checks the separated-clumps conditions; throws ValidationError naming the
/// violated clause ("(a)", "(b)" or "(c)") on failure.
void validate(const ClumpsSpec& spec);

SupportSet generate_clumps_support(const ClumpsSpec& spec);

// ---------------------------------------------------------------------------
// Steering vectors and matrices
// ---------------------------------------------------------------------------

/// phi(omega)_k = exp(-2 pi i k omega), k = 0..M-1.
CVector steering_vector(double omega, int M);

/// psi(omega)_k = (-2 pi i k) exp(-2 pi i k omega), the omega-derivative of phi.
CVector derivative_steering(double omega, int M);

/// Fourier sensing matrix: column j is steering_vector(omega_j, M).
class SteeringMatrix {
public:
    SteeringMatrix(const SupportSet& support, int M);

    const CMatrix& matrix() const noexcept { return entries_; }
    int M() const noexcept { return static_cast<int>(entries_.rows()); }
    int S() const noexcept { return static_cast<int>(entries_.cols()); }

private:
    CMatrix entries_;
};

/// Requires M >= S.
SteeringMatrix steering_matrix(const SupportSet& support, int M);

/// Columns psi(omega_j) for every point of the support.
CMatrix derivative_steering_matrix(const SupportSet& support, int M);

// ---------------------------------------------------------------------------
// Amplitudes and noise
// ---------------------------------------------------------------------------

/// Scaled amplitude matrix X_L = [x(t_1) ... x(t_L)] / sqrt(L) together with
/// its covariance X = X_L X_L^*.
class AmplitudeBatch {
public:
    /// From raw per-snapshot amplitudes (S x L, unscaled).
    static AmplitudeBatch from_snapshots(const CMatrix& raw);

    const CMatrix& columns() const noexcept { return columns_; }
    const CMatrix& covariance() const noexcept { return covariance_; }
    /// Smallest eigenvalue of X; positive iff X is strictly positive definite.
    double lambda_min() const noexcept { return lambda_min_; }
    double lambda_max() const noexcept { return lambda_max_; }
    int S() const noexcept { return static_cast<int>(columns_.rows()); }
    int L() const noexcept { return static_cast<int>(columns_.cols()); }

private:
    explicit AmplitudeBatch(CMatrix scaled);

    CMatrix columns_;
    CMatrix covariance_;
    double lambda_min_ = 0.0;
    double lambda_max_ = 0.0;
};

/// Per-entry noise law. Real and imaginary parts are independent with
/// variance nu^2/2 each, so E[e e^*] = nu^2 I. Only the circular Gaussian law
/// is implemented; the sub-Gaussian proxy parameter of the general model
/// enters no computation here.
struct NoiseModel {
    enum class Law { complex_gaussian };

    double nu = 0.0;
    Law law = Law::complex_gaussian;
};

/// i.i.d. CN(0,1) amplitudes drawn from the trial's amplitude substream.
struct CircularGaussianAmplitudes {};

/// Either the CN(0,1) generator or explicit raw S x L amplitudes.
using AmplitudeSource = std::variant<CircularGaussianAmplitudes, CMatrix>;

struct GroundTruth {
    SupportSet support;
    AmplitudeBatch amplitudes;
    NoiseModel noise;
    std::uint64_t seed = 0;
};

/// L snapshots stored as Y_L = [y(t_1) ... y(t_L)] / sqrt(L) (M x L).
struct SnapshotBatch {
    int M = 0;
    int L = 0;
    CMatrix data;
    std::optional<GroundTruth> truth;
};

/// Standard circular Gaussian matrix: entries with independent N(0, 1/2) real
/// and imaginary parts.
CMatrix circular_gaussian(int rows, int cols, Engine& engine);

/// Y_L = Phi X_L + E_L. Deterministic in `seed`; amplitudes and noise come
/// from independent substreams of it, so the noise draw does not depend on
/// nu (only its scale does).
SnapshotBatch synthesize_snapshots(const SupportSet& support, int M, int L,
                                   const AmplitudeSource& amplitudes, const NoiseModel& noise,
                                   std::uint64_t seed);

/// nu <= sigma_S(Phi) * sqrt(lambda_S(X)).
bool noise_level_admissible(double nu, double sigma_s, double lambda_s) noexcept;

} // namespace supres
