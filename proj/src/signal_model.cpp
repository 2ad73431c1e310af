#include "supres/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace supres {

double wrap_unit(double x) noexcept
{
    double r = x - std::floor(x);
    // x slightly below an integer can round up to exactly 1.0
    return r >= 1.0 ? 0.0 : r;
}

double torus_distance(double a, double b) noexcept
{
    const double d = wrap_unit(std::fabs(a - b));
    return std::min(d, 1.0 - d);
}

SupportSet::SupportSet(std::vector<double> points) : points_(std::move(points))
{
    if (points_.empty()) {
        throw ValidationError("support set must contain at least one point");
    }
    for (double& p : points_) {
        if (!std::isfinite(p)) {
            throw ValidationError("support point is not finite");
        }
        p = wrap_unit(p);
    }
    std::sort(points_.begin(), points_.end());
    for (std::size_t j = 1; j < points_.size(); ++j) {
        if (points_[j] == points_[j - 1]) {
            std::ostringstream msg;
            msg << "support points must be distinct (duplicate at " << points_[j] << ")";
            throw ValidationError(msg.str());
        }
    }
    if (points_.size() > 1 && points_.front() + 1.0 == points_.back()) {
        throw ValidationError("support points must be distinct (wrap-around duplicate)");
    }
}

double min_separation(const SupportSet& support)
{
    const auto& p = support.points();
    if (p.size() < 2) {
        throw UndefinedSeparation();
    }
    // Sorted points: only neighbours (including the wrap pair) can realise the minimum.
    double best = torus_distance(p.front(), p.back());
    for (std::size_t j = 1; j < p.size(); ++j) {
        best = std::min(best, torus_distance(p[j], p[j - 1]));
    }
    return best;
}

double srf(const SupportSet& support, int M)
{
    if (M < 2) {
        throw ValidationError("SRF needs M >= 2");
    }
    return 1.0 / (static_cast<double>(M - 1) * min_separation(support));
}

// ---------------------------------------------------------------------------

ClumpsSpec ClumpsSpec::equispaced(int num_clumps, std::vector<int> clump_sizes, double alpha,
                                  double beta, int M, double offset)
{
    ClumpsSpec spec;
    spec.num_clumps = num_clumps;
    spec.clump_sizes = std::move(clump_sizes);
    spec.alpha = alpha;
    spec.beta = beta;
    spec.M = M;
    for (int r = 0; r < num_clumps; ++r) {
        spec.anchors.push_back(wrap_unit(offset + static_cast<double>(r) / num_clumps));
    }
    return spec;
}

int ClumpsSpec::largest_clump() const
{
    return clump_sizes.empty() ? 0 : *std::max_element(clump_sizes.begin(), clump_sizes.end());
}

int ClumpsSpec::total_points() const
{
    return std::accumulate(clump_sizes.begin(), clump_sizes.end(), 0);
}

bool ClumpsSpec::equal_sizes() const
{
    return std::adjacent_find(clump_sizes.begin(), clump_sizes.end(), std::not_equal_to<>()) ==
           clump_sizes.end();
}

namespace {

constexpr double kRelTol = 1e-9;

std::vector<std::vector<double>> clump_points(const ClumpsSpec& spec)
{
    std::vector<std::vector<double>> clumps;
    const double step = spec.spacing();
    for (int r = 0; r < spec.num_clumps; ++r) {
        std::vector<double> pts;
        for (int j = 0; j < spec.clump_sizes[static_cast<std::size_t>(r)]; ++j) {
            pts.push_back(wrap_unit(spec.anchors[static_cast<std::size_t>(r)] + j * step));
        }
        clumps.push_back(std::move(pts));
    }
    return clumps;
}

[[noreturn]] void reject(const char* clause, const std::string& what)
{
    throw ValidationError(std::string("separated-clumps condition ") + clause + " violated: " + what);
}

} // namespace

void validate(const ClumpsSpec& spec)
{
    if (spec.M < 2) {
        throw ValidationError("clumps spec needs M >= 2");
    }
    if (spec.num_clumps < 1) {
        throw ValidationError("clumps spec needs num_clumps >= 1");
    }
    const auto R = static_cast<std::size_t>(spec.num_clumps);
    if (spec.clump_sizes.size() != R) {
        throw ValidationError("clump_sizes must list one size per clump");
    }
    if (spec.anchors.size() != R) {
        throw ValidationError("anchors must list one point per clump");
    }
    if (std::any_of(spec.clump_sizes.begin(), spec.clump_sizes.end(), [](int s) { return s < 1; })) {
        throw ValidationError("clump sizes must be positive");
    }
    if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha)) {
        throw ValidationError("alpha must be positive");
    }
    if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) {
        throw ValidationError("beta must be positive");
    }

    const int widest = spec.largest_clump() - 1;
    // (a) each clump inside an interval of one Rayleigh length
    if (widest * spec.alpha > 1.0 + kRelTol) {
        std::ostringstream msg;
        msg << "clump width " << widest << "*alpha = " << widest * spec.alpha
            << " exceeds one Rayleigh length";
        reject("(a)", msg.str());
    }
    // (b) max (lambda_r - 1) < 1/alpha
    if (widest * spec.alpha >= 1.0) {
        std::ostringstream msg;
        msg << "max(lambda_r - 1) = " << widest << " is not below 1/alpha = " << 1.0 / spec.alpha;
        reject("(b)", msg.str());
    }

    const auto clumps = clump_points(spec);
    const double rayleigh = 1.0 / static_cast<double>(spec.M - 1);

    // (c) clumps pairwise at least beta/(M-1) apart
    if (R > 1) {
        for (std::size_t r = 0; r < R; ++r) {
            for (std::size_t s = r + 1; s < R; ++s) {
                double gap = 0.5;
                for (double a : clumps[r]) {
                    for (double b : clumps[s]) {
                        gap = std::min(gap, torus_distance(a, b));
                    }
                }
                if (gap < spec.beta * rayleigh * (1.0 - kRelTol)) {
                    std::ostringstream msg;
                    msg << "clumps " << r << " and " << s << " are " << gap
                        << " apart, below beta/(M-1) = " << spec.beta * rayleigh;
                    reject("(c)", msg.str());
                }
            }
        }
    }

    // (b) Delta >= alpha/(M-1) over the whole support
    std::vector<double> all;
    for (const auto& c : clumps) {
        all.insert(all.end(), c.begin(), c.end());
    }
    if (all.size() > 1) {
        std::sort(all.begin(), all.end());
        double delta = torus_distance(all.front(), all.back());
        for (std::size_t j = 1; j < all.size(); ++j) {
            delta = std::min(delta, torus_distance(all[j], all[j - 1]));
        }
        if (delta < spec.spacing() * (1.0 - kRelTol)) {
            std::ostringstream msg;
            msg << "minimum separation " << delta << " is below alpha/(M-1) = " << spec.spacing();
            reject("(b)", msg.str());
        }
    }
}

SupportSet generate_clumps_support(const ClumpsSpec& spec)
{
    validate(spec);
    std::vector<double> all;
    for (const auto& c : clump_points(spec)) {
        all.insert(all.end(), c.begin(), c.end());
    }
    return SupportSet(std::move(all));
}

// ---------------------------------------------------------------------------

namespace {

void require_sensors(int M)
{
    if (M < 1) {
        throw ValidationError("sensor count M must be >= 1");
    }
}

// exp(-2 pi i k omega) with k*omega reduced mod 1 before the trig call.
cdouble phasor(int k, double omega)
{
    const double t = wrap_unit(static_cast<double>(k) * omega);
    return std::polar(1.0, -kTwoPi * t);
}

} // namespace

CVector steering_vector(double omega, int M)
{
    require_sensors(M);
    omega = wrap_unit(omega);
    CVector v(M);
    for (int k = 0; k < M; ++k) {
        v(k) = phasor(k, omega);
    }
    return v;
}

CVector derivative_steering(double omega, int M)
{
    require_sensors(M);
    omega = wrap_unit(omega);
    CVector v(M);
    for (int k = 0; k < M; ++k) {
        v(k) = cdouble(0.0, -kTwoPi * k) * phasor(k, omega);
    }
    return v;
}

SteeringMatrix::SteeringMatrix(const SupportSet& support, int M)
{
    require_sensors(M);
    if (M < support.size()) {
        std::ostringstream msg;
        msg << "steering matrix needs M >= S (M = " << M << ", S = " << support.size() << ")";
        throw ValidationError(msg.str());
    }
    entries_.resize(M, support.size());
    for (int j = 0; j < support.size(); ++j) {
        entries_.col(j) = steering_vector(support[j], M);
    }
}

SteeringMatrix steering_matrix(const SupportSet& support, int M)
{
    return SteeringMatrix(support, M);
}

CMatrix derivative_steering_matrix(const SupportSet& support, int M)
{
    CMatrix out(M, support.size());
    for (int j = 0; j < support.size(); ++j) {
        out.col(j) = derivative_steering(support[j], M);
    }
    return out;
}

// ---------------------------------------------------------------------------

AmplitudeBatch::AmplitudeBatch(CMatrix scaled) : columns_(std::move(scaled))
{
    covariance_ = columns_ * columns_.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(covariance_, Eigen::EigenvaluesOnly);
    lambda_min_ = std::max(0.0, eig.eigenvalues().minCoeff());
    lambda_max_ = eig.eigenvalues().maxCoeff();
}

AmplitudeBatch AmplitudeBatch::from_snapshots(const CMatrix& raw)
{
    if (raw.rows() < 1 || raw.cols() < 1) {
        throw ValidationError("amplitude matrix must be non-empty");
    }
    return AmplitudeBatch(raw / std::sqrt(static_cast<double>(raw.cols())));
}

CMatrix circular_gaussian(int rows, int cols, Engine& engine)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            const double re = normal(engine);
            const double im = normal(engine);
            out(i, j) = cdouble(re, im);
        }
    }
    return out;
}

SnapshotBatch synthesize_snapshots(const SupportSet& support, int M, int L,
                                   const AmplitudeSource& amplitudes, const NoiseModel& noise,
                                   std::uint64_t seed)
{
    if (L < 1) {
        throw ValidationError("snapshot count L must be >= 1");
    }
    if (!(noise.nu >= 0.0) || !std::isfinite(noise.nu)) {
        throw ValidationError("noise level nu must be finite and non-negative");
    }
    const SteeringMatrix phi(support, M);
    const int S = support.size();

    CMatrix raw;
    if (const auto* explicit_amps = std::get_if<CMatrix>(&amplitudes)) {
        if (explicit_amps->rows() != S || explicit_amps->cols() != L) {
            std::ostringstream msg;
            msg << "explicit amplitudes must be " << S << " x " << L << ", got "
                << explicit_amps->rows() << " x " << explicit_amps->cols();
            throw ValidationError(msg.str());
        }
        raw = *explicit_amps;
    } else {
        Engine engine = make_engine(derive_seed(seed, 0, StreamTag::amplitudes));
        raw = circular_gaussian(S, L, engine);
    }
    AmplitudeBatch amps = AmplitudeBatch::from_snapshots(raw);

    SnapshotBatch batch;
    batch.M = M;
    batch.L = L;
    batch.data = phi.matrix() * amps.columns();
    if (noise.nu > 0.0) {
        Engine engine = make_engine(derive_seed(seed, 0, StreamTag::noise));
        const double scale = noise.nu / std::sqrt(static_cast<double>(L));
        batch.data += scale * circular_gaussian(M, L, engine);
    }
    batch.truth = GroundTruth{support, std::move(amps), noise, seed};
    return batch;
}

bool noise_level_admissible(double nu, double sigma_s, double lambda_s) noexcept
{
    return nu <= sigma_s * std::sqrt(std::max(0.0, lambda_s));
}

} // namespace supres
