#include "supres/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "supres/bounds.hpp"
#include "supres/esprit.hpp"
#include "supres/rng.hpp"
#include "supres/subspace.hpp"

namespace supres {

const char* to_string(Estimator e) noexcept
{
    switch (e) {
    case Estimator::music: return "music";
    case Estimator::esprit: return "esprit";
    case Estimator::both: return "both";
    }
    return "?";
}

const char* to_string(Metric m) noexcept
{
    return m == Metric::nsc_sup ? "nsc_sup" : "md";
}

const char* to_string(SweepParameter p) noexcept
{
    switch (p) {
    case SweepParameter::nu: return "nu";
    case SweepParameter::L: return "L";
    case SweepParameter::srf: return "srf";
    case SweepParameter::alpha: return "alpha";
    }
    return "?";
}

const char* to_string(Abscissa a) noexcept
{
    return a == Abscissa::value ? "value" : "sigma_s";
}

SupportSet resolve_support(const ExperimentConfig& config)
{
    if (const auto* spec = std::get_if<ClumpsSpec>(&config.geometry)) {
        if (spec->M != config.M) {
            throw ValidationError("clumps M must equal the experiment M");
        }
        return generate_clumps_support(*spec);
    }
    return std::get<SupportSet>(config.geometry);
}

void validate(const ExperimentConfig& config)
{
    if (config.M < 2) {
        throw ValidationError("M must be >= 2");
    }
    if (config.L < 1) {
        throw ValidationError("L must be >= 1");
    }
    if (!(config.nu >= 0.0) || !std::isfinite(config.nu)) {
        throw ValidationError("nu must be finite and >= 0");
    }
    if (config.trials < 1) {
        throw ValidationError("trials must be >= 1");
    }
    if (config.threads < 1) {
        throw ValidationError("threads must be >= 1");
    }
    const SupportSet support = resolve_support(config);
    if (support.size() + 1 > config.M) {
        throw ValidationError("M must be at least S + 1");
    }
    const int G = config.grid_size > 0 ? config.grid_size : default_grid_size(config.M);
    if (config.estimator != Estimator::esprit && G < 4 * config.M) {
        throw ValidationError("grid size must be >= 4M");
    }
}

ExperimentConfig with_parameter(const ExperimentConfig& config, SweepParameter parameter, double value)
{
    ExperimentConfig out = config;
    switch (parameter) {
    case SweepParameter::nu:
        out.nu = value;
        break;
    case SweepParameter::L:
        if (!(value >= 1.0) || !std::isfinite(value)) {
            throw ValidationError("swept L must be >= 1");
        }
        out.L = static_cast<int>(std::lround(value));
        break;
    case SweepParameter::srf:
    case SweepParameter::alpha: {
        auto* spec = std::get_if<ClumpsSpec>(&out.geometry);
        if (spec == nullptr) {
            throw ValidationError(std::string("sweeping ") + to_string(parameter) +
                                  " needs clump geometry");
        }
        if (!(value > 0.0)) {
            throw ValidationError(std::string("swept ") + to_string(parameter) + " must be positive");
        }
        spec->alpha = parameter == SweepParameter::srf ? 1.0 / value : value;
        break;
    }
    }
    validate(out);
    return out;
}

TrialContext::TrialContext(ExperimentConfig config)
    : config_(std::move(config)), support_(resolve_support(config_)), phi_(support_, config_.M)
{
    validate(config_);
    sigma_s_ = supres::sigma_s(phi_);
    if (support_.size() > 1) {
        delta_ = min_separation(support_);
    }
    grid_size_ = config_.grid_size > 0 ? config_.grid_size : default_grid_size(config_.M);
    if (config_.estimator != Estimator::esprit) {
        auto truth = std::make_shared<const SubspaceBasis>(true_signal_space(phi_));
        true_profile_ = std::make_shared<const NscProfile>(
            sample_nsc(truth, grid_size_, kernels::best_isa(), "true"));
    }
}

TrialOutcome run_trial(const TrialContext& context, std::uint64_t trial_index)
{
    const ExperimentConfig& cfg = context.config();
    const int S = context.support().size();
    const SnapshotBatch batch =
        synthesize_snapshots(context.support(), cfg.M, cfg.L, CircularGaussianAmplitudes{},
                             NoiseModel{cfg.nu}, derive_seed(cfg.root_seed, trial_index));
    TrialOutcome out;
    out.noise_admissible =
        noise_level_admissible(cfg.nu, context.sigma_s(), batch.truth->amplitudes.lambda_min());
    std::shared_ptr<const SubspaceBasis> basis;
    try {
        basis = std::make_shared<const SubspaceBasis>(signal_space(empirical_covariance(batch), S));
    } catch (const EstimatorError&) {
        if (cfg.estimator != Estimator::esprit) {
            out.music_censored = true;
            out.nsc_sup = kCensoredNsc;
            if (cfg.music_extract) {
                out.music_md = kCensoredMd;
            }
        }
        if (cfg.estimator != Estimator::music) {
            out.esprit_censored = true;
            out.md = kCensoredMd;
        }
        return out;
    }
    if (cfg.estimator != Estimator::esprit) {
        try {
            const NscProfile profile = sample_nsc(basis, context.grid_size(), kernels::best_isa(), "empirical");
            out.nsc_sup = nsc_sup_perturbation(*context.true_profile(), profile);
            if (cfg.music_extract) {
                const SupportEstimate est = extract_support(profile, S, cfg.refine);
                out.music_degenerate_peaks = est.degenerate_peaks;
                out.music_md = matching_distance(context.support(), est.support);
            }
        } catch (const ValidationError&) {
            out.music_censored = true;
            out.nsc_sup = out.nsc_sup.value_or(kCensoredNsc);
            if (cfg.music_extract) {
                out.music_md = kCensoredMd;
            }
        }
    }
    if (cfg.estimator != Estimator::music) {
        try {
            const EspritSolution sol = esprit_estimate(*basis);
            out.md = matching_distance(context.support(), sol.estimated_support);
        } catch (const EstimatorError&) {
            out.esprit_censored = true;
            out.md = kCensoredMd;
        }
    }
    return out;
}

TrialOutcome run_trial(const ExperimentConfig& config, std::uint64_t trial_index)
{
    return run_trial(TrialContext(config), trial_index);
}

std::vector<TrialOutcome> run_trials(const TrialContext& context, int trials, int threads)
{
    if (trials < 1) {
        throw ValidationError("trials must be >= 1");
    }
    std::vector<TrialOutcome> out(static_cast<std::size_t>(trials));
    const int workers = std::max(1, std::min(threads, trials));
    if (workers == 1) {
        for (int i = 0; i < trials; ++i) {
            out[static_cast<std::size_t>(i)] = run_trial(context, static_cast<std::uint64_t>(i));
        }
        return out;
    }

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int i = next++; i < trials; i = next++) {
            try {
                out[static_cast<std::size_t>(i)] = run_trial(context, static_cast<std::uint64_t>(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = trials;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points)
{
    if (points.size() < 3) {
        throw ValidationError("a log-log fit needs at least 3 points");
    }
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
            throw ValidationError("log-log fit needs positive finite coordinates");
        }
        sx += std::log10(x);
        sy += std::log10(y);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log10(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log10(y) - my);
    }
    if (!(sxx > 0.0)) {
        throw ValidationError("log-log fit needs at least two distinct abscissae");
    }
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (const auto& [x, y] : points) {
        const double r = std::log10(y) - (fit.intercept + fit.slope * std::log10(x));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

namespace {

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
    double mean_sq = 0.0;
};

Moments moments(const std::vector<double>& v)
{
    Moments m;
    for (double x : v) {
        m.mean += x;
        m.mean_sq += x * x;
    }
    m.mean /= static_cast<double>(v.size());
    m.mean_sq /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) {
            ss += (x - m.mean) * (x - m.mean);
        }
        m.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return m;
}

void finish_fit(SweepResult& result)
{
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const SweepRow& row = result.rows[i];
        const double x = result.abscissa == Abscissa::value ? row.value : row.sigma_s;
        if (row.censored == row.n || !(row.mean > 0.0) || !(x > 0.0)) {
            result.excluded.push_back(i);
            continue;
        }
        pts.emplace_back(x, row.mean);
    }
    if (pts.size() >= 3) {
        result.fit = fit_loglog_slope(pts);
    }
}

} // namespace

std::vector<SweepResult> sweep(const ExperimentConfig& config, const ProgressFn& progress)
{
    if (!config.sweep || config.sweep->values.size() < 3) {
        throw ValidationError("a sweep needs at least 3 values");
    }
    const SweepAxis& axis = *config.sweep;
    std::vector<Metric> metrics;
    if (config.estimator != Estimator::esprit) {
        metrics.push_back(Metric::nsc_sup);
    }
    if (config.estimator != Estimator::music) {
        metrics.push_back(Metric::md);
    }
    std::vector<SweepResult> results;
    for (Metric m : metrics) {
        SweepResult r;
        r.metric = m;
        r.parameter = axis.parameter;
        r.abscissa = config.abscissa;
        results.push_back(std::move(r));
    }

    for (double value : axis.values) {
        const TrialContext ctx(with_parameter(config, axis.parameter, value));
        const auto outcomes = run_trials(ctx, config.trials, config.threads);
        for (SweepResult& r : results) {
            std::vector<double> samples;
            int censored = 0;
            for (const TrialOutcome& o : outcomes) {
                if (r.metric == Metric::nsc_sup) {
                    samples.push_back(*o.nsc_sup);
                    censored += o.music_censored ? 1 : 0;
                } else {
                    samples.push_back(*o.md);
                    censored += o.esprit_censored ? 1 : 0;
                }
            }
            const Moments mo = moments(samples);
            r.rows.push_back({value, ctx.sigma_s(), mo.mean, mo.stddev, mo.mean_sq, static_cast<int>(samples.size()), censored});
        }
        if (progress) {
            std::ostringstream msg;
            msg << to_string(axis.parameter) << "=" << value << " done";
            progress(msg.str());
        }
    }
    for (SweepResult& r : results) {
        finish_fit(r);
    }
    return results;
}

void locate_transition(PhaseGrid& grid)
{
    const std::size_t n1 = grid.axis1.values.size();
    const std::size_t n2 = grid.axis2.values.size();
    if (grid.cells.size() != n1 * n2) {
        throw ValidationError("phase grid cell count does not match its axes");
    }
    grid.crossings.clear();
    grid.columns_without_crossing.clear();
    grid.transition_fit.reset();
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        bool found = false;
        for (std::size_t i2 = 0; i2 + 1 < n2 && !found; ++i2) {
            const double c0 = grid.cell(i1, i2) - grid.threshold;
            const double c1 = grid.cell(i1, i2 + 1) - grid.threshold;
            const double v0 = grid.axis2.values[i2];
            const double v1 = grid.axis2.values[i2 + 1];
            if (c0 == 0.0) {
                grid.crossings.push_back({grid.axis1.values[i1], v0});
                found = true;
            } else if ((c0 < 0.0) != (c1 < 0.0) && c1 != 0.0) {
                const double t = c0 / (c0 - c1);
                const double y = std::log10(v0) + t * (std::log10(v1) - std::log10(v0));
                grid.crossings.push_back({grid.axis1.values[i1], std::pow(10.0, y)});
                found = true;
            } else if (c1 == 0.0) {
                grid.crossings.push_back({grid.axis1.values[i1], v1});
                found = true;
            }
        }
        if (!found) {
            grid.columns_without_crossing.push_back(i1);
        }
    }
    if (grid.crossings.size() >= 3) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& c : grid.crossings) {
            pts.emplace_back(c.axis1, c.axis2);
        }
        grid.transition_fit = fit_loglog_slope(pts);
    }
}

PhaseGrid phase_grid(const ExperimentConfig& config, const SweepAxis& axis1, const SweepAxis& axis2,
                     double threshold, const ProgressFn& progress)
{
    if (axis1.values.size() < 4 || axis2.values.size() < 4) {
        throw ValidationError("phase grid axes need at least 4 values each");
    }
    if (axis1.parameter == axis2.parameter) {
        throw ValidationError("phase grid axes must sweep different parameters");
    }
    for (const SweepAxis* axis : {&axis1, &axis2}) {
        for (double v : axis->values) {
            if (!(v > 0.0)) {
                throw ValidationError("phase grid axis values must be positive");
            }
        }
    }
    ExperimentConfig base = config;
    base.estimator = Estimator::esprit;

    PhaseGrid grid;
    grid.axis1 = axis1;
    grid.axis2 = axis2;
    grid.threshold = threshold;
    for (double v1 : axis1.values) {
        for (double v2 : axis2.values) {
            const TrialContext ctx(with_parameter(with_parameter(base, axis1.parameter, v1),
                                                  axis2.parameter, v2));
            if (!ctx.delta()) {
                throw ValidationError("phase grids need S >= 2 (log2(md / Delta))");
            }
            const auto outcomes = run_trials(ctx, base.trials, base.threads);
            double sum = 0.0;
            for (const TrialOutcome& o : outcomes) {
                sum += std::log2(std::max(*o.md, kMdFloor) / *ctx.delta());
            }
            grid.cells.push_back(sum / static_cast<double>(outcomes.size()));
        }
        if (progress) {
            std::ostringstream msg;
            msg << to_string(axis1.parameter) << "=" << v1 << " column done";
            progress(msg.str());
        }
    }
    locate_transition(grid);
    return grid;
}

int default_thread_count()
{
    if (const char* env = std::getenv("SPECTRAL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 4096) {
            return static_cast<int>(v);
        }
    }
    return 1;
}

} // namespace supres
