#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "supres/music.hpp"
#include "supres/signal_model.hpp"

namespace supres {

enum class Estimator { music, esprit, both };
enum class Metric { nsc_sup, md };

/// What a sweep value sets. `srf` sets alpha = 1/SRF, `alpha` sets alpha
/// directly; both require clump geometry and keep M and the anchors fixed.
enum class SweepParameter { nu, L, srf, alpha };

/// Abscissa used for the sweep's slope fit: the swept value itself or
/// sigma_S(Phi) of the configuration it produces.
enum class Abscissa { value, sigma_s };

const char* to_string(Estimator e) noexcept;
const char* to_string(Metric m) noexcept;
const char* to_string(SweepParameter p) noexcept;
const char* to_string(Abscissa a) noexcept;

struct SweepAxis {
    SweepParameter parameter = SweepParameter::nu;
    std::vector<double> values;
};

struct PhaseSpec {
    SweepAxis axis1;
    SweepAxis axis2;
    double threshold = -1.0; // level of mean log2(md / Delta) marking the transition
};

struct ExperimentConfig {
    std::variant<ClumpsSpec, SupportSet> geometry = ClumpsSpec{};
    int M = 100;
    int L = 1000;
    double nu = 0.1;
    Estimator estimator = Estimator::both;
    int trials = 100;
    std::uint64_t root_seed = 1;
    int grid_size = 0;          // 0: default_grid_size(M)
    bool music_extract = false; // also run MUSIC support extraction and record its md
    bool refine = true;
    int threads = 1;
    std::optional<SweepAxis> sweep;
    Abscissa abscissa = Abscissa::value;
    std::optional<PhaseSpec> phase;
};

/// Checks the fixed configuration (geometry, M, L, nu, trials, grid).
void validate(const ExperimentConfig& config);

/// Copy of `config` with one parameter replaced; L values are rounded.
ExperimentConfig with_parameter(const ExperimentConfig& config, SweepParameter parameter,
                                double value);

SupportSet resolve_support(const ExperimentConfig& config);

/// Everything about one configuration that does not depend on the trial.
class TrialContext {
public:
    explicit TrialContext(ExperimentConfig config);

    const ExperimentConfig& config() const noexcept { return config_; }
    const SupportSet& support() const noexcept { return support_; }
    const SteeringMatrix& phi() const noexcept { return phi_; }
    double sigma_s() const noexcept { return sigma_s_; }
    std::optional<double> delta() const noexcept { return delta_; }
    int grid_size() const noexcept { return grid_size_; }
    /// Profile of the true signal space; null when MUSIC is not run.
    const NscProfile* true_profile() const noexcept { return true_profile_.get(); }

private:
    ExperimentConfig config_;
    SupportSet support_;
    SteeringMatrix phi_;
    double sigma_s_ = 0.0;
    std::optional<double> delta_;
    int grid_size_ = 0;
    std::shared_ptr<const NscProfile> true_profile_;
};

struct TrialOutcome {
    std::optional<double> nsc_sup;
    std::optional<double> md;
    std::optional<double> music_md;
    bool music_censored = false;
    bool esprit_censored = false;
    bool music_degenerate_peaks = false;
    // nu <= sigma_S(Phi) sqrt(lambda_S(X)) for this trial's amplitudes.
    bool noise_admissible = false;
};

/// Censoring values: a failed ESPRIT trial counts as md = 1/2 (torus
/// diameter), a failed MUSIC trial as nsc_sup = 1.
inline constexpr double kCensoredMd = 0.5;
inline constexpr double kCensoredNsc = 1.0;

/// One Monte-Carlo trial; deterministic in (root_seed, trial_index).
TrialOutcome run_trial(const TrialContext& context, std::uint64_t trial_index);
TrialOutcome run_trial(const ExperimentConfig& config, std::uint64_t trial_index);

/// Trials 0..n-1, in index order, on up to `threads` worker threads.
std::vector<TrialOutcome> run_trials(const TrialContext& context, int trials, int threads);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // RMS residual in log10 units
};

/// Ordinary least squares of log10 y on log10 x. Needs >= 3 points with
/// positive coordinates.
LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

struct SweepRow {
    double value = 0.0;
    double sigma_s = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double mean_sq = 0.0; // mean of the squared metric
    int n = 0;
    int censored = 0;
};

struct SweepResult {
    Metric metric = Metric::md;
    SweepParameter parameter = SweepParameter::nu;
    Abscissa abscissa = Abscissa::value;
    std::vector<SweepRow> rows;
    std::optional<LogLogFit> fit;
    // Rows left out of the fit because every trial was censored.
    std::vector<std::size_t> excluded;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Runs config.sweep and returns one result per metric of the estimator
/// (nsc_sup for MUSIC, md for ESPRIT, both for `both`).
std::vector<SweepResult> sweep(const ExperimentConfig& config, const ProgressFn& progress = {});

struct PhaseCrossing {
    double axis1 = 0.0;
    double axis2 = 0.0;
};

struct PhaseGrid {
    SweepAxis axis1;
    SweepAxis axis2;
    double threshold = -1.0;
    std::vector<double> cells; // row-major: cells[i1 * |axis2| + i2]
    std::vector<PhaseCrossing> crossings;
    std::vector<std::size_t> columns_without_crossing;
    std::optional<LogLogFit> transition_fit;

    double cell(std::size_t i1, std::size_t i2) const { return cells.at(i1 * axis2.values.size() + i2); }
};

/// Mean log2(md / Delta) of the ESPRIT pipeline on every (axis1, axis2) cell.
/// For every axis1 value the first crossing of `threshold` along axis2 is
/// located by linear interpolation in (log10 axis2, cell) and the crossings
/// are fitted as log10 axis2 against log10 axis1.
PhaseGrid phase_grid(const ExperimentConfig& config, const SweepAxis& axis1, const SweepAxis& axis2,
                     double threshold = -1.0, const ProgressFn& progress = {});

/// Crossing search and fit on precomputed cells.
void locate_transition(PhaseGrid& grid);

/// Lower clamp applied to md before taking log2.
inline constexpr double kMdFloor = 1e-15;

/// --threads fallback: SPECTRAL_THREADS if set and positive, else 1.
int default_thread_count();

} // namespace supres
