#include "supres/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "supres/bounds.hpp"
#include "supres/esprit.hpp"
#include "supres/harness.hpp"
#include "supres/music.hpp"
#include "supres/rng.hpp"
#include "supres/subspace.hpp"

namespace supres::acceptance {

namespace {

using Results = std::vector<CriterionResult>;

constexpr int kM = 100;

// Two clumps of `lambda` points anchored at 0.2 and 0.7.
ClumpsSpec clumps(int lambda, double srf_value)
{
    return ClumpsSpec::equispaced(2, {lambda, lambda}, 1.0 / srf_value, 20.0, kM, 0.2);
}

CriterionResult entry(std::string id, std::string description)
{
    CriterionResult r;
    r.id = std::move(id);
    r.description = std::move(description);
    return r;
}

std::vector<double> logspace(double lo, double hi, int n)
{
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
        v.push_back(std::pow(10.0, lo + (hi - lo) * i / (n - 1)));
    }
    return v;
}

std::vector<double> srf_range(int lambda)
{
    // (lambda - 1) alpha < 1 excludes SRF = 2 once lambda = 3.
    std::vector<double> v;
    for (int s = lambda >= 3 ? 3 : 2; s <= 10; ++s) {
        v.push_back(s);
    }
    return v;
}

std::string fmt(double x, int precision = 3)
{
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

CriterionResult slope_line(std::string id, std::string description, const std::optional<LogLogFit>& fit,
                           double lo, double hi, bool gated = true)
{
    CriterionResult r;
    r.id = std::move(id);
    r.description = std::move(description);
    r.gated = gated;
    if (!fit) {
        r.passed = false;
        r.detail = "no slope (fewer than 3 usable points)";
        return r;
    }
    r.passed = fit->slope >= lo && fit->slope <= hi;
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << "slope " << fit->slope << " (residual " << fit->residual
       << "), required [" << lo << ", " << hi << "]";
    r.detail = os.str();
    return r;
}

const SweepResult& metric(const std::vector<SweepResult>& results, Metric m)
{
    for (const SweepResult& r : results) {
        if (r.metric == m) {
            return r;
        }
    }
    throw std::logic_error("sweep result missing");
}

std::optional<LogLogFit> refit(const SweepResult& r, Abscissa abscissa)
{
    std::vector<std::pair<double, double>> pts;
    for (const SweepRow& row : r.rows) {
        const double x = abscissa == Abscissa::value ? row.value : row.sigma_s;
        if (row.censored < row.n && row.mean > 0.0) {
            pts.emplace_back(x, row.mean);
        }
    }
    if (pts.size() < 3) {
        return std::nullopt;
    }
    return fit_loglog_slope(pts);
}

ProgressFn progress_to(const Options& o, const std::string& prefix)
{
    if (!o.log) {
        return {};
    }
    return [log = o.log, prefix](const std::string& msg) { *log << "  [" << prefix << "] " << msg << std::endl; };
}

ExperimentConfig base_config(const Options& o, int lambda, int L, double nu, int trials)
{
    ExperimentConfig c;
    c.geometry = clumps(lambda, 5.0);
    c.M = kM;
    c.L = L;
    c.nu = nu;
    c.trials = trials;
    c.root_seed = o.seed;
    c.threads = o.threads;
    c.estimator = Estimator::both;
    return c;
}

// ---------------------------------------------------------------------------

Results noiseless_exactness(const Options& o)
{
    Engine engine = make_engine(derive_seed(o.seed, 1, StreamTag::oracle));
    std::uniform_int_distribution<int> pick_s(1, 8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double worst_esprit = 0.0;
    double worst_music = 0.0;
    int degenerate = 0;
    std::string worst_music_case;
    for (int cfg = 0; cfg < 50; ++cfg) {
        const int S = pick_s(engine);
        const int M = std::uniform_int_distribution<int>(std::max(S + 1, 8), 64)(engine);
        const double min_gap = 0.3 / (M - 1);
        std::vector<double> pts;
        for (;;) {
            pts.clear();
            for (int j = 0; j < S; ++j) {
                pts.push_back(unit(engine));
            }
            bool ok = true;
            for (int a = 0; a < S && ok; ++a) {
                for (int b = a + 1; b < S && ok; ++b) {
                    ok = torus_distance(pts[a], pts[b]) >= min_gap;
                }
            }
            if (ok) {
                break;
            }
        }
        const SupportSet support(pts);
        const SnapshotBatch batch = synthesize_snapshots(support, M, S, CircularGaussianAmplitudes{},
                                                         NoiseModel{0.0}, engine());
        const auto basis = std::make_shared<const SubspaceBasis>(signal_space(empirical_covariance(batch), S));

        const double md_esprit = matching_distance(support, esprit_estimate(*basis).estimated_support);
        const SupportEstimate est = extract_support(sample_nsc(basis, 8192), S, true);
        const double md_music = matching_distance(support, est.support);
        degenerate += est.degenerate_peaks ? 1 : 0;
        worst_esprit = std::max(worst_esprit, md_esprit);
        if (md_music > worst_music) {
            worst_music = md_music;
            worst_music_case = "M=" + std::to_string(M) + " S=" + std::to_string(S);
        }
    }

    Results out;
    CriterionResult e = entry("1-esprit", "noiseless exactness, ESPRIT md <= 1e-9 on 50 random configs");
    e.passed = worst_esprit <= 1e-9;
    e.detail = "worst md " + fmt(worst_esprit);
    out.push_back(e);
    CriterionResult m = entry("1-music", "noiseless exactness, refined MUSIC (G=8192) md <= 1e-5 on 50 random configs");
    m.passed = worst_music <= 1e-5 && degenerate == 0;
    m.detail = "worst md " + fmt(worst_music) + (worst_music_case.empty() ? "" : " (" + worst_music_case + ")") +
               ", degenerate peak sets " + std::to_string(degenerate);
    out.push_back(m);
    return out;
}

CriterionResult crb_diagnostic(const std::string& id, const SweepResult& md, int lambda, int L, double nu,
                               bool sweep_nu)
{
    // E[X] = I for CN(0,1) amplitudes.
    const CMatrix X = CMatrix::Identity(2 * lambda, 2 * lambda);
    double worst = INFINITY;
    for (const SweepRow& row : md.rows) {
        const double n = sweep_nu ? row.value : nu;
        const int l = sweep_nu ? L : static_cast<int>(std::lround(row.value));
        const double bound = crb(generate_clumps_support(clumps(lambda, 5.0)), X, n, l, kM).trace_bound;
        worst = std::min(worst, row.mean_sq / bound);
    }
    CriterionResult r = entry(id, "ESPRIT mean md^2 over CRB trace bound (diagnostic, >= 0.5 expected)");
    r.gated = false;
    r.passed = worst >= 0.5;
    r.detail = "smallest ratio " + fmt(worst);
    return r;
}

Results slopes_lambda2(const Options& o)
{
    Results out;
    {
        ExperimentConfig c = base_config(o, 2, 1000, 0.1, 100);
        c.sweep = SweepAxis{SweepParameter::nu, logspace(-3.0, -1.5, 6)};
        const auto res = sweep(c, progress_to(o, "2"));
        out.push_back(slope_line("2-nsc", "nsc_sup vs nu (lambda=2, SRF=5, L=1000)",
                                 metric(res, Metric::nsc_sup).fit, 0.85, 1.15));
        out.push_back(slope_line("2-md", "ESPRIT md vs nu (lambda=2, SRF=5, L=1000)",
                                 metric(res, Metric::md).fit, 0.85, 1.15));
        out.push_back(crb_diagnostic("2-crb", metric(res, Metric::md), 2, 1000, 0.1, true));
    }
    {
        ExperimentConfig c = base_config(o, 2, 1000, 0.1, 100);
        c.sweep = SweepAxis{SweepParameter::L, logspace(2.0, 4.0, 6)};
        const auto res = sweep(c, progress_to(o, "3"));
        out.push_back(slope_line("3-nsc", "nsc_sup vs L (lambda=2, SRF=5, nu=0.1)",
                                 metric(res, Metric::nsc_sup).fit, -0.6, -0.4));
        out.push_back(slope_line("3-md", "ESPRIT md vs L (lambda=2, SRF=5, nu=0.1)",
                                 metric(res, Metric::md).fit, -0.6, -0.4));
        out.push_back(crb_diagnostic("3-crb", metric(res, Metric::md), 2, 1000, 0.1, false));
    }
    for (int lambda : {2, 3}) {
        // One SRF sweep feeds both the sigma_S fit and the SRF fit.
        ExperimentConfig c = base_config(o, lambda, 1000, 0.1, 100);
        c.sweep = SweepAxis{SweepParameter::srf, srf_range(lambda)};
        const std::string tag = "lambda=" + std::to_string(lambda) + ", L=1000, nu=0.1";
        const auto res = sweep(c, progress_to(o, "4/5 lambda=" + std::to_string(lambda)));
        const SweepResult& md = metric(res, Metric::md);
        const SweepResult& nsc = metric(res, Metric::nsc_sup);
        out.push_back(slope_line("4-md-lambda" + std::to_string(lambda), "ESPRIT md vs sigma_S(Phi) (" + tag + ")",
                                 refit(md, Abscissa::sigma_s), -1.25, -0.75));
        out.push_back(slope_line("4-nsc-lambda" + std::to_string(lambda),
                                 "nsc_sup vs sigma_S(Phi) (" + tag + "; diagnostic, floored by R_hat at the sources)",
                                 refit(nsc, Abscissa::sigma_s), -1.25, -0.75, false));
        if (lambda == 2) {
            out.push_back(slope_line("5-md-lambda2", "ESPRIT md vs SRF (" + tag + ")", refit(md, Abscissa::value),
                                     0.8, 1.2));
            out.push_back(slope_line("5-nsc-lambda2",
                                     "nsc_sup vs SRF (" + tag + "; diagnostic, floored by R_hat at the sources)",
                                     refit(nsc, Abscissa::value), 0.8, 1.2, false));
        }
    }
    return out;
}

Results slopes_lambda3(const Options& o)
{
    Results out;
    ExperimentConfig c = base_config(o, 3, 25000, 0.1, 200);
    c.sweep = SweepAxis{SweepParameter::srf, srf_range(3)};
    const auto res = sweep(c, progress_to(o, "5 lambda=3"));
    out.push_back(slope_line("5-md-lambda3", "ESPRIT md vs SRF (lambda=3, L=25000, nu=0.1, 200 trials)",
                             refit(metric(res, Metric::md), Abscissa::value), 1.7, 2.4));
    out.push_back(slope_line("5-nsc-lambda3",
                             "nsc_sup vs SRF (lambda=3, L=25000, nu=0.1; diagnostic, floored by R_hat at the sources)",
                             refit(metric(res, Metric::nsc_sup), Abscissa::value), 1.7, 2.4, false));
    return out;
}

Results sigma_law(const Options&)
{
    Results out;
    for (int lambda : {1, 2, 3}) {
        std::vector<std::pair<double, double>> pts;
        for (double s : srf_range(lambda)) {
            pts.emplace_back(s, sigma_s(SteeringMatrix(generate_clumps_support(clumps(lambda, s)), kM)));
        }
        const double expected = -(lambda - 1.0);
        out.push_back(slope_line("6-lambda" + std::to_string(lambda),
                                 "sigma_S(Phi) vs SRF by SVD (lambda=" + std::to_string(lambda) + ", M=100)",
                                 fit_loglog_slope(pts), expected - 0.3, expected + 0.3));
    }
    return out;
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

Results crb_checks(const Options& o)
{
    Results out;
    {
        Engine engine = make_engine(derive_seed(o.seed, 7, StreamTag::oracle));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double omega = unit(engine);
            const double xbar = 0.1 + 3.0 * unit(engine);
            const double nu = 0.01 + unit(engine);
            const int L = 1 + static_cast<int>(1000 * unit(engine));
            CMatrix X(1, 1);
            X(0, 0) = xbar;
            const double got = crb(SupportSet{omega}, X, nu, L, 2).trace_bound;
            worst = std::max(worst, rel(got, nu * nu / (4.0 * kPi * kPi * L * xbar)));
        }
        CriterionResult r = entry("7-closed-form", "CRB trace bound for S=1, M=2 equals nu^2/(4 pi^2 L xbar)");
        r.passed = worst <= 1e-9;
        r.detail = "worst relative error " + fmt(worst) + ", required <= 1e-9";
        out.push_back(r);
    }
    {
        const SupportSet support = generate_clumps_support(clumps(2, 4.0));
        CMatrix X = CMatrix::Identity(4, 4);
        X(0, 1) = cdouble(0.3, 0.1);
        X(1, 0) = std::conj(X(0, 1));
        const CrbResult base = crb(support, X, 0.2, 300, kM);
        const CrbResult nu2 = crb(support, X, 0.4, 300, kM);
        const CrbResult l2 = crb(support, X, 0.2, 600, kM);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < base.matrix.size(); ++i) {
            const double b = base.matrix.data()[i];
            if (b == 0.0) {
                continue;
            }
            worst = std::max(worst, rel(nu2.matrix.data()[i], 4.0 * b));
            worst = std::max(worst, rel(l2.matrix.data()[i], 0.5 * b));
        }
        CriterionResult r = entry("7-rescaling", "CRB matrix scales as nu^2 / L (entrywise)");
        r.passed = worst <= 1e-12;
        r.detail = "worst relative error " + fmt(worst) + ", required <= 1e-12";
        out.push_back(r);
    }
    for (int lambda : {2, 3}) {
        const CMatrix X = CMatrix::Identity(2 * lambda, 2 * lambda);
        std::vector<std::pair<double, double>> exact;
        std::vector<std::pair<double, double>> shape;
        for (double s : srf_range(lambda)) {
            const ClumpsSpec spec = clumps(lambda, s);
            const CrbResult c = crb(spec, X, 1.0, 1);
            exact.emplace_back(s, c.trace_bound);
            shape.emplace_back(s, *c.scaling_reference);
        }
        const double expected = 2.0 * lambda - 2.0;
        CriterionResult r = slope_line("8-lambda" + std::to_string(lambda),
                                       "exact CRB trace bound vs SRF (lambda=" + std::to_string(lambda) + ", M=100)",
                                       fit_loglog_slope(exact), expected - 0.3, expected + 0.3);
        r.detail += "; constant-free shape slope " + fmt(fit_loglog_slope(shape).slope);
        out.push_back(r);
    }
    return out;
}

CMatrix random_orthonormal(int M, int S, Engine& engine)
{
    return orthonormal_basis(circular_gaussian(M, S, engine)).basis;
}

Results oracle_checks(const Options& o)
{
    Results out;
    Engine engine = make_engine(derive_seed(o.seed, 9, StreamTag::oracle));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    {
        int mismatches = 0;
        for (int i = 0; i < 1000; ++i) {
            const int S = 1 + static_cast<int>(engine() % 8);
            std::vector<double> a, b;
            for (int j = 0; j < S; ++j) {
                a.push_back(unit(engine));
                // Half the instances are small perturbations, half unrelated sets.
                b.push_back(i % 2 ? unit(engine) : wrap_unit(a.back() + 0.02 * normal(engine)));
            }
            try {
                const SupportSet ta(a), tb(b);
                mismatches += matching_distance_cyclic(ta, tb) != matching_distance_bruteforce(ta, tb) ? 1 : 0;
            } catch (const ValidationError&) {
                --i; // coincident draw; redraw
            }
        }
        CriterionResult r = entry("9-matching", "cyclic matcher equals brute force on 1000 random instances (S <= 8)");
        r.passed = mismatches == 0;
        r.detail = std::to_string(mismatches) + " mismatches";
        out.push_back(r);
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const int M = 4 + static_cast<int>(engine() % 29);
            const int S = 1 + static_cast<int>(engine() % (M - 1));
            SubspaceBasis a = orthonormal_basis(random_orthonormal(M, S, engine));
            SubspaceBasis b = orthonormal_basis(random_orthonormal(M, S, engine));
            worst = std::max(worst, std::abs(projector_distance(a, b) - cosine_form_distance(a, b)));
        }
        CriterionResult r = entry("9-dist", "||P_A - P_B||_2 equals sqrt(1 - sigma_S(A*B)^2) on 100 random pairs");
        r.passed = worst <= 1e-10;
        r.detail = "worst difference " + fmt(worst) + ", required <= 1e-10";
        out.push_back(r);
    }
    {
        double worst = 0.0;
        const double h = 1e-6;
        for (int i = 0; i < 100; ++i) {
            const int M = 2 + static_cast<int>(engine() % 63);
            const double w = unit(engine);
            const CVector fd = (steering_vector(w + h, M) - steering_vector(w - h, M)) / (2.0 * h);
            worst = std::max(worst, (derivative_steering(w, M) - fd).cwiseAbs().maxCoeff());
        }
        CriterionResult r = entry("9-derivative", "derivative steering vector matches central differences");
        r.passed = worst <= 1e-4;
        r.detail = "worst entry error " + fmt(worst) + ", required <= 1e-4";
        out.push_back(r);
    }
    return out;
}

Results nsc_inequality(const Options& o)
{
    Engine engine = make_engine(derive_seed(o.seed, 10, StreamTag::oracle));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_excess = -INFINITY;
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const int M = 2 + static_cast<int>(engine() % 31);
        const int S = 1 + static_cast<int>(engine() % (M - 1));
        const CMatrix a = random_orthonormal(M, S, engine);
        // Mix of unrelated pairs and small rotations of A.
        const double scale = i % 3 == 0 ? 1.0 : std::pow(10.0, -6.0 * unit(engine));
        const CMatrix b = i % 3 == 0 ? random_orthonormal(M, S, engine)
                                     : CMatrix(a + scale * circular_gaussian(M, S, engine));
        const SubspaceBasis A = orthonormal_basis(a);
        const SubspaceBasis B = orthonormal_basis(b);
        const double w = unit(engine);
        const double excess = std::abs(noise_space_correlation(A, w) - noise_space_correlation(B, w)) -
                              sin_theta_distance(A, B);
        worst_excess = std::max(worst_excess, excess);
        violations += excess > 1e-12 ? 1 : 0;
    }
    CriterionResult r = entry("10", "|R_A(w) - R_B(w)| <= sin-theta distance on 1000 random (A, B, w)");
    r.passed = violations == 0;
    r.detail = std::to_string(violations) + " violations, largest excess " + fmt(worst_excess) + " (slack 1e-12)";
    return {r};
}

CriterionResult phase_line(const std::string& id, const std::string& description, const PhaseGrid& grid,
                           double expected, double tol)
{
    CriterionResult r = slope_line(id, description, grid.transition_fit, expected - tol, expected + tol);
    r.detail += "; crossings " + std::to_string(grid.crossings.size()) + "/" +
                std::to_string(grid.axis1.values.size());
    return r;
}

Results phase_checks(const Options& o)
{
    Results out;
    {
        ExperimentConfig c = base_config(o, 2, 1000, 0.1, 50);
        const PhaseGrid g = phase_grid(c, SweepAxis{SweepParameter::L, logspace(1.0, 3.0, 6)},
                                       SweepAxis{SweepParameter::nu, logspace(-1.0, 1.0, 6)}, -1.0,
                                       progress_to(o, "11 nu-L"));
        out.push_back(phase_line("11-nu-L", "phase transition nu vs L (lambda=2, SRF=5, 6x6, 50 trials)", g, 0.5,
                                 0.15));
    }
    {
        ExperimentConfig c = base_config(o, 2, 1000, 0.1, 50);
        const PhaseGrid g = phase_grid(c, SweepAxis{SweepParameter::srf, logspace(std::log10(2.0), 1.0, 6)},
                                       SweepAxis{SweepParameter::nu, logspace(-1.0, 1.0, 6)}, -1.0,
                                       progress_to(o, "11 nu-SRF lambda=2"));
        out.push_back(phase_line("11-nu-SRF-lambda2", "phase transition nu vs SRF (lambda=2, L=1000, 6x6, 50 trials)",
                                 g, -1.0, 0.3));
    }
    {
        ExperimentConfig c = base_config(o, 3, 25000, 0.1, 50);
        const PhaseGrid g = phase_grid(c, SweepAxis{SweepParameter::srf, logspace(std::log10(3.0), 1.0, 6)},
                                       SweepAxis{SweepParameter::nu, logspace(-2.0, 0.5, 6)}, -1.0,
                                       progress_to(o, "11 nu-SRF lambda=3"));
        out.push_back(phase_line("11-nu-SRF-lambda3",
                                 "phase transition nu vs SRF (lambda=3, L=25000, 6x6, 50 trials)", g, -2.0, 0.3));
    }
    return out;
}

using SuiteFn = std::function<Results(const Options&)>;

Results timed(const SuiteFn& fn, const Options& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    Results r = fn(o);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (CriterionResult& c : r) {
        c.seconds = s;
    }
    return r;
}

std::vector<SuiteFn> suite_parts(const std::string& name)
{
    if (name == "exactness") return {noiseless_exactness};
    if (name == "slopes-lambda2") return {slopes_lambda2};
    if (name == "slopes-lambda3") return {slopes_lambda3};
    if (name == "sigma") return {sigma_law};
    if (name == "crb") return {crb_checks};
    if (name == "oracles") return {oracle_checks, nsc_inequality};
    if (name == "phase") return {phase_checks};
    if (name == "fast") return {noiseless_exactness, sigma_law, crb_checks, oracle_checks, nsc_inequality};
    if (name == "all") {
        return {noiseless_exactness, slopes_lambda2, slopes_lambda3, sigma_law,
                crb_checks,          oracle_checks,  nsc_inequality, phase_checks};
    }
    throw std::invalid_argument("unknown check suite \"" + name + "\"");
}

} // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = {"exactness", "slopes-lambda2", "slopes-lambda3", "sigma",
                                                   "crb",       "oracles",        "phase",          "fast",
                                                   "all"};
    return names;
}

std::vector<CriterionResult> run_suite(const std::string& name, const Options& options)
{
    Results out;
    for (const SuiteFn& part : suite_parts(name)) {
        Results r = timed(part, options);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

std::string format(const CriterionResult& r)
{
    std::ostringstream os;
    os << (r.gated ? (r.passed ? "PASS" : "FAIL") : "INFO") << "  [" << r.id << "] " << r.description << ": "
       << r.detail << " (group " << std::fixed << std::setprecision(1) << r.seconds << " s)";
    return os.str();
}

bool all_passed(const std::vector<CriterionResult>& results)
{
    for (const CriterionResult& r : results) {
        if (r.gated && !r.passed) {
            return false;
        }
    }
    return true;
}

} // namespace supres::acceptance
