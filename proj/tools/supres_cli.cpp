#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "supres/acceptance.hpp"
#include "supres/bounds.hpp"
#include "supres/esprit.hpp"
#include "supres/harness.hpp"
#include "supres/io.hpp"
#include "supres/music.hpp"
#include "supres/rng.hpp"
#include "supres/subspace.hpp"

namespace {

using namespace supres;
using supres::io::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitCheckFailed = 3;

struct Invocation {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> threads;
    std::string suite;
    bool verbose = false;
};

ExperimentConfig load(const Invocation& inv)
{
    ExperimentConfig c = io::load_config(inv.config_path);
    if (inv.seed) {
        c.root_seed = *inv.seed;
    }
    if (inv.threads) {
        c.threads = *inv.threads;
    } else if (std::getenv("SPECTRAL_THREADS")) {
        c.threads = default_thread_count();
    }
    validate(c);
    return c;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path);
    if (!os) {
        throw ValidationError("cannot write " + path);
    }
    return os;
}

ProgressFn progress(const Invocation& inv)
{
    if (!inv.verbose) {
        return {};
    }
    return [](const std::string& msg) { std::cerr << msg << std::endl; };
}

// Trial 0 of the configuration: the snapshots run_trial(config, 0) sees.
SnapshotBatch trial_batch(const ExperimentConfig& c, const SupportSet& support)
{
    return synthesize_snapshots(support, c.M, c.L, CircularGaussianAmplitudes{}, NoiseModel{c.nu},
                                derive_seed(c.root_seed, 0));
}

int run_music(const Invocation& inv)
{
    const ExperimentConfig c = load(inv);
    const SupportSet support = resolve_support(c);
    const SnapshotBatch batch = trial_batch(c, support);
    const auto basis = std::make_shared<const SubspaceBasis>(
        signal_space(empirical_covariance(batch), support.size()));
    const int G = c.grid_size > 0 ? c.grid_size : default_grid_size(c.M);
    const NscProfile profile = sample_nsc(basis, G, kernels::best_isa(), "empirical");
    const std::string out = inv.out.empty() ? "profile.csv" : inv.out;
    auto os = open_out(out);
    io::write_profile_csv(os, profile);

    const SupportEstimate est = extract_support(profile, support.size(), c.refine);
    json summary = {{"estimated_support", est.support.points()},
                    {"md", matching_distance(support, est.support)},
                    {"degenerate_peaks", est.degenerate_peaks},
                    {"grid_size", G},
                    {"isa", kernels::isa_name(kernels::best_isa())},
                    {"profile", out}};
    std::cout << summary.dump(2) << std::endl;
    return kExitOk;
}

int run_esprit(const Invocation& inv)
{
    const ExperimentConfig c = load(inv);
    const SupportSet support = resolve_support(c);
    const SnapshotBatch batch = trial_batch(c, support);
    const EspritSolution sol = esprit_estimate(signal_space(empirical_covariance(batch), support.size()));
    json eig = json::array();
    for (const cdouble& z : sol.eigenvalues) {
        eig.push_back({z.real(), z.imag()});
    }
    const json result = {{"estimated_support", sol.estimated_support.points()},
                         {"md", matching_distance(support, sol.estimated_support)},
                         {"eigenvalues", eig}};
    const std::string out = inv.out.empty() ? "result.json" : inv.out;
    auto os = open_out(out);
    os << result.dump(2) << '\n';
    if (inv.verbose) {
        std::cout << result.dump(2) << std::endl;
    }
    return kExitOk;
}

json nullable(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

int run_bounds(const Invocation& inv)
{
    const ExperimentConfig c = load(inv);
    const SupportSet support = resolve_support(c);
    const int S = support.size();
    const SteeringMatrix phi(support, c.M);
    // Population amplitude covariance of i.i.d. CN(0,1) amplitudes.
    const CMatrix X = CMatrix::Identity(S, S);

    BoundInputs in;
    in.M = c.M;
    in.S = S;
    in.L = c.L;
    in.nu = c.nu;
    in.lambda_s = 1.0;
    in.sigma_s = sigma_s(phi);
    std::optional<double> srf_value;
    if (S > 1) {
        in.delta = min_separation(support);
        srf_value = srf(support, c.M);
    }

    json bounds = json::object();
    std::optional<double> xi, rho;
    for (const TheoryBound& b : bound_shapes(in)) {
        if (b.name == "xi") {
            xi = b.value;
        } else if (b.name == "rho") {
            rho = b.value;
        } else {
            bounds[b.name] = {{"value", b.value}, {"constant_free", b.constant_free}};
        }
    }
    const CrbResult cr = crb(support, X, c.nu, c.L, c.M);
    std::optional<double> scaling;
    if (const auto* spec = std::get_if<ClumpsSpec>(&c.geometry); spec && spec->equal_sizes()) {
        scaling = crb_clumps_scaling(*spec, X, c.nu, c.L);
    }
    const json out = {{"sigma_S", in.sigma_s},
                      {"srf", nullable(srf_value)},
                      {"xi", nullable(xi)},
                      {"rho", nullable(rho)},
                      {"bounds", bounds},
                      {"crb_trace", cr.trace_bound},
                      {"crb_rcond", cr.reciprocal_condition},
                      {"crb_clumps_scaling", nullable(scaling)}};
    std::cout << out.dump(2) << std::endl;
    return kExitOk;
}

int run_sweep(const Invocation& inv)
{
    const ExperimentConfig c = load(inv);
    const auto results = sweep(c, progress(inv));
    const std::string out = inv.out.empty() ? "sweep.csv" : inv.out;
    auto os = open_out(out);
    io::write_sweep_csv(os, results);
    json summary = json::array();
    for (const SweepResult& r : results) {
        summary.push_back(io::to_json(r));
    }
    std::cout << summary.dump(2) << std::endl;
    return kExitOk;
}

std::string crossings_path(const std::string& out)
{
    const auto dot = out.rfind('.');
    const auto slash = out.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return out + "_crossings.csv";
    }
    return out.substr(0, dot) + "_crossings" + out.substr(dot);
}

int run_phase(const Invocation& inv)
{
    const ExperimentConfig c = load(inv);
    if (!c.phase) {
        throw ValidationError("config: phase: missing (needs axis1, axis2)");
    }
    const PhaseGrid g = phase_grid(c, c.phase->axis1, c.phase->axis2, c.phase->threshold, progress(inv));
    const std::string out = inv.out.empty() ? "phase.csv" : inv.out;
    auto os = open_out(out);
    io::write_phase_csv(os, g);
    auto cs = open_out(crossings_path(out));
    io::write_crossings_csv(cs, g);
    std::cout << io::to_json(g).dump(2) << std::endl;
    return kExitOk;
}

int run_check(const Invocation& inv)
{
    acceptance::Options o;
    o.threads = inv.threads.value_or(default_thread_count());
    if (inv.seed) {
        o.seed = *inv.seed;
    }
    if (inv.verbose) {
        o.log = &std::cerr;
    }
    const auto results = acceptance::run_suite(inv.suite, o);
    for (const auto& r : results) {
        std::cout << acceptance::format(r) << '\n';
    }
    const bool ok = acceptance::all_passed(results);
    std::cout << (ok ? "suite " + inv.suite + ": all gated criteria passed"
                     : "suite " + inv.suite + ": FAILED")
              << std::endl;
    return ok ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-snapshot MUSIC / ESPRIT super-resolution toolkit"};
    app.require_subcommand(1, 1);
    Invocation inv;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", inv.config_path, "JSON experiment config")->check(CLI::ExistingFile);
        if (needs_config) {
            opt->required();
        }
        sub->add_option("--seed", inv.seed, "root seed override");
        sub->add_option("--out", inv.out, "output path");
        sub->add_option("--threads", inv.threads, "worker threads (fallback: SPECTRAL_THREADS)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("-v,--verbose", inv.verbose, "progress on stderr");
    };

    auto* music = app.add_subcommand("music", "NSC profile of trial 0 (CSV) and its MUSIC support estimate");
    auto* esprit = app.add_subcommand("esprit", "ESPRIT estimate of trial 0 (result.json)");
    auto* bounds = app.add_subcommand("bounds", "sigma_S, bound shapes and CRB of the configuration");
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo sweep (CSV + fitted slopes)");
    auto* phase = app.add_subcommand("phase", "phase-transition grid (CSV + crossings CSV)");
    auto* check = app.add_subcommand("check", "run an acceptance suite; exit 3 on failure");
    for (auto* sub : {music, esprit, bounds, sweep_cmd, phase}) {
        add_common(sub, true);
    }
    add_common(check, false);
    std::string suites;
    for (const auto& s : acceptance::suite_names()) {
        suites += (suites.empty() ? "" : ", ") + s;
    }
    inv.suite = "fast";
    check->add_option("--check-suite,--suite", inv.suite, "suite: " + suites)
        ->check(CLI::IsMember(acceptance::suite_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*music) return run_music(inv);
        if (*esprit) return run_esprit(inv);
        if (*bounds) return run_bounds(inv);
        if (*sweep_cmd) return run_sweep(inv);
        if (*phase) return run_phase(inv);
        if (*check) return run_check(inv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitValidation;
    } catch (const EstimatorError& e) {
        std::cerr << "estimator failure [" << e.code() << "]: " << e.what() << std::endl;
        return kExitDegenerate;
    }
    return kExitValidation;
}
