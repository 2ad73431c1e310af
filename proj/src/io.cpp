#include "supres/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace supres::io {

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what)
{
    throw ValidationError("config: " + where + ": " + what);
}

template <typename T>
T field(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) {
        schema_error(where, std::string("missing \"") + key + "\"");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        schema_error(where + "." + key, e.what());
    }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback, const std::string& where)
{
    return j.contains(key) ? field<T>(j, key, where) : fallback;
}

SweepParameter parse_parameter(const std::string& name, const std::string& where)
{
    if (name == "nu") return SweepParameter::nu;
    if (name == "L") return SweepParameter::L;
    if (name == "srf") return SweepParameter::srf;
    if (name == "alpha") return SweepParameter::alpha;
    schema_error(where, "unknown parameter \"" + name + "\" (nu, L, srf, alpha)");
}

SweepAxis parse_axis(const json& j, const std::string& where)
{
    if (!j.is_object()) {
        schema_error(where, "expected an object");
    }
    SweepAxis axis;
    axis.parameter = parse_parameter(field<std::string>(j, "parameter", where), where + ".parameter");
    if (j.contains("values")) {
        axis.values = field<std::vector<double>>(j, "values", where);
    } else if (j.contains("logspace")) {
        // [lo_exp, hi_exp, count], like numpy.logspace
        const auto spec = field<std::vector<double>>(j, "logspace", where);
        if (spec.size() != 3 || spec[2] < 2 || spec[2] != std::floor(spec[2])) {
            schema_error(where + ".logspace", "expected [lo_exp, hi_exp, count >= 2]");
        }
        const int n = static_cast<int>(spec[2]);
        for (int i = 0; i < n; ++i) {
            axis.values.push_back(std::pow(10.0, spec[0] + (spec[1] - spec[0]) * i / (n - 1)));
        }
    } else {
        schema_error(where, "needs \"values\" or \"logspace\"");
    }
    return axis;
}

json axis_json(const SweepAxis& axis)
{
    return {{"parameter", to_string(axis.parameter)}, {"values", axis.values}};
}

} // namespace

json to_json(const SupportSet& support)
{
    return {{"points", support.points()}};
}

json to_json(const ClumpsSpec& spec)
{
    return {{"num_clumps", spec.num_clumps}, {"clump_sizes", spec.clump_sizes}, {"alpha", spec.alpha},
            {"beta", spec.beta},             {"anchors", spec.anchors},         {"M", spec.M}};
}

SupportSet support_from_json(const json& j)
{
    return SupportSet(field<std::vector<double>>(j, "points", "support"));
}

ClumpsSpec clumps_from_json(const json& j)
{
    const std::string where = "clumps";
    if (!j.is_object()) {
        schema_error(where, "expected an object");
    }
    ClumpsSpec spec;
    spec.num_clumps = field<int>(j, "num_clumps", where);
    spec.clump_sizes = field<std::vector<int>>(j, "clump_sizes", where);
    spec.alpha = field<double>(j, "alpha", where);
    spec.beta = field<double>(j, "beta", where);
    spec.anchors = field<std::vector<double>>(j, "anchors", where);
    spec.M = field<int>(j, "M", where);
    validate(spec);
    return spec;
}

json to_json(const ExperimentConfig& c)
{
    json j;
    if (const auto* spec = std::get_if<ClumpsSpec>(&c.geometry)) {
        j["geometry"] = {{"clumps", to_json(*spec)}};
    } else {
        j["geometry"] = {{"support", to_json(std::get<SupportSet>(c.geometry))}};
    }
    j["M"] = c.M;
    j["L"] = c.L;
    j["nu"] = c.nu;
    j["amplitudes"] = "cn01";
    j["estimator"] = to_string(c.estimator);
    j["trials"] = c.trials;
    j["seed"] = c.root_seed;
    j["grid_size"] = c.grid_size;
    j["music_extract"] = c.music_extract;
    j["refine"] = c.refine;
    j["threads"] = c.threads;
    j["abscissa"] = to_string(c.abscissa);
    if (c.sweep) {
        j["sweep"] = axis_json(*c.sweep);
    }
    if (c.phase) {
        j["phase"] = {{"axis1", axis_json(c.phase->axis1)},
                      {"axis2", axis_json(c.phase->axis2)},
                      {"threshold", c.phase->threshold}};
    }
    return j;
}

ExperimentConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON config: ") + e.what());
    }
    if (!j.is_object()) {
        schema_error("<root>", "expected an object");
    }
    static const char* known[] = {"geometry", "M", "L", "nu", "amplitudes", "estimator", "trials",
                                  "seed", "grid_size", "music_extract", "refine", "threads",
                                  "abscissa", "sweep", "phase"};
    for (const auto& item : j.items()) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return item.key() == k; }) == std::end(known)) {
            schema_error("<root>", "unknown key \"" + item.key() + "\"");
        }
    }

    ExperimentConfig c;
    const json& geometry = j.contains("geometry") ? j.at("geometry") : json();
    if (!geometry.is_object() || geometry.size() != 1 ||
        !(geometry.contains("clumps") || geometry.contains("support"))) {
        schema_error("geometry", "expected {\"clumps\": {...}} or {\"support\": {\"points\": [...]}}");
    }
    if (geometry.contains("clumps")) {
        c.geometry = clumps_from_json(geometry.at("clumps"));
    } else {
        c.geometry = support_from_json(geometry.at("support"));
    }
    c.M = field<int>(j, "M", "<root>");
    c.L = field_or<int>(j, "L", c.L, "<root>");
    c.nu = field_or<double>(j, "nu", c.nu, "<root>");
    if (field_or<std::string>(j, "amplitudes", "cn01", "<root>") != "cn01") {
        schema_error("amplitudes", "only \"cn01\" (i.i.d. CN(0,1)) is supported");
    }
    const auto est = field_or<std::string>(j, "estimator", "both", "<root>");
    if (est == "music") {
        c.estimator = Estimator::music;
    } else if (est == "esprit") {
        c.estimator = Estimator::esprit;
    } else if (est == "both") {
        c.estimator = Estimator::both;
    } else {
        schema_error("estimator", "expected music, esprit or both");
    }
    c.trials = field_or<int>(j, "trials", c.trials, "<root>");
    c.root_seed = field_or<std::uint64_t>(j, "seed", c.root_seed, "<root>");
    c.grid_size = field_or<int>(j, "grid_size", c.grid_size, "<root>");
    c.music_extract = field_or<bool>(j, "music_extract", c.music_extract, "<root>");
    c.refine = field_or<bool>(j, "refine", c.refine, "<root>");
    c.threads = field_or<int>(j, "threads", c.threads, "<root>");
    const auto abscissa = field_or<std::string>(j, "abscissa", "value", "<root>");
    if (abscissa == "value") {
        c.abscissa = Abscissa::value;
    } else if (abscissa == "sigma_s") {
        c.abscissa = Abscissa::sigma_s;
    } else {
        schema_error("abscissa", "expected value or sigma_s");
    }
    if (j.contains("sweep")) {
        c.sweep = parse_axis(j.at("sweep"), "sweep");
    }
    if (j.contains("phase")) {
        const json& p = j.at("phase");
        if (!p.is_object()) {
            schema_error("phase", "expected an object");
        }
        PhaseSpec spec;
        spec.axis1 = parse_axis(p.contains("axis1") ? p.at("axis1") : json(), "phase.axis1");
        spec.axis2 = parse_axis(p.contains("axis2") ? p.at("axis2") : json(), "phase.axis2");
        spec.threshold = field_or<double>(p, "threshold", -1.0, "phase");
        c.phase = spec;
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot read config file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void write_snapshots_csv(std::ostream& os, const SnapshotBatch& batch)
{
    os << std::setprecision(17);
    for (int l = 0; l < batch.L; ++l) {
        os << (l ? "," : "") << "re_" << l + 1 << ",im_" << l + 1;
    }
    os << '\n';
    for (int k = 0; k < batch.M; ++k) {
        for (int l = 0; l < batch.L; ++l) {
            os << (l ? "," : "") << batch.data(k, l).real() << ',' << batch.data(k, l).imag();
        }
        os << '\n';
    }
}

void write_profile_csv(std::ostream& os, const NscProfile& profile)
{
    os << std::setprecision(17) << "omega,value\n";
    for (std::size_t k = 0; k < profile.grid_size(); ++k) {
        os << profile.omega(k) << ',' << profile.values[k] << '\n';
    }
}

void write_covariance_csv(std::ostream& os, const CovarianceMatrix& cov)
{
    os << std::setprecision(17) << "row,col,re,im\n";
    for (Eigen::Index c = 0; c < cov.matrix.cols(); ++c) {
        for (Eigen::Index r = 0; r < cov.matrix.rows(); ++r) {
            os << r << ',' << c << ',' << cov.matrix(r, c).real() << ',' << cov.matrix(r, c).imag() << '\n';
        }
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& results)
{
    os << std::setprecision(17) << "metric,parameter,value,sigma_s,mean,std,n,censored\n";
    for (const SweepResult& r : results) {
        for (const SweepRow& row : r.rows) {
            os << to_string(r.metric) << ',' << to_string(r.parameter) << ',' << row.value << ','
               << row.sigma_s << ',' << row.mean << ',' << row.stddev << ',' << row.n << ','
               << row.censored << '\n';
        }
    }
}

void write_phase_csv(std::ostream& os, const PhaseGrid& grid)
{
    os << std::setprecision(17) << "axis1,axis2,cell\n";
    for (std::size_t i1 = 0; i1 < grid.axis1.values.size(); ++i1) {
        for (std::size_t i2 = 0; i2 < grid.axis2.values.size(); ++i2) {
            os << grid.axis1.values[i1] << ',' << grid.axis2.values[i2] << ',' << grid.cell(i1, i2) << '\n';
        }
    }
}

void write_crossings_csv(std::ostream& os, const PhaseGrid& grid)
{
    os << std::setprecision(17) << "axis1,axis2\n";
    for (const PhaseCrossing& c : grid.crossings) {
        os << c.axis1 << ',' << c.axis2 << '\n';
    }
}

json to_json(const SweepResult& r)
{
    json rows = json::array();
    for (const SweepRow& row : r.rows) {
        rows.push_back({{"value", row.value}, {"sigma_s", row.sigma_s}, {"mean", row.mean},
                        {"std", row.stddev}, {"n", row.n}, {"censored", row.censored}});
    }
    json j = {{"metric", to_string(r.metric)}, {"parameter", to_string(r.parameter)},
              {"abscissa", to_string(r.abscissa)}, {"rows", rows}, {"excluded", r.excluded}};
    if (r.fit) {
        j["fit"] = {{"slope", r.fit->slope}, {"intercept", r.fit->intercept}, {"residual", r.fit->residual}};
    } else {
        j["fit"] = nullptr;
    }
    return j;
}

json to_json(const PhaseGrid& g)
{
    json crossings = json::array();
    for (const PhaseCrossing& c : g.crossings) {
        crossings.push_back({c.axis1, c.axis2});
    }
    json j = {{"axis1", axis_json(g.axis1)}, {"axis2", axis_json(g.axis2)}, {"threshold", g.threshold},
              {"cells", g.cells}, {"crossings", crossings},
              {"columns_without_crossing", g.columns_without_crossing}};
    if (g.transition_fit) {
        j["transition_fit"] = {{"slope", g.transition_fit->slope},
                               {"intercept", g.transition_fit->intercept},
                               {"residual", g.transition_fit->residual}};
    } else {
        j["transition_fit"] = nullptr;
    }
    return j;
}

} // namespace supres::io
