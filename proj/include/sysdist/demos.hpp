#pragma once

// The three shipped experiments and their manifests. A manifest pins every
// input — plants or families (including direction matrices), Gaussian
// parameters, grid, ensemble size, q, seed — so each demo is a deterministic
// function of its manifest. Default manifests carry the published constants
// plus the calibrated-and-frozen choices the source experiments left
// unstated (perturbation law, direction matrices, seeds).

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sysdist/distances.hpp"
#include "sysdist/io.hpp"
#include "sysdist/lti.hpp"

namespace sysdist {

struct GridSpec {
    double wmin = 1e-1;
    double wmax = 1e3;
    int points = 1000;
    bool log_scale = true;

    FrequencyGrid make() const {
        return log_scale ? FrequencyGrid::log_space(wmin, wmax, points)
                         : FrequencyGrid::linear_space(wmin, wmax, points);
    }
};

struct ExperimentManifest {
    int schema_version = 1;
    std::string experiment;  // freq-demo | time-demo | compare-demo | custom
    std::uint64_t seed = 0;
    GridSpec grid;
    int ensemble_size = 0;
    double q = 1.0;
    std::string gap_profile = "fast";  // fast | accurate

    // freq-demo inputs
    double rho = 0.0;
    std::vector<RationalTransferFunction> plants;

    // time-demo / compare-demo inputs
    std::vector<AffineParametricFamily> families;
    std::vector<GaussianParameter> params;

    std::string output_dir;

    GapOptions gap_options() const {
        if (gap_profile == "accurate") return GapOptions{};
        if (gap_profile == "fast") return GapOptions::fast();
        throw std::invalid_argument("unknown gap profile: " + gap_profile);
    }

    void validate() const {
        if (schema_version != 1) throw std::invalid_argument("unsupported schema_version");
        if (seed == 0 && experiment != "custom")
            throw std::invalid_argument("manifest needs a nonzero seed");
        if (!(grid.wmin > 0.0) || !(grid.wmax > grid.wmin) || grid.points < 2)
            throw std::invalid_argument("grid requires max > min > 0 and points >= 2");
        if (ensemble_size < 1) throw std::invalid_argument("ensemble_size must be >= 1");
        if (q < 1.0) throw std::invalid_argument("q must be >= 1");
        if (rho < 0.0) throw std::invalid_argument("rho must be nonnegative");
        if (experiment == "freq-demo" && plants.size() != 2)
            throw std::invalid_argument("freq-demo needs exactly two plants");
        if ((experiment == "time-demo" || experiment == "compare-demo") &&
            (families.size() != 2 || params.size() != 2))
            throw std::invalid_argument("time/compare demos need two families and two params");
    }
};

// ---------------------------------------------------------------------------
// Default manifests
// ---------------------------------------------------------------------------

namespace detail {

// d direction matrices perturbing A only, each drawn once from a seeded
// standard normal and scaled to spectral norm `scale`; frozen via the manifest.
inline std::vector<FamilyDirection> seeded_directions(Eigen::Index n, int d, std::uint64_t seed,
                                                      double scale) {
    GaussianStream stream(seed);
    std::vector<FamilyDirection> dirs;
    dirs.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        Eigen::MatrixXd A(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) A(i, j) = stream.next();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        A *= scale / svd.singularValues()(0);
        FamilyDirection dir;
        dir.A = A;
        dir.B = Eigen::MatrixXd::Zero(n, 1);
        dir.C = Eigen::MatrixXd::Zero(1, n);
        dirs.push_back(std::move(dir));
    }
    return dirs;
}

inline GaussianParameter iid_gaussian(int d, double mean, double sigma) {
    GaussianParameter p;
    p.mean = Eigen::VectorXd::Constant(d, mean);
    p.covariance = sigma * sigma * Eigen::MatrixXd::Identity(d, d);
    return p;
}

}  // namespace detail

inline ExperimentManifest default_freq_manifest() {
    ExperimentManifest m;
    m.experiment = "freq-demo";
    m.seed = 11;
    m.grid = {0.1, 1000.0, 1000, true};
    m.ensemble_size = 100;
    m.q = 1.0;
    m.rho = 0.0075;  // calibrated once against the published values, then frozen
    RationalTransferFunction p1{{1.0}, {1.0, 0.5}};
    RationalTransferFunction p2{{1.0}, {1.0, 0.9, 0.14}};
    m.plants = {p1, p2};
    m.output_dir = "out/freq-demo";
    return m;
}

inline ExperimentManifest default_time_manifest() {
    ExperimentManifest m;
    m.experiment = "time-demo";
    m.seed = 1;
    m.grid = {1e-3, 1e3, 400, true};  // gap grid; no frequency curves emitted
    m.ensemble_size = 50;
    m.q = 1.0;

    AffineParametricFamily f1;
    f1.base.A = (Eigen::MatrixXd(2, 2) << 0.0, 1.0, -2.0, -0.5).finished();
    f1.base.B = (Eigen::MatrixXd(2, 1) << 0.0, 1.0).finished();
    f1.base.C = (Eigen::MatrixXd(1, 2) << 1.0, 0.0).finished();
    f1.directions = detail::seeded_directions(2, 4, 101, 4.0);
    f1.nominal_theta = Eigen::VectorXd::Zero(4);

    AffineParametricFamily f2;
    f2.base.A = (Eigen::MatrixXd(2, 2) << -3.2178, 1.2354, -1.7812, -2.6507).finished();
    f2.base.B = (Eigen::MatrixXd(2, 1) << 0.0, 1.0).finished();
    f2.base.C = (Eigen::MatrixXd(1, 2) << 1.0, 0.0).finished();
    f2.directions = detail::seeded_directions(2, 4, 102, 8.0);
    f2.nominal_theta = Eigen::VectorXd::Zero(4);

    m.families = {f1, f2};
    m.params = {detail::iid_gaussian(4, 0.01, 0.01), detail::iid_gaussian(4, 0.05, 0.05)};
    m.output_dir = "out/time-demo";
    return m;
}

inline ExperimentManifest default_compare_manifest() {
    ExperimentManifest m;
    m.experiment = "compare-demo";
    m.seed = 5;
    m.grid = {1e-2, 1e2, 100, true};
    m.ensemble_size = 100;
    m.q = 1.0;

    RationalTransferFunction p1{{1.0}, {3.24, 1.26, 1.0}};
    RationalTransferFunction p2{{1.0}, {1.44, 1.32, 1.0}};
    AffineParametricFamily f1;
    f1.base = tf_to_ss(p1);
    f1.directions = detail::seeded_directions(2, 3, 201, 0.25);
    f1.nominal_theta = Eigen::VectorXd::Zero(3);
    AffineParametricFamily f2;
    f2.base = tf_to_ss(p2);
    f2.directions = detail::seeded_directions(2, 3, 202, 0.25);
    f2.nominal_theta = Eigen::VectorXd::Zero(3);
    m.families = {f1, f2};

    GaussianParameter g1;
    g1.mean = (Eigen::VectorXd(3) << 0.10, -0.05, 0.02).finished();
    g1.covariance = (Eigen::VectorXd(3) << 0.15 * 0.15, 0.20 * 0.20, 0.10 * 0.10)
                        .finished()
                        .asDiagonal();
    GaussianParameter g2;
    g2.mean = (Eigen::VectorXd(3) << -0.08, 0.06, -0.01).finished();
    g2.covariance = (Eigen::VectorXd(3) << 0.12 * 0.12, 0.18 * 0.18, 0.08 * 0.08)
                        .finished()
                        .asDiagonal();
    m.params = {g1, g2};
    m.output_dir = "out/compare-demo";
    return m;
}

// ---------------------------------------------------------------------------
// Manifest serialization
// ---------------------------------------------------------------------------

inline std::string manifest_to_json(const ExperimentManifest& m) {
    char seed_buf[32];
    std::snprintf(seed_buf, sizeof(seed_buf), "%llu", static_cast<unsigned long long>(m.seed));
    std::string out = "{";
    out += "\"schema_version\":" + std::to_string(m.schema_version);
    out += ",\"experiment\":\"" + m.experiment + "\"";
    out += ",\"seed\":";
    out += seed_buf;
    out += ",\"grid\":{\"min\":" + format_double(m.grid.wmin) +
           ",\"max\":" + format_double(m.grid.wmax) + ",\"points\":" + std::to_string(m.grid.points) +
           ",\"scale\":\"" + (m.grid.log_scale ? "log" : "linear") + "\"}";
    out += ",\"ensemble_size\":" + std::to_string(m.ensemble_size);
    out += ",\"q\":" + format_double(m.q);
    out += ",\"gap_profile\":\"" + m.gap_profile + "\"";
    if (!m.plants.empty()) {
        out += ",\"perturbation\":{\"rho\":" + format_double(m.rho) + "}";
        out += ",\"plants\":[";
        for (std::size_t i = 0; i < m.plants.size(); ++i) {
            if (i) out += ",";
            out += "{\"num\":" + jsonw::number_list(m.plants[i].num) +
                   ",\"den\":" + jsonw::number_list(m.plants[i].den) + "}";
        }
        out += "]";
    }
    if (!m.families.empty()) {
        out += ",\"families\":[";
        for (std::size_t i = 0; i < m.families.size(); ++i) {
            if (i) out += ",";
            out += family_to_json(m.families[i]);
        }
        out += "],\"params\":[";
        for (std::size_t i = 0; i < m.params.size(); ++i) {
            if (i) out += ",";
            out += "{\"mean\":" + jsonw::vector(m.params[i].mean) +
                   ",\"covariance\":" + jsonw::matrix(m.params[i].covariance) + "}";
        }
        out += "]";
    }
    out += ",\"output_dir\":\"" + m.output_dir + "\"}";
    return out;
}

inline ExperimentManifest parse_manifest(const nlohmann::json& j) {
    ExperimentManifest m;
    m.schema_version = j.value("schema_version", 1);
    m.experiment = j.at("experiment").get<std::string>();
    m.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        m.grid.wmin = g.at("min").get<double>();
        m.grid.wmax = g.at("max").get<double>();
        m.grid.points = g.at("points").get<int>();
        m.grid.log_scale = g.value("scale", std::string("log")) == "log";
    }
    m.ensemble_size = j.at("ensemble_size").get<int>();
    m.q = j.value("q", 1.0);
    m.gap_profile = j.value("gap_profile", std::string("fast"));
    if (j.contains("perturbation")) m.rho = j.at("perturbation").value("rho", 0.0);
    if (j.contains("plants"))
        for (const auto& p : j.at("plants")) {
            RationalTransferFunction tf;
            for (const auto& c : p.at("num")) tf.num.push_back(c.get<double>());
            for (const auto& c : p.at("den")) tf.den.push_back(c.get<double>());
            m.plants.push_back(std::move(tf));
        }
    if (j.contains("families"))
        for (const auto& f : j.at("families")) m.families.push_back(parse_family(f));
    if (j.contains("params"))
        for (const auto& p : j.at("params")) {
            GaussianParameter g;
            g.mean = detail::parse_vector(p.at("mean"), "param mean");
            g.covariance = detail::parse_matrix(p.at("covariance"), "param covariance");
            g.validate();
            m.params.push_back(std::move(g));
        }
    m.output_dir = j.value("output_dir", std::string(""));
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Demo runners
// ---------------------------------------------------------------------------

namespace detail {

inline void emit_outputs(const ExperimentManifest& m, const DistanceReport& report,
                         const std::string& report_json, const std::string& summary) {
    if (m.output_dir.empty()) return;
    std::filesystem::create_directories(m.output_dir);
    write_text_file(m.output_dir + "/report.json", report_json);
    write_text_file(m.output_dir + "/curves.csv", curves_to_csv(report));
    write_text_file(m.output_dir + "/summary.txt", summary);
}

}  // namespace detail

struct DemoResult {
    DistanceReport report;
    std::string summary;
};

inline DemoResult run_freq_demo(const ExperimentManifest& m) {
    m.validate();
    FrequencyGrid grid = m.grid.make();
    FrequencyEnsemble fe1 =
        perturb_frequency_ensemble(m.plants[0], grid, m.ensemble_size, m.rho, m.seed);
    FrequencyEnsemble fe2 =
        perturb_frequency_ensemble(m.plants[1], grid, m.ensemble_size, m.rho, m.seed + 1);
    DemoResult out;
    out.report = freq_distance(fe1, fe2, m.q);
    out.report.seed = m.seed;
    out.summary = "d=" + format_double(out.report.value) +
                  " lb=" + format_double(out.report.lower_bound) +
                  " ub=" + format_double(out.report.upper_bound) + "\n";
    detail::emit_outputs(m, out.report, report_to_json(out.report), out.summary);
    return out;
}

inline DemoResult run_time_demo(const ExperimentManifest& m) {
    m.validate();
    SystemEnsemble e1 = sample_ensemble(m.families[0], m.params[0], m.ensemble_size, m.seed);
    SystemEnsemble e2 = sample_ensemble(m.families[1], m.params[1], m.ensemble_size, m.seed + 1);
    EnsemblePairAnalysis analysis(e1, e2, m.gap_options());
    DemoResult out;
    out.report = analysis.report(m.q);
    out.report.seed = m.seed;
    out.summary = "d=" + format_double(out.report.value) +
                  " lb=" + format_double(out.report.lower_bound) +
                  " ub=" + format_double(out.report.upper_bound) +
                  " nominal=" + format_double(out.report.bound_details.nominal_gap) + "\n";
    detail::emit_outputs(m, out.report, report_to_json(out.report), out.summary);
    return out;
}

struct CompareDemoResult {
    ComparisonResult comparison;
    double nominal_gap = 0.0;
    std::string summary;
};

inline CompareDemoResult run_compare_demo(const ExperimentManifest& m) {
    m.validate();
    SystemEnsemble e1 = sample_ensemble(m.families[0], m.params[0], m.ensemble_size, m.seed);
    SystemEnsemble e2 = sample_ensemble(m.families[1], m.params[1], m.ensemble_size, m.seed + 1);
    CompareDemoResult out;
    out.comparison = comparison_check(e1, e2, m.grid.make(), m.q, m.gap_options());
    out.nominal_gap = gap_metric(e1.nominal(), e2.nominal()).value;
    out.summary = "d_freq=" + format_double(out.comparison.d_freq) +
                  " d_time=" + format_double(out.comparison.d_time) +
                  " nominal=" + format_double(out.nominal_gap) +
                  " holds=" + (out.comparison.holds ? std::string("true") : std::string("false")) +
                  "\n";
    if (!m.output_dir.empty()) {
        std::filesystem::create_directories(m.output_dir);
        std::string json = "{";
        json += "\"d_freq\":" + format_double(out.comparison.d_freq);
        json += ",\"d_time\":" + format_double(out.comparison.d_time);
        json += ",\"nominal_gap\":" + format_double(out.nominal_gap);
        json += std::string(",\"holds\":") + (out.comparison.holds ? "true" : "false");
        json += ",\"tolerance\":" + format_double(out.comparison.tolerance);
        json += ",\"freq_report\":" + report_to_json(out.comparison.freq_report);
        json += ",\"time_report\":" + report_to_json(out.comparison.time_report);
        json += "}";
        write_text_file(m.output_dir + "/report.json", json);
        write_text_file(m.output_dir + "/curves.csv", curves_to_csv(out.comparison.freq_report));
        write_text_file(m.output_dir + "/summary.txt", out.summary);
    }
    return out;
}

}  // namespace sysdist
