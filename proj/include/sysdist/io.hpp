#pragma once

// File formats: ensemble/model JSON (parsed with nlohmann::json), and
// deterministic emission of reports. All emitted numbers are IEEE-754 doubles
// rendered with 17 significant digits through one printf-style path, so a rerun
// with the same inputs produces byte-identical files.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sysdist/distances.hpp"
#include "sysdist/lti.hpp"

namespace sysdist {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Deterministic JSON emission
// ---------------------------------------------------------------------------

namespace jsonw {

inline std::string matrix(const Eigen::MatrixXd& m) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) out += ",";
        out += "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ",";
            out += format_double(m(i, j));
        }
        out += "]";
    }
    return out + "]";
}

inline std::string vector(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v(i));
    }
    return out + "]";
}

inline std::string number_list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out + "]";
}

}  // namespace jsonw

inline std::string model_to_json(const StateSpaceModel& m) {
    return "{\"A\":" + jsonw::matrix(m.A) + ",\"B\":" + jsonw::matrix(m.B) +
           ",\"C\":" + jsonw::matrix(m.C) + ",\"D\":" + format_double(m.D) + "}";
}

inline std::string family_to_json(const AffineParametricFamily& family) {
    std::string out = "{\"base\":" + model_to_json(family.base) + ",\"directions\":[";
    for (std::size_t k = 0; k < family.directions.size(); ++k) {
        if (k) out += ",";
        const auto& d = family.directions[k];
        out += "{\"A\":" + jsonw::matrix(d.A) + ",\"B\":" + jsonw::matrix(d.B) +
               ",\"C\":" + jsonw::matrix(d.C) + "}";
    }
    out += "],\"nominal_theta\":" + jsonw::vector(family.nominal_theta) + "}";
    return out;
}

inline std::string ensemble_to_json(const SystemEnsemble& ensemble, const GaussianParameter& param) {
    char seed_buf[32];
    std::snprintf(seed_buf, sizeof(seed_buf), "%" PRIu64, ensemble.seed);
    std::string out = "{\"seed\":";
    out += seed_buf;
    out += ",\"family\":" + family_to_json(ensemble.family);
    out += ",\"param\":{\"mean\":" + jsonw::vector(param.mean) +
           ",\"covariance\":" + jsonw::matrix(param.covariance) + "}";
    out += ",\"samples\":[";
    for (std::size_t i = 0; i < ensemble.samples.size(); ++i) {
        if (i) out += ",";
        const auto& [theta, model] = ensemble.samples[i];
        out += "{\"theta\":" + jsonw::vector(theta) + ",\"A\":" + jsonw::matrix(model.A) +
               ",\"B\":" + jsonw::matrix(model.B) + ",\"C\":" + jsonw::matrix(model.C) + "}";
    }
    out += "]}";
    return out;
}

inline std::string report_to_json(const DistanceReport& r) {
    char seed_buf[32];
    std::snprintf(seed_buf, sizeof(seed_buf), "%" PRIu64, r.seed);
    std::string out = "{";
    out += "\"value\":" + format_double(r.value);
    out += ",\"q\":" + format_double(r.q);
    out += ",\"seed\":";
    out += seed_buf;
    out += ",\"lower_bound\":" + format_double(r.lower_bound);
    out += ",\"upper_bound\":" + format_double(r.upper_bound);
    out += ",\"argmax_omega\":" + format_double(r.argmax_omega);
    out += std::string(",\"sandwich_ok\":") + (r.sandwich_ok ? "true" : "false");
    const BoundDetails& b = r.bound_details;
    out += ",\"bound_details\":{";
    out += "\"diameter\":" + format_double(b.diameter);
    out += ",\"nominal_gap\":" + format_double(b.nominal_gap);
    out += ",\"mean_gap_1\":" + format_double(b.mean_gap_1);
    out += ",\"mean_gap_2\":" + format_double(b.mean_gap_2);
    if (b.has_moment_bound) {
        out += ",\"lipschitz_1\":" + format_double(b.lipschitz_1);
        out += ",\"lipschitz_2\":" + format_double(b.lipschitz_2);
        out += ",\"moment_1\":" + format_double(b.moment_1);
        out += ",\"moment_2\":" + format_double(b.moment_2);
        out += ",\"moment_bound_raw\":" + format_double(b.moment_bound_raw);
        out += ",\"moment_bound_clamped\":" + format_double(b.moment_bound_clamped);
    }
    out += ",\"c_curve\":" + jsonw::number_list(b.c_curve);
    out += ",\"lb_curve\":" + jsonw::number_list(b.lb_curve);
    out += "}";
    out += ",\"per_frequency\":[";
    for (std::size_t i = 0; i < r.per_frequency.size(); ++i) {
        if (i) out += ",";
        out += "[" + format_double(r.per_frequency[i].first) + "," +
               format_double(r.per_frequency[i].second) + "]";
    }
    out += "]}";
    return out;
}

// Per-frequency curves as CSV: LF endings, 17 significant digits.
inline std::string curves_to_csv(const DistanceReport& r) {
    std::string out = "omega,wqq,c_omega,lb_omega\n";
    const auto& b = r.bound_details;
    for (std::size_t i = 0; i < r.per_frequency.size(); ++i) {
        out += format_double(r.per_frequency[i].first);
        out += ",";
        out += format_double(r.per_frequency[i].second);
        out += ",";
        out += i < b.c_curve.size() ? format_double(b.c_curve[i]) : std::string("nan");
        out += ",";
        out += i < b.lb_curve.size() ? format_double(b.lb_curve[i]) : std::string("nan");
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::MatrixXd parse_matrix(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::invalid_argument(what + " must be a nested array");
    Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument(what + " rows must have equal length");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

inline Eigen::VectorXd parse_vector(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array()) throw std::invalid_argument(what + " must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

}  // namespace detail

inline StateSpaceModel parse_model(const nlohmann::json& j) {
    StateSpaceModel m;
    m.A = detail::parse_matrix(j.at("A"), "A");
    m.B = detail::parse_matrix(j.at("B"), "B");
    m.C = detail::parse_matrix(j.at("C"), "C");
    m.D = j.value("D", 0.0);
    m.validate();
    return m;
}

inline AffineParametricFamily parse_family(const nlohmann::json& j) {
    AffineParametricFamily family;
    family.base = parse_model(j.at("base"));
    for (const auto& d : j.at("directions")) {
        FamilyDirection dir;
        dir.A = detail::parse_matrix(d.at("A"), "direction A");
        dir.B = detail::parse_matrix(d.at("B"), "direction B");
        dir.C = detail::parse_matrix(d.at("C"), "direction C");
        family.directions.push_back(std::move(dir));
    }
    family.nominal_theta = detail::parse_vector(j.at("nominal_theta"), "nominal_theta");
    family.validate();
    return family;
}

struct ParsedEnsemble {
    SystemEnsemble ensemble;
    GaussianParameter param;
};

inline ParsedEnsemble parse_ensemble(const nlohmann::json& j) {
    ParsedEnsemble out;
    out.ensemble.seed = j.value("seed", std::uint64_t{0});
    out.ensemble.family = parse_family(j.at("family"));
    out.param.mean = detail::parse_vector(j.at("param").at("mean"), "param.mean");
    out.param.covariance = detail::parse_matrix(j.at("param").at("covariance"), "param.covariance");
    out.param.validate();
    for (const auto& s : j.at("samples")) {
        Eigen::VectorXd theta = detail::parse_vector(s.at("theta"), "sample theta");
        StateSpaceModel model;
        model.A = detail::parse_matrix(s.at("A"), "sample A");
        model.B = detail::parse_matrix(s.at("B"), "sample B");
        model.C = detail::parse_matrix(s.at("C"), "sample C");
        model.D = 0.0;
        model.validate();
        out.ensemble.samples.emplace_back(std::move(theta), std::move(model));
    }
    if (out.ensemble.samples.empty())
        throw std::invalid_argument("ensemble file has no samples");
    return out;
}

// A model file is either a bare state-space object {A, B, C[, D]} or an
// ensemble-grammar file, from which the nominal model is taken.
inline StateSpaceModel parse_model_file(const nlohmann::json& j) {
    if (j.contains("A")) return parse_model(j);
    if (j.contains("family")) {
        AffineParametricFamily family = parse_family(j.at("family"));
        return instantiate(family, family.nominal_theta);
    }
    throw std::invalid_argument("model file must contain either A/B/C or a family block");
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return nlohmann::json::parse(in);  // parse_error carries line/column
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sysdist
