#include <gtest/gtest.h>

#include <sstream>

#include "sysdist/demos.hpp"
#include "sysdist/io.hpp"

namespace {

using namespace sysdist;

TEST(FormatDouble, SeventeenSignificantDigitsRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 2.916e-1, 1e300, -4.25, 0.0}) {
        std::string s = format_double(v);
        EXPECT_EQ(std::stod(s), v);
    }
}

TEST(EnsembleJson, RoundTripIsExact) {
    ExperimentManifest man = default_time_manifest();
    SystemEnsemble e = sample_ensemble(man.families[0], man.params[0], 5, 99);
    std::string text = ensemble_to_json(e, man.params[0]);
    ParsedEnsemble parsed = parse_ensemble(nlohmann::json::parse(text));
    EXPECT_EQ(parsed.ensemble.seed, e.seed);
    ASSERT_EQ(parsed.ensemble.samples.size(), e.samples.size());
    for (std::size_t i = 0; i < e.samples.size(); ++i) {
        EXPECT_TRUE(parsed.ensemble.samples[i].first == e.samples[i].first);
        EXPECT_TRUE(parsed.ensemble.samples[i].second.A == e.samples[i].second.A);
        EXPECT_TRUE(parsed.ensemble.samples[i].second.C == e.samples[i].second.C);
    }
    EXPECT_TRUE(parsed.ensemble.family.base.A == e.family.base.A);
    EXPECT_TRUE(parsed.param.covariance == man.params[0].covariance);
    // Re-serialization is byte-identical.
    EXPECT_EQ(ensemble_to_json(parsed.ensemble, parsed.param), text);
}

TEST(ModelFile, BareAndFamilyForms) {
    nlohmann::json bare = nlohmann::json::parse(
        R"({"A":[[-1.0,0.0],[0.0,-2.0]],"B":[[1.0],[1.0]],"C":[[1.0,0.5]]})");
    StateSpaceModel m = parse_model_file(bare);
    EXPECT_EQ(m.order(), 2);
    EXPECT_DOUBLE_EQ(m.D, 0.0);

    ExperimentManifest man = default_time_manifest();
    nlohmann::json wrapped =
        nlohmann::json::parse("{\"family\":" + family_to_json(man.families[0]) + "}");
    StateSpaceModel nominal = parse_model_file(wrapped);
    EXPECT_TRUE(nominal.A == man.families[0].base.A);

    EXPECT_THROW(parse_model_file(nlohmann::json::parse("{\"x\":1}")), std::invalid_argument);
}

TEST(ReportJsonAndCsv, ShapeContract) {
    RationalTransferFunction p1{{1.0}, {1.0, 0.5}};
    RationalTransferFunction p2{{1.0}, {1.0, 0.9, 0.14}};
    FrequencyGrid grid = FrequencyGrid::log_space(0.1, 10.0, 25);
    FrequencyEnsemble fe1 = perturb_frequency_ensemble(p1, grid, 4, 0.05, 1);
    FrequencyEnsemble fe2 = perturb_frequency_ensemble(p2, grid, 4, 0.05, 2);
    DistanceReport r = freq_distance(fe1, fe2, 1.0);

    std::string csv = curves_to_csv(r);
    std::istringstream lines(csv);
    std::string line;
    ASSERT_TRUE(std::getline(lines, line));
    EXPECT_EQ(line, "omega,wqq,c_omega,lb_omega");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    EXPECT_EQ(rows, 25);  // row count equals M
    EXPECT_EQ(csv.find('\r'), std::string::npos);  // LF endings only

    nlohmann::json parsed = nlohmann::json::parse(report_to_json(r));
    EXPECT_DOUBLE_EQ(parsed.at("value").get<double>(), r.value);
    EXPECT_DOUBLE_EQ(parsed.at("lower_bound").get<double>(), r.lower_bound);
    EXPECT_DOUBLE_EQ(parsed.at("upper_bound").get<double>(), r.upper_bound);
    EXPECT_TRUE(parsed.at("sandwich_ok").get<bool>());
    EXPECT_EQ(parsed.at("per_frequency").size(), 25u);
}

TEST(Manifest, RoundTripAndValidation) {
    for (const ExperimentManifest& m :
         {default_freq_manifest(), default_time_manifest(), default_compare_manifest()}) {
        std::string text = manifest_to_json(m);
        ExperimentManifest back = parse_manifest(nlohmann::json::parse(text));
        EXPECT_EQ(manifest_to_json(back), text);
        EXPECT_NO_THROW(back.validate());
    }
    ExperimentManifest bad = default_freq_manifest();
    bad.ensemble_size = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = default_freq_manifest();
    bad.grid.wmax = bad.grid.wmin;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Parsing, MalformedJsonNamesLineAndColumn) {
    try {
        nlohmann::json j = nlohmann::json::parse("{\"a\": [1, 2,\n  broken]}");
        FAIL() << "expected parse error, got: " << j.dump();
    } catch (const nlohmann::json::parse_error& e) {
        std::string what = e.what();
        EXPECT_NE(what.find("line"), std::string::npos);
        EXPECT_NE(what.find("column"), std::string::npos);
    }
}

TEST(LoadJsonFile, MissingFileThrows) {
    EXPECT_THROW(load_json_file("/nonexistent/nowhere.json"), std::runtime_error);
}

}  // namespace
