#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "incilab/experiment.hpp"

using namespace incilab;

namespace {

const char* kMiniConfig = R"(
# small end-to-end sweep
[experiment]
dimension = 2
s = 1.6
delta_coefficient = 0.5
n_list = 64 144 256
engine = both
workers = 1
[generator]
kind = jittered
amplitude = 0.25
seed = 7
[family]
kind = spheres
radius = constant 0.25
[homogeneity]
C0 = 3
c0 = 0.4
k0 = 4
)";

}  // namespace

TEST_CASE("config parsing") {
    ExperimentConfig cfg = parse_config(kMiniConfig);
    REQUIRE(cfg.dimension == 2);
    REQUIRE(cfg.s == Catch::Approx(1.6));
    REQUIRE(cfg.delta_coefficients == std::vector<double>{0.5});
    REQUIRE(cfg.n_list == std::vector<std::uint64_t>{64, 144, 256});
    REQUIRE(cfg.engine == EngineMode::both);
    REQUIRE(cfg.generator.kind == "jittered");
    REQUIRE(cfg.family.radius == "constant 0.25");
    REQUIRE(cfg.homogeneity.k0 == 4);
    REQUIRE(cfg.config_hash() == parse_config(kMiniConfig).config_hash());
}

TEST_CASE("config validation errors") {
    REQUIRE_THROWS_AS(parse_config("[experiment]\nengine = warp\nn_list = 4 8 16\n"),
                      ConfigError);
    REQUIRE_THROWS_AS(parse_config("[experiment]\nn_list = 16 8 4\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("[experiment]\nn_list = 16 32\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("[experiment]\nn_list = 4 8 16\ns = -1\n"), ConfigError);
    REQUIRE_THROWS_AS(
        parse_config("[experiment]\nn_list = 4 8 16\n[family]\nkind = torus\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("[experiment]\nn_list = 4 8 16\n[family]\nkind = "
                                   "dilated_ellipsoid\nsemiaxes = 1 1 1\n"),
                      ConfigError);  // semiaxes count != dimension
    REQUIRE_THROWS_AS(parse_config("[experiment]\ndimension == 2\n"), ConfigError);
}

TEST_CASE("radius spec parsing") {
    RadiusField c = parse_radius("constant 0.3", 2);
    REQUIRE(c.min_value == Catch::Approx(0.3));
    RadiusField a = parse_radius("affine 0.2 0.1 0", 2);
    Vec x{1.0, 0.0};
    REQUIRE(a.value(x.span()) == Catch::Approx(0.3));
    REQUIRE_THROWS_AS(parse_radius("affine 0.2 0.1", 2), ConfigError);
    REQUIRE_THROWS_AS(parse_radius("spline 1 2 3", 2), ConfigError);
}

TEST_CASE("mini sweep: deterministic CSV, engines agree, bound respected") {
    ExperimentConfig cfg = parse_config(kMiniConfig);
    SweepOutcome a = run_sweep(cfg);
    REQUIRE(a.engines_agreed);
    REQUIRE(a.all_homogeneous);
    REQUIRE(a.fits.size() == 1);
    REQUIRE(a.fits[0].fit.used_pairs == 3);

    // byte-identical rerun, and independent of the worker count
    SweepOutcome b = run_sweep(cfg);
    REQUIRE(a.csv_text == b.csv_text);
    ExperimentConfig cfg4 = cfg;
    cfg4.workers = 4;
    SweepOutcome c = run_sweep(cfg4);
    REQUIRE(a.csv_text == c.csv_text);

    // schema: comment header then the column row; wall_ms is 0 by default
    REQUIRE(a.csv_text.find("# config_hash=") == 0);
    REQUIRE(a.csv_text.find("N,delta,count,engine,candidate_pairs,self_incidences,wall_ms\n") !=
            std::string::npos);
    std::istringstream lines(a.csv_text);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'N') continue;
        ++rows;
        REQUIRE(line.substr(line.rfind(',') + 1) == "0");
    }
    REQUIRE(rows == 6);  // 3 sizes x 2 engines
}

TEST_CASE("sweep aborts when the generated set is not homogeneous") {
    ExperimentConfig cfg = parse_config(kMiniConfig);
    cfg.homogeneity = {0.8, 0.4, 1};  // covering cannot hold at this C0
    REQUIRE_THROWS_WITH(run_sweep(cfg), Catch::Matchers::ContainsSubstring("homogeneity"));
}

TEST_CASE("report text carries the predicted exponents") {
    ExperimentConfig cfg = parse_config(kMiniConfig);
    SweepOutcome out = run_sweep(cfg);
    std::string rep = report_text(cfg, out);
    REQUIRE(rep.find("regime: PhongStein") != std::string::npos);
    REQUIRE(rep.find("predicted incidence exponent: 4/3") != std::string::npos);
    REQUIRE(rep.find("bound_respected: yes") != std::string::npos);

    // fabricate a d = 3 expansive-dilate outcome to check the 8/5 header
    ExperimentConfig cfg3 = cfg;
    cfg3.dimension = 3;
    cfg3.family.radius = "affine 0.2 2 0 0";
    SweepOutcome fake;
    fake.regularity.regime = Regime::ExpansiveDilate;
    fake.regularity.gamma = Rational(1, 2);
    std::string rep3 = report_text(cfg3, fake);
    REQUIRE(rep3.find("8/5") != std::string::npos);

    // indeterminate regime: no predicted exponent
    SweepOutcome ind;
    ind.regularity.regime = Regime::Indeterminate;
    std::string repi = report_text(cfg, ind);
    REQUIRE(repi.find("none") != std::string::npos);
}

TEST_CASE("s outside the admissible range warns but does not reject") {
    ExperimentConfig cfg = parse_config(kMiniConfig);
    cfg.s = 1.2;  // Phong-Stein range in d = 2 is (3/2, 2)
    cfg.engine = EngineMode::grid;
    SweepOutcome out = run_sweep(cfg);
    REQUIRE_FALSE(out.warnings.empty());
    REQUIRE(out.warnings[0].find("admissible") != std::string::npos);
}

TEST_CASE("multi-coefficient mode produces one fit per coefficient") {
    ExperimentConfig cfg = parse_config(kMiniConfig);
    cfg.delta_coefficients = {0.25, 0.5, 1.0};
    cfg.engine = EngineMode::grid;
    SweepOutcome out = run_sweep(cfg);
    REQUIRE(out.fits.size() == 3);
    // counts are monotone in the coefficient at fixed N
    for (std::size_t i = 0; i < out.fits[0].pairs.size(); ++i) {
        REQUIRE(out.fits[0].pairs[i].second <= out.fits[1].pairs[i].second);
        REQUIRE(out.fits[1].pairs[i].second <= out.fits[2].pairs[i].second);
    }
}
