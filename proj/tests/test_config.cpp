#include "config.hpp"

#include <doctest.h>

#include <cmath>

using namespace gmsfem;

TEST_CASE("full configuration round-trips through the parser") {
  const std::string text = R"(
# experiment description
domain = 0 0 2 1
H = 0.5 0.25 0.125     # decreasing sweep
h = 0.03125
kinds = S SNAP H
f = product_sine 3.0
inclusion = disk 0.5 0.5 0.1 1e4
inclusion = ellipse 1.5 0.5 0.2 0.1   # takes the contrast default
contrast = 1e6
budget_spectral = 5
budget_steklov = 4
budget_pod = 7
spectral_threshold = 2.0
pod_threshold = 0.5
max_local_basis = 12
seed = 3
out = /tmp/somewhere
dense_threshold = 200
num_random = 5
)";
  const StudyConfig cfg = parse_config_text(text);
  REQUIRE(cfg.domain.size() == 4);
  CHECK(cfg.domain[2].x() == 2.0);
  CHECK(cfg.domain[2].y() == 1.0);
  CHECK(cfg.H_list == std::vector<double>{0.5, 0.25, 0.125});
  CHECK(cfg.h == 0.03125);
  CHECK(cfg.kinds == std::vector<std::string>{"S", "SNAP", "H"});
  CHECK(cfg.f_name == "product_sine");
  REQUIRE(cfg.f_params.size() == 1);
  CHECK(cfg.f_params[0] == 3.0);
  REQUIRE(cfg.inclusions.size() == 2);
  CHECK(cfg.inclusions[0].value == 1e4);
  CHECK(cfg.inclusions[1].value == 1e6); // filled from contrast
  CHECK(cfg.inclusions[1].shape == Inclusion::Shape::Ellipse);
  CHECK(cfg.budget_spectral == 5);
  CHECK(cfg.budget_steklov == 4);
  CHECK(cfg.budget_pod == 7);
  CHECK(cfg.spectral_threshold == 2.0);
  CHECK(cfg.pod_threshold == 0.5);
  CHECK(cfg.max_local_basis == 12);
  CHECK(cfg.seed == 3u);
  CHECK(cfg.out_dir == "/tmp/somewhere");
  CHECK(cfg.dense_threshold == 200);
  CHECK(cfg.num_random == 5);

  // h = H / 2^k resolution per coarse size.
  CHECK(cfg.levels_for(0.5) == 4);
  CHECK(cfg.levels_for(0.25) == 3);
  CHECK(cfg.levels_for(0.125) == 2);
}

TEST_CASE("defaults are sensible when keys are omitted") {
  const StudyConfig cfg = parse_config_text("");
  CHECK(cfg.H_list == std::vector<double>{0.25});
  CHECK(cfg.h == 0.0);
  CHECK(cfg.refine == 3);
  CHECK(cfg.levels_for(0.25) == 3); // falls back to refine
  CHECK(cfg.kinds == std::vector<std::string>{"S"});
  CHECK(cfg.f_name == "constant");
  CHECK(cfg.spectral_threshold == 1.0);
  CHECK(cfg.pod_threshold == 1.0);
  CHECK(cfg.max_local_basis == 24);
  CHECK(cfg.out_dir == ".");
}

TEST_CASE("malformed input is rejected with ConfigError") {
  CHECK_THROWS_AS(parse_config_text("mystery = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just words no equals"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("H ="), ConfigError);
  CHECK_THROWS_AS(parse_config_text("H = abc"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("H = 0.125 0.25"), ConfigError); // increasing
  CHECK_THROWS_AS(parse_config_text("H = -0.25"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("refine = 2.5"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("kinds = S X"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("f = exotic"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("domain = 0 0 1"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("inclusion = blob 0 0 1"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("inclusion = disk 0.5 0.5"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("budget_pod = -1"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("max_local_basis = 1"), ConfigError);
  // Inclusion without a value needs the contrast key.
  CHECK_THROWS_AS(parse_config_text("inclusion = disk 0.5 0.5 0.1"),
                  ConfigError);
  // Fine spacing must divide H as a power of two.
  const StudyConfig cfg = parse_config_text("H = 0.25\nh = 0.1");
  CHECK_THROWS_AS(cfg.levels_for(0.25), ConfigError);
  const StudyConfig cfg2 = parse_config_text("H = 0.25\nh = 0.25");
  CHECK_THROWS_AS(cfg2.levels_for(0.25), ConfigError); // k >= 1 required
}

TEST_CASE("missing file is a configuration error") {
  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("right-hand-side catalogue") {
  const StudyConfig base = parse_config_text("");
  const MeshHierarchy m =
      build_hierarchy({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0.5, 2);

  SUBCASE("constant") {
    StudyConfig cfg = base;
    cfg.f_name = "constant";
    cfg.f_params = {2.5};
    const VectorXd f = make_rhs(m, cfg);
    CHECK(f.size() == static_cast<int>(m.fine_tris.size()));
    CHECK(f.minCoeff() == 2.5);
    CHECK(f.maxCoeff() == 2.5);
  }
  SUBCASE("product_sine vanishes near the boundary, peaks mid-domain") {
    StudyConfig cfg = base;
    cfg.f_name = "product_sine";
    cfg.f_params = {2.0};
    const VectorXd f = make_rhs(m, cfg);
    CHECK(f.maxCoeff() <= 2.0);
    CHECK(f.maxCoeff() > 1.9); // some centroid sits near the middle
    CHECK(f.minCoeff() >= 0.0);
  }
  SUBCASE("piecewise splits at the given abscissa") {
    StudyConfig cfg = base;
    cfg.f_name = "piecewise";
    cfg.f_params = {0.5, 2.0, -3.0};
    const VectorXd f = make_rhs(m, cfg);
    for (size_t t = 0; t < m.fine_tris.size(); ++t) {
      const auto& tr = m.fine_tris[t];
      const double cx = (m.fine_nodes[tr[0]].x() + m.fine_nodes[tr[1]].x() +
                         m.fine_nodes[tr[2]].x()) /
                        3.0;
      CHECK(f[t] == (cx < 0.5 ? 2.0 : -3.0));
    }
  }
}
