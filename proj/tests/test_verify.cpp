#include "slip/verify.hpp"

#include "doctest.h"
#include "support.hpp"

#include <numbers>

using namespace slip;

TEST_SUITE("verify") {
  const double pi = std::numbers::pi;

  TEST_CASE("summaries") {
    const InequalityReport r = summarize("x", {1.0, 2.0, 4.0}, 1, 3.0);
    CHECK(r.sample_count == 4);
    CHECK(r.trivial_count == 1);
    CHECK(r.median == 2.0);
    CHECK(r.pass);
    CHECK_FALSE(summarize("x", {1.0, 2.0, 7.0}, 0, 3.0).pass);
    CHECK_FALSE(summarize("x", {1.0, 2.0, 3.5}, 0, 3.0, true).pass);
    CHECK_FALSE(summarize("x", {1.0, std::nan("")}, 0, 3.0).pass);
    CHECK(summarize("x", {}, 5, 3.0).pass);
  }

  TEST_CASE("sample fields") {
    const Grid g = build_grid(16, 16, 1.0, 1.0);
    const VelocityField s = stream_field(g, 3);
    CHECK(divergence(g, s).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(normal_trace(g, s).cwiseAbs().maxCoeff() == 0.0);
    CHECK(test::max_abs(trig_field(g, 4) - trig_field(g, 4)) == 0.0);
    CHECK(test::max_abs(trig_field(g, 4) - trig_field(g, 5)) > 0.0);
  }

  TEST_CASE("constant fields are trivial") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    VelocityField c = VelocityField::zero(g);
    c.u.setConstant(0.4);
    c.v.setConstant(-1.1);
    for (double q : {3.0, 4.0, 6.0}) {
      const InequalityReport r = check_gns(g, {c}, q);
      CHECK(r.trivial_count == 1);
      CHECK(r.pass);
    }
    CHECK(check_trace(g, {c}).trivial_count == 1);
    CHECK(check_korn(g, {VelocityField::zero(g)}).trivial_count == 1);
  }

  TEST_CASE("GNS ratio of a product of sines is grid independent") {
    double prev = 0.0;
    for (int n : {16, 32}) {
      const Grid g = build_grid(n, n, 1.0, 1.0);
      const VelocityField v = test::sample(
          g, [&](double x, double y) { return std::sin(2 * pi * x) * std::sin(2 * pi * y); },
          [](double, double) { return 0.0; });
      const InequalityReport r = check_gns(g, {v}, 4.0);
      CHECK(std::isfinite(r.max));
      if (prev > 0.0) CHECK(std::abs(r.max - prev) <= 0.1 * prev);
      prev = r.max;
    }
  }

  TEST_CASE("GNS ensemble") {
    const Grid g = build_grid(16, 16, 1.0, 1.0);
    std::vector<VelocityField> v;
    for (int k = 0; k < 20; ++k) v.push_back(trig_field(g, 100 + k));
    for (double q : {3.0, 4.0, 6.0}) {
      const InequalityReport r = check_gns(g, v, q);
      CHECK(r.pass);
      CHECK(r.max <= 5.0 * r.median);
    }
  }

  TEST_CASE("trace ratio of (x, -y)") {
    // |v - mean|^2 on the loop = 4/3, |v|^2 = 2/3, |grad v|^2 = 2
    const double exact = std::pow(4.0 / 3.0, 0.25);
    const Grid g = build_grid(32, 32, 1.0, 1.0);
    const VelocityField v = test::sample(g, [](double x, double) { return x; }, [](double, double y) { return -y; });
    const InequalityReport r = check_trace(g, {v});
    CHECK(r.max == doctest::Approx(exact).epsilon(1e-2));
  }

  TEST_CASE("Korn ratio of the sine stream function") {
    // |v|^2 = 2 pi^2, |grad v|^2 = 16 pi^4, |D v|^2 = 8 pi^4
    const double exact = std::sqrt(2.0 + 1.0 / (4.0 * pi * pi));
    const Grid g = build_grid(32, 32, 1.0, 1.0);
    const VelocityField v = from_stream(g, [&](double x, double y) { return std::sin(2 * pi * x) * std::sin(2 * pi * y); });
    const InequalityReport r = check_korn(g, {v});
    CHECK(r.max == doctest::Approx(exact).epsilon(2e-2));
  }

  TEST_CASE("Korn ensemble under refinement") {
    double prev = 0.0;
    for (int n : {16, 32}) {
      const Grid g = build_grid(n, n, 1.0, 1.0);
      std::vector<VelocityField> v;
      for (int k = 0; k < 20; ++k) v.push_back(stream_field(g, 300 + k));
      const InequalityReport r = check_korn(g, v);
      CHECK(r.pass);
      if (prev > 0.0) CHECK(std::abs(r.max - prev) <= 0.2 * prev);
      prev = r.max;
      CHECK(check_mean_zero(g, v).pass);
    }
  }

  TEST_CASE("Korn rejects fields outside the solenoidal space") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    const VelocityField ex = test::sample(g, [](double x, double) { return x; }, [](double, double) { return 0.0; });
    CHECK_THROWS_AS(check_korn(g, {ex}), std::invalid_argument);
  }

  TEST_CASE("null suite passes trivially") {
    SuiteConfig c;
    c.nx = c.ny = 8;
    c.nt = 4;
    c.samples = 2;
    c.amplitude = 0.0;
    c.refinement = false;
    // zero amplitude zeroes the functional samples and the base state;
    // the estimate items still draw unit directions
    const SuiteResult r = run_estimate_suite(c);
    for (const auto& x : r.reports) {
      CHECK_MESSAGE(x.pass, x.name << " " << x.detail);
      if (x.name == "gns_q3" || x.name == "trace" || x.name == "korn") CHECK(x.trivial_count == 2);
    }
  }

  TEST_CASE("default desk suite") {
    SuiteConfig c;
    c.workers = 4;
    const SuiteResult r = run_estimate_suite(c);
    for (const auto& x : r.reports) CHECK_MESSAGE(x.pass, x.name << " " << x.detail);
    CHECK(r.seconds < 300.0);
    MESSAGE("suite time " << r.seconds << " s");
  }

  TEST_CASE("reports are deterministic") {
    SuiteConfig c;
    c.nx = c.ny = 8;
    c.nt = 4;
    c.samples = 2;
    c.refinement = false;
    c.workers = 3;
    const std::string a = suite_json(run_estimate_suite(c));
    c.workers = 1;
    CHECK(a == suite_json(run_estimate_suite(c)));
  }
}
