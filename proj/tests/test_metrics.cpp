#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "plumesr/metrics.hpp"
#include "test_support.hpp"

using namespace plumesr;

namespace {

SnapshotStack shifted(const SnapshotStack& s, double c) {
  SnapshotStack out = s;
  for (auto& ch : out.channels) {
    for (double& v : ch.values()) v += c;
  }
  return out;
}

PhysicsMeta simple_meta(double dx) {
  PhysicsMeta m;
  m.wind = WindModel(0.5, 40.0);
  m.scene = {{SourceSpec{{3.5, 3.5}, 1.0, 0.5, {{0.0, 100.0}}}}, 0};
  m.kappa = 0.04;
  m.dx = dx;
  m.dt_snap = 5.0;
  m.t_center = 20.0;
  return m;
}

EvalRecord record(std::string model, double rate, std::string id, std::uint64_t seed, double noise) {
  EvalRecord r;
  r.model = std::move(model);
  r.drop_rate = rate;
  r.sample_id = std::move(id);
  r.truth = testing::random_stack(16, 16, 0.25, seed, 5.0);
  r.prediction = r.truth;
  Rng64 rng(seed + 100);
  for (auto& ch : r.prediction.channels) {
    for (double& v : ch.values()) v += noise * (rng.next_f64() - 0.5);
  }
  r.meta = simple_meta(0.25);
  return r;
}

}  // namespace

TEST_CASE("PSNR oracles") {
  const SnapshotStack a = testing::random_stack(20, 10, 1.0, 1);
  CHECK(psnr(a, shifted(a, 0.1)) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(psnr(a, a) == kPsnrInfinity);

  const SnapshotStack b = testing::random_stack(20, 10, 1.0, 11);
  double se = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 10; ++y) {
      for (int x = 0; x < 20; ++x) {
        const double d = a.channels[c](x, y) - b.channels[c](x, y);
        se += d * d;
      }
    }
  }
  CHECK(std::abs(psnr(a, b) - 10.0 * std::log10(600.0 / se)) < 1e-9);

  // More noise, lower PSNR.
  CHECK(psnr(a, shifted(a, 0.05)) > psnr(a, shifted(a, 0.06)));
  CHECK_THROWS_AS(psnr(a, testing::random_stack(10, 20, 1.0, 1)), DimensionError);
}

TEST_CASE("SSIM oracles") {
  const Field x = testing::random_field(24, 20, 1.0, 3);
  const Field y = testing::random_field(24, 20, 1.0, 4);
  CHECK(ssim(x, x) == 1.0);
  CHECK(std::abs(ssim(x, y) - ssim(y, x)) < 1e-12);
  CHECK(ssim(x, y) < 0.5);

  // Constant images: the variance terms vanish and only the luminance ratio is left.
  const double expected = (2 * 0.5 * 0.6 + 1e-4) / (0.25 + 0.36 + 1e-4);
  CHECK(ssim(Field(16, 16, 1.0, 0.5), Field(16, 16, 1.0, 0.6)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.98361).epsilon(1e-5));

  CHECK_THROWS_AS(ssim(Field(10, 16, 1.0), Field(10, 16, 1.0)), DimensionError);
}

TEST_CASE("physics metric and residual map") {
  const SnapshotStack hr = testing::random_stack(16, 16, 0.25, 5, 5.0);
  const SnapshotStack sr = testing::random_stack(16, 16, 0.25, 15, 5.0);
  PhysicsMeta m = simple_meta(0.25);
  CHECK(physics_metric(hr, hr, m) == 0.0);
  const double with_scene = physics_metric(sr, hr, m);
  m.scene = {};
  CHECK(std::abs(physics_metric(sr, hr, m) - with_scene) <= 1e-12);

  CHECK(residual_map(hr, hr).all_zero());
  const Field r = residual_map(shifted(hr, 0.1), hr);
  for (double v : r.values()) CHECK(v == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("PSNR gain to RMS reduction") {
  CHECK(psnr_delta_to_rms_ratio(0.0) == 0.0);
  CHECK(psnr_delta_to_rms_ratio(20.0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(std::abs(psnr_delta_to_rms_ratio(0.93) - 0.1016) < 1e-4);
  CHECK(psnr_delta_to_rms_ratio(0.93) == doctest::Approx(1.0 - std::pow(10.0, -0.0465)).epsilon(1e-15));
}

TEST_CASE("evaluate groups and averages per model and drop rate") {
  std::vector<EvalRecord> recs{record("bicubic", 0.2, "s1", 1, 0.02), record("bicubic", 0.0, "s0", 2, 0.01),
                               record("bicubic", 0.2, "s2", 3, 0.04), record("apinn", 0.2, "s1", 4, 0.01)};
  const MetricsReport rep = evaluate(recs);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].model == "apinn");
  CHECK(rep.rows[1].model == "bicubic");
  CHECK(rep.rows[1].drop_rate == 0.0);
  CHECK(rep.rows[2].drop_rate == 0.2);

  const ReportRow& row = rep.rows[2];
  REQUIRE(row.per_sample.size() == 2);
  CHECK(row.per_sample[0].sample_id == "s1");
  CHECK(row.per_sample[1].sample_id == "s2");
  for (const auto& r : rep.rows) {
    double p = 0.0, s = 0.0, l = 0.0;
    for (const auto& m : r.per_sample) {
      p += m.psnr_db;
      s += m.one_minus_ssim;
      l += m.l_phys;
      CHECK(m.psnr_db > 0.0);
      CHECK(m.one_minus_ssim >= 0.0);
      CHECK(m.one_minus_ssim <= 1.0);
      CHECK(m.l_phys >= 0.0);
    }
    const double n = static_cast<double>(r.per_sample.size());
    CHECK(std::abs(r.psnr_db - p / n) < 1e-12);
    CHECK(std::abs(r.one_minus_ssim - s / n) < 1e-12);
    CHECK(std::abs(r.l_phys - l / n) < 1e-12);
  }
  CHECK(row.per_sample[0].psnr_db > row.per_sample[1].psnr_db);

  CHECK_THROWS(evaluate({}));
}

TEST_CASE("identical prediction gives an infinite, zero, zero row") {
  const MetricsReport rep = evaluate({record("hr", 0.0, "s", 9, 0.0)});
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].psnr_db == kPsnrInfinity);
  CHECK(rep.rows[0].one_minus_ssim == 0.0);
  CHECK(rep.rows[0].l_phys == 0.0);

  const auto j = rep.to_json();
  CHECK(j.at("rows")[0].at("psnr_db") == "inf");
  CHECK(j.at("rows")[0].at("n_samples") == 1);
  CHECK(rep.to_table().find("inf") != std::string::npos);
}

TEST_CASE("report JSON round-trip and table layout") {
  const MetricsReport rep = evaluate({record("bicubic", 0.4, "a", 1, 0.02), record("bicubic", 0.4, "b", 2, 0.03)});
  const auto j = rep.to_json();
  CHECK(j.at("ssim").at("window") == 11);
  CHECK(j.at("ssim").at("sigma") == 1.5);
  CHECK(j.at("l_phys_aggregation") == "corpus_mean");
  const MetricsReport back = MetricsReport::from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(back.rows.size() == 1);
  CHECK(back.rows[0].psnr_db == rep.rows[0].psnr_db);
  CHECK(back.rows[0].l_phys == rep.rows[0].l_phys);
  CHECK(back.rows[0].per_sample.size() == 2);
  CHECK(back.rows[0].per_sample[1].sample_id == "b");

  const std::string table = rep.to_table();
  CHECK(table.rfind("model", 0) == 0);
  CHECK(table.find("bicubic") != std::string::npos);
  CHECK(table.find("40%") != std::string::npos);

  CHECK(db_from_json(db_to_json(kPsnrInfinity)) == kPsnrInfinity);
  CHECK(db_from_json(db_to_json(42.5)) == 42.5);
  CHECK_THROWS(db_from_json("loud"));
}
