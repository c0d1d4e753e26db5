#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "plumesr/scene.hpp"
#include "test_support.hpp"

using namespace plumesr;
using testing::max_abs_diff;

namespace {

// Direct simulation of a whole scene, snapshots 0..run_snapshots.
std::vector<Field> direct(const SceneLayout& L, const WindModel& w, const SceneSpec& scene, bool hr) {
  const SolverConfig cfg = hr ? L.hr_config() : L.lr_config();
  const int every = static_cast<int>(std::lround(L.dt_snap / cfg.dt));
  return integrate(cfg, w, scene, L.run_snapshots * every, every);
}

double peak_of(const SnapshotStack& s) {
  return std::max({s.channels[0].max(), s.channels[1].max(), s.channels[2].max()});
}

const SolutionBank& small_bank() {
  static const SolutionBank bank = build_bank(testing::small_layout(), testing::small_wind());
  return bank;
}

}  // namespace

TEST_CASE("disc overlap area") {
  const double pi = std::acos(-1.0);
  CHECK(disc_rect_overlap(1.0, -2, 2, -2, 2) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(disc_rect_overlap(1.0, 0, 2, 0, 2) == doctest::Approx(pi / 4).epsilon(1e-14));
  CHECK(disc_rect_overlap(1.0, 0, 2, -2, 2) == doctest::Approx(pi / 2).epsilon(1e-14));
  CHECK(disc_rect_overlap(1.0, 1.5, 2, -2, 2) == 0.0);
  CHECK(disc_rect_overlap(2.0, -0.5, 0.5, -0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  // Circular segment: area of the unit disc with x in [0.5, 1].
  const double seg = std::acos(0.5) - 0.5 * std::sqrt(0.75);
  CHECK(disc_rect_overlap(1.0, 0.5, 3, -3, 3) == doctest::Approx(seg).epsilon(1e-13));
}

TEST_CASE("rasterized disc integrates to its area and is translation exact") {
  const double dx = 0.25;
  const DiscStamp s = rasterize_disc({5.125, 3.125}, 1.0, 96, 64, dx);
  double total = 0.0;
  for (double w : s.weight) total += w;
  CHECK(total * dx * dx == doctest::Approx(std::acos(-1.0)).epsilon(1e-12));

  const DiscStamp t = rasterize_disc({5.125 + 3 * dx, 3.125 + 2 * dx}, 1.0, 96, 64, dx);
  REQUIRE(t.weight.size() == s.weight.size());
  CHECK(t.weight == s.weight);
  for (std::size_t i = 0; i < s.index.size(); ++i) {
    const auto x = s.index[i] % 96, y = s.index[i] / 96;
    CHECK(t.index[i] == ((y + 2) % 64) * 96 + (x + 3) % 96);
  }
}

TEST_CASE("source schedules are open at switch-on and closed at switch-off") {
  const SourceSpec s{{1.5, 1.5}, 1.0, 2.0, {{10.0, 20.0}, {30.0, 35.0}}};
  CHECK_FALSE(s.active(9.999));
  CHECK_FALSE(s.active(10.0));
  CHECK(s.active(10.001));
  CHECK(s.active(20.0));
  CHECK_FALSE(s.active(20.001));
  CHECK_FALSE(s.active(30.0));
  CHECK(s.active(35.0));

  SourceSpec bad = s;
  bad.schedule = {{30.0, 35.0}, {10.0, 20.0}};
  CHECK_THROWS(bad.validate());
  bad.schedule = {{10.0, 20.0}};
  bad.radius = 0.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("scene JSON round-trip") {
  Rng64 rng(3);
  const SceneSpec scene = sample_scene(rng, 5, 1.0, testing::small_layout(), testing::small_wind());
  const auto j = scene.to_json();
  CHECK(j.at("sources")[0].contains("cx"));
  CHECK(j.at("sources")[0].contains("schedule"));
  CHECK(SceneSpec::from_json(j) == scene);
}

TEST_CASE("sample_scene draws on the layout grid") {
  const SceneLayout L = testing::small_layout();
  const WindModel w = testing::small_wind();
  Rng64 rng(99);
  const SceneSpec scene = sample_scene(rng, 200, 0.8, L, w);
  REQUIRE(scene.sources.size() == 200);
  const double stride = L.phase_stride(w) * L.dt_snap;
  for (const auto& s : scene.sources) {
    CHECK(s.flux >= 0.0);
    CHECK(s.flux <= 0.8);
    CHECK(s.radius == L.source_radius);
    const double gx = s.center.x - 0.5, gy = s.center.y - 0.5;
    CHECK(gx == std::floor(gx));
    CHECK(gy == std::floor(gy));
    CHECK(s.center.x < L.domain_width());
    CHECK(s.center.y < L.domain_height());
    const double slot = s.schedule.front().t_on / stride;
    CHECK(slot == std::floor(slot));
    CHECK(s.schedule.front().t_on < L.run_snapshots * L.dt_snap);
  }

  Rng64 a(5), b(5);
  CHECK(sample_scene(a, 20, 1.0, L, w) == sample_scene(b, 20, 1.0, L, w));
}

TEST_CASE("bank runs are zero before their source switches on") {
  const SolutionBank& bank = small_bank();
  const SceneLayout& L = bank.layout;
  REQUIRE(bank.n_phases() == L.n_phases);
  for (int p = 0; p < bank.n_phases(); ++p) {
    const int first_on = p * L.phase_stride(bank.wind);
    // The snapshot at t_on itself is still empty: emission starts after it.
    for (int k = 0; k <= first_on; ++k) {
      CHECK(bank.lr[p][k].all_zero());
      CHECK(bank.hr[p][k].all_zero());
    }
    CHECK(bank.lr[p][first_on + 1].max() > 0.0);
    CHECK(bank.hr[p][first_on + 1].max() > 0.0);
  }
}

TEST_CASE("bank build is deterministic and survives a file round-trip") {
  const SolutionBank again = build_bank(testing::small_layout(), testing::small_wind());
  const SolutionBank& bank = small_bank();
  CHECK(again.lr == bank.lr);
  CHECK(again.hr == bank.hr);

  testing::TempDir dir("bank");
  write_bank(dir / "bank.plm", bank);
  const SolutionBank back = read_bank(dir / "bank.plm");
  CHECK(back.layout == bank.layout);
  CHECK(back.wind == bank.wind);
  CHECK(back.lr == bank.lr);
  CHECK(back.hr == bank.hr);
}

TEST_CASE("one reference source composes to the bank entry itself") {
  const SolutionBank& bank = small_bank();
  const SceneSpec scene{{bank.reference_source(1)}, 0};
  const ComposedPair p = compose(scene, bank, 9);
  for (int c = 0; c < 3; ++c) {
    CHECK(p.lr.channels[c] == bank.lr[1][8 + c]);
    CHECK(p.hr.channels[c] == bank.hr[1][8 + c]);
  }
  CHECK(p.t_center == 9 * bank.layout.dt_snap);
}

TEST_CASE("composition matches direct simulation at both resolutions") {
  const SolutionBank& bank = small_bank();
  const SceneLayout& L = bank.layout;
  Rng64 rng(2024);
  const SceneSpec scene = sample_scene(rng, 4, 1.0, L, bank.wind);
  const auto lr = direct(L, bank.wind, scene, false);
  const auto hr = direct(L, bank.wind, scene, true);
  for (int t : {3, 9, 14}) {
    const ComposedPair p = compose(scene, bank, t);
    const double lr_peak = std::max(peak_of(p.lr), 1e-300), hr_peak = std::max(peak_of(p.hr), 1e-300);
    for (int c = 0; c < 3; ++c) {
      CHECK(max_abs_diff(p.lr.channels[c], lr[t - 1 + c]) <= 1e-9 * lr_peak);
      CHECK(max_abs_diff(p.hr.channels[c], hr[t - 1 + c]) <= 1e-9 * hr_peak);
    }
  }
}

TEST_CASE("pulsed emission keeps composition exact") {
  SceneLayout L = testing::small_layout();
  L.pulse_on = 10.0;
  L.pulse_off = 5.0;
  const auto sched = L.schedule_from(20.0);
  REQUIRE(sched.size() == 3);
  CHECK(sched[0] == Interval{20.0, 30.0});
  CHECK(sched[1] == Interval{35.0, 45.0});
  CHECK(sched[2] == Interval{50.0, 60.0});

  const SolutionBank bank = build_bank(L, testing::small_wind());
  Rng64 rng(8);
  const SceneSpec scene = sample_scene(rng, 3, 1.0, L, bank.wind);
  const auto lr = direct(L, bank.wind, scene, false);
  const ComposedPair p = compose(scene, bank, 12);
  for (int c = 0; c < 3; ++c) CHECK(max_abs_diff(p.lr.channels[c], lr[11 + c]) <= 1e-9 * std::max(1e-300, peak_of(p.lr)));
}

TEST_CASE("zero flux composes to zero and scale is linear") {
  const SolutionBank& bank = small_bank();
  Rng64 rng(1);
  const SceneSpec zero = sample_scene(rng, 6, 0.0, bank.layout, bank.wind);
  const ComposedPair z = compose(zero, bank, 10);
  for (int c = 0; c < 3; ++c) {
    CHECK(z.lr.channels[c].all_zero());
    CHECK(z.hr.channels[c].all_zero());
  }

  Rng64 rng2(2);
  const SceneSpec scene = sample_scene(rng2, 6, 1.0, bank.layout, bank.wind);
  const ComposedPair one = compose(scene, bank, 10);
  const ComposedPair half = compose(scene, bank, 10, 0.5);
  CHECK(max_abs_diff(half.hr.mid(), 0.5 * one.hr.mid()) <= 1e-15 * one.hr.mid().max());
}

TEST_CASE("compose rejects scenes the bank cannot represent") {
  const SolutionBank& bank = small_bank();
  SourceSpec s = bank.reference_source(0);

  CHECK_THROWS_AS(compose({{s}, 0}, bank, 0), CompositionError);
  CHECK_THROWS_AS(compose({{s}, 0}, bank, bank.layout.run_snapshots), CompositionError);

  SourceSpec off_grid = s;
  off_grid.center.x += 0.25;
  CHECK_THROWS_AS(compose({{off_grid}, 0}, bank, 5), CompositionError);

  SourceSpec wrong_radius = s;
  wrong_radius.radius *= 2.0;
  CHECK_THROWS_AS(compose({{wrong_radius}, 0}, bank, 5), CompositionError);

  SourceSpec wrong_start = s;
  wrong_start.schedule = {{7.0, 7.0 + bank.layout.source_duration}};
  CHECK_THROWS_AS(compose({{wrong_start}, 0}, bank, 5), CompositionError);
}

TEST_CASE("layout validation") {
  const WindModel w = testing::small_wind();
  SceneLayout L = testing::small_layout();
  CHECK_NOTHROW(L.validate(w));
  CHECK(L.snapshots_per_period(w) == 8);
  CHECK(L.phase_stride(w) == 4);

  SceneLayout odd = L;
  odd.n_phases = 3;
  CHECK_THROWS(odd.validate(w));

  SceneLayout steps = L;
  steps.hr_dt = 0.03;
  CHECK_THROWS(steps.validate(w));

  SceneLayout hot = L;
  hot.kappa = 0.4;
  CHECK_THROWS_AS(hot.validate(w), CflError);

  CHECK(SceneLayout::from_json(L.to_json()) == L);
}
