#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rndiff/rng.hpp"
#include "rndiff/schedule.hpp"

using namespace rndiff;

TEST_CASE("single-step schedule") {
  const auto s = DiffusionSchedule::linear(1, 0.02, 0.02);
  CHECK(s.alpha_bar(1) == doctest::Approx(0.98).epsilon(1e-15));
  CHECK(s.beta_tilde(1) == 0.0);
  CHECK(s.alpha_bar(0) == 1.0);
}

TEST_CASE("two-step schedule by hand") {
  const auto s = DiffusionSchedule::linear(2, 0.1, 0.3);
  CHECK(s.beta(1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(s.beta(2) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(s.alpha_bar(1) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(s.alpha_bar(2) == doctest::Approx(0.63).epsilon(1e-14));
  // (1 - 0.9) / (1 - 0.63) * 0.3
  CHECK(s.beta_tilde(2) == doctest::Approx(0.081081081081081081).epsilon(1e-13));
}

TEST_CASE("frozen terminal alpha_bar values") {
  // 40-digit evaluation of the product of (1 - beta_t) over the linear ramp.
  CHECK(DiffusionSchedule::linear(100, 1e-4, 0.02).alpha_bar(100) ==
        doctest::Approx(0.36356324805549192).epsilon(1e-12));
  const DiffusionSchedule def(ScheduleParams{});
  CHECK(def.alpha_bar(100) == doctest::Approx(2.1399665476111514e-5).epsilon(1e-10));
  CHECK(def.alpha_bar(50) == doctest::Approx(0.076875558904179614).epsilon(1e-12));
}

TEST_CASE("invalid schedules are rejected") {
  CHECK_THROWS_AS(DiffusionSchedule::linear(0, 0.1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(DiffusionSchedule::linear(10, 0.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(DiffusionSchedule::linear(10, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(DiffusionSchedule::linear(10, 0.3, 0.2), std::invalid_argument);
  const auto s = DiffusionSchedule::linear(10, 0.1, 0.2);
  CHECK_THROWS_AS(s.beta(0), std::out_of_range);
  CHECK_THROWS_AS(s.beta(11), std::out_of_range);
}

TEST_CASE("schedule invariants over random parameters") {
  CounterRng rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int T = 1 + static_cast<int>(rng.uniform() * 300);
    const double a = 1e-5 + rng.uniform() * 0.3;
    const double b = a + rng.uniform() * (0.9 - a);
    const auto s = DiffusionSchedule::linear(T, a, b);
    for (int t = 1; t <= T; ++t) {
      REQUIRE(s.beta(t) > 0.0);
      REQUIRE(s.beta(t) < 1.0);
      REQUIRE(s.alpha_bar(t) < s.alpha_bar(t - 1));
      REQUIRE(s.beta_tilde(t) >= 0.0);
      REQUIRE(s.beta_tilde(t) <= s.beta(t));
    }
    REQUIRE(s.alpha_bar(T) > 0.0);
  }
}

TEST_CASE("schedule record round-trips bit-exactly") {
  CounterRng rng(12, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const ScheduleParams p{1 + static_cast<int>(rng.uniform() * 500), 1e-5 + rng.uniform() * 0.1, 0.0};
    const ScheduleParams q{p.steps, p.beta_start, p.beta_start + rng.uniform() * 0.5};
    const DiffusionSchedule s(q);
    const DiffusionSchedule back = DiffusionSchedule::from_record(s.to_record());
    REQUIRE(back.params() == q);
    REQUIRE(back.alpha_bar(q.steps) == s.alpha_bar(q.steps));
  }
  CHECK_THROWS(DiffusionSchedule::from_record("T=3\nbeta_start=0.1\n"));
  CHECK_THROWS(DiffusionSchedule::from_record("T=3\nbeta_start=0.1\nbeta_end=0.2\ncolor=red\n"));
}

TEST_CASE("shift constants: worked example and zero gap") {
  const DiffusionSchedule s(ScheduleParams{});
  const ShiftConstants zero = shift_constants(s, 1.0, 0.0);
  for (int t = 1; t <= s.steps(); ++t) {
    CHECK(zero.eta_at(t) == 0.0);
    CHECK(zero.delta_at(t) == 0.0);
    CHECK(zero.sigma_sq[static_cast<std::size_t>(t - 1)] == 1.0);
  }
  // alpha_bar = 0.25, v0 = 1, gap = 0.01: eta = 0.5 * 0.01, delta = eta * sqrt(0.75).
  const auto one = DiffusionSchedule::linear(1, 0.75, 0.75);
  const ShiftConstants c = shift_constants(one, 1.0, 0.01);
  CHECK(c.eta_at(1) == doctest::Approx(0.005).epsilon(1e-13));
  CHECK(c.delta_at(1) == doctest::Approx(0.0043301270189221932).epsilon(1e-13));
  CHECK_THROWS_AS(shift_constants(s, 0.0, 0.01), std::invalid_argument);
}

TEST_CASE("shift constants: closed-form identities and linearity") {
  CounterRng rng(13, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = DiffusionSchedule::linear(1 + static_cast<int>(rng.uniform() * 200), 1e-4, 0.05 + rng.uniform() * 0.3);
    const double v0 = 0.1 + 2.0 * rng.uniform();
    const double gap = (rng.uniform() - 0.5) * 0.2;
    const ShiftConstants c = shift_constants(s, v0, gap);
    const ShiftConstants c2 = shift_constants(s, v0, 2.0 * gap);
    const ShiftConstants unit = shift_constants(s, 1.0, gap);
    CHECK(c.mean_gap == gap);
    for (int t = 1; t <= s.steps(); ++t) {
      const auto i = static_cast<std::size_t>(t - 1);
      const double ab = s.alpha_bar(t);
      REQUIRE(c.delta[i] / std::sqrt(1.0 - ab) == doctest::Approx(c.eta[i]).epsilon(1e-13));
      REQUIRE(c.eta[i] == doctest::Approx(std::sqrt(ab) * gap / c.sigma_sq[i]).epsilon(1e-15));
      REQUIRE(c2.eta[i] == 2.0 * c.eta[i]);
      REQUIRE(c2.delta[i] == 2.0 * c.delta[i]);
      REQUIRE(unit.sigma_sq[i] == 1.0);
      REQUIRE(unit.delta[i] == doctest::Approx(std::sqrt(ab * (1.0 - ab)) * gap).epsilon(1e-12));
    }
  }
}
