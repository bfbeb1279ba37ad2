#include <doctest.h>

#include <cmath>
#include <vector>

#include "upbwit/decay_fit.hpp"

using namespace upbwit;

namespace {

GilbertTrace stretched(double a0, double b0, double tau, int first = 50, int last = 5000,
                       int step = 50) {
  GilbertTrace t;
  for (int c = first; c <= last; c += step)
    t.points.push_back({c, a0 + std::exp(-std::pow(static_cast<double>(c) / tau, 1.0 / b0))});
  return t;
}

}  // namespace

TEST_CASE("round trip on a stretched-exponential trace") {
  const DecayFit fit = fit_decay(stretched(0.0064, 2.0, 300.0));
  CHECK(std::abs(fit.a - 0.0064) <= 0.1 * 0.0064);
  CHECK(std::abs(fit.r) > 0.999);
  CHECK(fit.classification == Classification::Entangled);
  CHECK(fit.sqrt_a() == doctest::Approx(std::sqrt(fit.a)));
  CHECK(fit.points_used == 90);  // first 10% of 100 points left out
}

TEST_CASE("round trip over a range of limits and exponents") {
  for (double a0 : {1e-4, 1e-3, 6.4e-3, 2e-2}) {
    for (double b0 : {1.0, 1.5, 2.0, 3.0}) {
      CAPTURE(a0);
      CAPTURE(b0);
      const DecayFit fit = fit_decay(stretched(a0, b0, 300.0));
      CHECK(std::abs(fit.a - a0) <= 0.1 * a0);
      // with b0 = 1 the tail sinks below the resolution in a and r degrades
      if (b0 >= 1.5) CHECK(std::abs(fit.r) > 0.99);
    }
  }
}

TEST_CASE("pure decay is inconclusive") {
  const DecayFit fit = fit_decay(stretched(0.0, 2.0, 300.0));
  CHECK(fit.a < 1e-5);
  CHECK(fit.classification == Classification::Inconclusive);
}

TEST_CASE("classification threshold") {
  CHECK(classify(0.008) == Classification::Entangled);
  CHECK(classify(0.0) == Classification::Inconclusive);
  CHECK(classify(1e-5) == Classification::Inconclusive);
  CHECK(classify(1.0000001e-5) == Classification::Entangled);
  CHECK(to_string(Classification::Entangled) != to_string(Classification::Inconclusive));
}

TEST_CASE("fit_decay rejects bad traces") {
  CHECK_THROWS_AS(fit_decay(stretched(0.01, 2.0, 300.0, 50, 450)), std::invalid_argument);
  GilbertTrace up = stretched(0.01, 2.0, 300.0);
  up.points[40].squared_distance = 1.0;
  CHECK_THROWS_AS(fit_decay(up), std::invalid_argument);
  GilbertTrace neg = stretched(0.01, 2.0, 300.0);
  for (auto& p : neg.points) p.squared_distance -= 1.0;
  CHECK_THROWS_AS(fit_decay(neg), std::invalid_argument);
}

TEST_CASE("fit_decay properties on noisy traces") {
  // Deterministic perturbations of the model, kept monotone.
  Rng rng(31);
  for (int k = 0; k < 30; ++k) {
    const double a0 = std::pow(10.0, -4.0 + 2.5 * rng.uniform());
    const double b0 = 1.0 + 2.0 * rng.uniform();
    const double tau = 100.0 + 400.0 * rng.uniform();
    GilbertTrace t = stretched(a0, b0, tau, 50, 2500 + 50 * (k % 20));
    for (std::size_t i = 1; i < t.points.size(); ++i) {
      const double gap = t.points[i - 1].squared_distance - t.points[i].squared_distance;
      t.points[i].squared_distance += 0.2 * gap * rng.uniform();
    }
    double min_d2 = 1e300;
    for (const auto& p : t.points) min_d2 = std::min(min_d2, p.squared_distance);

    const DecayFit fit = fit_decay(t);
    CHECK(fit.a >= 0.0);
    CHECK(fit.a <= min_d2);
    CHECK(fit.b >= 0.1);
    CHECK(fit.b <= 5.0);

    const DecayFit again = fit_decay(t);
    CHECK(again.a == fit.a);
    CHECK(again.b == fit.b);
    CHECK(again.r == fit.r);
  }
}

TEST_CASE("half-trace fits are no better than full fits on model traces") {
  Rng rng(32);
  for (int k = 0; k < 30; ++k) {
    const double a0 = std::pow(10.0, -4.0 + 2.5 * rng.uniform());
    const double b0 = 1.5 + 1.5 * rng.uniform();
    const double tau = 100.0 + 400.0 * rng.uniform();
    const GilbertTrace t = stretched(a0, b0, tau, 50, 2500 + 50 * (k % 20));
    GilbertTrace half;
    half.points.assign(t.points.begin(), t.points.begin() + t.points.size() / 2);
    CHECK(std::abs(fit_decay(half).r) <= std::abs(fit_decay(t).r) + 0.05);
  }
}

TEST_CASE("decay_correlation") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{std::exp(-1.0), std::exp(-2.0), std::exp(-3.0), std::exp(-4.0)};
  CHECK(decay_correlation(x, y, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isnan(decay_correlation(x, y, 0.1, 1.0)));
}
