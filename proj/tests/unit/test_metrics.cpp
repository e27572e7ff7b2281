#include <doctest.h>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "physioemo/error.hpp"
#include "physioemo/metrics.hpp"

using namespace physioemo;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidConfig;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("twenty hand-computed cases") {
    for (const auto& c : fixtures::metric_cases()) {
      CHECK(std::abs(r2_score(c.y, c.yhat) - c.r2) <= 1e-12);
      CHECK(std::abs(mse(c.y, c.yhat) - c.mse) <= 1e-12);
    }
  }

  TEST_CASE("worked examples") {
    const std::vector<double> y{0, 1, 2};
    CHECK(r2_score(y, y) == 1.0);
    CHECK(r2_score(y, std::vector<double>{1, 1, 1}) == 0.0);
    CHECK(r2_score(y, std::vector<double>{0, 0, 0}) == -1.5);
    CHECK(mse(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 1.0);
    CHECK(mse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("errors") {
    const std::vector<double> a{1, 2}, b{1, 2, 3}, one{1};
    CHECK(kind_of([&] { r2_score(a, b); }) == ErrorKind::LengthMismatch);
    CHECK(kind_of([&] { r2_score(one, one); }) == ErrorKind::LengthMismatch);
    CHECK(kind_of([&] { r2_score(std::vector<double>{4, 4, 4}, b); }) == ErrorKind::ZeroVariance);
    CHECK(kind_of([&] { mse(a, b); }) == ErrorKind::LengthMismatch);
    CHECK(mse(one, one) == 0.0);
  }

  TEST_CASE("random vectors agree with the long-double oracle") {
    oracle::Lcg rng(77);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng.below(300);
      std::vector<double> y(n), yhat(n);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = rng.uniform(-10, 10);
        yhat[i] = y[i] + rng.normal();
      }
      CHECK(r2_score(y, yhat) == doctest::Approx(oracle::r2(y, yhat)).epsilon(1e-12));
      CHECK(mse(y, yhat) == doctest::Approx(oracle::mse(y, yhat)).epsilon(1e-12));
    }
  }

  TEST_CASE("r2 is affine invariant and mse scales quadratically") {
    oracle::Lcg rng(78);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 5 + rng.below(50);
      std::vector<double> y(n), yhat(n), ty(n), tyhat(n);
      const double a = rng.uniform(0.1, 5.0) * (rng.below(2) ? 1 : -1);
      const double b = rng.uniform(-10, 10);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = rng.normal();
        yhat[i] = y[i] + 0.5 * rng.normal();
        ty[i] = a * y[i] + b;
        tyhat[i] = a * yhat[i] + b;
      }
      CHECK(r2_score(ty, tyhat) == doctest::Approx(r2_score(y, yhat)).epsilon(1e-9));
      std::vector<double> sy(n), syhat(n);
      for (std::size_t i = 0; i < n; ++i) {
        sy[i] = a * y[i];
        syhat[i] = a * yhat[i];
      }
      CHECK(mse(sy, syhat) == doctest::Approx(a * a * mse(y, yhat)).epsilon(1e-12));
    }
  }
}
