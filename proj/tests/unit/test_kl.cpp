#include <doctest.h>

#include <cmath>

#include "bregmanot/kl.hpp"

using namespace bregmanot;

TEST_CASE("entropy on small plans") {
  CHECK(entropy(Matrix::Ones(2, 2)) == doctest::Approx(4.0));
  CHECK(entropy(Matrix::Zero(2, 2)) == doctest::Approx(0.0));

  Matrix half(2, 2);
  half << 0.5, 0.0, 0.0, 0.5;
  CHECK(entropy(half) == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-12));

  Matrix neg = Matrix::Ones(2, 2);
  neg(0, 1) = -1e-9;
  CHECK(entropy(neg) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("kl divergence conventions") {
  const Matrix ones = Matrix::Ones(2, 2);
  CHECK(kl_divergence(ones, ones) == doctest::Approx(-4.0));
  CHECK(kl_divergence(Matrix::Zero(2, 2), ones) == doctest::Approx(0.0));
  CHECK(kl_divergence(ones, Matrix::Constant(2, 2, std::exp(1.0))) ==
        doctest::Approx(-8.0));

  CHECK_THROWS_AS(kl_divergence(ones, Matrix::Ones(2, 3)), ShapeMismatch);
  CHECK_THROWS_AS(kl_divergence(ones, Matrix::Zero(2, 2)), NonPositiveKernel);
}

TEST_CASE("weighted kl reduces to plain kl") {
  Matrix plan(2, 2), kernel(2, 2);
  plan << 0.3, 0.7, 0.1, 0.9;
  kernel << 1.0, 2.0, 0.5, 1.5;
  const double single = kl_divergence(plan, kernel);

  Vector w1(1);
  w1 << 1.0;
  CHECK(weighted_kl({plan}, {kernel}, w1) == doctest::Approx(single));

  Vector w2(2);
  w2 << 1.0, 0.0;
  Matrix junk = Matrix::Constant(2, 2, 42.0);
  CHECK(weighted_kl({plan, junk}, {kernel, kernel}, w2) == doctest::Approx(single));

  Vector w3(2);
  w3 << 0.5, 0.5;
  CHECK(weighted_kl({plan, plan}, {kernel, kernel}, w3) == doctest::Approx(single));

  Vector bad(2);
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(weighted_kl({plan, plan}, {kernel, kernel}, bad), WeightNotSimplex);
}

TEST_CASE("entropy and kl are continuous at zero entries") {
  // Perturbing a zero entry by eps changes the value by O(eps log eps).
  Matrix base(2, 2);
  base << 0.5, 0.0, 0.0, 0.5;
  const Matrix kernel = Matrix::Constant(2, 2, 0.8);
  const double e0 = entropy(base), k0 = kl_divergence(base, kernel);
  for (double eps : {1e-6, 1e-9, 1e-12}) {
    Matrix bumped = base;
    bumped(0, 1) = eps;
    const double bound = 4.0 * eps * std::abs(std::log(eps));
    CHECK(std::abs(entropy(bumped) - e0) <= bound);
    CHECK(std::abs(kl_divergence(bumped, kernel) - k0) <= bound);
  }
}
