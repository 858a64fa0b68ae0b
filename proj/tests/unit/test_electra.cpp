#include <doctest.h>

#include <cmath>

#include "legalner/electra.hpp"
#include "legalner/error.hpp"

using namespace legalner;

namespace {

ElectraBatch batch(std::size_t T, std::vector<std::size_t> M, std::vector<int> y, std::vector<double> pg,
                   std::vector<double> pd, double lambda = 1.0) {
  return {T, std::move(M), std::move(y), std::move(pg), std::move(pd), lambda};
}

}  // namespace

TEST_CASE("generator loss") {
  CHECK(generator_loss(batch(1, {1}, {1}, {0.5}, {0.5})).value == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(generator_loss(batch(1, {1}, {1}, {0.5}, {0.5})).value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(generator_loss(batch(2, {1, 2}, {1, 1}, {1.0, 1.0}, {0.5, 0.5})).value == 0.0);
  CHECK(generator_loss(batch(2, {1, 2}, {1, 1}, {0.5, 0.25}, {0.5, 0.5})).value ==
        doctest::Approx(2.079442).epsilon(1e-6));
  const auto unmarked = generator_loss(batch(2, {1, 2}, {1, 0}, {0.5, 0.25}, {0.5, 0.5}));
  CHECK(unmarked.unmarked_masked_position);
  CHECK(unmarked.value == doctest::Approx(std::log(2.0)));
}

TEST_CASE("discriminator loss") {
  const auto b = batch(2, {1}, {1, 0}, {0.5}, {0.8, 0.1});
  CHECK(std::abs(discriminator_loss(b) - 0.328504) < 1e-6);
  CHECK(discriminator_loss(b) == doctest::Approx(-(std::log(0.8) + std::log(0.9))).epsilon(1e-15));
  CHECK(discriminator_loss(batch(1, {}, {1}, {}, {0.5})) == doctest::Approx(std::log(2.0)));
  const double perfect = discriminator_loss(batch(2, {}, {1, 0}, {}, {1.0, 0.0}));
  CHECK(std::isfinite(perfect));
  CHECK(perfect < 1e-9);
  // additive over positions
  const double a = discriminator_loss(batch(1, {}, {1}, {}, {0.8}));
  const double c = discriminator_loss(batch(1, {}, {0}, {}, {0.1}));
  CHECK(discriminator_loss(b) == doctest::Approx(a + c));
}

TEST_CASE("combined loss") {
  auto b = batch(2, {1}, {1, 0}, {0.5}, {0.8, 0.1}, 0.0);
  CHECK(combined_loss(b) == generator_loss(b).value);
  b.lambda = 1.0;
  CHECK(combined_loss(b) == doctest::Approx(1.0216).epsilon(1e-4));
  double prev = -1;
  for (double l = 0; l <= 5; l += 0.25) {
    b.lambda = l;
    CHECK(combined_loss(b) >= prev);
    prev = combined_loss(b);
  }
  CHECK(combined_loss(batch(1, {1}, {1}, {1.0}, {1.0})) < 1e-9);
}

TEST_CASE("clamping keeps boundary inputs finite") {
  const auto b = batch(2, {1}, {1, 1}, {0.0}, {0.0, 1.0});
  CHECK(std::isfinite(generator_loss(b).value));
  CHECK(std::isfinite(discriminator_loss(b)));
  CHECK(generator_loss(b).value == doctest::Approx(-std::log(kProbabilityEpsilon)));
}

TEST_CASE("invalid batches") {
  CHECK_THROWS_AS(generator_loss(batch(2, {1}, {1, 0}, {}, {0.5, 0.5})), ParameterError);
  CHECK_THROWS_AS(discriminator_loss(batch(2, {1}, {1, 0}, {0.5}, {0.5})), ParameterError);
  CHECK_THROWS_AS(generator_loss(batch(2, {3}, {1, 0}, {0.5}, {0.5, 0.5})), ParameterError);
  CHECK_THROWS_AS(generator_loss(batch(2, {0}, {1, 0}, {0.5}, {0.5, 0.5})), ParameterError);
  CHECK_THROWS_AS(generator_loss(batch(2, {1, 1}, {1, 0}, {0.5, 0.5}, {0.5, 0.5})), ParameterError);
  CHECK_THROWS_AS(discriminator_loss(batch(1, {}, {2}, {}, {0.5})), ParameterError);
  CHECK_THROWS_AS(discriminator_loss(batch(1, {}, {1}, {}, {1.5})), ParameterError);
  CHECK_THROWS_AS(combined_loss(batch(1, {}, {1}, {}, {0.5}, -1)), ParameterError);
}

TEST_CASE("batch JSON") {
  const auto b = parse_electra_batch(R"({"T":2,"masked":[1],"y":[1,0],"p_generator":[0.5],"p_discriminator":[0.8,0.1]})");
  CHECK(b.length == 2);
  CHECK(b.lambda == 1.0);
  CHECK(combined_loss(b) == doctest::Approx(std::log(2.0) - std::log(0.8) - std::log(0.9)));
  CHECK_THROWS_AS(parse_electra_batch("{"), ParseError);
  CHECK_THROWS_AS(parse_electra_batch(R"({"T":"x"})"), ParseError);
}
