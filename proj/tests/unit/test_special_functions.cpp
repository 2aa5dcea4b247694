#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "reception/error.hpp"
#include "reception/rng.hpp"
#include "reception/special_functions.hpp"

using namespace reception;
using namespace reception::stats;

TEST_CASE("student_t_cdf analytic cases") {
  CHECK(std::abs(student_t_cdf(1.0, 1.0) - 0.75) <= 1e-10);
  CHECK(std::abs(student_t_cdf(std::sqrt(2.0), 2.0) - 0.8535533905932738) <= 1e-10);
  for (double df : {1.0, 2.0, 3.5, 30.0, 1e6}) CHECK(student_t_cdf(0.0, df) == 0.5);
  for (int i = -100; i <= 100; ++i) {
    const double t = i * 0.5;
    CHECK(std::abs(student_t_cdf(t, 2.0) - (0.5 + t / (2.0 * std::sqrt(2.0 + t * t)))) <= 1e-10);
    CHECK(std::abs(student_t_cdf(t, 1.0) - (0.5 + std::atan(t) / M_PI)) <= 1e-10);
  }
  CHECK_THROWS_AS(student_t_cdf(1.0, 0.5), ValidationError);
  CHECK_THROWS_AS(student_t_cdf(1.0, std::nan("")), ValidationError);
}

TEST_CASE("student_t_cdf against Boost.Math") {
  rng::Engine eng(1);
  for (double df : {1.0, 2.0, 3.0, 4.5, 7.0, 29.0, 89.0, 1000.0, 1e5, 1e6}) {
    const boost::math::students_t dist(df);
    for (int i = 0; i < 200; ++i) {
      const double t = (rng::uniform_unit(eng) * 2 - 1) * 50;
      const double got = student_t_cdf(t, df);
      CHECK(std::abs(got - boost::math::cdf(dist, t)) <= 1e-10);
      CHECK(std::abs(student_t_cdf(-t, df) - (1.0 - got)) <= 1e-12);
      const double tail = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
      CHECK(std::abs(student_t_two_tailed(t, df) - tail) <= 1e-10);
    }
  }
}

TEST_CASE("two-tailed p keeps precision in the far tail") {
  const boost::math::students_t dist(29.0);
  const double expected = 2.0 * boost::math::cdf(boost::math::complement(dist, 12.0));
  CHECK(student_t_two_tailed(12.0, 29.0) == doctest::Approx(expected).epsilon(1e-8));
  CHECK(student_t_two_tailed(12.0, 29.0) > 0.0);
}

TEST_CASE("chi_square_cdf") {
  CHECK(std::abs(chi_square_cdf(2.0, 2.0) - (1.0 - std::exp(-1.0))) <= 1e-10);
  CHECK(chi_square_cdf(0.0, 3.0) == 0.0);
  CHECK(std::abs(chi_square_cdf(4.0, 4.0) - 0.5939941502901616) <= 1e-10);
  for (int i = 0; i < 100; ++i) {
    const double x = i * 0.3;
    CHECK(std::abs(chi_square_cdf(x, 2.0) - (1.0 - std::exp(-x / 2.0))) <= 1e-10);
  }
  CHECK_THROWS_AS(chi_square_cdf(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(chi_square_cdf(-1.0, 2.0), ValidationError);
}

TEST_CASE("chi_square_cdf against Boost.Math") {
  for (double df : {1.0, 2.0, 3.0, 5.0, 10.0, 57.0}) {
    const boost::math::chi_squared dist(df);
    for (int i = 0; i <= 200; ++i) {
      const double x = i * 0.5;
      CHECK(std::abs(chi_square_cdf(x, df) - boost::math::cdf(dist, x)) <= 1e-10);
      CHECK(std::abs(chi_square_sf(x, df) - boost::math::cdf(boost::math::complement(dist, x))) <= 1e-10);
    }
  }
}

TEST_CASE("incomplete beta and gamma against Boost.Math") {
  rng::Engine eng(2);
  for (int i = 0; i < 2000; ++i) {
    const double a = 0.05 + rng::uniform_unit(eng) * 60;
    const double b = 0.05 + rng::uniform_unit(eng) * 60;
    const double x = rng::uniform_unit(eng);
    CHECK(std::abs(incomplete_beta(a, b, x) - boost::math::ibeta(a, b, x)) <= 1e-10);
    CHECK(std::abs(log_beta(a, b) - std::log(boost::math::beta(a, b))) <= 1e-9 * std::max(1.0, std::abs(log_beta(a, b))));
    const double g = 0.05 + rng::uniform_unit(eng) * 80;
    const double y = rng::uniform_unit(eng) * 150;
    CHECK(std::abs(lower_incomplete_gamma(g, y) - boost::math::gamma_p(g, y)) <= 1e-10);
    CHECK(std::abs(upper_incomplete_gamma(g, y) - boost::math::gamma_q(g, y)) <= 1e-10);
  }
  CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
  CHECK(std::abs(log_beta(1e6, 0.5) - std::log(boost::math::beta(1e6, 0.5))) <= 1e-9);
}
