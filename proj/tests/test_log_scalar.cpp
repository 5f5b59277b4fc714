#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "landis/log_scalar.hpp"

using landis::LogScalar;
using landis::LogSum;

TEST_CASE("LogScalar basics") {
    CHECK(LogScalar::zero().is_zero());
    CHECK(LogScalar::from_linear(0.0).is_zero());
    CHECK(LogScalar::one().to_linear() == 1.0);

    const LogScalar a = LogScalar::from_linear(3.5);
    const LogScalar b = LogScalar::from_linear(-2.0);
    CHECK((a * b).to_linear() == Catch::Approx(-7.0));
    CHECK((a / b).to_linear() == Catch::Approx(-1.75));
    CHECK((a + b).to_linear() == Catch::Approx(1.5));
    CHECK((a - b).to_linear() == Catch::Approx(5.5));
    CHECK((-a).to_linear() == Catch::Approx(-3.5));
    CHECK(a.pow(2.0).to_linear() == Catch::Approx(12.25));
}

TEST_CASE("LogScalar never materializes extreme magnitudes") {
    const LogScalar tiny(+1, -1e6);   // e^{-1e6}
    const LogScalar tinier(+1, -1e6 - std::log(2.0));
    const LogScalar s = tiny + tinier;
    CHECK(s.sign == +1);
    CHECK(s.logmag == Catch::Approx(-1e6 + std::log(1.5)));
    const LogScalar d = tiny - tinier;
    CHECK(d.logmag == Catch::Approx(-1e6 + std::log(0.5)));
    CHECK((tiny - tiny).is_zero());
    // hugely separated scales: small addend is absorbed without overflow
    const LogScalar big(+1, 1e6);
    CHECK((big + tiny).logmag == Catch::Approx(1e6));
}

TEST_CASE("LogScalar add/sub agree with linear arithmetic", "[property]") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> U(-50.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = U(rng), y = U(rng);
        const auto lx = LogScalar::from_linear(x), ly = LogScalar::from_linear(y);
        CHECK((lx + ly).to_linear() == Catch::Approx(x + y).margin(1e-10));
        CHECK((lx * ly).to_linear() == Catch::Approx(x * y).margin(1e-10));
    }
}

TEST_CASE("LogSum accumulates in any order") {
    LogSum s;
    s.add(LogScalar(+1, -700.0));
    s.add(LogScalar(+1, -710.0));
    s.add(LogScalar::zero());
    const double expect = -700.0 + std::log1p(std::exp(-10.0));
    CHECK(s.log_value() == Catch::Approx(expect));
    CHECK_THROWS_AS(s.add(LogScalar(-1, 0.0)), std::domain_error);
}

TEST_CASE("LogScalar ordering") {
    CHECK(LogScalar::from_linear(-2.0) < LogScalar::from_linear(1e-300));
    CHECK(LogScalar::from_linear(2.0) > LogScalar::from_linear(1.0));
    CHECK(LogScalar::zero() < LogScalar::one());
    CHECK(LogScalar::from_linear(-1.0) < LogScalar::zero());
}
