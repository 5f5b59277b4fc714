#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "landis/bessel.hpp"
#include "landis/bessel_audit.hpp"
#include "oracles.hpp"

namespace nb = landis::bessel;

namespace {
double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }
}  // namespace

TEST_CASE("log_bessel_i matches the series oracle") {
    CHECK(nb::log_bessel_i(0, 0.0).to_linear() == 1.0);  // I_0(0) = 1
    CHECK(nb::log_bessel_i(3, 0.0).is_zero());
    // frozen from the series oracle
    CHECK(rel(nb::log_bessel_i(1, 2.0).to_linear(), 1.5906368546373290634) < 1e-12);
    CHECK(rel(nb::log_bessel_i(10, 1.0).to_linear(), 2.7529480398368736252e-10) < 1e-12);
    for (int n : {0, 1, 2, 7, 19, 60}) {
        for (double x : {1e-3, 0.1, 2.0, 8.5, 25.0, 29.9}) {
            const double want = std::log((double)oracle::bessel_i(n, x));
            if (!std::isfinite(want)) continue;
            CHECK(std::fabs(nb::log_bessel_i(n, x).logmag - want) < 1e-12 * std::max(1.0, std::fabs(want)));
        }
    }
    CHECK_THROWS_AS(nb::log_bessel_i(0, -1.0), std::domain_error);
}

TEST_CASE("log_bessel_i above the series cutoff") {
    // series oracle still converges there, just slowly
    for (int n : {0, 1, 5, 40, 120}) {
        for (double x : {31.0, 55.0, 90.0}) {
            const double want = std::log((double)oracle::bessel_i(n, x));
            const double got = nb::log_bessel_i(n, x).logmag;
            CHECK(std::fabs(got - want) < 1e-11 * std::max(1.0, std::fabs(want)));
        }
    }
    // symmetry in the order
    CHECK(nb::log_bessel_i(-7, 3.0).logmag == nb::log_bessel_i(7, 3.0).logmag);
}

TEST_CASE("log_bessel_k matches the quadrature oracle") {
    CHECK(rel(nb::log_bessel_k(0, 1.0).to_linear(), 0.42102443824070833334) < 1e-10);
    CHECK(rel(nb::log_bessel_k(1, 1.0).to_linear(), 0.60190723019723457474) < 1e-10);
    for (int n : {0, 1, 2, 5, 13, 20}) {
        for (double x : {0.1, 1.0, 3.0, 9.0, 10.5, 20.0, 47.0}) {
            const double want = std::log((double)oracle::bessel_k((long double)n, x));
            const double got = nb::log_bessel_k(n, x).logmag;
            CHECK(std::fabs(got - want) < 1e-9 * std::max(1.0, std::fabs(want)));
        }
    }
    CHECK_THROWS_AS(nb::log_bessel_k(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(nb::log_bessel_k(0, -2.0), std::domain_error);
}

TEST_CASE("log_bessel_k honors the order symmetry bit-exactly") {
    for (double x : {0.5, 1.0, 5.0, 1e3, 1e6}) {
        const auto a = nb::log_bessel_k(-3, x);
        const auto b = nb::log_bessel_k(3, x);
        CHECK(a.logmag == b.logmag);
        CHECK(a.sign == b.sign);
    }
}

TEST_CASE("log_bessel_k at extreme arguments") {
    // K_0(1e6): logmag frozen from the asymptotic series (checked against
    // 30-digit arithmetic: -1000006.68196405133734711976)
    CHECK(std::fabs(nb::log_bessel_k(0, 1e6).logmag - (-1000006.6819640513)) < 1e-6);
    // linear value underflows but the log is finite
    CHECK(nb::log_bessel_k(0, 1e8).logmag < -1e8);
    CHECK(std::isfinite(nb::log_bessel_k(0, 1e8).logmag));
}

TEST_CASE("Wronskian oracle for I and K") {
    // I_n(x) K_{n+1}(x) + I_{n+1}(x) K_n(x) = 1/x
    for (int n : {0, 1, 4, 11}) {
        for (double x : {0.2, 1.0, 7.3, 19.0, 50.0}) {
            const auto i0 = nb::log_bessel_i(n, x), i1 = nb::log_bessel_i(n + 1, x);
            const auto k0 = nb::log_bessel_k(n, x), k1 = nb::log_bessel_k(n + 1, x);
            const double w = (i0 * k1 + i1 * k0).to_linear();
            CHECK(rel(w, 1.0 / x) < 1e-8);
        }
    }
}

TEST_CASE("k_ratio stays in log scale and is monotone") {
    CHECK(rel(nb::k_ratio(0, 1.0), 1.4296253982604017580) < 1e-9);
    CHECK(rel(nb::k_ratio(-1, 1.0), 0.69948393559377234389) < 1e-9);
    CHECK(nb::k_ratio(-1, 1.0) == Catch::Approx(1.0 / nb::k_ratio(0, 1.0)));
    for (int n : {0, 1, 5, 17})
        for (double x : {0.1, 1.0, 1e3, 1e6}) CHECK(nb::k_ratio(n, x) > 1.0);
    // ratio - 1 < 1e-5 at x = 1e6 (large-argument flattening)
    CHECK(nb::k_ratio(0, 1e6) - 1.0 < 1e-5);
    CHECK(nb::k_ratio(0, 1e6) > 1.0);
    CHECK_THROWS_AS(nb::k_ratio(0, -1.0), std::domain_error);
}

TEST_CASE("log_bessel_j signed values against the alternating series") {
    CHECK(rel(nb::log_bessel_j(0, 2.0).to_linear(), 0.22389077914123566805) < 1e-10);
    CHECK(rel(nb::log_bessel_j(1, 2.0).to_linear(), 0.57672480775687338720) < 1e-10);
    const auto j10 = nb::log_bessel_j(10, 2.0);
    CHECK(j10.sign == +1);
    CHECK(rel(j10.to_linear(), 2.5153862827167367096e-7) < 1e-10);
    // the long-double series oracle keeps ~14 digits up to x = 16
    for (int n : {0, 1, 3, 8, 25, 100, 200}) {
        for (double x : {0.05, 1.0, 4.5, 12.0, 16.0}) {
            const long double want = oracle::bessel_j(n, x);
            const auto got = nb::log_bessel_j(n, x);
            if (std::fabs((double)want) < 1e-280) continue;
            CHECK(rel(got.to_linear(), (double)want) < 1e-10);
        }
    }
    // oscillatory region (downward recurrence): 30-digit reference values
    CHECK(rel(nb::log_bessel_j(0, 25.0).to_linear(), 0.096266783275958116174) < 1e-10);
    CHECK(rel(nb::log_bessel_j(1, 25.0).to_linear(), -0.12535024958028990465) < 1e-10);
    CHECK(rel(nb::log_bessel_j(6, 25.0).to_linear(), -0.15870034085651264077) < 1e-10);
    CHECK(rel(nb::log_bessel_j(3, 40.0).to_linear(), -0.12614481550582080316) < 1e-10);
    CHECK_THROWS_AS(nb::log_bessel_j(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(nb::log_bessel_j(-1, 1.0), std::domain_error);
}

TEST_CASE("log_bessel_j deep tail stays finite in log scale") {
    const auto v = nb::log_bessel_j(200, 2.0);
    CHECK(v.sign == +1);
    // J_200(2) ~ 1/200! -- far below linear range
    CHECK(v.logmag < -800.0);
    CHECK(std::isfinite(v.logmag));
}

TEST_CASE("J normalization identity", "[property]") {
    // J_0(x)^2 + 2 sum_{k>=1} J_k(x)^2 = 1 at any argument
    for (double x : {2.0, 25.0, 40.0}) {
        long double s = 0.0L;
        const double j0 = nb::log_bessel_j(0, x).to_linear();
        s += (long double)j0 * j0;
        for (int k = 1; k < (int)x + 80; ++k) {
            const double jk = nb::log_bessel_j(k, x).to_linear();
            s += 2.0L * jk * jk;
        }
        CHECK(std::fabs((double)s - 1.0) < 1e-12);
    }
}

TEST_CASE("bessel tables match pointwise evaluation") {
    for (double x : {0.7, 22.0, 141.0, 2500.0}) {
        const auto ti = nb::log_bessel_i_table(80, x);
        const auto tk = nb::log_bessel_k_table(80, x);
        for (int n : {0, 1, 7, 39, 80}) {
            CHECK(std::fabs(ti[n] - nb::log_bessel_i(n, x).logmag) <
                  1e-9 * std::max(1.0, std::fabs(ti[n])));
            CHECK(tk[n] == nb::log_bessel_k(n, x).logmag);  // same path
        }
    }
}

TEST_CASE("real-order K through the integral representation") {
    for (double nu : {0.5, 1.5, 2.25, 10.75}) {
        for (double x : {0.4, 2.0, 11.0, 60.0}) {
            const double want = std::log((double)oracle::bessel_k(nu, x));
            const double got = nb::log_bessel_k_real(nu, x).logmag;
            CHECK(std::fabs(got - want) < 1e-9 * std::max(1.0, std::fabs(want)));
        }
    }
    // half-integer closed form against the quadrature oracle
    CHECK(std::fabs(nb::log_bessel_k_real(2.5, 3.0).logmag -
                    std::log((double)oracle::bessel_k(2.5L, 3.0L))) < 1e-11);
    // integer orders route to the integer evaluator
    CHECK(nb::log_bessel_k_real(4.0, 2.0).logmag == nb::log_bessel_k(4, 2.0).logmag);
    // the node floor is enforced
    nb::BesselEvalPolicy starved;
    starved.quadrature_nodes = 8;
    CHECK_THROWS_AS(nb::log_bessel_k_real(2.25, 3.0, starved), std::domain_error);
}

TEST_CASE("uniform asymptotics cross-check") {
    // moderate scale: compare against the full evaluators
    {
        const int n = 100;
        const double z = 1.0;
        auto [lk, li] = nb::uniform_asymptotics(n, z);
        const double rk = std::exp(nb::log_bessel_k(n, n * z).logmag - lk.logmag);
        const double ri = std::exp(nb::log_bessel_i(n, n * z).logmag - li.logmag);
        CHECK(rk > 0.99);
        CHECK(rk < 1.01);
        CHECK(ri > 0.99);
        CHECK(ri < 1.01);
    }
    // huge order: asymptotic and recurrence-based branches agree in logmag
    {
        const int n = 10000;
        const double z = 0.5;
        auto [lk, li] = nb::uniform_asymptotics(n, z);
        const double gk = nb::log_bessel_k(n, n * z).logmag;
        const double gi = nb::log_bessel_i(n, n * z).logmag;
        CHECK(std::fabs(gk - lk.logmag) / std::fabs(gk) < 1e-6);
        CHECK(std::fabs(gi - li.logmag) / std::fabs(gi) < 1e-6);
    }
    // product collapses to 1/(2 n sqrt(1+z^2))
    for (int n : {50, 400}) {
        for (double z : {0.3, 1.0, 2.5}) {
            auto [lk, li] = nb::uniform_asymptotics(n, z);
            const double prod = (lk * li).to_linear();
            CHECK(rel(prod, 1.0 / (2.0 * n * std::hypot(1.0, z))) < 1e-12);
        }
    }
    CHECK_THROWS_AS(nb::uniform_asymptotics(0, 1.0), std::domain_error);
}

TEST_CASE("branch consistency where evaluation branches overlap", "[property]") {
    // series vs continued-fraction/recurrence around the cutoff
    nb::BesselEvalPolicy lowcut;
    lowcut.series_cutoff = 5.0;  // force the CF branch where series is exact
    for (int n : {0, 2, 9, 33}) {
        for (double x : {6.0, 11.0, 19.0, 29.0}) {
            const double a = nb::log_bessel_i(n, x).logmag;           // series
            const double b = nb::log_bessel_i(n, x, lowcut).logmag;   // CF + downward
            CHECK(std::fabs(a - b) < 1e-6 * std::max(1.0, std::fabs(a)));
        }
    }
    // K: recurrence chain vs the integral representation at integer order
    for (int n : {2, 6, 15}) {
        for (double x : {1.3, 8.0, 33.0}) {
            const double a = nb::log_bessel_k(n, x).logmag;
            const double b = nb::detail::log_k_integral(n, x, 512);
            CHECK(std::fabs(a - b) < 1e-6 * std::max(1.0, std::fabs(a)));
        }
    }
}

TEST_CASE("appendix inequality audit passes on the reference grid") {
    std::vector<int> orders;
    for (int n = -20; n <= 20; ++n) orders.push_back(n);
    const std::vector<double> xs{0.1, 1.0, 10.0, 1e3, 1e6};
    const auto rep = landis::bessel_audit::audit_appendix_b(orders, xs);
    for (const auto& row : rep.rows) {
        INFO(row.name << " margin " << row.min_margin << " at n=" << row.argmin_order
                      << " x=" << row.argmin_x);
        CHECK(row.min_margin >= -1e-8);
        if (row.strict) CHECK(row.min_margin > -1e-10);
    }
    CHECK(rep.pass());
}

TEST_CASE("Turan at order zero reduces to monotonicity") {
    // K_0^2 <= K_1 K_{-1} = K_1^2 since K_0 < K_1
    for (double x : {0.1, 1.0, 10.0}) {
        const double k0 = nb::log_bessel_k(0, x).logmag;
        const double k1 = nb::log_bessel_k(1, x).logmag;
        CHECK(2.0 * k0 < k1 + nb::log_bessel_k(-1, x).logmag);
        CHECK(k0 < k1);
    }
}

TEST_CASE("derivative recurrence spot value") {
    // -(K_1(1)+K_{-1}(1))/2 = -K_1(1)
    const double lhs = -(nb::log_bessel_k(1, 1.0).to_linear() +
                         nb::log_bessel_k(-1, 1.0).to_linear()) / 2.0;
    CHECK(lhs == Catch::Approx(-0.60190723019723457474).epsilon(1e-9));
    // matches a central difference of K_0 in linear scale at x=1
    const double d = 1e-5;
    const double fd = (nb::log_bessel_k(0, 1.0 + d).to_linear() -
                       nb::log_bessel_k(0, 1.0 - d).to_linear()) / (2.0 * d);
    CHECK(fd == Catch::Approx(lhs).epsilon(1e-8));
}

TEST_CASE("J large-order asymptotic trend at fixed argument") {
    // log|J_n(z)| approaches -log(2 pi n) + n log(e z / (2n)) in relative terms
    const double z = 2.0;
    double prev = 1.0;
    for (int n : {50, 100, 200}) {
        const double got = nb::log_bessel_j(n, z).logmag;
        const double asym = -std::log(2.0 * M_PI * n) + n * std::log(M_E * z / (2.0 * n));
        const double relerr = std::fabs(got - asym) / std::fabs(asym);
        CHECK(relerr < prev);
        prev = relerr;
    }
    CHECK(prev < 0.02);
}
