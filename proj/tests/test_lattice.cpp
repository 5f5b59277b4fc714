#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "landis/lattice.hpp"

namespace lat = landis::lattice;
using lat::LatticeBox;
using lat::LatticeField;

namespace {

LatticeField random_interior(const LatticeBox& box, std::mt19937_64& rng, int margin = 2) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    LatticeField f(box);
    lat::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
        bool interior = true;
        for (int k = 0; k < box.d; ++k)
            if (std::abs(j[k]) > box.extent - margin) interior = false;
        f.values[i] = interior ? U(rng) : 0.0;
    });
    return f;
}

}  // namespace

TEST_CASE("box invariants") {
    CHECK_THROWS_AS(LatticeBox(0, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(LatticeBox(4, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(LatticeBox(1, -1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(LatticeBox(1, 1.0, 2), std::invalid_argument);
    const LatticeBox b(2, 0.5, 6);
    CHECK(b.site_count() == 13u * 13u);
    const std::array<int, 3> j{3, -2, 0};
    CHECK(b.unflat(b.flat(j)) == j);
    CHECK(b.radius(j) == Catch::Approx(0.5 * std::sqrt(13.0)));
    CHECK(b.inf_index(j) == 3);
}

TEST_CASE("laplacian on simple fields") {
    const LatticeBox b(1, 1.0, 8);
    // constant field -> zero on interior (boundary feels the truncation)
    LatticeField c(b);
    for (auto& v : c.values) v = 3.25;
    const auto lc = lat::discrete_laplacian(c);
    for (int j = -7; j <= 7; ++j) CHECK(lc.at({j, 0, 0}) == 0.0);

    // delta at the origin
    const auto d = LatticeField::delta(b, {0, 0, 0});
    const auto ld = lat::discrete_laplacian(d);
    CHECK(ld.at({0, 0, 0}) == -2.0);
    CHECK(ld.at({1, 0, 0}) == 1.0);
    CHECK(ld.at({-1, 0, 0}) == 1.0);
    CHECK(ld.at({2, 0, 0}) == 0.0);

    // quadratic: exact second difference, h = 0.5
    const LatticeBox bq(1, 0.5, 16);
    LatticeField q(bq);
    lat::detail::for_each_site(bq, [&](std::size_t i, const std::array<int, 3>& j) {
        q.values[i] = (j[0] * bq.h) * (j[0] * bq.h);
    });
    const auto lq = lat::discrete_laplacian(q);
    for (int j = -15; j <= 15; ++j) CHECK(lq.at({j, 0, 0}) == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("difference operators compose into the laplacian") {
    const LatticeBox b(2, 0.7, 6);
    std::mt19937_64 rng(7);
    const auto f = random_interior(b, rng);
    // constant field: all kinds vanish
    LatticeField c(b);
    for (auto& v : c.values) v = 1.0;
    for (auto kind : {lat::DiffKind::Forward, lat::DiffKind::Backward, lat::DiffKind::Symmetric})
        for (int k = 0; k < 2; ++k) {
            const auto g = lat::diff_op(c, k, kind);
            for (int a = -5; a <= 5; ++a)
                for (int bb = -5; bb <= 5; ++bb) CHECK(g.at({a, bb, 0}) == 0.0);
        }
    // sum_k D_-k D_+k f = Delta f bit-for-bit on interior sites
    const auto lap = lat::discrete_laplacian(f);
    LatticeField composed(b);
    for (int k = 0; k < 2; ++k) {
        const auto dk = lat::diff_op(lat::diff_op(f, k, lat::DiffKind::Forward), k,
                                     lat::DiffKind::Backward);
        for (std::size_t i = 0; i < composed.values.size(); ++i)
            composed.values[i] += dk.values[i];
    }
    lat::detail::for_each_site(b, [&](std::size_t i, const std::array<int, 3>& j) {
        bool interior = true;
        for (int k = 0; k < b.d; ++k)
            if (std::abs(j[k]) > b.extent - 1) interior = false;
        if (interior) CHECK(composed.values[i] == lap.values[i]);
    });
    // linear field: symmetric difference is 1 on the interior
    const LatticeBox b1(1, 1.0, 8);
    LatticeField lin(b1);
    lat::detail::for_each_site(b1, [&](std::size_t i, const std::array<int, 3>& j) {
        lin.values[i] = j[0];
    });
    const auto ds = lat::diff_op(lin, 0, lat::DiffKind::Symmetric);
    for (int j = -7; j <= 7; ++j) CHECK(ds.at({j, 0, 0}) == 1.0);
}

TEST_CASE("summation by parts") {
    const LatticeBox b(1, 0.3, 12);
    std::mt19937_64 rng(99);
    const auto f = random_interior(b, rng);
    const auto g = random_interior(b, rng);
    CHECK(lat::summation_by_parts_check(f, g) <
          1e-12 * lat::sup_norm(f) * lat::sup_norm(g) * (double)b.site_count());
    // zero field
    CHECK(lat::summation_by_parts_check(LatticeField(b), g) == 0.0);
    // hand case in d=2
    const LatticeBox b2(2, 1.0, 5);
    const auto d0 = LatticeField::delta(b2, {0, 0, 0});
    const auto d1 = LatticeField::delta(b2, {1, 0, 0});
    CHECK(lat::summation_by_parts_check(d0, d1) == 0.0);
    // boundary-touching support is rejected
    LatticeField bad(b);
    bad.at({12, 0, 0}) = 1.0;
    CHECK_THROWS_AS(lat::summation_by_parts_check(bad, g), std::invalid_argument);
}

TEST_CASE("adjointness and negativity of the dirichlet form", "[property]") {
    const LatticeBox b(2, 0.5, 7);
    std::mt19937_64 rng(314);
    for (int rep = 0; rep < 20; ++rep) {
        const auto f = random_interior(b, rng);
        const auto g = random_interior(b, rng);
        // <D_+ f, g> = -<f, D_- g>
        for (int k = 0; k < 2; ++k) {
            const double a = lat::inner(lat::diff_op(f, k, lat::DiffKind::Forward), g);
            const double c = lat::inner(f, lat::diff_op(g, k, lat::DiffKind::Backward));
            CHECK(a == Catch::Approx(-c).margin(1e-12));
        }
        // self-adjointness of the laplacian
        CHECK(lat::inner(lat::discrete_laplacian(f), g) ==
              Catch::Approx(lat::inner(f, lat::discrete_laplacian(g))).margin(1e-10));
        // <Delta f, f> = -sum_k |D_+ f|^2
        double grads = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double nk = lat::l2_norm(lat::diff_op(f, k, lat::DiffKind::Forward));
            grads += nk * nk;
        }
        CHECK(lat::inner(lat::discrete_laplacian(f), f) ==
              Catch::Approx(-grads).margin(1e-10));
        CHECK(lat::inner(lat::discrete_laplacian(f), f) <= 0.0);
    }
}

TEST_CASE("norms") {
    const LatticeBox b(2, 0.5, 4);
    CHECK(lat::l2_norm(LatticeField(b)) == 0.0);
    CHECK(lat::sup_norm(LatticeField(b)) == 0.0);
    const auto d = LatticeField::delta(b, {0, 0, 0});
    CHECK(lat::l2_norm(d) == Catch::Approx(0.5));  // h^{d/2}
    CHECK(lat::sup_norm(d) == 1.0);
    CHECK(lat::l2_norm(lat::scaled(d, -3.0)) == Catch::Approx(1.5));
}

TEST_CASE("annulus mass") {
    const LatticeBox b(1, 1.0, 16);
    // delta at j=5, R=6: annulus is 4 < |j| < 7, so the site is inside
    const auto d5 = LatticeField::delta(b, {5, 0, 0});
    CHECK(lat::annulus_mass(d5, 6.0) == Catch::Approx(1.0));
    CHECK(lat::annulus_mass(LatticeField(b), 6.0) == 0.0);
    CHECK_THROWS_AS(lat::annulus_mass(d5, 16.0), std::invalid_argument);
    // strict boundary exclusion: site exactly at |hj| = R+1 is out
    const auto d7 = LatticeField::delta(b, {7, 0, 0});
    CHECK(lat::annulus_mass(d7, 6.0) == 0.0);

    // log-domain variant agrees with linear on representable fields
    lat::LogField lf(b);
    lat::detail::for_each_site(b, [&](std::size_t i, const std::array<int, 3>& j) {
        lf.values[i] = landis::LogScalar::from_linear(std::exp(-0.3 * j[0] * j[0]));
    });
    const auto lin = lf.to_linear();
    CHECK(lat::annulus_mass(lf, 6.0).to_linear() ==
          Catch::Approx(lat::annulus_mass(lin, 6.0)).epsilon(1e-12));
}

TEST_CASE("zero extension consistency under box enlargement") {
    const LatticeBox small(1, 0.5, 10);
    const LatticeBox big(1, 0.5, 16);
    std::mt19937_64 rng(5);
    const auto f = random_interior(small, rng, 3);
    LatticeField g(big);
    lat::detail::for_each_site(small, [&](std::size_t i, const std::array<int, 3>& j) {
        g.at(j) = f.values[i];
    });
    CHECK(lat::l2_norm(f) == Catch::Approx(lat::l2_norm(g)).epsilon(1e-14));
    CHECK(lat::annulus_mass(f, 3.0) == Catch::Approx(lat::annulus_mass(g, 3.0)).epsilon(1e-14));
    const auto lf = lat::discrete_laplacian(f);
    const auto lg = lat::discrete_laplacian(g);
    lat::detail::for_each_site(small, [&](std::size_t i, const std::array<int, 3>& j) {
        CHECK(lf.values[i] == lg.at(j));
    });
}

TEST_CASE("csv serialization") {
    const LatticeBox b(1, 1.0, 4);
    auto f = LatticeField::delta(b, {1, 0, 0}, 0.5);
    std::ostringstream os;
    lat::write_csv(os, f);
    CHECK(os.str().find("j_1,value") == 0);
    CHECK(os.str().find("1,0.5") != std::string::npos);
    lat::LogField lf(b);
    lf.at({0, 0, 0}) = landis::LogScalar(+1, -1234.5);
    std::ostringstream os2;
    lat::write_csv(os2, lf);
    CHECK(os2.str().find("sign,logmag") != std::string::npos);
    CHECK(os2.str().find("-1234.5") != std::string::npos);
}
