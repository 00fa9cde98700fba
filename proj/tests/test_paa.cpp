#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dtwidx/dtw.hpp"
#include "dtwidx/lower_bounds.hpp"
#include "dtwidx/paa.hpp"
#include "test_util.hpp"

using dtwidx::Envelope;
using dtwidx::Mbr;
using dtwidx::PaaEnvelope;
using dtwidx::PaaVector;
using dtwidx::TimeSeries;

namespace {

TimeSeries make(std::vector<double> values) {
    TimeSeries s;
    s.values = std::move(values);
    return s;
}

PaaVector vec(std::vector<double> coords, std::size_t lmax) {
    PaaVector v;
    v.coords = std::move(coords);
    v.lmax = lmax;
    return v;
}

PaaEnvelope penv_of(std::vector<double> upper, std::vector<double> lower,
                    std::size_t lmax) {
    PaaEnvelope p;
    p.upper = vec(std::move(upper), lmax);
    p.lower = vec(std::move(lower), lmax);
    return p;
}

double l1(const TimeSeries& a, const TimeSeries& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.length(); ++i)
        sum += std::fabs(a.values[i] - b.values[i]);
    return sum;
}

}  // namespace

TEST_CASE("paa_transform on fixed inputs") {
    const auto constant = dtwidx::paa_transform(make({2, 2, 2, 2, 2, 2}), 3);
    CHECK(constant.coords == std::vector<double>{2, 2, 2});
    CHECK(constant.lmax == 6);

    const auto halves = dtwidx::paa_transform(make({1, 2, 3, 4}), 2);
    CHECK(halves.coords == std::vector<double>{1.5, 3.5});

    const auto identity = dtwidx::paa_transform(make({1, 2, 3, 4}), 4);
    CHECK(identity.coords == std::vector<double>{1, 2, 3, 4});

    CHECK_THROWS_AS(dtwidx::paa_transform(make({1, 2, 3}), 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(dtwidx::paa_transform(make({1, 2}), 0),
                    std::invalid_argument);
}

TEST_CASE("d_paa on fixed inputs") {
    const auto a = vec({1.0, -0.5}, 4);
    CHECK(dtwidx::d_paa(a, a) == 0.0);
    CHECK(dtwidx::d_paa(vec({0, 0}, 4), vec({1, 2}, 4)) == 6.0);

    const auto qbar = dtwidx::paa_transform(make({0, 0, 0, 0}), 2);
    const auto cbar = dtwidx::paa_transform(make({1, -1, 2, -2}), 2);
    CHECK(dtwidx::d_paa(qbar, cbar) == 0.0);

    CHECK_THROWS_AS(dtwidx::d_paa(vec({0, 0}, 4), vec({0, 0, 0}, 6)),
                    std::invalid_argument);
    CHECK_THROWS_AS(dtwidx::d_paa(vec({0, 0}, 4), vec({0, 0}, 8)),
                    std::invalid_argument);
}

TEST_CASE("d_paa never exceeds the pointwise distance") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n_paa = 1 + testutil::uniform_index(rng, 8);
        const std::size_t seg = 1 + testutil::uniform_index(rng, 6);
        const std::size_t lmax = n_paa * seg;
        const auto x = testutil::random_series(rng, lmax, -2, 2);
        const auto y = testutil::random_series(rng, lmax, -2, 2);
        const double approx = dtwidx::d_paa(dtwidx::paa_transform(x, n_paa),
                                            dtwidx::paa_transform(y, n_paa));
        CHECK(approx <= l1(x, y) + 1e-12);
    }
}

TEST_CASE("paa_envelope on fixed inputs") {
    Envelope env;
    env.upper = {3, 3, 3, 3};
    env.lower = {1, 1, 2, 2};
    env.radius = 1;
    const auto penv = dtwidx::paa_envelope(env, 2);
    CHECK(penv.upper.coords == std::vector<double>{3, 3});
    CHECK(penv.lower.coords == std::vector<double>{1, 2});
    CHECK(penv.upper.lmax == 4);

    Envelope zero;
    zero.upper = {0, 0};
    zero.lower = {0, 0};
    const auto flat = dtwidx::paa_envelope(zero, 2);
    CHECK(flat.upper.coords == std::vector<double>{0, 0});
    CHECK(flat.lower.coords == std::vector<double>{0, 0});

    CHECK_THROWS_AS(dtwidx::paa_envelope(env, 3), std::invalid_argument);
}

TEST_CASE("identity segmentation reproduces the raw envelope and bound") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + testutil::uniform_index(rng, 20);
        const std::size_t r = testutil::uniform_index(rng, 5);
        const auto q = testutil::random_series(rng, n, -2, 2);
        const auto c = testutil::random_series(rng, n, -2, 2);
        const auto env = dtwidx::envelope(q, r);
        const auto penv = dtwidx::paa_envelope(env, n);
        CHECK(penv.upper.coords == env.upper);
        CHECK(penv.lower.coords == env.lower);
        const auto cbar = dtwidx::paa_transform(c, n);
        CHECK(testutil::near(dtwidx::lb_paa(penv, cbar),
                             dtwidx::lb_keogh(env, c), 1e-12));
        CHECK(testutil::near(dtwidx::d_paa(dtwidx::paa_transform(q, n), cbar),
                             l1(q, c), 1e-12));
    }
}

TEST_CASE("lb_paa on fixed inputs") {
    CHECK(dtwidx::lb_paa(penv_of({3, 3}, {1, 2}, 4), vec({2, 2.5}, 4)) == 0.0);
    CHECK(dtwidx::lb_paa(penv_of({0, 0}, {0, 0}, 4), vec({1.5, -0.5}, 4)) == 4.0);
    CHECK_THROWS_AS(dtwidx::lb_paa(penv_of({0, 0}, {0, 0}, 4), vec({0}, 4)),
                    std::invalid_argument);
}

TEST_CASE("lb_paa never exceeds lb_keogh of the source pair") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n_paa = 1 + testutil::uniform_index(rng, 8);
        const std::size_t seg = 1 + testutil::uniform_index(rng, 6);
        const std::size_t lmax = n_paa * seg;
        const std::size_t r = testutil::uniform_index(rng, 6);
        const auto q = testutil::random_series(rng, lmax, -2, 2);
        const auto c = testutil::random_series(rng, lmax, -2, 2);
        const auto env = dtwidx::envelope(q, r);
        const double fine = dtwidx::lb_keogh(env, c);
        const double coarse = dtwidx::lb_paa(dtwidx::paa_envelope(env, n_paa),
                                             dtwidx::paa_transform(c, n_paa));
        CHECK(coarse >= 0.0);
        CHECK(coarse <= fine + 1e-12);
    }
}

TEST_CASE("doubling the segment count never loosens lb_paa") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t lmax = 32;
        const std::size_t r = testutil::uniform_index(rng, 8);
        const auto q = testutil::random_series(rng, lmax, -2, 2);
        const auto c = testutil::random_series(rng, lmax, -2, 2);
        const auto env = dtwidx::envelope(q, r);
        double prev = -1.0;
        for (std::size_t n_paa = 2; n_paa <= 32; n_paa *= 2) {
            const double lb = dtwidx::lb_paa(dtwidx::paa_envelope(env, n_paa),
                                             dtwidx::paa_transform(c, n_paa));
            CHECK(lb >= prev - 1e-12);
            prev = lb;
        }
    }
}

TEST_CASE("mbr expansion and containment") {
    auto box = Mbr::of(vec({1, 2}, 4));
    CHECK(box.low == std::vector<double>{1, 2});
    CHECK(box.high == std::vector<double>{1, 2});
    CHECK(box.contains(vec({1, 2}, 4)));

    box.expand(vec({0, 3}, 4));
    CHECK(box.low == std::vector<double>{0, 2});
    CHECK(box.high == std::vector<double>{1, 3});
    CHECK(box.contains(vec({0.5, 2.5}, 4)));
    CHECK_FALSE(box.contains(vec({2, 2.5}, 4)));

    Mbr other{{-1, 2.5}, {0.5, 4}};
    box.expand(other);
    CHECK(box.low == std::vector<double>{-1, 2});
    CHECK(box.high == std::vector<double>{1, 4});
}

TEST_CASE("lb_mbr on fixed inputs") {
    const auto penv = penv_of({3, 3}, {1, 1}, 4);
    CHECK(dtwidx::lb_mbr(penv, Mbr{{0, 0}, {2, 2}}) == 0.0);
    CHECK(dtwidx::lb_mbr(penv, Mbr{{4, 4}, {5, 5}}) == 4.0);
    CHECK(dtwidx::lb_paa(penv, vec({0.5, 0.5}, 4)) == 2.0);
    CHECK(dtwidx::lb_mbr(penv_of({3, 3}, {2, 2}, 4), Mbr{{0, 0}, {1, 0.5}}) ==
          2.0 * (1.0 + 1.5));
    CHECK_THROWS_AS(dtwidx::lb_mbr(penv, Mbr{{0}, {1}}), std::invalid_argument);
}

TEST_CASE("a box fully inside the envelope costs nothing") {
    const auto penv = penv_of({3, 3}, {1, 1}, 4);
    CHECK(dtwidx::lb_mbr(penv, Mbr{{1.5, 1.5}, {2.5, 2.5}}) == 0.0);
    CHECK(dtwidx::lb_paa(penv, vec({2, 2}, 4)) == 0.0);
}

TEST_CASE("lb_mbr never exceeds lb_paa of any contained vector") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n_paa = 1 + testutil::uniform_index(rng, 6);
        const std::size_t seg = 1 + testutil::uniform_index(rng, 4);
        const std::size_t lmax = n_paa * seg;
        const std::size_t r = testutil::uniform_index(rng, 4);
        const auto q = testutil::random_series(rng, lmax, -2, 2);
        const auto penv =
            dtwidx::paa_envelope(dtwidx::envelope(q, r), n_paa);

        const std::size_t count = 1 + testutil::uniform_index(rng, 8);
        std::vector<PaaVector> members;
        for (std::size_t k = 0; k < count; ++k) {
            members.push_back(dtwidx::paa_transform(
                testutil::random_series(rng, lmax, -2, 2), n_paa));
        }
        auto box = Mbr::of(members.front());
        for (const auto& v : members) box.expand(v);

        const double floor_bound = dtwidx::lb_mbr(penv, box);
        for (const auto& v : members) {
            REQUIRE(box.contains(v));
            CHECK(floor_bound <= dtwidx::lb_paa(penv, v) + 1e-12);
        }
    }
}

TEST_CASE("the full bound chain holds through to the true distance") {
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n_paa = 4;
        const std::size_t n = 4 + testutil::uniform_index(rng, 20);
        const std::size_t m = 4 + testutil::uniform_index(rng, 20);
        const std::size_t diff = n > m ? n - m : m - n;
        const std::size_t r = diff + 1 + testutil::uniform_index(rng, 4);
        const std::size_t longest = std::max(n, m);
        const std::size_t lmax = (longest / n_paa + 1) * n_paa;
        const dtwidx::ExtensionParams params{lmax, 0.0};

        const auto q = testutil::random_series(rng, n, -2, 2);
        const auto c = testutil::random_series(rng, m, -2, 2);
        const auto qx = dtwidx::extend(q, params);
        const auto cx = dtwidx::extend(c, params);
        const auto env = dtwidx::envelope(qx, r);
        const auto penv = dtwidx::paa_envelope(env, n_paa);
        const auto cbar = dtwidx::paa_transform(cx, n_paa);

        const double box_bound = dtwidx::lb_mbr(penv, Mbr::of(cbar));
        const double paa_bound = dtwidx::lb_paa(penv, cbar);
        const double keogh_bound = dtwidx::lb_keogh(env, cx);
        const auto band = dtwidx::BandConstraint::banded(r);
        const auto padded = dtwidx::dtw(qx, cx, band);
        const auto original = dtwidx::dtw(q, c, band);
        REQUIRE(padded.has_value());
        REQUIRE(original.has_value());

        CHECK(box_bound <= paa_bound + 1e-12);
        CHECK(paa_bound <= keogh_bound + 1e-12);
        CHECK(keogh_bound <= *padded + 1e-12);
        CHECK(*padded <= *original + 1e-12);
    }
}
