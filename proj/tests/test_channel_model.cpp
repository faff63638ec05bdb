#include "baf/channel_model.hpp"
#include "baf/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace baf;

TEST_CASE("variances follow d^-alpha with unit constant")
{
    SUBCASE("midpoint, alpha 3")
    {
        const auto v = variances_from_geometry({1.0, {0.5}, 3.0});
        CHECK(v.sigma_sd2 == doctest::Approx(1.0));
        CHECK(v.sigma_sr2[0] == doctest::Approx(8.0));
        CHECK(v.sigma_rd2[0] == doctest::Approx(8.0));
    }
    SUBCASE("zero exponent gives unit variances")
    {
        const auto v = variances_from_geometry({1.0, {0.5}, 0.0});
        CHECK(v.sigma_sd2 == 1.0);
        CHECK(v.sigma_sr2[0] == 1.0);
        CHECK(v.sigma_rd2[0] == 1.0);
    }
    SUBCASE("quarter position, alpha 4")
    {
        const auto v = variances_from_geometry({1.0, {0.25}, 4.0});
        CHECK(v.sigma_sr2[0] == doctest::Approx(256.0));
        CHECK(v.sigma_rd2[0] == doctest::Approx(3.16049382716049).epsilon(1e-12));
    }
}

TEST_CASE("mirrored relay placement swaps sr and rd variances")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(0.01, 0.99);
    std::uniform_real_distribution<double> expo(1.0, 6.0);
    for (int i = 0; i < 200; ++i) {
        const double d = pos(rng);
        const double a = expo(rng);
        const auto v = variances_from_geometry({1.0, {d}, a});
        const auto m = variances_from_geometry({1.0, {1.0 - d}, a});
        CHECK(v.sigma_sr2[0] == doctest::Approx(m.sigma_rd2[0]).epsilon(1e-12));
        CHECK(v.sigma_rd2[0] == doctest::Approx(m.sigma_sr2[0]).epsilon(1e-12));
    }
}

TEST_CASE("relays at the end points are rejected")
{
    CHECK_THROWS_AS(variances_from_geometry({1.0, {0.0}, 3.0}), InvalidParameter);
    CHECK_THROWS_AS(variances_from_geometry({1.0, {1.0}, 3.0}), InvalidParameter);
    CHECK_THROWS_AS(variances_from_geometry({0.0, {}, 3.0}), InvalidParameter);
    CHECK_THROWS_AS(LinkVariances::one_relay(1.0, 0.0, 1.0).validate(), InvalidParameter);
}

TEST_CASE("tau policy")
{
    SystemParams p;
    p.rate = 0.01;
    p.snr = 1.0;
    auto t = resolve_tau(p);
    CHECK(t.value == doctest::Approx(0.1));
    CHECK_FALSE(t.clamped);

    p.rate = 4.0;
    t = resolve_tau(p);
    CHECK(t.value == 1.0);
    CHECK(t.clamped);

    p.tau_policy = TauPolicy::Fixed;
    p.tau_fixed = 0.5;
    CHECK(resolve_tau(p).value == 0.5);

    p.tau_fixed = 1.5;
    CHECK_THROWS_AS(resolve_tau(p), InvalidParameter);
    p.tau_fixed = 0.0;
    CHECK_THROWS_AS(resolve_tau(p), InvalidParameter);
}

TEST_CASE("channel draws are exponential with the configured mean")
{
    constexpr int n = 1'000'000;
    const auto v = LinkVariances::one_relay(2.0, 1.0, 1.0);
    double sum = 0.0;
    int below_one = 0;
    for (int i = 0; i < n; ++i) {
        TrialStream s(42, static_cast<std::uint64_t>(i));
        const auto d = draw_channels(v, s);
        sum += d.g_sd;
        below_one += d.g_sr[0] <= 1.0 ? 1 : 0;
        REQUIRE(d.g_sd >= 0.0);
    }
    CHECK(std::abs(sum / n - 2.0) < 0.01);
    CHECK(std::abs(static_cast<double>(below_one) / n - (1.0 - std::exp(-1.0))) < 0.002);
}

TEST_CASE("sample means converge within five standard errors")
{
    constexpr int n = 200'000;
    const LinkVariances v{0.5, {3.0, 0.25}, {1.5, 7.0}};
    std::vector<double> sums(5, 0.0);
    for (int i = 0; i < n; ++i) {
        TrialStream s(2024, static_cast<std::uint64_t>(i));
        const auto d = draw_channels(v, s);
        sums[0] += d.g_sd;
        sums[1] += d.g_sr[0];
        sums[2] += d.g_rd[0];
        sums[3] += d.g_sr[1];
        sums[4] += d.g_rd[1];
    }
    const double means[] = {0.5, 3.0, 1.5, 0.25, 7.0};
    for (int j = 0; j < 5; ++j) {
        // exponential: standard deviation equals the mean
        const double se = means[j] / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(sums[j] / n - means[j]) < 5.0 * se);
    }
}

TEST_CASE("draws are a pure function of seed and trial index")
{
    const auto v = LinkVariances::unit(3);
    TrialStream a(99, 12345);
    TrialStream b(99, 12345);
    const auto da = draw_channels(v, a);
    // interleave unrelated draws to show no shared state
    TrialStream other(99, 1);
    (void)draw_channels(v, other);
    const auto db = draw_channels(v, b);
    CHECK(da.g_sd == db.g_sd);
    CHECK(da.g_sr == db.g_sr);
    CHECK(da.g_rd == db.g_rd);

    TrialStream c(99, 12346);
    CHECK(draw_channels(v, c).g_sd != da.g_sd);
    TrialStream d(100, 12345);
    CHECK(draw_channels(v, d).g_sd != da.g_sd);
}

TEST_CASE("uniform variates lie in (0, 1]")
{
    TrialStream s(0, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform_open0();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
    }
}
