#include "baf/analytic_capacity.hpp"
#include "baf/errors.hpp"
#include "baf/protocol_sim.hpp"

#include <doctest.h>

#include <random>

using namespace baf;

namespace {

SystemParams params(double snr, double rate, std::size_t k = 1)
{
    SystemParams p;
    p.snr = snr;
    p.rate = rate;
    p.k_relays = k;
    return p;
}

bool trace_shape_ok(const BlockOutcome& o, std::size_t k)
{
    if (o.feedback_trace.size() != o.sub_blocks_used)
        return false;
    if (o.sub_blocks_used < 1 || o.sub_blocks_used > k + 1)
        return false;
    for (std::size_t i = 0; i + 1 < o.feedback_trace.size(); ++i)
        if (o.feedback_trace[i])
            return false;
    if (o.feedback_trace.back() != o.decoded)
        return false;
    return o.decoded || o.sub_blocks_used == k + 1;
}

} // namespace

TEST_CASE("strong direct link decodes in the first sub-block")
{
    ChannelDraw d{5.0, {0.0}, {0.0}};
    const auto o = simulate_block(d, params(1.0, 0.01), 0.1);
    CHECK(o.decoded);
    CHECK(o.sub_blocks_used == 1);
    CHECK(o.feedback_trace == std::vector<bool>{true});
}

TEST_CASE("zero channel ends in outage after every relay")
{
    for (std::size_t k : {1u, 2u, 4u}) {
        ChannelDraw d{0.0, std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
        const auto o = simulate_block(d, params(1.0, 0.01, k), 0.1);
        CHECK_FALSE(o.decoded);
        CHECK(o.sub_blocks_used == k + 1);
        CHECK(o.feedback_trace == std::vector<bool>(k + 1, false));
    }
}

TEST_CASE("relay rescues a weak direct link")
{
    // threshold on the aggregate is 0.1 (2^0.2 - 1) = 0.0148698 at SNR 1, R 0.01, tau 0.1
    ChannelDraw d{0.01, {1.0}, {1.0}};
    const auto o = simulate_block(d, params(1.0, 0.01), 0.1);
    CHECK(o.decoded);
    CHECK(o.sub_blocks_used == 2);
    CHECK(o.final_aggregate == doctest::Approx(0.01 + 1.0 / 2.1));
    CHECK(o.feedback_trace == std::vector<bool>{false, true});
}

TEST_CASE("zero rate always decodes immediately")
{
    ChannelDraw d{0.0, {0.0}, {0.0}};
    const auto o = simulate_block(d, params(1.0, 0.0), 0.0);
    CHECK(o.decoded);
    CHECK(o.sub_blocks_used == 1);
}

TEST_CASE("no relays is rejected")
{
    ChannelDraw d{1.0, {}, {}};
    CHECK_THROWS_AS(simulate_block(d, params(1.0, 0.01), 0.1), InvalidParameter);
}

TEST_CASE("relay ordering")
{
    ChannelDraw one{0.1, {1.0}, {1.0}};
    CHECK(relay_order(one, RelayOrderPolicy::FixedIndex, 0.1, 1.0) == std::vector<std::size_t>{0});
    CHECK(relay_order(one, RelayOrderPolicy::BestRelayFirst, 0.1, 1.0) == std::vector<std::size_t>{0});

    // relay terms for tau/SNR -> 0 are roughly 0.1 and 0.9
    ChannelDraw two{0.0, {0.2, 1.8}, {0.2, 1.8}};
    CHECK(relay_order(two, RelayOrderPolicy::BestRelayFirst, 1e-9, 1.0) == std::vector<std::size_t>{1, 0});
    CHECK(relay_order(two, RelayOrderPolicy::FixedIndex, 1e-9, 1.0) == std::vector<std::size_t>{0, 1});

    ChannelDraw tie{0.0, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
    CHECK(relay_order(tie, RelayOrderPolicy::BestRelayFirst, 0.1, 1.0) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("sequential protocol agrees with the one-shot capacity on random draws")
{
    std::mt19937_64 rng(17);
    std::exponential_distribution<double> ex(1.0);
    std::uniform_real_distribution<double> lr(-4.0, 0.0);
    std::uniform_int_distribution<std::size_t> kk(1, 4);
    int disagreements = 0;
    int order_changed_outage = 0;
    for (int i = 0; i < 20000; ++i) {
        const std::size_t k = kk(rng);
        ChannelDraw d;
        d.g_sd = ex(rng);
        for (std::size_t j = 0; j < k; ++j) {
            d.g_sr.push_back(ex(rng));
            d.g_rd.push_back(ex(rng));
        }
        const double snr = std::pow(10.0, lr(rng));
        const double rate = std::pow(10.0, lr(rng)) * snr;
        auto p = params(snr, rate, k);
        const double tau = resolve_tau(p).value;
        const auto o = simulate_block(d, p, tau);
        REQUIRE(trace_shape_ok(o, k));
        const bool outage_one_shot = instantaneous_capacity(d, p, tau) < rate;
        disagreements += (outage_one_shot != !o.decoded) ? 1 : 0;

        const auto best = simulate_block(d, p, tau, RelayOrderPolicy::BestRelayFirst);
        REQUIRE(trace_shape_ok(best, k));
        order_changed_outage += (best.decoded != o.decoded) ? 1 : 0;
    }
    CHECK(disagreements == 0);
    CHECK(order_changed_outage == 0);
}

TEST_CASE("N does not increase when a gain increases")
{
    std::mt19937_64 rng(23);
    std::exponential_distribution<double> ex(1.0);
    std::uniform_real_distribution<double> bump(0.0, 1.0);
    const auto p = params(0.1, 0.002, 3);
    const double tau = resolve_tau(p).value;
    for (int i = 0; i < 20000; ++i) {
        ChannelDraw d{ex(rng) * 0.05, {ex(rng), ex(rng), ex(rng)}, {ex(rng), ex(rng), ex(rng)}};
        const auto base = simulate_block(d, p, tau);
        ChannelDraw up = d;
        const int c = static_cast<int>(i % 7);
        double* g = c == 0 ? &up.g_sd : (c < 4 ? &up.g_sr[c - 1] : &up.g_rd[c - 4]);
        *g += bump(rng);
        const auto raised = simulate_block(up, p, tau);
        REQUIRE(raised.sub_blocks_used <= base.sub_blocks_used);
    }
}

TEST_CASE("final aggregate grows with the number of sub-blocks")
{
    ChannelDraw d{0.001, {0.01, 0.02, 5.0}, {0.01, 0.02, 5.0}};
    auto p = params(1.0, 0.01, 3);
    const double tau = resolve_tau(p).value;
    const auto o = simulate_block(d, p, tau);
    CHECK(o.decoded);
    CHECK(o.sub_blocks_used == 4);
    double partial = d.g_sd;
    for (std::size_t k = 0; k < 3; ++k)
        partial += relay_term(d.g_sr[k], d.g_rd[k], tau, 1.0);
    CHECK(o.final_aggregate == partial);
}

TEST_CASE("linearized decode rule compares the aggregate against g_K")
{
    auto p = params(1.0, 0.01, 1);
    p.threshold_mode = ThresholdMode::Linearized;
    const double g = outage_threshold_g(p, 1, ThresholdMode::Linearized);
    ChannelDraw above{g * 1.0001, {0.0}, {0.0}};
    ChannelDraw below{g * 0.9999, {0.0}, {0.0}};
    CHECK(simulate_block(above, p, 0.1).sub_blocks_used == 1);
    CHECK_FALSE(simulate_block(below, p, 0.1).decoded);
}
