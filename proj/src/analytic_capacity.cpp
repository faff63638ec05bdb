#include "baf/analytic_capacity.hpp"

#include "baf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace baf {

namespace {

constexpr double kLog2e = std::numbers::log2e;

void require_relays(const LinkVariances& v, std::size_t min_k, const char* who)
{
    v.validate();
    if (v.relay_count() < min_k)
        throw InvalidParameter(std::string(who) + ": needs at least " + std::to_string(min_k) + " relay(s)");
}

void require_one_relay(const LinkVariances& v, const char* who)
{
    v.validate();
    if (v.relay_count() != 1)
        throw InvalidParameter(std::string(who) + ": single-relay formula called with " +
                               std::to_string(v.relay_count()) + " relays");
}

void require_epsilon(double epsilon)
{
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw InvalidParameter("epsilon must lie in [0, 1)");
}

// SNR multiplier inside the K-relay capacity bounds:
// [(K+1)! s_sd prod(s_rd s_sr) eps / prod(s_rd + s_sr)]^{1/(K+1)}.
// The product is accumulated left to right so that K = 1 reproduces the
// single-relay expression operation for operation.
double k_relay_gain(const LinkVariances& v, double epsilon)
{
    const std::size_t k = v.relay_count();
    double factorial = 1.0;
    for (std::size_t i = 2; i <= k + 1; ++i)
        factorial *= static_cast<double>(i);

    double num = factorial * v.sigma_sd2;
    double den = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        num = num * v.sigma_rd2[i];
        num = num * v.sigma_sr2[i];
        den = den * (v.sigma_rd2[i] + v.sigma_sr2[i]);
    }
    num = num * epsilon;
    const double inner = num / den;
    if (k == 1)
        return std::sqrt(inner);
    return std::pow(inner, 1.0 / static_cast<double>(k + 1));
}

} // namespace

double relay_term(double g_sr, double g_rd, double tau, double snr) noexcept
{
    const double den = g_rd + g_sr + tau / snr;
    if (den <= 0.0)
        return 0.0;
    return g_rd * g_sr / den;
}

double channel_aggregate(const ChannelDraw& draw, double tau, double snr) noexcept
{
    double a = draw.g_sd;
    for (std::size_t k = 0; k < draw.relay_count(); ++k)
        a += relay_term(draw.g_sr[k], draw.g_rd[k], tau, snr);
    return a;
}

double capacity_from_aggregate(double aggregate, std::size_t k_relays, double tau, double snr) noexcept
{
    if (tau <= 0.0)
        return 0.0;
    return tau / static_cast<double>(k_relays + 1) * std::log2(1.0 + snr / tau * aggregate);
}

double instantaneous_capacity(const ChannelDraw& draw, const SystemParams& params, double tau)
{
    if (!(tau > 0.0 && tau <= 1.0))
        throw InvalidParameter("tau must lie in (0, 1]");
    return capacity_from_aggregate(channel_aggregate(draw, tau, params.snr), draw.relay_count(), tau,
                                   params.snr);
}

double outage_threshold_g(const SystemParams& params, std::size_t k_relays, ThresholdMode mode)
{
    params.validate();
    const double kp1 = static_cast<double>(k_relays + 1);
    if (mode == ThresholdMode::Linearized)
        return kp1 * params.rate / (kLog2e * params.snr);
    if (params.rate == 0.0)
        return 0.0;
    const double tau = resolve_tau(params).value;
    return tau * std::expm1(kp1 * params.rate / tau * std::numbers::ln2) / params.snr;
}

LemmaConstant lemma1_constant(double sigma_u2, double sigma_v2, double sigma_w2)
{
    if (!(sigma_u2 > 0.0 && sigma_v2 > 0.0 && sigma_w2 > 0.0))
        throw InvalidParameter("lemma constant requires positive variances");
    return {(sigma_v2 + sigma_w2) / (2.0 * sigma_u2 * sigma_v2 * sigma_w2)};
}

double c_eps_baf_no_feedback(const LinkVariances& variances, double snr, double epsilon)
{
    require_one_relay(variances, "c_eps_baf_no_feedback");
    require_epsilon(epsilon);
    const double sd = variances.sigma_sd2;
    const double sr = variances.sigma_sr2[0];
    const double rd = variances.sigma_rd2[0];
    return 0.5 * std::log2(1.0 + snr * std::sqrt(2.0 * sd * rd * sr * epsilon / (rd + sr)));
}

double expected_n_one_relay(const LinkVariances& variances, const SystemParams& params, ExpectedNMode mode)
{
    require_one_relay(variances, "expected_n_one_relay");
    params.validate();
    if (mode == ExpectedNMode::PaperApprox) {
        const double p = kLog2e * params.rate / (variances.sigma_sd2 * params.snr);
        return 1.0 + std::clamp(p, 0.0, 1.0);
    }
    if (params.rate == 0.0)
        return 1.0;
    // Source alone decodes iff (tau/2) log2(1 + g_sd SNR/tau) >= R.
    const double t = outage_threshold_g(params, 1, ThresholdMode::Exact);
    return 1.0 + (-std::expm1(-t / variances.sigma_sd2));
}

double c_eps_baf_incremental(const LinkVariances& variances, const SystemParams& params, ExpectedNMode mode)
{
    return c_eps_baf_incremental(variances, params, expected_n_one_relay(variances, params, mode));
}

double c_eps_baf_incremental(const LinkVariances& variances, const SystemParams& params, double expected_n)
{
    if (!(expected_n >= 1.0 && expected_n <= 2.0))
        throw InvalidParameter("single-relay E(N) must lie in [1, 2]");
    return 2.0 / expected_n * c_eps_baf_no_feedback(variances, params.snr, params.epsilon);
}

double c_eps_cutset(const LinkVariances& variances, double snr, double epsilon)
{
    require_relays(variances, 1, "c_eps_cutset");
    require_epsilon(epsilon);
    const auto k = static_cast<double>(variances.relay_count());
    return 1.0 / (1.0 + k * epsilon) * std::log2(1.0 + snr * k_relay_gain(variances, epsilon));
}

double c_eps_baf_k(const LinkVariances& variances, double snr, double epsilon)
{
    require_relays(variances, 1, "c_eps_baf_k");
    require_epsilon(epsilon);
    const auto kp1 = static_cast<double>(variances.relay_count() + 1);
    return 1.0 / kp1 * std::log2(1.0 + snr * k_relay_gain(variances, epsilon));
}

double c_eps_baf_ir_k(const LinkVariances& variances, double snr, double epsilon, double expected_n_k)
{
    const auto kp1 = static_cast<double>(variances.relay_count() + 1);
    if (!(expected_n_k >= 1.0 && expected_n_k <= kp1))
        throw InvalidParameter("E_K(N) must lie in [1, K+1]");
    return kp1 / expected_n_k * c_eps_baf_k(variances, snr, epsilon);
}

double delta_ratio(double epsilon, double expected_n, std::size_t k_relays)
{
    return (1.0 + static_cast<double>(k_relays) * epsilon) / expected_n;
}

FeasibilityCheck epsilon_feasibility(double epsilon, double expected_n, std::size_t k_relays)
{
    const double eps_max = (expected_n - 1.0) / static_cast<double>(k_relays);
    return {eps_max, epsilon <= eps_max};
}

CapacityReport capacity_report(const LinkVariances& variances, const SystemParams& params, ExpectedNMode mode)
{
    const double en = expected_n_one_relay(variances, params, mode);
    return CapacityReport{
        c_eps_baf_no_feedback(variances, params.snr, params.epsilon),
        c_eps_baf_incremental(variances, params, en),
        c_eps_cutset(variances, params.snr, params.epsilon),
        delta_ratio(params.epsilon, en, 1),
        en,
    };
}

double placement_objective(double position, double pathloss_exponent)
{
    const double sr = std::pow(position, -pathloss_exponent);
    const double rd = std::pow(1.0 - position, -pathloss_exponent);
    return 2.0 * rd * sr / (rd + sr);
}

std::vector<double> placement_grid(std::size_t points)
{
    std::vector<double> grid(points);
    const auto den = static_cast<double>(points + 1);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = static_cast<double>(i + 1) / den;
    return grid;
}

double optimal_relay_position(double pathloss_exponent, std::size_t grid_resolution)
{
    if (!(pathloss_exponent > 1.0))
        throw InvalidParameter("placement search needs a pathloss exponent above 1");
    if (grid_resolution < 101)
        throw InvalidParameter("placement grid needs at least 101 points");
    const auto grid = placement_grid(grid_resolution);
    double best_pos = grid.front();
    double best = -1.0;
    for (double d : grid) {
        const double v = placement_objective(d, pathloss_exponent);
        if (v > best) {
            best = v;
            best_pos = d;
        }
    }
    return best_pos;
}

MinBoundResult min_bound_check(double x, double y, double delta)
{
    const double lhs = std::min(x, y);
    const double rhs = x * y / (x + y + delta);
    return {lhs, rhs, lhs >= rhs};
}

} // namespace baf
