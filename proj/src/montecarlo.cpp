#include "baf/montecarlo.hpp"

#include "baf/analytic_capacity.hpp"
#include "baf/errors.hpp"
#include "baf/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace baf {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kTruncationMeans = 40.0;
constexpr double kOracleRelTol = 1e-6;
constexpr std::uint64_t kMinEvents = 100;

unsigned resolve_workers(const McOptions& opts)
{
    return opts.workers != 0 ? opts.workers : worker_count();
}

void require_trials(const McOptions& opts, std::uint64_t minimum)
{
    if (opts.n_trials < minimum)
        throw InvalidParameter("need at least " + std::to_string(minimum) + " trials");
}

struct Counts {
    std::uint64_t outages = 0;
    std::uint64_t source_failures = 0;
    std::uint64_t sum_n = 0;
    std::uint64_t sum_n_sq = 0;
};

// Integer tallies per chunk, summed in chunk order: exact and independent of
// the number of workers.
Counts count_blocks(const LinkVariances& variances, const SystemParams& params, const McOptions& opts,
                    bool need_n)
{
    variances.validate();
    params.validate();
    SystemParams p = params;
    p.k_relays = variances.relay_count();
    const double tau = p.rate > 0.0 ? resolve_tau(p).value : 1.0;

    std::vector<Counts> per_chunk(chunk_count(opts.n_trials, kDefaultChunk));
    for_each_chunk(opts.n_trials, kDefaultChunk, resolve_workers(opts),
                   [&](std::uint64_t begin, std::uint64_t end, std::size_t c) {
                       Counts local;
                       ChannelDraw draw;
                       std::vector<std::size_t> scratch;
                       for (std::uint64_t i = begin; i < end; ++i) {
                           TrialStream stream(opts.master_seed, i);
                           draw_channels_into(variances, stream, draw);
                           const BlockSummary s = run_block(draw, p, tau, opts.order, scratch);
                           local.outages += s.decoded ? 0 : 1;
                           if (need_n) {
                               local.source_failures += s.sub_blocks_used > 1 ? 1 : 0;
                               local.sum_n += s.sub_blocks_used;
                               local.sum_n_sq += s.sub_blocks_used * s.sub_blocks_used;
                           }
                       }
                       per_chunk[c] = local;
                   });

    Counts total;
    for (const Counts& c : per_chunk) {
        total.outages += c.outages;
        total.source_failures += c.source_failures;
        total.sum_n += c.sum_n;
        total.sum_n_sq += c.sum_n_sq;
    }
    return total;
}

// Solves s (2^{2s} - 1) = t for s > 0.
double sqrt_ratio_for_threshold(double t)
{
    if (!(t > 0.0))
        throw InvalidParameter("threshold must be positive");
    auto f = [t](double s) { return s * std::expm1(2.0 * s * std::numbers::ln2) - t; };
    double hi = 1.0;
    while (f(hi) < 0.0)
        hi *= 2.0;
    std::uintmax_t max_iter = 200;
    const auto [lo_s, hi_s] =
        boost::math::tools::toms748_solve(f, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
    return 0.5 * (lo_s + hi_s);
}

} // namespace

Estimate Estimate::proportion(std::uint64_t events, std::uint64_t n)
{
    Estimate e;
    e.n_trials = n;
    if (n == 0)
        return e;
    const double p = static_cast<double>(events) / static_cast<double>(n);
    e.mean = p;
    e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    e.ci_lo = std::max(0.0, p - kZ95 * e.std_error);
    e.ci_hi = std::min(1.0, p + kZ95 * e.std_error);
    return e;
}

Estimate Estimate::from_sums(std::uint64_t sum, std::uint64_t sum_sq, std::uint64_t n)
{
    Estimate e;
    e.n_trials = n;
    if (n == 0)
        return e;
    const auto nd = static_cast<double>(n);
    e.mean = static_cast<double>(sum) / nd;
    if (n > 1) {
        // n * sum_sq - sum^2 is exact in long double for the trial counts used here
        const long double num = static_cast<long double>(n) * static_cast<long double>(sum_sq) -
                                static_cast<long double>(sum) * static_cast<long double>(sum);
        const double var = static_cast<double>(std::max(0.0L, num) / (static_cast<long double>(n) * (n - 1)));
        e.std_error = std::sqrt(var / nd);
    }
    e.ci_lo = e.mean - kZ95 * e.std_error;
    e.ci_hi = e.mean + kZ95 * e.std_error;
    return e;
}

OffsetForThreshold offset_proportional(double factor)
{
    return [factor](double g) { return factor * g; };
}

OffsetForThreshold offset_from_tau_policy()
{
    // x = tau/SNR = sqrt(R/SNR) and g = sqrt(R/SNR)(2^{2 sqrt(R/SNR)} - 1)
    return [](double g) { return sqrt_ratio_for_threshold(g); };
}

double rate_for_threshold(double t, double snr)
{
    if (!(snr > 0.0))
        throw InvalidParameter("snr must be positive");
    if (t == 0.0)
        return 0.0;
    const double s = sqrt_ratio_for_threshold(t);
    return s * s * snr;
}

BlockStatistics simulate_blocks(const LinkVariances& variances, const SystemParams& params, const McOptions& opts)
{
    const Counts c = count_blocks(variances, params, opts, true);
    BlockStatistics out;
    out.outage = Estimate::proportion(c.outages, opts.n_trials);
    out.expected_n = Estimate::from_sums(c.sum_n, c.sum_n_sq, opts.n_trials);
    out.source_failure = Estimate::proportion(c.source_failures, opts.n_trials);
    out.outage_events = c.outages;
    return out;
}

Estimate estimate_outage(const LinkVariances& variances, const SystemParams& params, const McOptions& opts)
{
    require_trials(opts, 10'000);
    const Counts c = count_blocks(variances, params, opts, false);
    return Estimate::proportion(c.outages, opts.n_trials);
}

Estimate estimate_expected_n(const LinkVariances& variances, const SystemParams& params, const McOptions& opts)
{
    require_trials(opts, 10'000);
    const Counts c = count_blocks(variances, params, opts, true);
    return Estimate::from_sums(c.sum_n, c.sum_n_sq, opts.n_trials);
}

std::vector<Lemma1Point> lemma1_ratio_experiment(double sigma_u2, double sigma_v2, double sigma_w2,
                                                 std::span<const double> g_sequence,
                                                 const OffsetForThreshold& offset, const McOptions& opts)
{
    if (!(sigma_u2 > 0.0 && sigma_v2 > 0.0 && sigma_w2 > 0.0))
        throw InvalidParameter("variances must be positive");
    if (g_sequence.empty())
        throw InvalidParameter("g sequence is empty");
    for (std::size_t i = 0; i < g_sequence.size(); ++i) {
        if (!(g_sequence[i] > 0.0))
            throw InvalidParameter("g values must be positive");
        if (i > 0 && !(g_sequence[i] < g_sequence[i - 1]))
            throw InvalidParameter("g sequence must be strictly decreasing");
    }
    require_trials(opts, 10'000);

    const std::size_t m = g_sequence.size();
    std::vector<double> xs(m);
    for (std::size_t j = 0; j < m; ++j) {
        xs[j] = offset(g_sequence[j]);
        if (!(xs[j] >= 0.0))
            throw InvalidParameter("offset x must be non-negative");
    }

    std::vector<std::vector<std::uint64_t>> per_chunk(chunk_count(opts.n_trials, kDefaultChunk));
    for_each_chunk(opts.n_trials, kDefaultChunk, resolve_workers(opts),
                   [&](std::uint64_t begin, std::uint64_t end, std::size_t c) {
                       std::vector<std::uint64_t> hits(m, 0);
                       for (std::uint64_t i = begin; i < end; ++i) {
                           TrialStream stream(opts.master_seed, i);
                           const double u = stream.exponential(sigma_u2);
                           if (u >= g_sequence[0])
                               continue;
                           const double v = stream.exponential(sigma_v2);
                           const double w = stream.exponential(sigma_w2);
                           for (std::size_t j = 0; j < m; ++j) {
                               if (u + v * w / (v + w + xs[j]) < g_sequence[j])
                                   ++hits[j];
                           }
                       }
                       per_chunk[c] = std::move(hits);
                   });

    std::vector<std::uint64_t> events(m, 0);
    for (const auto& hits : per_chunk)
        for (std::size_t j = 0; j < m; ++j)
            events[j] += hits[j];

    if (events.back() < kMinEvents) {
        std::ostringstream msg;
        msg << "only " << events.back() << " events at g=" << g_sequence.back()
            << "; at least " << kMinEvents << " needed, increase the trial count";
        throw ConvergenceFailure(msg.str());
    }

    std::vector<Lemma1Point> out;
    out.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double g2 = g_sequence[j] * g_sequence[j];
        Estimate p = Estimate::proportion(events[j], opts.n_trials);
        Estimate r;
        r.mean = p.mean / g2;
        r.std_error = p.std_error / g2;
        r.n_trials = p.n_trials;
        r.ci_lo = p.ci_lo / g2;
        r.ci_hi = p.ci_hi / g2;
        out.push_back({g_sequence[j], xs[j], r, events[j]});
    }
    return out;
}

double quadrature_outage_probability(double sigma_u2, double sigma_v2, double sigma_w2, double t, double x)
{
    using boost::math::quadrature::gauss_kronrod;

    if (!(sigma_u2 > 0.0 && sigma_v2 > 0.0 && sigma_w2 > 0.0))
        throw InvalidParameter("variances must be positive");
    if (!(t >= 0.0) || !(x >= 0.0))
        throw InvalidParameter("threshold and offset must be non-negative");
    if (t == 0.0)
        return 0.0;
    if (std::isinf(t))
        return 1.0;

    const double v_max = kTruncationMeans * sigma_v2;
    const double w_max = kTruncationMeans * sigma_w2;
    constexpr unsigned kMaxDepth = 20;
    constexpr double kInnerTol = 1e-10;

    double worst_inner = 0.0;

    // For fixed v, VW/(V+W+x) < t holds for w < t(v+x)/(v-t) when v > t and
    // for every w otherwise.
    auto inner = [&](double v) {
        double w_hi = w_max;
        if (v > t)
            w_hi = std::min(w_max, t * (v + x) / (v - t));
        auto f = [&](double w) {
            const double z = v * w / (v + w + x);
            const double slack = t - z;
            if (slack <= 0.0)
                return 0.0;
            return -std::expm1(-slack / sigma_u2) * std::exp(-w / sigma_w2) / sigma_w2;
        };
        double err = 0.0;
        const double val = gauss_kronrod<double, 31>::integrate(f, 0.0, w_hi, kMaxDepth, kInnerTol, &err);
        if (val > 0.0)
            worst_inner = std::max(worst_inner, err / val);
        return val * std::exp(-v / sigma_v2) / sigma_v2;
    };

    // Breakpoints where the inner upper limit changes form.
    std::vector<double> cuts{0.0};
    if (t < v_max)
        cuts.push_back(t);
    if (w_max > t) {
        const double v_cap = t * (w_max + x) / (w_max - t);
        if (v_cap > t && v_cap < v_max)
            cuts.push_back(v_cap);
    }
    cuts.push_back(v_max);

    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        total += gauss_kronrod<double, 31>::integrate(inner, cuts[i], cuts[i + 1], kMaxDepth, kOracleRelTol * 1e-2,
                                                      &err);
        total_err += err;
    }

    const double achieved = total > 0.0 ? total_err / total + worst_inner : 0.0;
    if (!(achieved <= kOracleRelTol)) {
        std::ostringstream msg;
        msg << "quadrature reached relative error " << achieved << " (target " << kOracleRelTol << ")";
        throw ConvergenceFailure(msg.str());
    }
    return std::min(total, 1.0);
}

double quadrature_outage_oracle(const LinkVariances& variances, double t, double x)
{
    variances.validate();
    if (variances.relay_count() != 1)
        throw InvalidParameter("quadrature oracle covers the single-relay case only");
    return quadrature_outage_probability(variances.sigma_sd2, variances.sigma_sr2[0], variances.sigma_rd2[0], t, x);
}

RateSearchResult empirical_eps_outage_capacity(const LinkVariances& variances, const SystemParams& params,
                                               const McOptions& opts)
{
    const double eps = params.epsilon;
    if (eps * static_cast<double>(opts.n_trials) < static_cast<double>(kMinEvents) && eps > 0.0)
        throw InvalidParameter("epsilon * trials must be at least 100");

    auto outage_at = [&](double rate) {
        SystemParams p = params;
        p.rate = rate;
        const Counts c = count_blocks(variances, p, opts, false);
        return static_cast<double>(c.outages) / static_cast<double>(opts.n_trials);
    };

    // Bracket: R = 0 never fails, so r_lo = 0 is feasible unless epsilon <= 0.
    double r_lo = 0.0;
    double p_lo = 0.0;
    if (!(p_lo < eps))
        throw InvalidParameter("no rate achieves an outage below epsilon");
    double r_hi = 1e-6;
    double p_hi = outage_at(r_hi);
    int doublings = 0;
    while (p_hi < eps) {
        if (++doublings > 60)
            throw InvalidParameter("could not bracket the epsilon-outage rate");
        r_lo = r_hi;
        p_lo = p_hi;
        r_hi *= 2.0;
        p_hi = outage_at(r_hi);
        if (p_hi < p_lo)
            throw std::logic_error("empirical outage decreased with rate during bracketing");
    }

    std::size_t iterations = 0;
    while (iterations < 60 && (r_hi - r_lo) >= 1e-4 * r_hi) {
        const double mid = 0.5 * (r_lo + r_hi);
        const double p_mid = outage_at(mid);
        if (p_mid < p_lo || p_mid > p_hi)
            throw std::logic_error("empirical outage is not monotone in the rate");
        if (p_mid < eps) {
            r_lo = mid;
            p_lo = p_mid;
        } else {
            r_hi = mid;
            p_hi = p_mid;
        }
        ++iterations;
    }
    return RateSearchResult{r_lo, p_lo, iterations, r_lo, r_hi};
}

} // namespace baf
