#include "baf/errors.hpp"
#include "baf/experiment.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace baf;

namespace {

ExperimentConfig analytic_config(double snr_db, double eps)
{
    ExperimentConfig c;
    c.command = Command::Analytic;
    c.snr_sweep = SnrSweep{snr_db, snr_db, 1.0};
    c.epsilon = eps;
    return c;
}

std::vector<ResultRow> with_metric(const std::vector<ResultRow>& rows, const std::string& name)
{
    std::vector<ResultRow> out;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
                 [&](const ResultRow& r) { return r.metric_name == name; });
    return out;
}

} // namespace

TEST_CASE("snr sweep parsing")
{
    CHECK(parse_snr_sweep("-10:10:1").points_db().size() == 21);
    CHECK(parse_snr_sweep("-20").points_db() == std::vector<double>{-20.0});
    const auto p = parse_snr_sweep("0:1:0.1").points_db();
    CHECK(p.size() == 11);
    CHECK(p.back() == doctest::Approx(1.0));
    CHECK_THROWS_AS(parse_snr_sweep("0:1:0"), InvalidParameter);
    CHECK_THROWS_AS(parse_snr_sweep("1:0:1"), InvalidParameter);
    CHECK_THROWS_AS(parse_snr_sweep("a:b:c"), InvalidParameter);
    CHECK_THROWS_AS(parse_snr_sweep("0:1"), InvalidParameter);
}

TEST_CASE("config rejects both geometry and variances")
{
    ExperimentConfig c;
    c.geometry = NetworkGeometry{1.0, {0.5}, 3.0};
    c.variances = LinkVariances::unit(1);
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c.variances.reset();
    CHECK_NOTHROW(c.validate());
    c.k_relays = 2;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
}

TEST_CASE("analytic rows")
{
    SUBCASE("unit variances at SNR 0.1, eps 0.01")
    {
        const auto res = cmd_analytic(analytic_config(-10.0, 0.01));
        const auto rows = with_metric(res.rows, "c_baf_no_fb");
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].value == doctest::Approx(0.0071766).epsilon(1e-5));
        CHECK_FALSE(rows[0].std_error.has_value());
        CHECK(res.rows.size() == 7);
    }
    SUBCASE("zero epsilon gives zero capacities")
    {
        auto c = analytic_config(-5.0, 0.0);
        c.rates = {0.01};
        for (const auto& r : cmd_analytic(c).rows)
            if (r.metric_name.rfind("c_", 0) == 0)
                CHECK(r.value == 0.0);
    }
    SUBCASE("single-relay generalization matches the no-feedback rows")
    {
        auto c = analytic_config(-20.0, 0.001);
        c.snr_sweep = SnrSweep{-20.0, 0.0, 5.0};
        c.variances = LinkVariances::one_relay(0.7, 2.0, 3.0);
        const auto res = cmd_analytic(c);
        const auto a = with_metric(res.rows, "c_baf_no_fb");
        const auto b = with_metric(res.rows, "c_baf_k");
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i].value == b[i].value);
    }
    SUBCASE("multi-relay emits only the K-relay metrics")
    {
        auto c = analytic_config(0.0, 0.001);
        c.k_relays = 2;
        const auto res = cmd_analytic(c);
        REQUIRE(res.rows.size() == 2);
        CHECK(res.rows[0].metric_name == "c_baf_k");
        CHECK(res.rows[1].metric_name == "c_csb_k");
        CHECK(res.rows[0].value == doctest::Approx(0.052120).epsilon(1e-4));
    }
}

TEST_CASE("ratio rows")
{
    ExperimentConfig c;
    c.command = Command::Ratio;
    apply_fig2_preset(c);
    const auto res = cmd_ratio(c);
    const auto delta = with_metric(res.rows, "delta_upper");
    REQUIRE(delta.size() == 63);
    for (const auto& r : delta)
        CHECK(r.value <= 1.0);
    auto at = [&](double rate, double snr) {
        for (const auto& r : delta)
            if (*r.rate == rate && *r.snr_db == snr)
                return r.value;
        FAIL("missing point");
        return 0.0;
    };
    CHECK(at(0.009, 0.0) == doctest::Approx(0.98816936).epsilon(1e-7));
    CHECK(at(0.1, 0.0) == doctest::Approx(0.874794).epsilon(1e-5));
    CHECK(res.warnings.empty());
}

TEST_CASE("outage with zero rate")
{
    ExperimentConfig c;
    c.command = Command::Outage;
    c.snr_sweep = SnrSweep{-10.0, -10.0, 1.0};
    c.rates = {0.0};
    c.n_trials = 20'000;
    const auto res = cmd_outage(c);
    const auto rows = with_metric(res.rows, "outage_prob");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].value == 0.0);
    CHECK(*rows[0].std_error == 0.0);
    CHECK(*rows[0].n_trials == 20'000);
    CHECK(*rows[0].seed == 1);
}

TEST_CASE("outage refuses rare events and thin trial counts")
{
    ExperimentConfig c;
    c.command = Command::Outage;
    c.snr_sweep = SnrSweep{10.0, 10.0, 1.0};
    c.rates = {1e-4};
    c.n_trials = 20'000;
    CHECK_THROWS_AS(cmd_outage(c), InvalidParameter);

    ExperimentConfig cap;
    cap.command = Command::Capacity;
    cap.epsilon = 1e-3;
    cap.n_trials = 50'000;
    CHECK_THROWS_AS(cmd_capacity(cap), InvalidParameter);
}

TEST_CASE("lemma rows pair thresholds with ratios")
{
    ExperimentConfig c;
    c.command = Command::Lemma1;
    c.lemma_g = {0.2, 0.1};
    c.n_trials = 200'000;
    const auto res = cmd_lemma1(c);
    REQUIRE(res.rows.size() == 7);
    CHECK(res.rows[0].metric_name == "lemma1_g");
    CHECK(res.rows[1].metric_name == "lemma1_x");
    CHECK(res.rows[1].value == doctest::Approx(0.02));
    CHECK(res.rows[2].metric_name == "lemma1_ratio");
    CHECK(res.rows[6].metric_name == "lemma1_constant");
    CHECK(res.rows[6].value == 1.0);
}

TEST_CASE("every emitted metric is in the vocabulary")
{
    const auto& vocab = metric_vocabulary();
    ExperimentConfig c;
    apply_fig2_preset(c);
    c.snr_sweep = SnrSweep{-10.0, 0.0, 5.0};
    for (const auto& r : cmd_analytic(c).rows)
        CHECK(std::find(vocab.begin(), vocab.end(), r.metric_name) != vocab.end());
    for (const auto& r : cmd_ratio(c).rows)
        CHECK(std::find(vocab.begin(), vocab.end(), r.metric_name) != vocab.end());
}

TEST_CASE("number formatting is shortest round-trip")
{
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-3) == "0.001");
    CHECK(format_number(-10.0) == "-10");
    CHECK(std::stod(format_number(0.98816936235)) == 0.98816936235);
}

TEST_CASE("csv and jsonl writers")
{
    ResultRow a;
    a.snr_db = -10.0;
    a.rate = 0.009;
    a.epsilon = 0.001;
    a.metric_name = "delta_upper";
    a.value = 0.5;
    ResultRow b = a;
    b.rate.reset();
    b.metric_name = "outage_prob";
    b.std_error = 0.25;
    b.n_trials = 100;
    b.seed = 3;

    std::ostringstream csv;
    write_rows(csv, {a, b}, OutputFormat::Csv);
    CHECK(csv.str() == "snr_db,rate,epsilon,k_relays,metric_name,value,stderr,n_trials,seed\n"
                       "-10,0.009,0.001,1,delta_upper,0.5,,,\n"
                       "-10,,0.001,1,outage_prob,0.5,0.25,100,3\n");

    std::ostringstream js;
    write_rows(js, {a, b}, OutputFormat::Jsonl);
    const std::string s = js.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == 2);
    CHECK(s.find("\"metric_name\":\"delta_upper\"") != std::string::npos);
    CHECK(s.find("\"stderr\":null") != std::string::npos);
    CHECK(s.find("\"seed\":3") != std::string::npos);
}
