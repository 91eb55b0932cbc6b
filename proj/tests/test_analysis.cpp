#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "acsf/analysis.hpp"
#include "test_support.hpp"

using namespace acsf;
using Catch::Approx;

namespace {

SymbolModel skewed_bytes() { return build_model({6553, 13107, 19660, 26214}); }

double rel_gap(const RedundancyReport& r) {
    return std::abs(r.measured_extra_bits - r.predicted_extra_bits) / r.predicted_extra_bits;
}

}  // namespace

TEST_CASE("zero epsilon adds zero redundancy", "[analysis]") {
    RedundancyReport r = run_redundancy(build_model({1, 2, 3, 4}), 0.0, 500, 8, 2);
    CHECK(r.forbidden_freq == 0);
    CHECK(r.epsilon_achieved == 0.0);
    CHECK(r.predicted_extra_bits == 0.0);
    CHECK(r.measured_extra_bits == 0.0);
    CHECK(r.measured_stddev == 0.0);
    for (double x : r.per_trial) CHECK(x == 0.0);
}

TEST_CASE("a half-width forbidden band costs one bit per symbol", "[analysis]") {
    // ff = 10 on total 10 gives exactly epsilon = 1/2
    RedundancyReport r = run_redundancy(build_model({1, 2, 3, 4}), 0.5, 100, 40, 7);
    CHECK(r.forbidden_freq == 10);
    CHECK(r.model_total == 20);
    CHECK(r.epsilon_achieved == 0.5);
    CHECK(r.predicted_extra_bits == Approx(100.0));
    CHECK(rel_gap(r) < 0.10);
}

TEST_CASE("redundancy at the reference operating point", "[analysis]") {
    const double eps = 0.000023 / 0.75;
    RedundancyReport r = run_redundancy(skewed_bytes(), eps, 32768, 256, 1);
    CHECK(r.forbidden_freq == 2);
    CHECK(r.model_total == 65536);
    CHECK(r.predicted_extra_bits == Approx(1.449765317).margin(1e-6));
    CHECK(r.predicted_extra_bits_achieved == Approx(1.4427170551).margin(1e-6));
    CHECK(r.measured_extra_bits == Approx(1.46875).margin(1e-9));
    CHECK(rel_gap(r) < 0.10);
    CHECK(r.per_trial.size() == 256);
}

TEST_CASE("unrepresentable epsilon requests are refused", "[analysis]") {
    SymbolModel m = build_model({1, 2, 3, 4});
    CHECK_THROWS_MATCHES(run_redundancy(m, 1.0, 10, 1), Error,
                         ErrorMatcher(Errc::epsilon_unrepresentable));
    CHECK_THROWS_MATCHES(run_redundancy(m, -0.1, 10, 1), Error,
                         ErrorMatcher(Errc::epsilon_unrepresentable));
    // nearest representable band is 1/11, nowhere near 1e-9
    CHECK_THROWS_MATCHES(run_redundancy(m, 1e-9, 10, 1), Error,
                         ErrorMatcher(Errc::epsilon_unrepresentable));
    // total already at the ceiling; any band would overflow
    CHECK_THROWS_MATCHES(run_redundancy(build_model({65535, 1}), 0.5, 10, 1), Error,
                         ErrorMatcher(Errc::epsilon_unrepresentable));
    CHECK_THROWS_MATCHES(run_redundancy(add_forbidden(m, 2), 0.25, 10, 1), Error,
                         ErrorMatcher(Errc::epsilon_unrepresentable));
}

TEST_CASE("measured redundancy converges to the prediction", "[analysis]") {
    // base chosen so epsilon lands exactly on 1/256
    SymbolModel base = build_model({6528, 13056, 19584, 26112});
    RedundancyReport small = run_redundancy(base, 1.0 / 256, 1000, 48, 5);
    RedundancyReport mid = run_redundancy(base, 1.0 / 256, 10000, 48, 5);
    RedundancyReport large = run_redundancy(base, 1.0 / 256, 100000, 48, 5);
    CHECK(small.forbidden_freq == 256);
    CHECK(small.epsilon_achieved == Approx(1.0 / 256));
    CHECK(rel_gap(small) < 0.10);
    CHECK(rel_gap(mid) < rel_gap(small));
    CHECK(rel_gap(large) < rel_gap(mid));
}

TEST_CASE("label swap inflates the interval, keyed permutation does not", "[analysis]") {
    ExpansionReport r = run_expansion_counterexample();
    REQUIRE(r.rows.size() == 3);

    CHECK(r.rows[0].label == "naive-swap-A-D");
    CHECK(r.rows[0].width_reference == rational_from_decimal("0.0000027648"));
    CHECK(r.rows[0].ratio == BigRational(64));
    CHECK(r.rows[0].extra_bits == 6);

    CHECK(r.rows[1].label == "keyed-permutation");
    CHECK(r.rows[1].width_mapped == r.rows[1].width_reference);
    CHECK(r.rows[1].ratio == BigRational(1));
    CHECK(r.rows[1].extra_bits == 0);

    // a message using the swapped pair equally often pays nothing, which is
    // why the inflation claim needs the skewed message above
    CHECK(r.rows[2].label == "naive-swap-balanced-counts");
    CHECK(r.rows[2].ratio == BigRational(1));
    CHECK(r.rows[2].extra_bits == 0);
}

TEST_CASE("bit flips corrupt from the flip point onward", "[analysis]") {
    auto reports = run_avalanche(build_model({1, 2, 3, 4}), 400, 60, 3);
    REQUIRE(reports.size() == 5);
    CHECK(reports.front().position_fraction == 0.0);
    CHECK(reports.back().position_fraction == 1.0);

    for (const auto& r : reports) {
        CHECK(r.trials == 60);
        CHECK(r.prefix_violations == 0);
    }
    // a flip in the first code bit corrupts from the very first symbol and
    // the rest mismatches at the random-guess rate 1 - sum p^2 = 0.7
    CHECK(reports.front().frac_first_is_zero >= 0.98);
    CHECK(reports.front().symbol_error_rate > 0.65);
    CHECK(reports.front().symbol_error_rate < 0.75);
    // flips at the very end mostly land in flush or padding bits
    CHECK(reports.back().first_corrupted_symbol_index >= 395.0);
}

TEST_CASE("hashing tails costs a predictable fraction", "[analysis]") {
    CostRatioReport big = run_cost_ratio({4096}, 4, 1);
    REQUIRE(big.rows.size() == 1);
    CHECK(big.rows[0].ratio == 256.0);
    CHECK(big.predicted_ratio == 256.0);
    CHECK(big.measured_ratio == 256.0);
    CHECK(big.time_whole_s > 0.0);
    CHECK(big.time_tail_s > 0.0);

    CostRatioReport tailsize = run_cost_ratio({16}, 2, 1);
    CHECK(tailsize.predicted_ratio == 1.0);
    CHECK(tailsize.measured_ratio == 1.0);

    // streams shorter than a tail are hashed whole
    CostRatioReport tiny = run_cost_ratio({8}, 2, 1);
    CHECK(tiny.rows[0].tail_bytes == 8);
    CHECK(tiny.rows[0].ratio == 1.0);
    CHECK(tiny.predicted_ratio == 0.5);
    CHECK(tiny.measured_ratio == 1.0);

    CostRatioReport mixed = run_cost_ratio({4096, 16}, 2, 1);
    CHECK(mixed.mean_size == 2056.0);
    CHECK(mixed.predicted_ratio == 128.5);
    CHECK(mixed.measured_ratio == 128.5);

    CHECK(run_cost_ratio({}).rows.empty());
}

TEST_CASE("reports export csv with stable headers", "[analysis]") {
    RedundancyReport red = run_redundancy(build_model({1, 2, 3, 4}), 0.5, 20, 3, 1);
    std::string red_csv = to_csv(red);
    CHECK(red_csv.rfind("epsilon,epsilon_achieved,n_symbols,trial,extra_bits\n", 0) == 0);
    CHECK(to_csv(red, ';').find("epsilon;epsilon_achieved") == 0);
    CHECK(summarize(red).find("redundancy:") == 0);

    ExpansionReport exp = run_expansion_counterexample();
    CHECK(to_csv(exp).rfind("label,width_reference,width_mapped,ratio,extra_bits\n", 0) == 0);
    CHECK(summarize(exp).find("naive-swap-A-D") != std::string::npos);

    auto av = run_avalanche(build_model({1, 1}), 50, 4, 1);
    CHECK(to_csv(av).rfind("position_fraction,flip_bit_position,", 0) == 0);
    CHECK(summarize(av).find("avalanche:") == 0);

    CostRatioReport cost = run_cost_ratio({64}, 1, 1);
    CHECK(to_csv(cost).rfind("size,whole_bytes,tail_bytes,ratio\n", 0) == 0);
    CHECK(summarize(cost).find("cost ratio:") == 0);
}
