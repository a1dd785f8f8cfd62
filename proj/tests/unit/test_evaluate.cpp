#include "curtailkit/evaluate.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <limits>
#include <sstream>

using namespace curtailkit;
using namespace curtailkit::test;

namespace {

const Resolution kFive = Resolution::five_minute();

Seconds steps(std::size_t n) { return Seconds{static_cast<std::int64_t>(n) * 300}; }

LoadShiftSpec spec_for(const Series& s, std::size_t w, std::size_t k,
                       std::optional<SelectionDirection> d = SelectionDirection::SelectMaxValue, std::size_t at = 0) {
    return {s.grid().time_at(at), steps(w), steps(k), d, false};
}

/// Best and worst mean over every k-subset of `v`.
std::pair<double, double> brute_extremes(const std::vector<double>& v, std::size_t k) {
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    const std::size_t n = v.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) {
            continue;
        }
        std::vector<double> chosen;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                chosen.push_back(v[i]);
            }
        }
        const double m = subset_mean(chosen);
        best = std::max(best, m);
        worst = std::min(worst, m);
    }
    return {best, worst};
}

std::vector<double> dense(const Values& v) {
    std::vector<double> out;
    for (const auto& x : v) {
        out.push_back(*x);
    }
    return out;
}

} // namespace

TEST(Impact, HandExample) {
    const Series actual = make(present({0, 10, 20, 30}));
    const auto r = load_shift_impact(actual, actual, spec_for(actual, 4, 2));
    EXPECT_EQ(r.forecast_impact, 25.0);
    EXPECT_EQ(r.immediate_baseline, 5.0);
    EXPECT_EQ(r.random_baseline, 15.0);
    EXPECT_EQ(r.oracle_impact, 25.0);
    EXPECT_EQ(r.anti_oracle_impact, 5.0);
    EXPECT_EQ(r.selected_steps, (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(brute_extremes({0, 10, 20, 30}, 2).first, 25.0);
}

TEST(Impact, ConstantActual) {
    const Series actual = make(Values(12, 7.25));
    Rng rng(1);
    const Series forecast = make(rng.values(12, -5, 5));
    const auto r = load_shift_impact(forecast, actual, spec_for(actual, 12, 5));
    for (const double x : {r.forecast_impact, r.immediate_baseline, r.random_baseline, r.oracle_impact,
                           r.anti_oracle_impact}) {
        EXPECT_EQ(x, 7.25);
    }
}

TEST(Impact, AntiCorrelatedForecastHitsAntiOracle) {
    const Series actual = make(present({0, 10, 20, 30}));
    const Series forecast = make(present({0, -10, -20, -30}));
    const auto r = load_shift_impact(forecast, actual, spec_for(actual, 4, 2));
    EXPECT_EQ(r.forecast_impact, 5.0);
    EXPECT_EQ(r.forecast_impact, r.anti_oracle_impact);
}

TEST(Impact, PriceForecastSelectsLowest) {
    const Series actual = make(present({0, 10, 20, 30}));
    const Series prices = make(present({9, 4, -3, -8}), Unit::UsdPerMwh);
    const auto r = load_shift_impact(prices, actual, spec_for(actual, 4, 2, std::nullopt));
    EXPECT_EQ(r.direction, SelectionDirection::SelectMinValue);
    EXPECT_EQ(r.forecast_impact, 25.0);
    const auto mw = load_shift_impact(actual, actual, spec_for(actual, 4, 2, std::nullopt));
    EXPECT_EQ(mw.direction, SelectionDirection::SelectMaxValue);
}

TEST(Impact, TiesGoToEarlierSteps) {
    const Series actual = make(present({1, 2, 3, 4, 5}));
    const Series flat = make(Values(5, 1.0));
    const auto r = load_shift_impact(flat, actual, spec_for(actual, 5, 2));
    EXPECT_EQ(r.selected_steps, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(r.forecast_impact, r.immediate_baseline);
}

TEST(Impact, ForecastGapsAreExcluded) {
    const Series actual = make(present({0, 10, 20, 30}));
    const Series forecast = make(Values{0.0, 10.0, 20.0, std::nullopt});
    const auto r = load_shift_impact(forecast, actual, spec_for(actual, 4, 2));
    EXPECT_EQ(r.selected_steps, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(r.excluded_forecast_gaps, 1u);
    EXPECT_EQ(r.forecast_impact, 15.0);
    EXPECT_EQ(error_of([&] { load_shift_impact(forecast, actual, spec_for(actual, 4, 4)); }), ErrorCode::CTooLarge);
}

TEST(Impact, OffsetWindow) {
    const Series actual = make(present({100, 0, 10, 20, 30, 100}));
    const auto r = load_shift_impact(actual, actual, spec_for(actual, 4, 2, SelectionDirection::SelectMaxValue, 1));
    EXPECT_EQ(r.oracle_impact, 25.0);
    EXPECT_EQ(r.immediate_baseline, 5.0);
}

TEST(Impact, Errors) {
    const Series actual = make(Values{0.0, 10.0, std::nullopt, 30.0});
    EXPECT_EQ(error_of([&] { load_shift_impact(actual, actual, spec_for(actual, 4, 2)); }), ErrorCode::ActualGaps);
    const Series full = make(present({0, 10, 20, 30}));
    EXPECT_EQ(error_of([&] { load_shift_impact(full, full, spec_for(full, 5, 2)); }), ErrorCode::WindowNotCovered);
    EXPECT_EQ(error_of([&] { load_shift_impact(full, full, spec_for(full, 2, 3)); }), ErrorCode::CTooLarge);
    EXPECT_EQ(error_of([&] { load_shift_impact(full, full, spec_for(full, 4, 0)); }), ErrorCode::InvalidArgument);
    const Series hourly = make(present({0, 10, 20, 30}), Unit::Mw, Resolution::hourly());
    EXPECT_EQ(error_of([&] { load_shift_impact(hourly, full, spec_for(full, 4, 2)); }), ErrorCode::WindowNotCovered);
    LoadShiftSpec odd = spec_for(full, 4, 2);
    odd.c = Seconds{450};
    EXPECT_EQ(error_of([&] { load_shift_impact(full, full, odd); }), ErrorCode::InvalidArgument);
}

TEST(Impact, ContiguousMode) {
    const Series actual = make(present({30, 0, 20, 25, 0}));
    LoadShiftSpec spec = spec_for(actual, 5, 2);
    spec.contiguous = true;
    const auto r = load_shift_impact(actual, actual, spec);
    EXPECT_EQ(r.selected_steps, (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(r.forecast_impact, 22.5);
    EXPECT_EQ(r.oracle_impact, 22.5);
    EXPECT_EQ(r.anti_oracle_impact, 10.0);
    const Series gappy = make(Values{1.0, std::nullopt, 2.0, std::nullopt, 3.0});
    EXPECT_EQ(error_of([&] { load_shift_impact(gappy, actual, spec); }), ErrorCode::CTooLarge);
}

TEST(Impact, FlagActualsGiveFractions) {
    const Series flags = make(present({0, 1, 1, 0}), Unit::Boolean01);
    const auto r = load_shift_impact(flags, flags, spec_for(flags, 4, 2));
    EXPECT_EQ(r.actual_unit, Unit::Boolean01);
    EXPECT_EQ(r.forecast_impact, 1.0);
    EXPECT_EQ(r.random_baseline, 0.5);
}

TEST(Selection, ExtremalAndContiguousHelpers) {
    const Values scores{3.0, std::nullopt, 5.0, 5.0, 1.0};
    EXPECT_EQ(select_extremal(scores, 2, SelectionDirection::SelectMaxValue), (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(select_extremal(scores, 2, SelectionDirection::SelectMinValue), (std::vector<std::size_t>{0, 4}));
    EXPECT_EQ(select_contiguous(scores, 2, SelectionDirection::SelectMaxValue), 2u);
    EXPECT_EQ(select_contiguous(scores, 4, SelectionDirection::SelectMaxValue), std::nullopt);
    EXPECT_EQ(error_of([&] { select_extremal(scores, 5, SelectionDirection::SelectMaxValue); }), ErrorCode::CTooLarge);
    EXPECT_EQ(subset_mean({1, 2, 3}), 2.0);
    EXPECT_EQ(error_of([] { subset_mean({}); }), ErrorCode::InvalidArgument);
}

TEST(ImpactProperty, BruteForceInvariants) {
    Rng rng(1000);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t w = 1 + rng.index(20);
        const std::size_t k = 1 + rng.index(std::min<std::size_t>(5, w));
        const Values a = rng.coin(0.3) ? rng.tied_values(w, 0, 4) : rng.values(w, 0, 500);
        const Series actual = make(a);
        const Series forecast = make(rng.coin(0.3) ? rng.tied_values(w, 0, 3) : rng.values(w, -50, 50, 0.1));
        const auto dir = rng.coin(0.5) ? SelectionDirection::SelectMaxValue : SelectionDirection::SelectMinValue;
        std::size_t present_count = 0;
        for (const auto& x : forecast.values()) {
            present_count += x ? 1 : 0;
        }
        if (present_count < k) {
            EXPECT_EQ(error_of([&] { load_shift_impact(forecast, actual, spec_for(actual, w, k, dir)); }),
                      ErrorCode::CTooLarge);
            continue;
        }
        const auto r = load_shift_impact(forecast, actual, spec_for(actual, w, k, dir));
        const auto [best, worst] = brute_extremes(dense(a), k);
        EXPECT_EQ(r.oracle_impact, best);
        EXPECT_EQ(r.anti_oracle_impact, worst);
        EXPECT_LE(r.anti_oracle_impact, r.forecast_impact);
        EXPECT_LE(r.forecast_impact, r.oracle_impact);
        EXPECT_LE(r.anti_oracle_impact, r.random_baseline);
        EXPECT_LE(r.random_baseline, r.oracle_impact);
        EXPECT_EQ(r.selected_steps.size(), k);

        double sum = 0.0;
        for (const auto& x : a) {
            sum += *x;
        }
        EXPECT_NEAR(r.random_baseline, sum / static_cast<double>(w), 1e-12 * std::max(1.0, std::abs(sum)));

        const auto identity = load_shift_impact(actual, actual, spec_for(actual, w, k));
        EXPECT_EQ(identity.forecast_impact, identity.oracle_impact);
    }
}

TEST(ImpactProperty, SelectionInvariantUnderMonotoneTransform) {
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t w = 2 + rng.index(30);
        const std::size_t k = 1 + rng.index(w - 1);
        const Series actual = make(rng.values(w, 0, 100));
        const Values f = rng.tied_values(w, -3, 3);
        Values shifted;
        Values cubed;
        for (const auto& x : f) {
            shifted.push_back(*x + 1234.5);
            cubed.push_back(*x * *x * *x + 2.0 * *x);
        }
        const auto base = load_shift_impact(make(f), actual, spec_for(actual, w, k));
        EXPECT_EQ(load_shift_impact(make(shifted), actual, spec_for(actual, w, k)).selected_steps, base.selected_steps);
        EXPECT_EQ(load_shift_impact(make(cubed), actual, spec_for(actual, w, k)).selected_steps, base.selected_steps);
    }
}

TEST(Regression, Examples) {
    const Series a = make(present({1, 5, 9}));
    const auto same = regression_metrics(a, a);
    EXPECT_EQ(same.mae, 0.0);
    EXPECT_EQ(same.rmse, 0.0);
    const auto offset = regression_metrics(make(present({2, 6, 10})), a);
    EXPECT_EQ(offset.mae, 1.0);
    EXPECT_EQ(offset.rmse, 1.0);
    const auto pairs = regression_metrics(make(present({0, 0})), make(present({0, 2})));
    EXPECT_EQ(pairs.mae, 1.0);
    EXPECT_DOUBLE_EQ(pairs.rmse, std::sqrt(2.0));
    EXPECT_EQ(pairs.count, 2u);
}

TEST(Regression, GapsAndErrors) {
    const auto m = regression_metrics(make(Values{1.0, std::nullopt, 4.0}), make(Values{1.0, 9.0, std::nullopt}));
    EXPECT_EQ(m.count, 1u);
    EXPECT_EQ(error_of([] { regression_metrics(make(Values{std::nullopt}), make(present({1}))); }),
              ErrorCode::NoOverlap);
    EXPECT_EQ(error_of([] {
                  regression_metrics(make(present({1})), make(present({1}), Unit::Mw, kFive, epoch_day(19001)));
              }),
              ErrorCode::NoOverlap);
    EXPECT_EQ(error_of([] { regression_metrics(make(present({1})), make(present({1}), Unit::UsdPerMwh)); }),
              ErrorCode::UnitMismatch);
}

TEST(RegressionProperty, RmseAtLeastMae) {
    Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.index(100);
        const auto m = regression_metrics(make(rng.values(n, -10, 10)), make(rng.values(n, -10, 10)));
        EXPECT_GE(m.mae, 0.0);
        EXPECT_GE(m.rmse + 1e-12, m.mae);
    }
}

TEST(Classification, Examples) {
    const Series a = make(present({1, 0, 1, 0}), Unit::Boolean01);
    const auto same = classification_metrics(a, a);
    EXPECT_EQ(same.precision, 1.0);
    EXPECT_EQ(same.recall, 1.0);

    const auto m = classification_metrics(make(present({1, 1, 0, 0}), Unit::Boolean01), a);
    EXPECT_EQ(m.tp, 1u);
    EXPECT_EQ(m.fp, 1u);
    EXPECT_EQ(m.fn, 1u);
    EXPECT_EQ(m.tn, 1u);
    EXPECT_EQ(m.precision, 0.5);
    EXPECT_EQ(m.recall, 0.5);
    EXPECT_EQ(m.f1, 0.5);
    EXPECT_EQ(m.accuracy, 0.5);

    const auto neg = classification_metrics(make(present({0, 0, 0, 0}), Unit::Boolean01), a);
    EXPECT_EQ(neg.recall, 0.0);
    EXPECT_FALSE(neg.precision);
    EXPECT_EQ(neg.f1, 0.0);
    const Series none = make(present({0, 0}), Unit::Boolean01);
    const auto empty = classification_metrics(none, none);
    EXPECT_FALSE(empty.precision);
    EXPECT_FALSE(empty.recall);
    EXPECT_FALSE(empty.f1);
    EXPECT_EQ(empty.accuracy, 1.0);
}

TEST(Classification, Errors) {
    EXPECT_EQ(error_of([] { classification_metrics(make(present({1})), make(present({1}))); }),
              ErrorCode::UnitMismatch);
    EXPECT_EQ(error_of([] {
                  classification_metrics(make(Values{std::nullopt}, Unit::Boolean01),
                                         make(present({1}), Unit::Boolean01));
              }),
              ErrorCode::NoOverlap);
}

TEST(Sweep, SingletonAndMean) {
    const Series actual = make(present({0, 10, 20, 30, 40, 50, 60, 70}));
    const ForecastSeries f{actual.grid().start(), Horizon{Seconds{0}, steps(8)}, actual};
    const std::vector<BacktestEntry> results{{f, actual}};

    const std::vector<LoadShiftSpec> one{spec_for(actual, 4, 2)};
    const auto single = sweep(results, one);
    const auto direct = load_shift_impact(f, actual, one[0]);
    const auto means = single.overall();
    EXPECT_EQ(means.forecast_impact, direct.forecast_impact);
    EXPECT_EQ(means.random_baseline, direct.random_baseline);
    EXPECT_EQ(means.oracle_impact, direct.oracle_impact);
    EXPECT_EQ(means.uplift_vs_random, direct.forecast_impact / direct.random_baseline);

    const Series two_windows = make(present({10, 10, 20, 20}));
    const ForecastSeries f2{two_windows.grid().start(), Horizon{Seconds{0}, steps(4)}, two_windows};
    const std::vector<BacktestEntry> r2{{f2, two_windows}};
    const std::vector<LoadShiftSpec> specs{spec_for(two_windows, 2, 1), spec_for(two_windows, 2, 1, {}, 2)};
    const auto s = sweep(r2, specs);
    EXPECT_EQ(s.totals.windows, 2u);
    EXPECT_EQ(s.overall().forecast_impact, 15.0);
}

TEST(Sweep, CoverageAndErrors) {
    const Series actual = make(present({0, 10, 20, 30}));
    const ForecastSeries f{actual.grid().start(), Horizon{Seconds{0}, steps(4)}, actual};
    const std::vector<BacktestEntry> results{{f, actual}};
    EXPECT_EQ(error_of([&] { sweep(results, std::vector<LoadShiftSpec>{}); }), ErrorCode::EmptyInput);
    EXPECT_EQ(error_of([&] { sweep(std::vector<BacktestEntry>{}, std::vector{spec_for(actual, 4, 2)}); }),
              ErrorCode::EmptyInput);
    const auto s = sweep(results, std::vector{spec_for(actual, 4, 2), spec_for(actual, 4, 2, {}, 2)});
    EXPECT_EQ(s.uncovered, 1u);
    EXPECT_EQ(s.windows.size(), 1u);
    EXPECT_EQ(error_of([] { means_of(ImpactTotals{}); }), ErrorCode::EmptyInput);
}

TEST(Sweep, MergeIsAssociative) {
    Rng rng(17);
    std::vector<SweepReport> parts;
    for (int p = 0; p < 3; ++p) {
        const Series actual = make(rng.values(12, 0, 100));
        const ForecastSeries f{actual.grid().start(), Horizon{Seconds{0}, steps(12)}, make(rng.values(12, 0, 1))};
        const std::vector<BacktestEntry> results{{f, actual}};
        parts.push_back(sweep(results, std::vector{spec_for(actual, 12, 3), spec_for(actual, 6, 2, {}, 6)}));
    }
    SweepReport left = parts[0];
    left.merge(parts[1]);
    left.merge(parts[2]);
    SweepReport tail = parts[1];
    tail.merge(parts[2]);
    SweepReport right = parts[0];
    right.merge(tail);
    EXPECT_EQ(left.totals.windows, 6u);
    EXPECT_DOUBLE_EQ(left.overall().forecast_impact, right.overall().forecast_impact);
    EXPECT_EQ(left.windows.size(), right.windows.size());
}

TEST(Report, CsvAndJson) {
    const Series actual = make(present({0, 10, 20, 30}), Unit::Mw, kFive, ts("2022-06-01T00:00:00Z"));
    const ForecastSeries f{actual.grid().start(), Horizon{Seconds{0}, steps(4)}, actual};
    const std::vector<BacktestEntry> results{{f, actual}};
    const auto s = sweep(results, std::vector{spec_for(actual, 4, 2)});
    std::ostringstream csv;
    write_report_csv(csv, s);
    EXPECT_EQ(csv.str(), "window_start,w,c,forecast_impact,immediate,random,oracle,anti_oracle\n"
                         "2022-06-01T00:00:00Z,1200,600,25,5,15,25,5\n");
    const auto j = nlohmann::json::parse(summary_json(s));
    EXPECT_EQ(j["windows"], 1);
    EXPECT_EQ(j["forecast_impact"], 25.0);
    EXPECT_DOUBLE_EQ(j["uplift_vs_random"].get<double>(), 25.0 / 15.0);
    EXPECT_EQ(j["uplift_vs_immediate"], 5.0);
}
