#include "curtailkit/timeseries.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace curtailkit;
using namespace curtailkit::test;

namespace {

const Resolution k5 = Resolution::five_minute();
const Resolution kH = Resolution::hourly();

Values one_to(int n) {
    Values v;
    for (int i = 1; i <= n; ++i) {
        v.emplace_back(i);
    }
    return v;
}

} // namespace

TEST(Time, ParsesOffsetsAndFormatsUtc) {
    EXPECT_EQ(format_rfc3339(ts("2022-06-01T07:05:00Z")), "2022-06-01T07:05:00Z");
    EXPECT_EQ(ts("2022-06-01T02:05:00-05:00"), ts("2022-06-01T07:05:00Z"));
    EXPECT_EQ(ts("2022-06-01T07:05:00.000Z"), ts("2022-06-01T07:05:00Z"));
    EXPECT_FALSE(parse_rfc3339("2022-06-01T07:05:00.5Z"));
    EXPECT_FALSE(parse_rfc3339("2022-13-01T07:05:00Z"));
    EXPECT_FALSE(parse_rfc3339("2022-06-01 07:05:00"));
    EXPECT_EQ(format_rfc3339(ts("1969-12-31T23:59:59Z")), "1969-12-31T23:59:59Z");
}

TEST(Time, LocalClockRejectsUnknownZone) {
    EXPECT_EQ(error_of([] { LocalClock("Mars/Olympus_Mons"); }), ErrorCode::UnknownZone);
}

TEST(Resolution, MustDivideADay) {
    EXPECT_EQ(Resolution::from_seconds(300), k5);
    EXPECT_EQ(error_of([] { Resolution::from_seconds(7); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_of([] { Resolution::from_seconds(0); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_of([] { Resolution::from_seconds(-300); }), ErrorCode::InvalidArgument);
}

TEST(TimeGrid, StartMustBeAlignedAndLengthPositive) {
    EXPECT_EQ(error_of([] { TimeGrid(ts("2022-06-01T07:01:00Z"), 3, k5); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_of([] { TimeGrid(ts("2022-06-01T07:00:00Z"), 0, k5); }), ErrorCode::InvalidArgument);
    const TimeGrid g(ts("2022-06-01T07:00:00Z"), 3, k5);
    EXPECT_EQ(g.end(), ts("2022-06-01T07:15:00Z"));
    EXPECT_EQ(g.index_of(ts("2022-06-01T07:10:00Z")), 2u);
    EXPECT_FALSE(g.index_of(ts("2022-06-01T07:15:00Z")));
    EXPECT_FALSE(g.index_of(ts("2022-06-01T07:11:00Z")));
}

TEST(Series, ValidatesLengthAndUnitDomains) {
    const TimeGrid g(epoch_day(19000), 2, k5);
    EXPECT_EQ(error_of([&] { Series(g, {1.0}, Unit::Mw); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_of([&] { Series(g, {0.0, 2.0}, Unit::Boolean01); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_of([&] { Series(g, {0.5, 1.5}, Unit::Fraction); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_of([&] { Series(g, {0.0, std::nan("")}, Unit::Mw); }), ErrorCode::InvalidArgument);
    const Series s(g, {std::nullopt, -3.0}, Unit::UsdPerMwh);
    EXPECT_EQ(s.gap_count(), 1u);
}

TEST(Resample, MeanOfOneToTwelve) {
    const Values v = one_to(12);
    double oracle = 0.0;
    for (const auto& x : v) {
        oracle += *x;
    }
    oracle /= 12.0;
    const Series out = resample(make(v, Unit::Mw, k5, epoch_day(19000)), kH, AggregateMode::Mean);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(*out[0], oracle);
    EXPECT_EQ(*out[0], 6.5);
}

TEST(Resample, SumOfOneToTwelve) {
    const Values v = one_to(12);
    const double oracle = 12.0 * 13.0 / 2.0;
    const Series out = resample(make(v, Unit::Mw, k5, epoch_day(19000)), kH, AggregateMode::Sum);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(*out[0], oracle);
    EXPECT_EQ(*out[0], 78.0);
}

TEST(Resample, SameResolutionIsIdentity) {
    Rng rng(11);
    const Series s = make(rng.values(40, -20, 20, 0.2), Unit::UsdPerMwh);
    for (auto mode : {AggregateMode::Mean, AggregateMode::Sum, AggregateMode::Min, AggregateMode::Max}) {
        EXPECT_TRUE(bit_identical(resample(s, k5, mode), s));
    }
}

TEST(Resample, Errors) {
    const Series s = make(one_to(12));
    EXPECT_EQ(error_of([&] { resample(s, Resolution::from_seconds(450), AggregateMode::Mean); }),
              ErrorCode::NonIntegerRatio);
    const Series h = make(one_to(2), Unit::Mw, kH);
    EXPECT_EQ(error_of([&] { resample(h, k5, AggregateMode::Mean); }), ErrorCode::UpsampleRequested);
}

TEST(Resample, GapToleranceControlsPartialSteps) {
    Values v = one_to(12);
    v[3] = std::nullopt;
    const Series s = make(v);
    EXPECT_FALSE(resample(s, kH, AggregateMode::Mean)[0]);
    const Series loose = resample(s, kH, AggregateMode::Mean, {0.1});
    ASSERT_TRUE(loose[0]);
    EXPECT_DOUBLE_EQ(*loose[0], (78.0 - 4.0) / 11.0);
}

TEST(Resample, MisalignedEdgesAreGaps) {
    // Starts at 00:30, so the first hourly output only half-covered.
    const Series s = make(one_to(12), Unit::Mw, k5, epoch_day(19000) + Seconds{1800});
    const Series out = resample(s, kH, AggregateMode::Sum);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out.grid().start(), epoch_day(19000));
    EXPECT_FALSE(out[0]);
    EXPECT_FALSE(out[1]);
}

TEST(Resample, BooleanMeanBecomesFraction) {
    Values v(12, 0.0);
    v[0] = 1.0;
    v[1] = 1.0;
    v[2] = 1.0;
    const Series out = resample(make(v, Unit::Boolean01), kH, AggregateMode::Mean);
    EXPECT_EQ(out.unit(), Unit::Fraction);
    EXPECT_DOUBLE_EQ(*out[0], 0.25);
    EXPECT_EQ(error_of([&] { resample(make(v, Unit::Boolean01), kH, AggregateMode::Sum); }),
              ErrorCode::UnitMismatch);
}

TEST(ResampleProperty, MinMeanMaxOrderingAndConservation) {
    Rng rng(20240601);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t hours = 1 + rng.index(24);
        const Series s = make(rng.values(hours * 12, -100, 300), Unit::Mw);
        const Series lo = resample(s, kH, AggregateMode::Min);
        const Series mean = resample(s, kH, AggregateMode::Mean);
        const Series hi = resample(s, kH, AggregateMode::Max);
        const Series sum = resample(s, kH, AggregateMode::Sum);
        double in_sum = 0.0;
        for (const auto& v : s.values()) {
            in_sum += *v;
        }
        double out_sum = 0.0;
        double out_mean = 0.0;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            EXPECT_LE(*lo[i], *mean[i]);
            EXPECT_LE(*mean[i], *hi[i]);
            out_sum += *sum[i];
            out_mean += *mean[i];
        }
        out_mean /= static_cast<double>(mean.size());
        const double in_mean = in_sum / static_cast<double>(s.size());
        EXPECT_NEAR(out_sum, in_sum, 1e-9 * std::max(1.0, std::abs(in_sum)));
        EXPECT_NEAR(out_mean, in_mean, 1e-9 * std::max(1.0, std::abs(in_mean)));
    }
}

TEST(Align, IntersectsOverlappingGrids) {
    const Timestamp day = epoch_day(19000);
    const Series a = make(one_to(12), Unit::Mw, k5, day);
    const Series b = make(one_to(12), Unit::Mw, k5, day + Seconds{1800});
    const auto [x, y] = align(a, b);
    EXPECT_EQ(x.grid().start(), day + Seconds{1800});
    EXPECT_EQ(x.grid().end(), day + Seconds{3600});
    EXPECT_TRUE(x.grid().same_steps(y.grid()));
    EXPECT_EQ(*x[0], 7.0);
    EXPECT_EQ(*y[0], 1.0);
    EXPECT_EQ(x.size(), 6u);
}

TEST(Align, IdenticalGridsUnchanged) {
    const Series a = make(one_to(5));
    const Series b = make(Values{5, 4, std::nullopt, 2, 1});
    const auto [x, y] = align(a, b);
    EXPECT_TRUE(bit_identical(x, a));
    EXPECT_TRUE(bit_identical(y, b));
}

TEST(Align, Errors) {
    const Series a = make(one_to(2), Unit::Mw, kH);
    const Series b = make(one_to(24), Unit::Mw, k5);
    EXPECT_EQ(error_of([&] { align(a, b); }), ErrorCode::ResolutionMismatch);
    const Series c = make(one_to(2), Unit::Mw, kH, epoch_day(19001));
    EXPECT_EQ(error_of([&] { align(a, c); }), ErrorCode::EmptyOverlap);
}

TEST(Window, WholeSeries) {
    const Series s = make(one_to(24), Unit::Mw, kH);
    EXPECT_TRUE(bit_identical(window(s, s.grid().start(), Seconds{86400}), s));
}

TEST(Window, PositionalSlice) {
    const Series s = make(Values{10, 20, 30, 40}, Unit::Mw, kH);
    const Series w = window(s, s.grid().time_at(1), Seconds{7200});
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(*w[0], 20.0);
    EXPECT_EQ(*w[1], 30.0);
    EXPECT_EQ(w.grid().start(), s.grid().time_at(1));
}

TEST(Window, Errors) {
    const Series s = make(Values{10, 20, 30, 40}, Unit::Mw, kH);
    EXPECT_EQ(error_of([&] { window(s, s.grid().end(), Seconds{3600}); }), ErrorCode::OutOfRange);
    EXPECT_EQ(error_of([&] { window(s, s.grid().time_at(3), Seconds{7200}); }), ErrorCode::OutOfRange);
    EXPECT_EQ(error_of([&] { window(s, s.grid().start() + Seconds{60}, Seconds{3600}); }), ErrorCode::OffGrid);
    EXPECT_EQ(error_of([&] { window(s, s.grid().start(), Seconds{1800}); }), ErrorCode::OffGrid);
    EXPECT_EQ(error_of([&] { window(s, s.grid().start(), Seconds{0}); }), ErrorCode::OffGrid);
}

TEST(WindowProperty, SliceComposition) {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.index(60);
        const Series s = make(rng.values(n, -5, 5, 0.1), Unit::UsdPerMwh);
        const std::size_t first = rng.index(n);
        const std::size_t len = 1 + rng.index(n - first);
        const std::size_t len2 = 1 + rng.index(len);
        const Timestamp t = s.grid().time_at(first);
        const Series outer = window(s, t, Seconds{static_cast<std::int64_t>(len) * 300});
        const Seconds w2{static_cast<std::int64_t>(len2) * 300};
        EXPECT_TRUE(bit_identical(window(outer, t, w2), window(s, t, w2)));
    }
}

TEST(Quantile, TypeSevenOnTwoSamples) {
    const std::vector<double> v{2.0, 4.0};
    EXPECT_EQ(quantile_sorted(v, 0.5), quantile_oracle(v, 0.5));
    EXPECT_EQ(quantile_sorted(v, 0.25), quantile_oracle(v, 0.25));
    EXPECT_EQ(quantile_sorted(v, 0.75), quantile_oracle(v, 0.75));
    EXPECT_EQ(quantile_sorted(v, 0.5), 3.0);
    EXPECT_EQ(quantile_sorted(v, 0.25), 2.5);
    EXPECT_EQ(quantile_sorted(v, 0.75), 3.5);
}

TEST(TimeOfDay, TwoDaysHourZero) {
    Values v(48, 0.0);
    v[0] = 2.0;
    v[24] = 4.0;
    const TimeOfDayProfile p = time_of_day_profile(make(v, Unit::Mw, kH), kH, "UTC");
    ASSERT_EQ(p.bucket_count(), 24u);
    ASSERT_TRUE(p.buckets[0].quartiles);
    EXPECT_EQ(p.buckets[0].count, 2u);
    EXPECT_EQ(p.buckets[0].quartiles->median, quantile_oracle({2.0, 4.0}, 0.5));
    EXPECT_EQ(p.buckets[0].quartiles->median, 3.0);
    EXPECT_EQ(p.buckets[0].quartiles->q25, 2.5);
    EXPECT_EQ(p.buckets[0].quartiles->q75, 3.5);
}

TEST(TimeOfDay, ConstantSeries) {
    const TimeOfDayProfile p = time_of_day_profile(make(Values(24 * 12 * 3, 7.25)), kH, "America/Chicago");
    for (const auto& b : p.buckets) {
        ASSERT_TRUE(b.quartiles);
        EXPECT_EQ(b.quartiles->median, 7.25);
        EXPECT_EQ(b.quartiles->q25, 7.25);
        EXPECT_EQ(b.quartiles->q75, 7.25);
    }
}

TEST(TimeOfDay, SingleDay) {
    const Values v = one_to(24);
    const TimeOfDayProfile p = time_of_day_profile(make(v, Unit::Mw, kH), kH, "UTC");
    for (std::size_t i = 0; i < 24; ++i) {
        EXPECT_EQ(p.buckets[i].count, 1u);
        EXPECT_EQ(p.buckets[i].quartiles->median, *v[i]);
        EXPECT_EQ(p.buckets[i].quartiles->q25, *v[i]);
        EXPECT_EQ(p.buckets[i].quartiles->q75, *v[i]);
    }
}

TEST(TimeOfDay, BadBucket) {
    const Series s = make(one_to(24), Unit::Mw, kH);
    EXPECT_EQ(error_of([&] { time_of_day_profile(s, k5, "UTC"); }), ErrorCode::BadBucket);
    const Series f = make(one_to(24), Unit::Mw, Resolution::from_seconds(1800));
    EXPECT_EQ(error_of([&] { time_of_day_profile(f, Resolution::from_seconds(2700), "UTC"); }),
              ErrorCode::BadBucket);
}

TEST(TimeOfDay, AutumnRepeatedHourCountsTwice) {
    // Local midnight EDT on the fall-back day; that local day has 25 hours.
    const Series s = make(one_to(25), Unit::Mw, kH, ts("2023-11-05T04:00:00Z"));
    const TimeOfDayProfile p = time_of_day_profile(s, kH, "America/New_York");
    EXPECT_EQ(p.buckets[1].count, 2u);
    EXPECT_EQ(p.buckets[1].quartiles->median, 2.5);
    for (std::size_t b = 0; b < 24; ++b) {
        if (b != 1) {
            EXPECT_EQ(p.buckets[b].count, 1u) << b;
        }
    }
}

TEST(TimeOfDay, SpringSkippedHourIsEmpty) {
    const Series s = make(one_to(23), Unit::Mw, kH, ts("2023-03-12T05:00:00Z"));
    const TimeOfDayProfile p = time_of_day_profile(s, kH, "America/New_York");
    EXPECT_EQ(p.buckets[2].count, 0u);
    EXPECT_FALSE(p.buckets[2].quartiles);
    EXPECT_EQ(p.buckets[3].quartiles->median, 3.0);
}

TEST(TimeOfDayProperty, MatchesBruteForce) {
    Rng rng(4242);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 100 + rng.index(9900);
        const Series s = make(rng.values(n, -50, 50, 0.05), Unit::UsdPerMwh, k5, epoch_day(19000 + trial));
        const std::string zone = trial % 2 == 0 ? "UTC" : "America/Los_Angeles";
        const TimeOfDayProfile p = time_of_day_profile(s, kH, zone);
        const LocalClock clock(zone);
        std::vector<std::vector<double>> groups(24);
        for (std::size_t i = 0; i < n; ++i) {
            if (s[i]) {
                groups[static_cast<std::size_t>(clock.to_civil(s.grid().time_at(i)).hour)].push_back(*s[i]);
            }
        }
        for (std::size_t b = 0; b < 24; ++b) {
            ASSERT_EQ(p.buckets[b].count, groups[b].size());
            if (groups[b].empty()) {
                EXPECT_FALSE(p.buckets[b].quartiles);
                continue;
            }
            EXPECT_NEAR(p.buckets[b].quartiles->median, quantile_oracle(groups[b], 0.5), 1e-12);
            EXPECT_NEAR(p.buckets[b].quartiles->q25, quantile_oracle(groups[b], 0.25), 1e-12);
            EXPECT_NEAR(p.buckets[b].quartiles->q75, quantile_oracle(groups[b], 0.75), 1e-12);
            EXPECT_LE(p.buckets[b].quartiles->q25, p.buckets[b].quartiles->median);
            EXPECT_LE(p.buckets[b].quartiles->median, p.buckets[b].quartiles->q75);
        }
    }
}

TEST(TimeOfDay, FormatsLabels) {
    EXPECT_EQ(format_time_of_day(0), "00:00");
    EXPECT_EQ(format_time_of_day(7 * 3600 + 300), "07:05");
    EXPECT_EQ(format_time_of_day(3600 + 30), "01:00:30");
}
