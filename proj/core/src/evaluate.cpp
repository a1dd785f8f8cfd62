#include "curtailkit/evaluate.hpp"

#include "curtailkit/error.hpp"
#include "curtailkit/ingest.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>

namespace curtailkit {

std::string_view to_string(SelectionDirection direction) noexcept {
    return direction == SelectionDirection::SelectMaxValue ? "select_max_value" : "select_min_value";
}

double subset_mean(std::vector<double> values) {
    if (values.empty()) {
        raise(ErrorCode::InvalidArgument, "mean of an empty subset");
    }
    std::sort(values.begin(), values.end(), std::greater<>());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

std::vector<std::size_t> select_extremal(std::span<const std::optional<double>> scores, std::size_t k,
                                         SelectionDirection direction) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i]) {
            candidates.push_back(i);
        }
    }
    if (k > candidates.size()) {
        raise(ErrorCode::CTooLarge, "cannot select " + std::to_string(k) + " of " +
                                        std::to_string(candidates.size()) + " usable steps");
    }
    const bool want_max = direction == SelectionDirection::SelectMaxValue;
    auto better = [&](std::size_t a, std::size_t b) {
        const double sa = *scores[a];
        const double sb = *scores[b];
        if (sa != sb) {
            return want_max ? sa > sb : sa < sb;
        }
        return a < b;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                      better);
    candidates.resize(k);
    std::sort(candidates.begin(), candidates.end());
    return candidates;
}

std::optional<std::size_t> select_contiguous(std::span<const std::optional<double>> scores, std::size_t k,
                                             SelectionDirection direction) {
    if (k == 0 || k > scores.size()) {
        return std::nullopt;
    }
    const bool want_max = direction == SelectionDirection::SelectMaxValue;
    std::optional<std::size_t> best;
    double best_sum = 0.0;
    for (std::size_t start = 0; start + k <= scores.size(); ++start) {
        double sum = 0.0;
        bool complete = true;
        for (std::size_t i = start; i < start + k; ++i) {
            if (!scores[i]) {
                complete = false;
                break;
            }
            sum += *scores[i];
        }
        if (!complete) {
            continue;
        }
        if (!best || (want_max ? sum > best_sum : sum < best_sum)) {
            best = start;
            best_sum = sum;
        }
    }
    return best;
}

namespace {

std::vector<double> gather(std::span<const std::optional<double>> values, std::span<const std::size_t> indices) {
    std::vector<double> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        out.push_back(*values[i]);
    }
    return out;
}

std::vector<std::size_t> block(std::size_t start, std::size_t k) {
    std::vector<std::size_t> out(k);
    std::iota(out.begin(), out.end(), start);
    return out;
}

Series window_or_uncovered(const Series& s, const LoadShiftSpec& spec, std::string_view which) {
    try {
        return window(s, spec.t, spec.w);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::OffGrid || e.code() == ErrorCode::OutOfRange) {
            raise(ErrorCode::WindowNotCovered, std::string(which) + " does not cover the window at " +
                                                   format_rfc3339(spec.t) + ": " + e.what());
        }
        throw;
    }
}

} // namespace

ImpactReport load_shift_impact(const Series& forecast, const Series& actual, const LoadShiftSpec& spec) {
    const Resolution res = actual.grid().resolution();
    if (forecast.grid().resolution() != res) {
        raise(ErrorCode::WindowNotCovered, "forecast and actual resolutions differ");
    }
    const std::int64_t r = res.seconds();
    if (spec.w.count() <= 0 || spec.c.count() <= 0 || spec.w.count() % r != 0 || spec.c.count() % r != 0) {
        raise(ErrorCode::InvalidArgument, "w and c must be positive multiples of " + std::to_string(r) + "s");
    }
    if (spec.c > spec.w) {
        raise(ErrorCode::CTooLarge, "c exceeds the window length w");
    }
    const Series fw = window_or_uncovered(forecast, spec, "forecast");
    const Series aw = window_or_uncovered(actual, spec, "actual");
    if (aw.gap_count() > 0) {
        raise(ErrorCode::ActualGaps, "actual series has gaps inside the window at " + format_rfc3339(spec.t));
    }
    const auto k = static_cast<std::size_t>(spec.c.count() / r);

    ImpactReport report;
    report.direction = spec.direction.value_or(forecast.unit() == Unit::UsdPerMwh ? SelectionDirection::SelectMinValue
                                                                                  : SelectionDirection::SelectMaxValue);
    report.excluded_forecast_gaps = fw.gap_count();
    report.actual_unit = actual.unit();

    const auto f = fw.values();
    const auto a = aw.values();
    if (spec.contiguous) {
        const auto start = select_contiguous(f, k, report.direction);
        if (!start) {
            raise(ErrorCode::CTooLarge, "no gap-free forecast block of " + std::to_string(k) + " steps");
        }
        report.selected_steps = block(*start, k);
        report.oracle_impact =
            subset_mean(gather(a, block(*select_contiguous(a, k, SelectionDirection::SelectMaxValue), k)));
        report.anti_oracle_impact =
            subset_mean(gather(a, block(*select_contiguous(a, k, SelectionDirection::SelectMinValue), k)));
    } else {
        report.selected_steps = select_extremal(f, k, report.direction);
        report.oracle_impact = subset_mean(gather(a, select_extremal(a, k, SelectionDirection::SelectMaxValue)));
        report.anti_oracle_impact = subset_mean(gather(a, select_extremal(a, k, SelectionDirection::SelectMinValue)));
    }
    report.forecast_impact = subset_mean(gather(a, report.selected_steps));
    report.immediate_baseline = subset_mean(gather(a, block(0, k)));

    // Same summation order as the subset means so the bounds hold when k == w.
    report.random_baseline = subset_mean(gather(a, block(0, a.size())));
    return report;
}

ImpactReport load_shift_impact(const ForecastSeries& forecast, const Series& actual, const LoadShiftSpec& spec) {
    return load_shift_impact(forecast.series, actual, spec);
}

namespace {

std::pair<Series, Series> overlap(const Series& forecast, const Series& actual) {
    if (forecast.unit() != actual.unit()) {
        raise(ErrorCode::UnitMismatch, "forecast is " + std::string(to_string(forecast.unit())) + ", actual is " +
                                           std::string(to_string(actual.unit())));
    }
    try {
        return align(forecast, actual);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyOverlap) {
            raise(ErrorCode::NoOverlap, "forecast and actual do not overlap");
        }
        throw;
    }
}

} // namespace

RegressionMetrics regression_metrics(const Series& forecast, const Series& actual) {
    const auto [f, a] = overlap(forecast, actual);
    RegressionMetrics m;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i] || !a[i]) {
            continue;
        }
        const double e = *f[i] - *a[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        ++m.count;
    }
    if (m.count == 0) {
        raise(ErrorCode::NoOverlap, "no step has both a forecast and an actual value");
    }
    m.mae = abs_sum / static_cast<double>(m.count);
    m.rmse = std::sqrt(sq_sum / static_cast<double>(m.count));
    return m;
}

ClassificationMetrics classification_metrics(const Series& forecast_signal, const Series& actual_signal) {
    if (forecast_signal.unit() != Unit::Boolean01 || actual_signal.unit() != Unit::Boolean01) {
        raise(ErrorCode::UnitMismatch, "classification metrics need boolean01 signals");
    }
    const auto [f, a] = overlap(forecast_signal, actual_signal);
    ClassificationMetrics m;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i] || !a[i]) {
            continue;
        }
        const bool p = *f[i] == 1.0;
        const bool t = *a[i] == 1.0;
        if (p && t) {
            ++m.tp;
        } else if (p) {
            ++m.fp;
        } else if (t) {
            ++m.fn;
        } else {
            ++m.tn;
        }
    }
    const std::size_t n = m.tp + m.fp + m.fn + m.tn;
    if (n == 0) {
        raise(ErrorCode::NoOverlap, "no step has both a predicted and an actual signal");
    }
    auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0) {
            return std::nullopt;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.recall = ratio(m.tp, m.tp + m.fn);
    m.f1 = ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn);
    m.accuracy = ratio(m.tp + m.tn, n);
    return m;
}

void ImpactTotals::add(const ImpactReport& r) noexcept {
    ++windows;
    forecast_impact += r.forecast_impact;
    immediate_baseline += r.immediate_baseline;
    random_baseline += r.random_baseline;
    oracle_impact += r.oracle_impact;
    anti_oracle_impact += r.anti_oracle_impact;
}

void ImpactTotals::merge(const ImpactTotals& o) noexcept {
    windows += o.windows;
    forecast_impact += o.forecast_impact;
    immediate_baseline += o.immediate_baseline;
    random_baseline += o.random_baseline;
    oracle_impact += o.oracle_impact;
    anti_oracle_impact += o.anti_oracle_impact;
}

ImpactMeans means_of(const ImpactTotals& t) {
    if (t.windows == 0) {
        raise(ErrorCode::EmptyInput, "no evaluated windows");
    }
    const auto n = static_cast<double>(t.windows);
    ImpactMeans m{t.forecast_impact / n, t.immediate_baseline / n, t.random_baseline / n,
                  t.oracle_impact / n,   t.anti_oracle_impact / n, std::nullopt,
                  std::nullopt};
    if (m.random_baseline != 0.0) {
        m.uplift_vs_random = m.forecast_impact / m.random_baseline;
    }
    if (m.immediate_baseline != 0.0) {
        m.uplift_vs_immediate = m.forecast_impact / m.immediate_baseline;
    }
    return m;
}

void SweepReport::merge(SweepReport other) {
    windows.insert(windows.end(), std::make_move_iterator(other.windows.begin()),
                   std::make_move_iterator(other.windows.end()));
    totals.merge(other.totals);
    uncovered += other.uncovered;
}

SweepReport sweep(std::span<const BacktestEntry> results, std::span<const LoadShiftSpec> specs) {
    if (specs.empty()) {
        raise(ErrorCode::EmptyInput, "no load-shift specs to evaluate");
    }
    if (results.empty()) {
        raise(ErrorCode::EmptyInput, "no backtest results to evaluate");
    }
    SweepReport report;
    for (const auto& spec : specs) {
        const BacktestEntry* chosen = nullptr;
        for (const auto& entry : results) {
            const TimeGrid& g = entry.forecast.series.grid();
            const bool covers = g.start() <= spec.t && spec.t + spec.w <= g.end() && g.is_on_grid(spec.t);
            if (covers && (chosen == nullptr || entry.forecast.issued_at > chosen->forecast.issued_at)) {
                chosen = &entry;
            }
        }
        if (chosen == nullptr) {
            ++report.uncovered;
            continue;
        }
        ImpactReport r = load_shift_impact(chosen->forecast, chosen->actual, spec);
        report.totals.add(r);
        report.windows.push_back({spec, std::move(r)});
    }
    return report;
}

void write_report_csv(std::ostream& out, const SweepReport& report) {
    out << "window_start,w,c,forecast_impact,immediate,random,oracle,anti_oracle\n";
    for (const auto& w : report.windows) {
        const ImpactReport& r = w.report;
        out << format_rfc3339(w.spec.t) << ',' << w.spec.w.count() << ',' << w.spec.c.count() << ','
            << format_double(r.forecast_impact) << ',' << format_double(r.immediate_baseline) << ','
            << format_double(r.random_baseline) << ',' << format_double(r.oracle_impact) << ','
            << format_double(r.anti_oracle_impact) << '\n';
    }
}

std::string summary_json(const SweepReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["windows"] = report.totals.windows;
    j["uncovered"] = report.uncovered;
    if (report.totals.windows > 0) {
        const ImpactMeans m = report.overall();
        j["forecast_impact"] = m.forecast_impact;
        j["immediate"] = m.immediate_baseline;
        j["random"] = m.random_baseline;
        j["oracle"] = m.oracle_impact;
        j["anti_oracle"] = m.anti_oracle_impact;
        j["uplift_vs_random"] = m.uplift_vs_random ? ordered_json(*m.uplift_vs_random) : ordered_json(nullptr);
        j["uplift_vs_immediate"] =
            m.uplift_vs_immediate ? ordered_json(*m.uplift_vs_immediate) : ordered_json(nullptr);
    }
    return j.dump(2);
}

} // namespace curtailkit
