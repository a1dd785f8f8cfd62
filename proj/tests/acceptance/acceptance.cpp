// Acceptance suite: one PASS/FAIL/SKIP line per criterion.

#include "commands.hpp"

#include "curtailkit/canonical.hpp"
#include "curtailkit/catalog.hpp"
#include "curtailkit/detect.hpp"
#include "curtailkit/evaluate.hpp"
#include "curtailkit/forecast.hpp"
#include "curtailkit/ingest.hpp"
#include "curtailkit/synthetic.hpp"

#include "test_support.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace curtailkit;
using namespace curtailkit::test;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Best and worst k-subset means by exhaustive enumeration, summed in the
// same descending order as the library so equal subsets compare exactly.
std::pair<double, double> brute_force(const std::vector<double>& v, std::size_t k) {
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    std::array<std::size_t, 5> idx{};
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t from, std::size_t depth) {
        if (depth == k) {
            std::array<double, 5> chosen{};
            for (std::size_t i = 0; i < k; ++i) {
                chosen[i] = v[idx[i]];
            }
            std::sort(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(k), std::greater<>());
            double sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                sum += chosen[i];
            }
            const double mean = sum / static_cast<double>(k);
            best = std::max(best, mean);
            worst = std::min(worst, mean);
            return;
        }
        for (std::size_t i = from; i + (k - depth) <= v.size(); ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return {best, worst};
}

struct WindowCase {
    Series forecast;
    Series actual;
    LoadShiftSpec spec;
};

std::vector<WindowCase> random_windows(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<WindowCase> out;
    out.reserve(count);
    while (out.size() < count) {
        const std::size_t w = 1 + rng.index(20);
        const std::size_t k = 1 + rng.index(std::min<std::size_t>(5, w));
        const Values a = rng.coin(0.25) ? rng.tied_values(w, 0, 3) : rng.values(w, 0, 1000);
        const Unit fu = rng.coin(0.5) ? Unit::Mw : Unit::UsdPerMwh;
        const Values f = rng.coin(0.25) ? rng.tied_values(w, -2, 2) : rng.values(w, -100, 100, 0.1);
        std::size_t present_count = 0;
        for (const auto& x : f) {
            present_count += x ? 1 : 0;
        }
        if (present_count < k) {
            continue;
        }
        const Series actual = make(a);
        out.push_back({make(f, fu), actual,
                       LoadShiftSpec{actual.grid().start(), Seconds{static_cast<std::int64_t>(w) * 300},
                                     Seconds{static_cast<std::int64_t>(k) * 300}, std::nullopt, false}});
    }
    return out;
}

Outcome criterion_1() {
    const auto cases = random_windows(2000, 101);
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t oracle_mismatch = 0;
    std::size_t bound_violation = 0;
    for (const auto& c : cases) {
        const auto r = load_shift_impact(c.forecast, c.actual, c.spec);
        std::vector<double> a;
        for (const auto& x : c.actual.values()) {
            a.push_back(*x);
        }
        const auto [best, worst] = brute_force(a, r.selected_steps.size());
        oracle_mismatch += (r.oracle_impact != best || r.anti_oracle_impact != worst) ? 1 : 0;
        bound_violation += (r.anti_oracle_impact <= r.forecast_impact && r.forecast_impact <= r.oracle_impact) ? 0 : 1;
    }
    const double secs = seconds_since(t0);
    const bool ok = oracle_mismatch == 0 && bound_violation == 0 && secs < 5.0;
    return {ok ? Status::Pass : Status::Fail,
            std::to_string(cases.size()) + " windows, oracle mismatches=" + std::to_string(oracle_mismatch) +
                ", bound violations=" + std::to_string(bound_violation) + ", " + fmt("%.3f", secs) + " s (< 5 s)"};
}

Outcome criterion_2() {
    const auto cases = random_windows(2000, 202);
    double worst_rel = 0.0;
    std::size_t failures = 0;
    for (const auto& c : cases) {
        const auto r = load_shift_impact(c.forecast, c.actual, c.spec);
        double sum = 0.0;
        for (const auto& x : c.actual.values()) {
            sum += *x;
        }
        const double mean = sum / static_cast<double>(c.actual.size());
        const double diff = std::abs(r.random_baseline - mean);
        const double rel = mean == 0.0 ? diff : diff / std::abs(mean);
        worst_rel = std::max(worst_rel, rel);
        failures += rel <= 1e-12 ? 0 : 1;
    }
    return {failures == 0 ? Status::Pass : Status::Fail,
            std::to_string(cases.size()) + " windows, max relative deviation " + fmt("%.3g", worst_rel) +
                " (<= 1e-12)"};
}

Outcome criterion_3() {
    Rng rng(303);
    std::size_t violations = 0;
    std::size_t pairs = 0;
    for (int trial = 0; trial < 100; ++trial) {
        NodalSpec spec;
        spec.nodes = 1 + rng.index(8);
        spec.steps = 50 + rng.index(500);
        spec.gap_rate = rng.uniform(0, 0.2);
        spec.seed = rng.integer(1, 1'000'000);
        const auto data = nodal_dataset(spec);
        double t1 = rng.uniform(-40, 40);
        double t2 = rng.coin(0.1) ? t1 : rng.uniform(-40, 40);
        if (t1 > t2) {
            std::swap(t1, t2);
        }
        const auto low = detect_nodes(data.lmp, t1, 1 + rng.index(4));
        const auto high = detect_nodes(data.lmp, t2, 1 + rng.index(4));
        for (std::size_t n = 0; n < low.size(); ++n) {
            for (std::size_t i = 0; i < low[n].series.size(); ++i) {
                const auto& a = low[n].series[i];
                const auto& b = high[n].series[i];
                ++pairs;
                if (a.has_value() != b.has_value() || (a && *a == 1.0 && *b != 1.0)) {
                    ++violations;
                }
            }
        }
    }
    return {violations == 0 ? Status::Pass : Status::Fail,
            "100 datasets, " + std::to_string(pairs) + " node-steps, violations=" + std::to_string(violations)};
}

Outcome criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    LogisticSpec spec;
    spec.steps = 50000;
    spec.x0 = 2.0;
    spec.scale = 1.0;
    spec.seed = 20240601;
    const auto data = logistic_dataset(spec);
    const auto curve = calibration_curve(data.min_lmp, data.curtailment, 1.0, uniform_bin_edges(-50, 50, 1));
    const auto result = extract_threshold(curve, 0.5);
    const double secs = seconds_since(t0);
    const bool ok = result.threshold_price >= 1.0 && result.threshold_price <= 3.0 && secs < 2.0;
    return {ok ? Status::Pass : Status::Fail, "threshold " + fmt("%.4f", result.threshold_price) + " in [1, 3], " +
                                                 fmt("%.3f", secs) + " s (< 2 s)"};
}

Outcome criterion_5() {
    Rng rng(505);
    double worst = 0.0;
    std::size_t failures = 0;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t hours = 1 + rng.index(96);
        const double scale = std::pow(10.0, rng.uniform(-2, 4));
        // Mostly positive so totals stay well away from zero.
        const Series s = make(rng.values(hours * 12, -0.2 * scale, scale));
        double sum = 0.0;
        for (const auto& v : s.values()) {
            sum += *v;
        }
        const double mean = sum / static_cast<double>(s.size());
        const Series hourly_mean = resample(s, Resolution::hourly(), AggregateMode::Mean);
        const Series hourly_sum = resample(s, Resolution::hourly(), AggregateMode::Sum);
        double mean_of_means = 0.0;
        double sum_of_sums = 0.0;
        for (std::size_t i = 0; i < hourly_mean.size(); ++i) {
            mean_of_means += *hourly_mean[i];
            sum_of_sums += *hourly_sum[i];
        }
        mean_of_means /= static_cast<double>(hourly_mean.size());
        const double e_mean = rel(mean_of_means, mean);
        const double e_sum = rel(sum_of_sums, sum);
        worst = std::max({worst, e_mean, e_sum});
        failures += (e_mean <= 1e-9 && e_sum <= 1e-9) ? 0 : 1;
    }
    return {failures == 0 ? Status::Pass : Status::Fail,
            "1000 series, max relative error " + fmt("%.3g", worst) + " (<= 1e-9)"};
}

Outcome criterion_6() {
    Rng rng(606);
    std::vector<std::unique_ptr<Forecaster>> models;
    models.push_back(std::make_unique<PersistenceForecaster>());
    models.push_back(std::make_unique<DayAheadPersistenceForecaster>());
    models.push_back(std::make_unique<ClimatologyForecaster>(Resolution::hourly(), "America/Chicago"));
    std::size_t changed = 0;
    std::size_t compared = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t steps = 288 * (2 + rng.index(5));
        const Series s = make(rng.values(steps, -30, 120, 0.05), Unit::UsdPerMwh);
        const std::size_t issue_step = 288 + rng.index(steps - 288);
        const Timestamp issue = s.grid().time_at(issue_step);
        Values noisy(s.values().begin(), s.values().end());
        for (std::size_t i = issue_step; i < steps; ++i) {
            noisy[i] = rng.coin(0.1) ? std::nullopt : std::optional<double>(rng.uniform(-1e4, 1e4));
        }
        const Series perturbed(s.grid(), std::move(noisy), s.unit());
        const Horizon h{Seconds{300 * rng.integer(0, 24)}, Seconds{300 * rng.integer(1, 600)}};
        for (const auto& m : models) {
            const auto a = m->fit(History::before(s, issue))->predict(issue, h);
            const auto b = m->fit(History::before(perturbed, issue))->predict(issue, h);
            ++compared;
            changed += bit_identical(a.series, b.series) ? 0 : 1;
        }
    }
    return {changed == 0 ? Status::Pass : Status::Fail,
            "100 trials x 3 forecasters, " + std::to_string(compared) + " forecasts, changed=" +
                std::to_string(changed)};
}

Outcome criterion_7() {
    Rng rng(707);
    TempDir dir("roundtrip");
    const Unit units[] = {Unit::UsdPerMwh, Unit::Mw, Unit::Fraction, Unit::Boolean01, Unit::BinIndex};
    const char* zones[] = {"UTC", "America/Los_Angeles", "America/Chicago", "America/New_York"};
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        SeriesSet set;
        const std::size_t count = rng.index(6);
        for (std::size_t k = 0; k < count; ++k) {
            const Unit u = units[rng.index(5)];
            const Resolution r = rng.coin(0.5) ? Resolution::five_minute() : Resolution::hourly();
            const std::size_t n = 1 + rng.index(2000);
            const double gap_rate = rng.coin(0.3) ? 0.0 : rng.uniform(0, 0.5);
            Values v(n);
            for (auto& x : v) {
                if (rng.coin(gap_rate)) {
                    continue;
                }
                switch (u) {
                case Unit::Boolean01: x = rng.coin(0.5) ? 1.0 : 0.0; break;
                case Unit::Fraction: x = rng.uniform(0, 1); break;
                case Unit::BinIndex: x = static_cast<double>(rng.integer(0, 9)); break;
                default: x = rng.uniform(-2000, 2000);
                }
            }
            const Timestamp start = epoch_day(rng.integer(15000, 21000)) + r.duration() * rng.integer(0, 23);
            set.emplace("S" + std::to_string(trial) + "_" + std::to_string(k),
                        Series(TimeGrid(start, n, r, zones[rng.index(4)]), std::move(v), u));
        }
        const auto path = dir / ("set" + std::to_string(trial) + ".ckt");
        write_canonical(path, set);
        mismatches += bit_identical(read_canonical(path), set) ? 0 : 1;
    }
    return {mismatches == 0 ? Status::Pass : Status::Fail,
            "200 sets, mismatches=" + std::to_string(mismatches)};
}

Outcome criterion_8() {
    TempDir dir("perf");
    const IsoDescriptor spp = descriptor_for(IsoId::SPP);
    const Timestamp start = ts("2020-01-01T00:00:00Z");
    const std::size_t nodes = 100;
    const std::size_t steps = 10000;
    {
        std::ofstream f(dir / "spp_lmp.csv", std::ios::binary);
        write_synthetic_lmp_csv(f, nodes, steps, start, spp.granularity, 808);
    }
    {
        // A curtailment history of the same row count for summarize.
        std::ofstream f(dir / "spp_curtailment.csv", std::ios::binary);
        Rng rng(809);
        std::vector<CurtailmentRecord> recs;
        recs.reserve(nodes * steps);
        for (std::size_t i = 0; i < nodes * steps; ++i) {
            const double mw = rng.coin(0.4) ? rng.uniform(1, 2000) : 0.0;
            recs.push_back({"SPP", start + Seconds{static_cast<std::int64_t>(i) * 300}, CurtailedMw{mw}});
        }
        write_curtailment_csv(f, recs);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto parsed = parse_lmp_file(dir / "spp_lmp.csv", spp);
    const auto grid = covering_grid(std::span<const LmpRecord>(parsed.records), spp.granularity, spp.zone);
    const SeriesSet set = to_series(parsed.records, *grid);
    const auto signals = detect_nodes(set, 1.62, 1);
    const double parse_detect = seconds_since(t0);

    Catalog catalog = load_catalog(dir.path(), true);
    catalog.upsert({spp, {"spp_lmp.csv"}, {"spp_curtailment.csv"}, {}});
    save_catalog(catalog);
    std::ostringstream out;
    std::ostringstream err;
    const auto t1 = std::chrono::steady_clock::now();
    const int code = cli::run_cli({"summarize", "--iso", "SPP", "--catalog", dir.path().string()}, out, err);
    const double summarize = seconds_since(t1);

    const bool rows_ok = parsed.records.size() == nodes * steps && signals.size() == nodes;
    const bool ok = rows_ok && code == 0 && parse_detect < 5.0 && summarize < 2.0;
    return {ok ? Status::Pass : Status::Fail,
            std::to_string(parsed.records.size()) + " rows: parse+detect " + fmt("%.3f", parse_detect) +
                " s (< 5 s), summarize " + fmt("%.3f", summarize) + " s (< 2 s)" +
                (code == 0 ? "" : ", summarize failed: " + err.str())};
}

std::optional<double> summarize_pct(const std::string& root, const std::string& iso, std::string& error) {
    std::ostringstream out;
    std::ostringstream err;
    if (cli::run_cli({"summarize", "--iso", iso, "--catalog", root}, out, err) != 0) {
        error = err.str();
        return std::nullopt;
    }
    const std::string text = out.str();
    const auto pos = text.find("pct_time_curtailed=");
    return std::stod(text.substr(pos + 19));
}

Outcome criterion_9() {
    const char* env = std::getenv("CURTAILKIT_DATA");
    if (env == nullptr || !std::filesystem::exists(std::filesystem::path(env) / "catalog.json")) {
        return {Status::Skip, "CURTAILKIT_DATA not set or has no catalog.json"};
    }
    const std::string root = env;
    const Catalog catalog = load_catalog(root);
    if (catalog.find(IsoId::CAISO) == nullptr || catalog.find(IsoId::SPP) == nullptr) {
        return {Status::Skip, "catalog lacks the CAISO or SPP dataset"};
    }
    std::string error;
    const auto caiso = summarize_pct(root, "CAISO", error);
    const auto spp = summarize_pct(root, "SPP", error);
    TempDir dir("published");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_cli({"calibrate", "--iso", "CAISO", "--catalog", root, "--out", dir.path().string()},
                                  out, err);
    if (!caiso || !spp || code != 0) {
        return {Status::Fail, "command failed: " + error + err.str()};
    }
    const std::string text = out.str();
    const double threshold = std::stod(text.substr(text.find("threshold=") + 10));
    const bool ok = std::abs(*caiso - 23.1) <= 0.5 && std::abs(*spp - 47.4) <= 0.5 && std::abs(threshold - 1.62) <= 0.5;
    return {ok ? Status::Pass : Status::Fail, "CAISO " + fmt("%.1f", *caiso) + "% (23.1 +/- 0.5), SPP " +
                                                  fmt("%.1f", *spp) + "% (47.4 +/- 0.5), CAISO threshold $" +
                                                  fmt("%.2f", threshold) + " (1.62 +/- 0.50)"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"load-shift metric vs brute force", criterion_1},
        {"random baseline equals window mean", criterion_2},
        {"detection monotonicity", criterion_3},
        {"logistic threshold recovery", criterion_4},
        {"resampling conservation", criterion_5},
        {"no-lookahead", criterion_6},
        {"canonical round-trip", criterion_7},
        {"performance budget", criterion_8},
        {"published datasets", criterion_9},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {Status::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
        std::cout << tag << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail << std::endl;
        failures += o.status == Status::Fail ? 1 : 0;
    }
    return failures == 0 ? 0 : 1;
}
