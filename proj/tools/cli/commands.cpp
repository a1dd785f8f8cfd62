#include "commands.hpp"

#include "config.hpp"

#include "curtailkit/adapter.hpp"
#include "curtailkit/canonical.hpp"
#include "curtailkit/catalog.hpp"
#include "curtailkit/detect.hpp"
#include "curtailkit/error.hpp"
#include "curtailkit/evaluate.hpp"
#include "curtailkit/forecast.hpp"
#include "curtailkit/ingest.hpp"
#include "curtailkit/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace curtailkit::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

double percent_time_curtailed(const Series& curtailment) {
    std::size_t observed = 0;
    std::size_t curtailed = 0;
    for (const auto& v : curtailment.values()) {
        if (v) {
            ++observed;
            curtailed += *v > 0.0 ? 1 : 0;
        }
    }
    if (observed == 0) {
        raise(ErrorCode::MissingData, "curtailment series has no observed steps");
    }
    return 100.0 * static_cast<double>(curtailed) / static_cast<double>(observed);
}

namespace {

struct Context {
    RunConfig cfg;
    std::ostream& out;
    std::ostream& err;

    fs::path data_root() const {
        if (cfg.catalog) {
            return *cfg.catalog;
        }
        if (const char* env = std::getenv("CURTAILKIT_DATA"); env != nullptr && *env != '\0') {
            return env;
        }
        return ".";
    }

    fs::path out_dir() const { return cfg.out.value_or("curtailkit-out"); }

    IsoId iso() const {
        if (!cfg.iso) {
            raise(ErrorCode::ConfigError, "--iso is required");
        }
        return *cfg.iso;
    }

    void warn(std::string_view message) const { err << "warning: " << message << '\n'; }
};

std::string lower(std::string_view s) {
    std::string r(s);
    std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return r;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        raise(ErrorCode::IoError, "cannot write " + path.string());
    }
    return f;
}

fs::path output_file(const Context& ctx, std::string_view stem, std::string_view ext) {
    return ctx.out_dir() / (std::string(stem) + "_" + lower(to_string(ctx.iso())) + std::string(ext));
}

void announce(const Context& ctx, const fs::path& path) { ctx.out << "wrote " << path.generic_string() << '\n'; }

std::string optional_double(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

// ---------------------------------------------------------------------------
// Data access

struct Dataset {
    Catalog catalog;
    DatasetEntry entry;
};

Dataset open_dataset(const Context& ctx) {
    const IsoId iso = ctx.iso();
    const fs::path root = ctx.data_root();
    if (!fs::exists(root)) {
        raise(ErrorCode::MissingData, "catalog root " + root.string() + " does not exist");
    }
    Catalog catalog = load_catalog(root);
    const DatasetEntry* entry = catalog.find(iso);
    if (entry == nullptr) {
        raise(ErrorCode::MissingData, "catalog has no " + std::string(to_string(iso)) + " dataset");
    }
    if (has_import_price_caveat(iso)) {
        ctx.warn("MISO negative prices are often driven by imports rather than curtailment; "
                 "treat detections with care");
    }
    DatasetEntry copy = *entry;
    return {std::move(catalog), std::move(copy)};
}

Series restrict_range(const Context& ctx, const Series& s) {
    const TimeGrid& g = s.grid();
    const std::int64_t r = g.resolution().seconds();
    auto index_at = [&](Timestamp t) -> std::size_t {
        const std::int64_t d = (t - g.start()).count();
        if (d <= 0) {
            return 0;
        }
        return std::min<std::size_t>(g.length(), static_cast<std::size_t>((d + r - 1) / r));
    };
    const std::size_t first = ctx.cfg.from ? index_at(*ctx.cfg.from) : 0;
    const std::size_t last = ctx.cfg.to ? index_at(*ctx.cfg.to) : g.length();
    if (last <= first) {
        raise(ErrorCode::MissingData, "no data in the requested time range");
    }
    if (first == 0 && last == g.length()) {
        return s;
    }
    return slice(s, first, last - first);
}

SeriesSet restrict_range(const Context& ctx, const SeriesSet& set) {
    SeriesSet out;
    for (const auto& [id, s] : set) {
        out.emplace(id, restrict_range(ctx, s));
    }
    return out;
}

SeriesSet nodal_lmp(const Context& ctx, const Dataset& d) {
    if (d.entry.lmp_files.empty()) {
        raise(ErrorCode::MissingData, "no LMP files for " + std::string(to_string(d.entry.descriptor.iso)));
    }
    SeriesSet set = load_lmp_series(d.catalog, d.entry);
    if (set.empty()) {
        raise(ErrorCode::MissingData, "LMP files contain no records");
    }
    return restrict_range(ctx, set);
}

Series min_lmp(const Context& ctx, const Dataset& d) { return min_lmp_series(nodal_lmp(ctx, d)); }

// Regions are combined into one system series: MW add up, flags OR together.
Series curtailment(const Context& ctx, const Dataset& d) {
    if (d.entry.curtailment_files.empty()) {
        raise(ErrorCode::MissingData,
              "no curtailment files for " + std::string(to_string(d.entry.descriptor.iso)));
    }
    const SeriesSet set = load_curtailment_series(d.catalog, d.entry, {}, ctx.cfg.threshold.percent_threshold);
    if (set.empty()) {
        raise(ErrorCode::MissingData, "curtailment files contain no records");
    }
    auto it = set.begin();
    Series total = it->second;
    for (++it; it != set.end(); ++it) {
        auto [a, b] = align(total, it->second);
        std::vector<std::optional<double>> v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] && b[i]) {
                v[i] = a.unit() == Unit::Mw ? *a[i] + *b[i] : std::max(*a[i], *b[i]);
            }
        }
        total = Series(a.grid(), std::move(v), a.unit());
    }
    return restrict_range(ctx, total);
}

// ---------------------------------------------------------------------------
// Calibration

struct Calibration {
    CalibrationCurve curve;
    ThresholdResult result;
};

void require_mw(const Dataset& d) {
    if (!reports_mw(d.entry.descriptor.reported_kind)) {
        raise(ErrorCode::FlagOnlyIso, std::string(to_string(d.entry.descriptor.iso)) + " reports " +
                                          std::string(to_string(d.entry.descriptor.reported_kind)) +
                                          ", which carries no MW amount to calibrate against");
    }
}

Calibration calibrate_series(const Context& ctx, const Series& prices, const Series& mw) {
    const ThresholdConfig& t = ctx.cfg.threshold;
    const auto [p, c] = align(prices, mw);
    const auto edges = uniform_bin_edges(t.bin_lo, t.bin_hi, t.bin_width);
    CalibrationCurve curve = calibration_curve(p, c, t.amount_mw, edges, {t.min_count, t.mode});
    ThresholdResult result = extract_threshold(curve, t.target);
    return {std::move(curve), std::move(result)};
}

void write_curve_csv(std::ostream& f, const Calibration& cal) {
    const auto fitted = fitted_frequencies(cal.curve, cal.result);
    f << "bin_lo,bin_hi,count,freq,fitted_freq\n";
    for (std::size_t i = 0; i < cal.curve.bins.size(); ++i) {
        const CalibrationBin& b = cal.curve.bins[i];
        f << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.sample_count << ','
          << optional_double(b.frequency) << ',' << optional_double(fitted[i]) << '\n';
    }
}

double detection_threshold(const Context& ctx, const Dataset& d) {
    if (ctx.cfg.threshold.price) {
        return *ctx.cfg.threshold.price;
    }
    require_mw(d);
    const Calibration cal = calibrate_series(ctx, min_lmp(ctx, d), curtailment(ctx, d));
    if (cal.result.saturated) {
        ctx.warn("calibrated threshold is saturated at the edge of the bin range");
    }
    return cal.result.threshold_price;
}

void write_heatmap_csv(std::ostream& f, const NodeHeatmapStats& stats) {
    f << "node_id,bucket_start_local,fraction,count\n";
    for (const auto& row : stats.nodes) {
        for (std::size_t b = 0; b < row.buckets.size(); ++b) {
            f << row.node_id << ','
              << format_time_of_day(static_cast<std::int64_t>(b) * stats.bucket_width.seconds()) << ','
              << optional_double(row.buckets[b].fraction) << ',' << row.buckets[b].count << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Commands

struct IngestArgs {
    std::vector<std::string> lmp;
    std::vector<std::string> curtailment;
    std::string lmp_adapter;
    std::string curtailment_adapter;
    double error_budget = 0.001;
};

void report_parse(const Context& ctx, const std::string& file, const ParseReport& report) {
    ctx.out << "file=" << file << " rows=" << report.rows << " errors=" << report.errors.size() << '\n';
    for (const auto& e : report.errors) {
        ctx.out << "  line " << e.line << ": " << e.message << '\n';
    }
}

std::ifstream open_input(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open " + file);
    }
    return in;
}

int cmd_ingest(const Context& ctx, const IngestArgs& args) {
    const IsoId iso = ctx.iso();
    if (args.lmp.empty() && args.curtailment.empty()) {
        raise(ErrorCode::ConfigError, "ingest needs --lmp and/or --curtailment input files");
    }
    for (const auto& f : args.lmp) {
        if (!fs::exists(f)) {
            raise(ErrorCode::IoError, "input file " + f + " does not exist");
        }
    }
    for (const auto& f : args.curtailment) {
        if (!fs::exists(f)) {
            raise(ErrorCode::IoError, "input file " + f + " does not exist");
        }
    }
    const IsoDescriptor desc = descriptor_for(iso);
    ParseOptions options;
    options.error_budget = args.error_budget;
    const fs::path dir = ctx.cfg.out.value_or(ctx.data_root());
    fs::create_directories(dir);
    Catalog catalog = load_catalog(dir, true);
    DatasetEntry entry{desc, {}, {}, {}};
    if (const DatasetEntry* existing = catalog.find(iso)) {
        entry = *existing;
    }
    entry.descriptor = desc;
    const std::string stem = lower(to_string(iso));
    std::size_t rows = 0;
    std::size_t errors = 0;

    if (!args.lmp.empty()) {
        std::vector<LmpRecord> records;
        for (const auto& file : args.lmp) {
            LmpParseResult r;
            if (args.lmp_adapter.empty()) {
                r = parse_lmp_file(file, desc, options);
            } else {
                auto in = open_input(file);
                r = adapt_lmp(in, load_adapter_config(args.lmp_adapter), desc, options);
            }
            report_parse(ctx, file, r.report);
            rows += r.report.rows;
            errors += r.report.errors.size();
            records.insert(records.end(), std::make_move_iterator(r.records.begin()),
                           std::make_move_iterator(r.records.end()));
        }
        const auto grid = covering_grid(std::span<const LmpRecord>(records), desc.granularity, desc.zone);
        if (!grid) {
            raise(ErrorCode::MissingData, "LMP inputs contain no valid rows");
        }
        const SeriesSet series = to_series(records, *grid);
        {
            auto f = open_output(dir / (stem + "_lmp.csv"));
            write_lmp_csv(f, records);
        }
        write_canonical(dir / (stem + "_lmp.ckt"), series);
        entry.lmp_files = {stem + "_lmp.ckt"};
        entry.node_roster.clear();
        for (const auto& [id, s] : series) {
            entry.node_roster.push_back(id);
        }
        announce(ctx, dir / (stem + "_lmp.csv"));
        announce(ctx, dir / (stem + "_lmp.ckt"));
    }
    if (!args.curtailment.empty()) {
        std::vector<CurtailmentRecord> records;
        for (const auto& file : args.curtailment) {
            CurtailmentParseResult r;
            if (args.curtailment_adapter.empty()) {
                r = parse_curtailment_file(file, desc, options);
            } else {
                auto in = open_input(file);
                r = adapt_curtailment(in, load_adapter_config(args.curtailment_adapter), desc, options);
            }
            report_parse(ctx, file, r.report);
            rows += r.report.rows;
            errors += r.report.errors.size();
            records.insert(records.end(), std::make_move_iterator(r.records.begin()),
                           std::make_move_iterator(r.records.end()));
        }
        const auto grid = covering_grid(std::span<const CurtailmentRecord>(records), desc.granularity, desc.zone);
        if (!grid) {
            raise(ErrorCode::MissingData, "curtailment inputs contain no valid rows");
        }
        const SeriesSet series = to_series(records, *grid, ctx.cfg.threshold.percent_threshold);
        {
            auto f = open_output(dir / (stem + "_curtailment.csv"));
            write_curtailment_csv(f, records);
        }
        write_canonical(dir / (stem + "_curtailment.ckt"), series);
        entry.curtailment_files = {stem + "_curtailment.ckt"};
        announce(ctx, dir / (stem + "_curtailment.csv"));
        announce(ctx, dir / (stem + "_curtailment.ckt"));
    }
    catalog.upsert(std::move(entry));
    save_catalog(catalog);
    ctx.out << "rows=" << rows << " errors=" << errors << '\n';
    return 0;
}

int cmd_summarize(const Context& ctx) {
    const Dataset d = open_dataset(ctx);
    const IsoDescriptor& desc = d.entry.descriptor;
    const Series c = curtailment(ctx, d);
    std::optional<Timestamp> first;
    std::optional<Timestamp> last;
    std::size_t observed = 0;
    std::size_t curtailed = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i]) {
            first = first.value_or(c.grid().time_at(i));
            last = c.grid().time_at(i);
            ++observed;
            curtailed += *c[i] > 0.0 ? 1 : 0;
        }
    }
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.1f", percent_time_curtailed(c));
    ctx.out << "iso=" << to_string(desc.iso) << '\n'
            << "granularity_seconds=" << desc.granularity.seconds() << '\n'
            << "reported_kind=" << to_string(desc.reported_kind) << '\n'
            << "zone=" << desc.zone << '\n'
            << "coverage_from=" << format_rfc3339(*first) << '\n'
            << "coverage_to=" << format_rfc3339(*last + desc.granularity.duration()) << '\n'
            << "steps=" << c.size() << '\n'
            << "observed_steps=" << observed << '\n'
            << "curtailed_steps=" << curtailed << '\n'
            << "pct_time_curtailed=" << pct << "%\n";
    if (!d.entry.node_roster.empty()) {
        ctx.out << "nodes=" << d.entry.node_roster.size() << '\n';
    }
    return 0;
}

int cmd_calibrate(const Context& ctx) {
    const Dataset d = open_dataset(ctx);
    require_mw(d);
    const Series c = curtailment(ctx, d);
    const ThresholdConfig& t = ctx.cfg.threshold;

    if (t.per_node) {
        const SeriesSet nodal = nodal_lmp(ctx, d);
        const fs::path path = output_file(ctx, "thresholds", ".csv");
        auto f = open_output(path);
        f << "node_id,threshold,saturated,calibrated_bins\n";
        for (const auto& [id, s] : nodal) {
            try {
                const Calibration cal = calibrate_series(ctx, s, c);
                f << id << ',' << format_double(cal.result.threshold_price) << ','
                  << (cal.result.saturated ? "true" : "false") << ',' << cal.curve.calibrated_bin_count() << '\n';
            } catch (const Error& e) {
                if (e.code() != ErrorCode::EmptyBins && e.code() != ErrorCode::TooFewBins) {
                    throw;
                }
                ctx.warn(id + ": " + e.what());
                f << id << ",,,0\n";
            }
        }
        announce(ctx, path);
        return 0;
    }

    const Calibration cal = calibrate_series(ctx, min_lmp(ctx, d), c);
    const fs::path curve_path = output_file(ctx, "calibration", ".csv");
    {
        auto f = open_output(curve_path);
        write_curve_csv(f, cal);
    }
    ordered_json j;
    j["iso"] = to_string(d.entry.descriptor.iso);
    j["target"] = t.target;
    j["threshold"] = cal.result.threshold_price;
    j["saturated"] = cal.result.saturated;
    j["amount_mw"] = t.amount_mw;
    j["calibrated_bins"] = cal.curve.calibrated_bin_count();
    j["mode"] = t.mode == CalibrationMode::Binned ? "binned" : "cumulative";
    const fs::path json_path = output_file(ctx, "threshold", ".json");
    {
        auto f = open_output(json_path);
        f << j.dump(2) << '\n';
    }
    if (cal.result.saturated) {
        ctx.warn("threshold is saturated at the edge of the bin range");
    }
    ctx.out << "threshold=" << format_double(cal.result.threshold_price) << " target=" << format_double(t.target)
            << " saturated=" << (cal.result.saturated ? "true" : "false")
            << " calibrated_bins=" << cal.curve.calibrated_bin_count() << '\n';
    announce(ctx, curve_path);
    announce(ctx, json_path);
    return 0;
}

struct DetectArgs {
    Resolution bucket = Resolution::hourly();
};

int cmd_detect(const Context& ctx, const DetectArgs& args) {
    const Dataset d = open_dataset(ctx);
    const double threshold = detection_threshold(ctx, d);
    const SeriesSet nodal = nodal_lmp(ctx, d);
    const auto signals = detect_nodes(nodal, threshold, ctx.cfg.forecast.threads);

    const fs::path sig_path = output_file(ctx, "signals", ".csv");
    std::size_t flagged = 0;
    {
        auto f = open_output(sig_path);
        f << "node_id,timestamp_utc,signal\n";
        for (const auto& sig : signals) {
            const TimeGrid& g = sig.series.grid();
            for (std::size_t i = 0; i < sig.series.size(); ++i) {
                const auto& v = sig.series[i];
                f << sig.node_id << ',' << format_rfc3339(g.time_at(i)) << ',';
                if (v) {
                    f << (*v == 1.0 ? '1' : '0');
                    flagged += *v == 1.0 ? 1 : 0;
                }
                f << '\n';
            }
        }
    }
    const fs::path heat_path = output_file(ctx, "heatmap", ".csv");
    {
        auto f = open_output(heat_path);
        write_heatmap_csv(f, below_threshold_heatmap(nodal, threshold, args.bucket, d.entry.descriptor.zone));
    }
    ctx.out << "threshold=" << format_double(threshold) << " nodes=" << signals.size() << " flagged_steps=" << flagged
            << '\n';
    announce(ctx, sig_path);
    announce(ctx, heat_path);
    return 0;
}

Series target_series(const Context& ctx, const Dataset& d) {
    const std::string& target = ctx.cfg.forecast.target;
    Series s = [&] {
        if (target == "curtailment") {
            return curtailment(ctx, d);
        }
        if (target == "min_lmp") {
            return min_lmp(ctx, d);
        }
        raise(ErrorCode::ConfigError, "forecast target must be 'curtailment' or 'min_lmp'");
    }();
    if (ctx.cfg.resolution && *ctx.cfg.resolution != s.grid().resolution()) {
        s = resample(s, *ctx.cfg.resolution, AggregateMode::Mean);
    }
    return s;
}

Series actual_curtailment(const Context& ctx, const Dataset& d) {
    Series s = curtailment(ctx, d);
    if (ctx.cfg.resolution && *ctx.cfg.resolution != s.grid().resolution()) {
        s = resample(s, *ctx.cfg.resolution, AggregateMode::Mean);
    }
    return s;
}

std::unique_ptr<Forecaster> forecaster_for(const Context& ctx, const Dataset& d) {
    try {
        return make_forecaster(ctx.cfg.forecast.model, ctx.cfg.forecast.bucket, d.entry.descriptor.zone);
    } catch (const Error& e) {
        raise(ErrorCode::ConfigError, e.what());
    }
}

struct ForecastArgs {
    std::optional<Timestamp> at;
};

int cmd_forecast(const Context& ctx, const ForecastArgs& args) {
    const Dataset d = open_dataset(ctx);
    if (ctx.cfg.forecast.model == "oracle") {
        raise(ErrorCode::ConfigError, "the oracle model needs realised data; use backtest or evaluate");
    }
    const Series s = target_series(ctx, d);
    const Timestamp at = args.at.value_or(s.grid().end());
    validate(ctx.cfg.forecast.horizon, s.grid().resolution());
    const auto model = forecaster_for(ctx, d);
    const auto fitted = model->fit(History::before(s, at));
    ForecastSeries fc = fitted->predict(at, ctx.cfg.forecast.horizon);
    if (ctx.cfg.forecast.signal_threshold) {
        fc = to_signal(fc, *ctx.cfg.forecast.signal_threshold);
    }
    const fs::path path = output_file(ctx, "forecast", ".csv");
    {
        auto f = open_output(path);
        write_forecast_csv(f, std::span<const ForecastSeries>(&fc, 1));
    }
    ctx.out << "model=" << model->name() << " issued_at=" << format_rfc3339(at) << " steps=" << fc.series.size()
            << '\n';
    announce(ctx, path);
    return 0;
}

std::vector<Timestamp> default_schedule(const Context& ctx, const Series& s) {
    const ForecastConfig& fc = ctx.cfg.forecast;
    validate(fc.horizon, s.grid().resolution());
    const std::int64_t r = s.grid().resolution().seconds();
    if (fc.issue_every.count() <= 0 || fc.issue_every.count() % r != 0) {
        raise(ErrorCode::ConfigError, "issue_every must be a positive multiple of the data resolution");
    }
    const Timestamp first = s.grid().start() + Seconds{86400};
    const Timestamp last = s.grid().end() - fc.horizon.lead - fc.horizon.length;
    if (last < first) {
        raise(ErrorCode::ConfigError, "data range is too short for one day of history plus the horizon");
    }
    return issue_schedule(first, last, fc.issue_every);
}

BacktestResult run_backtest(const Context& ctx, const Dataset& d, const Series& s) {
    const auto schedule = default_schedule(ctx, s);
    const Horizon& h = ctx.cfg.forecast.horizon;
    if (ctx.cfg.forecast.model == "oracle") {
        BacktestResult r;
        for (Timestamp t : schedule) {
            Series w = window(s, t + h.lead, h.length);
            r.entries.push_back({ForecastSeries{t, h, w, SignalType::Regression}, w});
        }
        return r;
    }
    const auto model = forecaster_for(ctx, d);
    BacktestResult r = backtest(*model, s, schedule, h, ctx.cfg.forecast.threads);
    for (const auto& w : r.warnings) {
        ctx.warn(w);
    }
    return r;
}

Series as_signal(const Series& s, double threshold, ThresholdSide side, const Horizon& h, Timestamp issued) {
    if (s.unit() == Unit::Boolean01) {
        return s;
    }
    return to_signal(ForecastSeries{issued, h, s, SignalType::Regression}, threshold, side).series;
}

int cmd_backtest(const Context& ctx) {
    const Dataset d = open_dataset(ctx);
    const Series s = target_series(ctx, d);
    const BacktestResult r = run_backtest(ctx, d, s);
    const ForecastConfig& fc = ctx.cfg.forecast;

    std::size_t count = 0;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    ClassificationMetrics cls;
    for (const auto& e : r.entries) {
        try {
            const RegressionMetrics m = regression_metrics(e.forecast.series, e.actual);
            count += m.count;
            abs_sum += m.mae * static_cast<double>(m.count);
            sq_sum += m.rmse * m.rmse * static_cast<double>(m.count);
        } catch (const Error& err) {
            if (err.code() != ErrorCode::NoOverlap && err.code() != ErrorCode::UnitMismatch) {
                throw;
            }
        }
        if (fc.signal_threshold) {
            const ThresholdSide side =
                s.unit() == Unit::UsdPerMwh ? ThresholdSide::AtOrBelow : ThresholdSide::AtOrAbove;
            const Series p = as_signal(e.forecast.series, *fc.signal_threshold, side, fc.horizon, e.forecast.issued_at);
            const Series a = as_signal(e.actual, *fc.signal_threshold, side, fc.horizon, e.forecast.issued_at);
            try {
                const ClassificationMetrics m = classification_metrics(p, a);
                cls.tp += m.tp;
                cls.fp += m.fp;
                cls.fn += m.fn;
                cls.tn += m.tn;
            } catch (const Error& err) {
                if (err.code() != ErrorCode::NoOverlap) {
                    throw;
                }
            }
        }
    }

    const fs::path fc_path = output_file(ctx, "backtest", ".csv");
    {
        std::vector<ForecastSeries> forecasts;
        forecasts.reserve(r.entries.size());
        for (const auto& e : r.entries) {
            forecasts.push_back(e.forecast);
        }
        auto f = open_output(fc_path);
        write_forecast_csv(f, forecasts);
    }

    ordered_json j;
    j["iso"] = to_string(d.entry.descriptor.iso);
    j["model"] = fc.model;
    j["target"] = fc.target;
    j["issues"] = r.entries.size();
    j["skipped"] = r.skipped;
    ordered_json reg;
    reg["count"] = count;
    if (count > 0) {
        reg["mae"] = abs_sum / static_cast<double>(count);
        reg["rmse"] = std::sqrt(sq_sum / static_cast<double>(count));
    }
    j["regression"] = reg;
    if (fc.signal_threshold) {
        auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? ordered_json(nullptr) : ordered_json(double(a) / double(b)); };
        ordered_json c;
        c["tp"] = cls.tp;
        c["fp"] = cls.fp;
        c["fn"] = cls.fn;
        c["tn"] = cls.tn;
        c["precision"] = ratio(cls.tp, cls.tp + cls.fp);
        c["recall"] = ratio(cls.tp, cls.tp + cls.fn);
        c["f1"] = ratio(2 * cls.tp, 2 * cls.tp + cls.fp + cls.fn);
        c["accuracy"] = ratio(cls.tp + cls.tn, cls.tp + cls.tn + cls.fp + cls.fn);
        j["classification"] = c;
    }
    const fs::path metrics_path = output_file(ctx, "metrics", ".json");
    {
        auto f = open_output(metrics_path);
        f << j.dump(2) << '\n';
    }
    ctx.out << "model=" << fc.model << " issues=" << r.entries.size() << " skipped=" << r.skipped;
    if (count > 0) {
        ctx.out << " mae=" << format_double(abs_sum / static_cast<double>(count))
                << " rmse=" << format_double(std::sqrt(sq_sum / static_cast<double>(count)));
    }
    ctx.out << '\n';
    announce(ctx, fc_path);
    announce(ctx, metrics_path);
    return 0;
}

std::vector<LoadShiftSpec> window_specs(const Context& ctx, std::span<const BacktestEntry> entries) {
    std::vector<LoadShiftConfig> configs = ctx.cfg.load_shift;
    if (configs.empty()) {
        configs.emplace_back();
    }
    using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, int, bool>;
    std::set<Key> seen;
    std::vector<LoadShiftSpec> specs;
    for (const auto& e : entries) {
        const TimeGrid& g = e.forecast.series.grid();
        for (const auto& cfg : configs) {
            const Seconds every = cfg.every.value_or(cfg.w);
            if (every.count() <= 0) {
                raise(ErrorCode::ConfigError, "load-shift spacing must be positive");
            }
            for (Timestamp t = g.start(); t + cfg.w <= g.end(); t += every) {
                const int dir = cfg.direction ? static_cast<int>(*cfg.direction) : -1;
                if (seen.emplace(t.time_since_epoch().count(), cfg.w.count(), cfg.c.count(), dir, cfg.contiguous)
                        .second) {
                    specs.push_back({t, cfg.w, cfg.c, cfg.direction, cfg.contiguous});
                }
            }
        }
    }
    std::stable_sort(specs.begin(), specs.end(),
                     [](const LoadShiftSpec& a, const LoadShiftSpec& b) { return a.t < b.t; });
    return specs;
}

int cmd_evaluate(const Context& ctx) {
    const Dataset d = open_dataset(ctx);
    const Series s = target_series(ctx, d);
    BacktestResult r = run_backtest(ctx, d, s);

    if (ctx.cfg.forecast.target != "curtailment") {
        const Series actual = actual_curtailment(ctx, d);
        std::vector<BacktestEntry> paired;
        for (auto& e : r.entries) {
            try {
                Series a = window(actual, e.forecast.series.grid().start(), ctx.cfg.forecast.horizon.length);
                paired.push_back({std::move(e.forecast), std::move(a)});
            } catch (const Error& err) {
                ctx.warn("no curtailment actuals for forecast issued " + format_rfc3339(e.forecast.issued_at));
            }
        }
        r.entries = std::move(paired);
    }
    if (r.entries.empty()) {
        raise(ErrorCode::EmptyInput, "backtest produced no forecasts to evaluate");
    }

    SweepReport report;
    std::size_t skipped = 0;
    for (const auto& spec : window_specs(ctx, r.entries)) {
        try {
            report.merge(sweep(r.entries, std::span<const LoadShiftSpec>(&spec, 1)));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ActualGaps && e.code() != ErrorCode::CTooLarge &&
                e.code() != ErrorCode::WindowNotCovered) {
                throw;
            }
            ++skipped;
            ctx.warn(format_rfc3339(spec.t) + ": " + e.what());
        }
    }
    if (report.totals.windows == 0) {
        raise(ErrorCode::EmptyInput, "no load-shift window could be evaluated");
    }

    const fs::path csv_path = output_file(ctx, "report", ".csv");
    {
        auto f = open_output(csv_path);
        write_report_csv(f, report);
    }
    ordered_json j;
    j["iso"] = to_string(d.entry.descriptor.iso);
    j["model"] = ctx.cfg.forecast.model;
    j["target"] = ctx.cfg.forecast.target;
    j["seed"] = ctx.cfg.seed;
    j["skipped_windows"] = skipped;
    const ordered_json overall = ordered_json::parse(summary_json(report));
    for (const auto& [k, v] : overall.items()) {
        j[k] = v;
    }
    const fs::path json_path = output_file(ctx, "summary", ".json");
    {
        auto f = open_output(json_path);
        f << j.dump(2) << '\n';
    }
    const ImpactMeans m = report.overall();
    ctx.out << "windows=" << report.totals.windows << " skipped=" << skipped
            << " forecast=" << format_double(m.forecast_impact) << " immediate=" << format_double(m.immediate_baseline)
            << " random=" << format_double(m.random_baseline) << " oracle=" << format_double(m.oracle_impact)
            << " anti_oracle=" << format_double(m.anti_oracle_impact) << '\n';
    announce(ctx, csv_path);
    announce(ctx, json_path);
    return 0;
}

struct PlotArgs {
    std::string kind;
    std::string input;
    std::string source = "curtailment";
    std::string series_id;
    Resolution bucket = Resolution::hourly();
};

void copy_checked(const std::string& input, std::string_view header, const fs::path& dest) {
    auto in = open_input(input);
    std::string first;
    std::getline(in, first);
    if (!first.empty() && first.back() == '\r') {
        first.pop_back();
    }
    if (first != header) {
        raise(ErrorCode::SchemaError, input + ": expected header '" + std::string(header) + "'");
    }
    auto f = open_output(dest);
    f << first << '\n';
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        f << line << '\n';
    }
}

Series plot_source(const Context& ctx, const PlotArgs& args, std::string& zone) {
    if (!args.input.empty()) {
        const SeriesSet set = read_canonical(fs::path(args.input));
        if (set.empty()) {
            raise(ErrorCode::MissingData, args.input + " holds no series");
        }
        auto it = args.series_id.empty() ? set.begin() : set.find(args.series_id);
        if (it == set.end()) {
            raise(ErrorCode::MissingData, "series " + args.series_id + " not found in " + args.input);
        }
        zone = ctx.cfg.iso ? descriptor_for(*ctx.cfg.iso).zone : it->second.grid().zone();
        return restrict_range(ctx, it->second);
    }
    const Dataset d = open_dataset(ctx);
    zone = d.entry.descriptor.zone;
    if (args.source == "curtailment") {
        return curtailment(ctx, d);
    }
    if (args.source == "min_lmp") {
        return min_lmp(ctx, d);
    }
    raise(ErrorCode::ConfigError, "--source must be 'curtailment' or 'min_lmp' for this plot");
}

int cmd_plot(const Context& ctx, const PlotArgs& args) {
    const fs::path dir = ctx.out_dir();
    if (args.kind == "time_of_day") {
        std::string zone;
        const Series s = plot_source(ctx, args, zone);
        const TimeOfDayProfile p = time_of_day_profile(s, args.bucket, zone);
        const fs::path path = dir / "plot_time_of_day.csv";
        auto f = open_output(path);
        f << "bucket_start_local,count,median,q25,q75\n";
        for (std::size_t i = 0; i < p.bucket_count(); ++i) {
            const BucketStats& b = p.buckets[i];
            f << format_time_of_day(p.bucket_start_seconds(i)) << ',' << b.count << ',';
            if (b.quartiles) {
                f << format_double(b.quartiles->median) << ',' << format_double(b.quartiles->q25) << ','
                  << format_double(b.quartiles->q75);
            } else {
                f << ",,";
            }
            f << '\n';
        }
        announce(ctx, path);
        return 0;
    }
    if (args.kind == "calibration") {
        const fs::path path = dir / "plot_calibration.csv";
        if (!args.input.empty()) {
            copy_checked(args.input, "bin_lo,bin_hi,count,freq,fitted_freq", path);
        } else {
            const Dataset d = open_dataset(ctx);
            require_mw(d);
            const Calibration cal = calibrate_series(ctx, min_lmp(ctx, d), curtailment(ctx, d));
            auto f = open_output(path);
            write_curve_csv(f, cal);
        }
        announce(ctx, path);
        return 0;
    }
    if (args.kind == "heatmap") {
        const fs::path path = dir / "plot_heatmap.csv";
        if (!args.input.empty()) {
            copy_checked(args.input, "node_id,bucket_start_local,fraction,count", path);
        } else {
            const Dataset d = open_dataset(ctx);
            const double threshold = detection_threshold(ctx, d);
            auto f = open_output(path);
            write_heatmap_csv(f, below_threshold_heatmap(nodal_lmp(ctx, d), threshold, args.bucket,
                                                         d.entry.descriptor.zone));
        }
        announce(ctx, path);
        return 0;
    }
    if (args.kind == "timeseries") {
        SeriesSet set;
        if (!args.input.empty()) {
            set = restrict_range(ctx, read_canonical(fs::path(args.input)));
        } else {
            const Dataset d = open_dataset(ctx);
            if (args.source == "lmp") {
                set = nodal_lmp(ctx, d);
            } else if (args.source == "min_lmp") {
                set.emplace("min_lmp", min_lmp(ctx, d));
            } else if (args.source == "curtailment") {
                set.emplace("curtailment", curtailment(ctx, d));
            } else {
                raise(ErrorCode::ConfigError, "--source must be 'lmp', 'min_lmp' or 'curtailment'");
            }
        }
        const fs::path path = dir / "plot_timeseries.csv";
        auto f = open_output(path);
        f << "series_id,timestamp_utc,value\n";
        for (const auto& [id, s] : set) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                f << id << ',' << format_rfc3339(s.grid().time_at(i)) << ',' << optional_double(s[i]) << '\n';
            }
        }
        announce(ctx, path);
        return 0;
    }
    raise(ErrorCode::UnknownKind,
          "unknown plot kind '" + args.kind + "' (expected time_of_day, calibration, heatmap or timeseries)");
}

struct SynthArgs {
    std::string kind = "logistic";
    std::size_t steps = 0;
    std::size_t nodes = 4;
    double x0 = 2.0;
    double scale = 1.0;
};

CurtailmentPayload payload_for(ReportedKind kind, double mw) {
    switch (kind) {
    case ReportedKind::SystemCurtailedMW:
        return CurtailedMw{mw};
    case ReportedKind::CapabilityAndOutput:
        return CapabilityOutput{mw, 0.0};
    case ReportedKind::PercentNodesMarginalFuel:
        return PercentNodes{mw > 0.0 ? std::min(100.0, mw) : 0.0};
    case ReportedKind::RegionalMarginalFuelFlag:
    case ReportedKind::SystemMarginalFuelFlag:
        break;
    }
    return MarginalFuelFlag{mw > 0.0};
}

int cmd_synth(const Context& ctx, const SynthArgs& args) {
    const IsoId iso = ctx.iso();
    const IsoDescriptor desc = descriptor_for(iso);
    const Timestamp start = ctx.cfg.from.value_or(*parse_rfc3339("2024-01-01T00:00:00Z"));
    const std::size_t day = static_cast<std::size_t>(86400 / desc.granularity.seconds());
    const std::string region(to_string(iso));

    std::vector<LmpRecord> lmp;
    std::vector<std::pair<Timestamp, double>> mw;
    if (args.kind == "logistic") {
        LogisticSpec spec;
        spec.steps = args.steps > 0 ? args.steps : 50000;
        spec.x0 = args.x0;
        spec.scale = args.scale;
        spec.start = start;
        spec.resolution = desc.granularity;
        spec.zone = desc.zone;
        spec.seed = ctx.cfg.seed;
        const LogisticDataset data = logistic_dataset(spec);
        for (std::size_t i = 0; i < data.min_lmp.size(); ++i) {
            lmp.push_back({"N001", data.min_lmp.grid().time_at(i), *data.min_lmp[i]});
            mw.emplace_back(data.curtailment.grid().time_at(i), *data.curtailment[i]);
        }
    } else if (args.kind == "nodal") {
        NodalSpec spec;
        spec.nodes = args.nodes;
        spec.steps = args.steps > 0 ? args.steps : 14 * day;
        spec.x0 = args.x0;
        spec.scale = args.scale;
        spec.start = start;
        spec.resolution = desc.granularity;
        spec.zone = desc.zone;
        spec.region = region;
        spec.seed = ctx.cfg.seed;
        NodalDataset data = nodal_dataset(spec);
        lmp = std::move(data.lmp_records);
        for (std::size_t i = 0; i < data.curtailment.size(); ++i) {
            mw.emplace_back(data.curtailment.grid().time_at(i), *data.curtailment[i]);
        }
    } else if (args.kind == "periodic") {
        const std::size_t steps = args.steps > 0 ? args.steps : 14 * day;
        const Series prices = periodic_series(start, steps, desc.granularity, day, 20.0, 10.0, Unit::UsdPerMwh);
        const Series amount = periodic_series(start, steps, desc.granularity, day, 50.0, 50.0, Unit::Mw);
        for (std::size_t i = 0; i < steps; ++i) {
            lmp.push_back({"N001", prices.grid().time_at(i), *prices[i]});
            mw.emplace_back(amount.grid().time_at(i), std::max(0.0, *amount[i]));
        }
    } else {
        raise(ErrorCode::UnknownKind, "unknown synthetic kind '" + args.kind + "' (expected logistic, nodal or periodic)");
    }

    std::vector<CurtailmentRecord> curt;
    curt.reserve(mw.size());
    for (const auto& [t, v] : mw) {
        curt.push_back({region, t, payload_for(desc.reported_kind, v)});
    }

    const fs::path dir = ctx.cfg.out.value_or(ctx.data_root());
    fs::create_directories(dir);
    const std::string stem = lower(region);
    {
        auto f = open_output(dir / (stem + "_lmp.csv"));
        write_lmp_csv(f, lmp);
    }
    {
        auto f = open_output(dir / (stem + "_curtailment.csv"));
        write_curtailment_csv(f, curt);
    }
    Catalog catalog = load_catalog(dir, true);
    DatasetEntry entry{desc, {}, {}, {}};
    entry.descriptor = desc;
    entry.lmp_files = {stem + "_lmp.csv"};
    entry.curtailment_files = {stem + "_curtailment.csv"};
    std::set<std::string> ids;
    for (const auto& r : lmp) {
        ids.insert(r.node_id);
    }
    entry.node_roster.assign(ids.begin(), ids.end());
    catalog.upsert(std::move(entry));
    save_catalog(catalog);
    ctx.out << "kind=" << args.kind << " steps=" << mw.size() << " nodes=" << ids.size() << " seed=" << ctx.cfg.seed
            << '\n';
    announce(ctx, dir / (stem + "_lmp.csv"));
    announce(ctx, dir / (stem + "_curtailment.csv"));
    return 0;
}

// ---------------------------------------------------------------------------
// Argument handling

std::optional<std::string> config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) {
            return args[i].substr(9);
        }
    }
    return std::nullopt;
}

Resolution resolution_flag(const std::string& s) {
    try {
        return Resolution::from_seconds(parse_duration(s).count());
    } catch (const Error& e) {
        raise(ErrorCode::ConfigError, e.what());
    }
}

void add_threshold_options(CLI::App* cmd, ThresholdConfig& t) {
    cmd->add_option("--target", t.target, "Target curtailment likelihood");
    cmd->add_option("--bin-lo", t.bin_lo, "Lowest price bin edge");
    cmd->add_option("--bin-hi", t.bin_hi, "Highest price bin edge");
    cmd->add_option("--bin-width", t.bin_width, "Price bin width");
    cmd->add_option("--amount", t.amount_mw, "Curtailed MW that counts as an event");
    cmd->add_option("--min-count", t.min_count, "Samples needed to calibrate a bin");
    cmd->add_option_function<std::string>(
        "--mode",
        [&t](const std::string& m) {
            if (m == "binned") {
                t.mode = CalibrationMode::Binned;
            } else if (m == "cumulative") {
                t.mode = CalibrationMode::Cumulative;
            } else {
                raise(ErrorCode::ConfigError, "--mode must be binned or cumulative");
            }
        },
        "binned or cumulative");
    cmd->add_option("--percent-threshold", t.percent_threshold, "PJM percent-of-nodes cutoff");
}

void add_forecast_options(CLI::App* cmd, ForecastConfig& f) {
    cmd->add_option("--model", f.model, "persistence, day_ahead, climatology or oracle");
    cmd->add_option_function<std::string>(
        "--preset",
        [&f](const std::string& p) {
            try {
                f.horizon = horizon_preset(p);
            } catch (const Error& e) {
                raise(ErrorCode::ConfigError, e.what());
            }
        },
        "thermostat, ev, battery, day_ahead or batch");
    cmd->add_option_function<std::string>(
        "--lead", [&f](const std::string& s) { f.horizon.lead = parse_duration(s); }, "Forecast lead time");
    cmd->add_option_function<std::string>(
        "--horizon", [&f](const std::string& s) { f.horizon.length = parse_duration(s); }, "Forecast length");
    cmd->add_option_function<std::string>(
        "--bucket", [&f](const std::string& s) { f.bucket = resolution_flag(s); }, "Climatology bucket width");
    cmd->add_option("--target-series", f.target, "curtailment or min_lmp");
    cmd->add_option_function<double>(
        "--signal-threshold", [&f](double v) { f.signal_threshold = v; }, "Convert forecasts to 0/1 signals");
    cmd->add_option("--threads", f.threads, "Worker threads");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg;
        if (const auto path = config_path(args)) {
            cfg = load_config(*path);
        }
        CLI::App app("Curtailment detection, forecasting and load-shift evaluation", "curtailkit");
        app.require_subcommand(1);
        app.fallthrough();
        std::string config_file;
        app.add_option("--config", config_file, "JSON run configuration");
        app.add_option("--seed", cfg.seed, "Seed for stochastic choices");
        app.add_option_function<std::string>(
            "--out", [&cfg](const std::string& s) { cfg.out = s; }, "Output directory");
        app.add_option_function<std::string>(
            "--catalog", [&cfg](const std::string& s) { cfg.catalog = s; }, "Catalog root (default $CURTAILKIT_DATA)");
        app.add_option_function<std::string>(
            "--iso", [&cfg](const std::string& s) { cfg.iso = parse_iso(s); }, "ISO name");
        app.add_option_function<std::string>(
            "--from", [&cfg](const std::string& s) { cfg.from = parse_timestamp(s); }, "Range start (RFC 3339)");
        app.add_option_function<std::string>(
            "--to", [&cfg](const std::string& s) { cfg.to = parse_timestamp(s); }, "Range end (RFC 3339)");
        app.add_option_function<std::string>(
            "--resolution", [&cfg](const std::string& s) { cfg.resolution = resolution_flag(s); },
            "Resample target for forecasting");

        IngestArgs ingest_args;
        auto* ingest = app.add_subcommand("ingest", "Convert raw files to canonical CSV and columnar cache");
        ingest->add_option("--lmp", ingest_args.lmp, "LMP input files");
        ingest->add_option("--curtailment", ingest_args.curtailment, "Curtailment input files");
        ingest->add_option("--lmp-adapter", ingest_args.lmp_adapter, "Adapter JSON for raw LMP files");
        ingest->add_option("--curtailment-adapter", ingest_args.curtailment_adapter,
                           "Adapter JSON for raw curtailment files");
        ingest->add_option("--error-budget", ingest_args.error_budget, "Tolerated fraction of bad rows");

        auto* summarize = app.add_subcommand("summarize", "Print coverage and percent time with curtailment");

        auto* calibrate = app.add_subcommand("calibrate", "Fit the price-likelihood curve and threshold");
        add_threshold_options(calibrate, cfg.threshold);
        calibrate->add_flag("--per-node", cfg.threshold.per_node, "Calibrate each node separately");

        DetectArgs detect_args;
        auto* detect_cmd = app.add_subcommand("detect", "Flag nodal prices at or below the threshold");
        add_threshold_options(detect_cmd, cfg.threshold);
        detect_cmd->add_option_function<double>(
            "--threshold", [&cfg](double v) { cfg.threshold.price = v; }, "Fixed price threshold");
        detect_cmd->add_option_function<std::string>(
            "--bucket", [&detect_args](const std::string& s) { detect_args.bucket = resolution_flag(s); },
            "Heatmap bucket width");
        detect_cmd->add_option("--threads", cfg.forecast.threads, "Worker threads");

        ForecastArgs forecast_args;
        auto* forecast_cmd = app.add_subcommand("forecast", "Issue one forecast");
        add_forecast_options(forecast_cmd, cfg.forecast);
        forecast_cmd->add_option_function<std::string>(
            "--at", [&forecast_args](const std::string& s) { forecast_args.at = parse_timestamp(s); },
            "Issue time (default: end of data)");

        auto* backtest_cmd = app.add_subcommand("backtest", "Rolling-origin forecast backtest");
        add_forecast_options(backtest_cmd, cfg.forecast);
        backtest_cmd->add_option_function<std::string>(
            "--every", [&cfg](const std::string& s) { cfg.forecast.issue_every = parse_duration(s); },
            "Issue spacing");

        LoadShiftConfig shift_flags;
        bool shift_given = false;
        auto* evaluate_cmd = app.add_subcommand("evaluate", "Backtest plus load-shift impact evaluation");
        add_forecast_options(evaluate_cmd, cfg.forecast);
        evaluate_cmd->add_option_function<std::string>(
            "--every", [&cfg](const std::string& s) { cfg.forecast.issue_every = parse_duration(s); },
            "Issue spacing");
        evaluate_cmd->add_option_function<std::string>(
            "--w", [&](const std::string& s) { shift_flags.w = parse_duration(s); shift_given = true; },
            "Load-shift window length");
        evaluate_cmd->add_option_function<std::string>(
            "--c", [&](const std::string& s) { shift_flags.c = parse_duration(s); shift_given = true; },
            "Energy-use duration inside the window");
        evaluate_cmd->add_option_function<std::string>(
            "--window-every", [&](const std::string& s) { shift_flags.every = parse_duration(s); shift_given = true; },
            "Spacing of window starts");
        evaluate_cmd->add_option_function<std::string>(
            "--direction",
            [&](const std::string& s) {
                if (s != "max" && s != "min") {
                    raise(ErrorCode::ConfigError, "--direction must be max or min");
                }
                shift_flags.direction =
                    s == "max" ? SelectionDirection::SelectMaxValue : SelectionDirection::SelectMinValue;
                shift_given = true;
            },
            "max or min");
        evaluate_cmd->add_flag_callback(
            "--contiguous", [&] { shift_flags.contiguous = true; shift_given = true; },
            "Select one uninterrupted block");

        PlotArgs plot_args;
        auto* plot = app.add_subcommand("plot", "Emit plot-ready CSV data");
        plot->add_option("--kind", plot_args.kind, "time_of_day, calibration, heatmap or timeseries")->required();
        plot->add_option("--input", plot_args.input, "Curve/heatmap CSV or canonical cache file");
        plot->add_option("--source", plot_args.source, "lmp, min_lmp or curtailment");
        plot->add_option("--series", plot_args.series_id, "Series id inside --input");
        plot->add_option_function<std::string>(
            "--bucket", [&plot_args](const std::string& s) { plot_args.bucket = resolution_flag(s); },
            "Bucket width");
        plot->add_option_function<double>(
            "--threshold", [&cfg](double v) { cfg.threshold.price = v; }, "Fixed price threshold");

        SynthArgs synth_args;
        auto* synth = app.add_subcommand("synth", "Write a synthetic dataset and catalog entry");
        synth->add_option("--kind", synth_args.kind, "logistic, nodal or periodic");
        synth->add_option("--steps", synth_args.steps, "Number of grid steps");
        synth->add_option("--nodes", synth_args.nodes, "Number of nodes (nodal)");
        synth->add_option("--x0", synth_args.x0, "Logistic midpoint price");
        synth->add_option("--scale", synth_args.scale, "Logistic scale");

        std::vector<std::string> argv_store;
        argv_store.reserve(args.size() + 1);
        argv_store.emplace_back("curtailkit");
        argv_store.insert(argv_store.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : argv_store) {
            argv.push_back(a.c_str());
        }
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? 0 : 2;
        }
        if (shift_given) {
            cfg.load_shift = {shift_flags};
        }
        if (cfg.catalog && !fs::exists(*cfg.catalog) && !ingest->parsed() && !synth->parsed()) {
            raise(ErrorCode::ConfigError, "catalog path " + cfg.catalog->string() + " does not exist");
        }

        const Context ctx{std::move(cfg), out, err};
        if (ingest->parsed()) {
            return cmd_ingest(ctx, ingest_args);
        }
        if (summarize->parsed()) {
            return cmd_summarize(ctx);
        }
        if (calibrate->parsed()) {
            return cmd_calibrate(ctx);
        }
        if (detect_cmd->parsed()) {
            return cmd_detect(ctx, detect_args);
        }
        if (forecast_cmd->parsed()) {
            return cmd_forecast(ctx, forecast_args);
        }
        if (backtest_cmd->parsed()) {
            return cmd_backtest(ctx);
        }
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(ctx);
        }
        if (plot->parsed()) {
            return cmd_plot(ctx, plot_args);
        }
        if (synth->parsed()) {
            return cmd_synth(ctx, synth_args);
        }
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace curtailkit::cli
