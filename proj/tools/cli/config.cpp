#include "config.hpp"

#include "curtailkit/error.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace curtailkit::cli {

using nlohmann::json;

Seconds parse_duration(std::string_view text) {
    std::int64_t n = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || ptr == text.data()) {
        raise(ErrorCode::ConfigError, "bad duration '" + std::string(text) + "'");
    }
    const std::string_view suffix(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
    std::int64_t scale = 0;
    if (suffix.empty() || suffix == "s") {
        scale = 1;
    } else if (suffix == "m") {
        scale = 60;
    } else if (suffix == "h") {
        scale = 3600;
    } else if (suffix == "d") {
        scale = 86400;
    } else if (suffix == "w") {
        scale = 7 * 86400;
    } else {
        raise(ErrorCode::ConfigError, "bad duration unit in '" + std::string(text) + "'");
    }
    return Seconds{n * scale};
}

Timestamp parse_timestamp(std::string_view text) {
    const auto t = parse_rfc3339(text);
    if (!t) {
        raise(ErrorCode::ConfigError, "bad RFC 3339 timestamp '" + std::string(text) + "'");
    }
    return *t;
}

IsoId parse_iso(std::string_view text) {
    const auto iso = iso_from_string(text);
    if (!iso) {
        raise(ErrorCode::ConfigError, "unknown ISO '" + std::string(text) + "'");
    }
    return *iso;
}

namespace {

Seconds duration_of(const json& v) {
    if (v.is_number_integer()) {
        return Seconds{v.get<std::int64_t>()};
    }
    if (v.is_string()) {
        return parse_duration(v.get<std::string>());
    }
    raise(ErrorCode::ConfigError, "duration must be a string or integer seconds");
}

Resolution resolution_of(const json& v) {
    try {
        return Resolution::from_seconds(duration_of(v).count());
    } catch (const Error& e) {
        raise(ErrorCode::ConfigError, e.what());
    }
}

SelectionDirection direction_of(const std::string& s) {
    if (s == "max") {
        return SelectionDirection::SelectMaxValue;
    }
    if (s == "min") {
        return SelectionDirection::SelectMinValue;
    }
    raise(ErrorCode::ConfigError, "direction must be 'max' or 'min'");
}

void read_threshold(const json& j, ThresholdConfig& t) {
    t.target = j.value("target", t.target);
    t.bin_lo = j.value("bin_lo", t.bin_lo);
    t.bin_hi = j.value("bin_hi", t.bin_hi);
    t.bin_width = j.value("bin_width", t.bin_width);
    t.amount_mw = j.value("amount_mw", t.amount_mw);
    t.min_count = j.value("min_count", t.min_count);
    t.per_node = j.value("per_node", t.per_node);
    t.percent_threshold = j.value("percent_threshold", t.percent_threshold);
    if (j.contains("price") && !j["price"].is_null()) {
        t.price = j["price"].get<double>();
    }
    if (j.contains("mode")) {
        const auto mode = j["mode"].get<std::string>();
        if (mode == "binned") {
            t.mode = CalibrationMode::Binned;
        } else if (mode == "cumulative") {
            t.mode = CalibrationMode::Cumulative;
        } else {
            raise(ErrorCode::ConfigError, "threshold.mode must be 'binned' or 'cumulative'");
        }
    }
}

void read_forecast(const json& j, ForecastConfig& f) {
    f.model = j.value("model", f.model);
    if (j.contains("preset")) {
        try {
            f.horizon = horizon_preset(j["preset"].get<std::string>());
        } catch (const Error& e) {
            raise(ErrorCode::ConfigError, e.what());
        }
    }
    if (j.contains("lead")) {
        f.horizon.lead = duration_of(j["lead"]);
    }
    if (j.contains("horizon")) {
        f.horizon.length = duration_of(j["horizon"]);
    }
    if (j.contains("issue_every")) {
        f.issue_every = duration_of(j["issue_every"]);
    }
    if (j.contains("bucket")) {
        f.bucket = resolution_of(j["bucket"]);
    }
    f.target = j.value("target", f.target);
    if (j.contains("signal_threshold") && !j["signal_threshold"].is_null()) {
        f.signal_threshold = j["signal_threshold"].get<double>();
    }
    f.threads = j.value("threads", f.threads);
}

LoadShiftConfig read_load_shift(const json& j) {
    LoadShiftConfig s;
    if (j.contains("w")) {
        s.w = duration_of(j["w"]);
    }
    if (j.contains("c")) {
        s.c = duration_of(j["c"]);
    }
    if (j.contains("every")) {
        s.every = duration_of(j["every"]);
    }
    if (j.contains("direction")) {
        s.direction = direction_of(j["direction"].get<std::string>());
    }
    s.contiguous = j.value("contiguous", false);
    return s;
}

} // namespace

RunConfig parse_config(std::string_view json_text) {
    RunConfig cfg;
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) {
            raise(ErrorCode::ConfigError, "config must be a JSON object");
        }
        if (j.contains("catalog")) {
            cfg.catalog = j["catalog"].get<std::string>();
        }
        if (j.contains("iso")) {
            cfg.iso = parse_iso(j["iso"].get<std::string>());
        }
        if (j.contains("from")) {
            cfg.from = parse_timestamp(j["from"].get<std::string>());
        }
        if (j.contains("to")) {
            cfg.to = parse_timestamp(j["to"].get<std::string>());
        }
        if (j.contains("resolution")) {
            cfg.resolution = resolution_of(j["resolution"]);
        }
        if (j.contains("out")) {
            cfg.out = j["out"].get<std::string>();
        }
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("threshold")) {
            read_threshold(j["threshold"], cfg.threshold);
        }
        if (j.contains("forecast")) {
            read_forecast(j["forecast"], cfg.forecast);
        }
        if (j.contains("load_shift")) {
            for (const auto& item : j["load_shift"]) {
                cfg.load_shift.push_back(read_load_shift(item));
            }
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::ConfigError, std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::ConfigError, "cannot open config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

} // namespace curtailkit::cli
