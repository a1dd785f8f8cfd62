#include "curtailkit/synthetic.hpp"

#include "curtailkit/error.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

namespace curtailkit {

namespace {

double cents(double x) { return std::round(x * 100.0) / 100.0; }

double event_probability(double x, double x0, double scale) { return 1.0 / (1.0 + std::exp((x - x0) / scale)); }

void check_shape(std::size_t steps, double scale) {
    if (steps == 0) {
        raise(ErrorCode::InvalidArgument, "synthetic data needs at least one step");
    }
    if (!(scale > 0.0)) {
        raise(ErrorCode::InvalidArgument, "logistic scale must be positive");
    }
}

} // namespace

LogisticDataset logistic_dataset(const LogisticSpec& spec) {
    check_shape(spec.steps, spec.scale);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> price(spec.price_lo, spec.price_hi);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<std::optional<double>> lmp(spec.steps);
    std::vector<std::optional<double>> mw(spec.steps);
    for (std::size_t i = 0; i < spec.steps; ++i) {
        const double x = cents(price(rng));
        lmp[i] = x;
        mw[i] = coin(rng) < event_probability(x, spec.x0, spec.scale) ? spec.event_mw : 0.0;
    }
    const TimeGrid grid(spec.start, spec.steps, spec.resolution, spec.zone);
    return {Series(grid, std::move(lmp), Unit::UsdPerMwh), Series(grid, std::move(mw), Unit::Mw)};
}

NodalDataset nodal_dataset(const NodalSpec& spec) {
    check_shape(spec.steps, spec.scale);
    if (spec.nodes == 0) {
        raise(ErrorCode::InvalidArgument, "synthetic data needs at least one node");
    }
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, spec.node_spread);
    std::normal_distribution<double> drift(0.0, 4.0);

    const TimeGrid grid(spec.start, spec.steps, spec.resolution, spec.zone);
    const double day_steps = 86400.0 / static_cast<double>(spec.resolution.seconds());
    std::vector<std::vector<std::optional<double>>> prices(spec.nodes,
                                                           std::vector<std::optional<double>>(spec.steps));
    std::vector<std::optional<double>> mw(spec.steps);

    NodalDataset out{{}, Series(grid, std::vector<std::optional<double>>(spec.steps, 0.0), Unit::Mw), {}, {}};
    double level = 20.0;
    for (std::size_t i = 0; i < spec.steps; ++i) {
        // Mean-reverting walk with a midday dip.
        const double phase = 2.0 * std::numbers::pi * std::fmod(static_cast<double>(i), day_steps) / day_steps;
        level += 0.1 * (20.0 - level) + drift(rng) * 0.5;
        const double regional = level - 15.0 * std::sin(phase - std::numbers::pi / 2.0);
        std::optional<double> lowest;
        for (std::size_t n = 0; n < spec.nodes; ++n) {
            const double p = cents(regional + noise(rng));
            if (coin(rng) < spec.gap_rate) {
                continue;
            }
            prices[n][i] = p;
            lowest = lowest ? std::min(*lowest, p) : p;
        }
        const double pe = lowest ? event_probability(*lowest, spec.x0, spec.scale) : 0.0;
        mw[i] = coin(rng) < pe ? spec.event_mw : 0.0;
    }

    for (std::size_t n = 0; n < spec.nodes; ++n) {
        char id[24];
        std::snprintf(id, sizeof id, "N%03zu", n + 1);
        for (std::size_t i = 0; i < spec.steps; ++i) {
            if (prices[n][i]) {
                out.lmp_records.push_back({id, grid.time_at(i), *prices[n][i]});
            }
        }
        out.lmp.emplace(id, Series(grid, std::move(prices[n]), Unit::UsdPerMwh));
    }
    for (std::size_t i = 0; i < spec.steps; ++i) {
        out.curtailment_records.push_back({spec.region, grid.time_at(i), CurtailedMw{*mw[i]}});
    }
    out.curtailment = Series(grid, std::move(mw), Unit::Mw);
    return out;
}

Series periodic_series(Timestamp start, std::size_t steps, Resolution resolution, std::size_t period_steps,
                       double amplitude, double offset, Unit unit) {
    if (period_steps == 0) {
        raise(ErrorCode::InvalidArgument, "period must be at least one step");
    }
    std::vector<std::optional<double>> values(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double phase =
            2.0 * std::numbers::pi * static_cast<double>(i % period_steps) / static_cast<double>(period_steps);
        values[i] = offset + amplitude * std::sin(phase);
    }
    return Series(TimeGrid(start, steps, resolution), std::move(values), unit);
}

void write_synthetic_lmp_csv(std::ostream& out, std::size_t nodes, std::size_t steps, Timestamp start,
                             Resolution resolution, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> price(-50.0, 50.0);
    std::vector<std::string> ids(nodes);
    for (std::size_t n = 0; n < nodes; ++n) {
        char id[24];
        std::snprintf(id, sizeof id, "N%03zu", n + 1);
        ids[n] = id;
    }
    std::string buffer;
    buffer.reserve(1 << 20);
    buffer.append(kLmpHeader).push_back('\n');
    for (std::size_t i = 0; i < steps; ++i) {
        const std::string ts = format_rfc3339(start + resolution.duration() * static_cast<std::int64_t>(i));
        for (std::size_t n = 0; n < nodes; ++n) {
            buffer.append(ids[n]).push_back(',');
            buffer.append(ts).push_back(',');
            buffer.append(format_double(cents(price(rng)))).push_back('\n');
            if (buffer.size() > (1 << 20) - 256) {
                out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
                buffer.clear();
            }
        }
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

} // namespace curtailkit
