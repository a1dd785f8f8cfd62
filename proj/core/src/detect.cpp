#include "curtailkit/detect.hpp"

#include "curtailkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace curtailkit {
namespace {

void require_price(const Series& s, std::string_view what) {
    if (s.unit() != Unit::UsdPerMwh) {
        raise(ErrorCode::UnitMismatch,
              std::string(what) + " must be USD/MWh, got " + std::string(to_string(s.unit())));
    }
}

void require_edges(std::span<const double> edges, std::size_t min_size) {
    if (edges.size() < min_size) {
        raise(ErrorCode::BadEdges, "need at least " + std::to_string(min_size) + " bin edges");
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!std::isfinite(edges[i]) || (i > 0 && !(edges[i] > edges[i - 1]))) {
            raise(ErrorCode::BadEdges, "bin edges must be finite and strictly ascending");
        }
    }
}

Series min_over(const std::vector<const Series*>& nodal) {
    if (nodal.empty()) {
        raise(ErrorCode::EmptySet, "no nodal series");
    }
    const TimeGrid& grid = nodal.front()->grid();
    for (const Series* s : nodal) {
        require_price(*s, "nodal LMP");
        if (!s->grid().same_steps(grid)) {
            raise(ErrorCode::GridMismatch, "nodal series do not share one grid");
        }
    }
    std::vector<Series::value_type> out(grid.length());
    for (const Series* s : nodal) {
        const auto values = s->values();
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (values[i] && (!out[i] || *values[i] < *out[i])) {
                out[i] = values[i];
            }
        }
    }
    return Series(grid, std::move(out), Unit::UsdPerMwh);
}

} // namespace

Series min_lmp_series(std::span<const Series> nodal) {
    std::vector<const Series*> ptrs;
    ptrs.reserve(nodal.size());
    for (const auto& s : nodal) {
        ptrs.push_back(&s);
    }
    return min_over(ptrs);
}

Series min_lmp_series(const SeriesSet& nodal) {
    std::vector<const Series*> ptrs;
    ptrs.reserve(nodal.size());
    for (const auto& [id, s] : nodal) {
        ptrs.push_back(&s);
    }
    return min_over(ptrs);
}

std::size_t CalibrationCurve::calibrated_bin_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(bins.begin(), bins.end(), [](const CalibrationBin& b) { return b.frequency.has_value(); }));
}

std::vector<double> uniform_bin_edges(double lo, double hi, double width) {
    if (!(width > 0.0) || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        raise(ErrorCode::BadEdges, "bin range needs lo < hi and a positive width");
    }
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / width));
    if (n == 0 || std::abs(lo + static_cast<double>(n) * width - hi) > 1e-9 * std::max(1.0, std::abs(hi))) {
        raise(ErrorCode::BadEdges, "bin width does not divide the range");
    }
    std::vector<double> edges(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        edges[i] = lo + static_cast<double>(i) * width;
    }
    edges.back() = hi;
    return edges;
}

std::vector<double> default_bin_edges() {
    return uniform_bin_edges(-50.0, 50.0, 1.0);
}

CalibrationCurve calibration_curve(const Series& min_lmp, const Series& curtailment, double amount_level,
                                   std::span<const double> bin_edges, CalibrationOptions options) {
    require_price(min_lmp, "minimum LMP");
    if (curtailment.unit() != Unit::Mw && curtailment.unit() != Unit::Boolean01) {
        raise(ErrorCode::UnitMismatch, "curtailment must be MW or boolean01");
    }
    if (!min_lmp.grid().same_steps(curtailment.grid())) {
        raise(ErrorCode::GridMismatch, "minimum LMP and curtailment grids differ; align them first");
    }
    require_edges(bin_edges, 2);

    const std::size_t nbins = bin_edges.size() - 1;
    std::vector<std::size_t> samples(nbins, 0);
    std::vector<std::size_t> curtailed(nbins, 0);
    const bool flags = curtailment.unit() == Unit::Boolean01;
    for (std::size_t i = 0; i < min_lmp.size(); ++i) {
        if (!min_lmp[i] || !curtailment[i]) {
            continue;
        }
        const double x = *min_lmp[i];
        const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), x);
        if (it == bin_edges.begin() || it == bin_edges.end()) {
            continue;
        }
        const auto b = static_cast<std::size_t>(it - bin_edges.begin()) - 1;
        ++samples[b];
        const bool hit = flags ? *curtailment[i] == 1.0 : *curtailment[i] >= amount_level;
        if (hit) {
            ++curtailed[b];
        }
    }
    if (options.mode == CalibrationMode::Cumulative) {
        for (std::size_t b = 1; b < nbins; ++b) {
            samples[b] += samples[b - 1];
            curtailed[b] += curtailed[b - 1];
        }
    }

    CalibrationCurve curve{amount_level, std::vector<double>(bin_edges.begin(), bin_edges.end()), {},
                           options.min_count, options.mode};
    curve.bins.reserve(nbins);
    for (std::size_t b = 0; b < nbins; ++b) {
        CalibrationBin bin{bin_edges[b], bin_edges[b + 1], samples[b], curtailed[b], std::nullopt};
        if (samples[b] > 0 && samples[b] >= options.min_count) {
            bin.frequency = static_cast<double>(curtailed[b]) / static_cast<double>(samples[b]);
        }
        curve.bins.push_back(bin);
    }
    if (curve.calibrated_bin_count() == 0) {
        raise(ErrorCode::EmptyBins, "no bin reaches " + std::to_string(options.min_count) + " samples");
    }
    return curve;
}

std::vector<double> isotonic_decreasing(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) {
        raise(ErrorCode::InvalidArgument, "values and weights differ in length");
    }
    // Pool adjacent violators on the reversed sequence, which must be non-decreasing.
    struct Block {
        double mean;
        double weight;
        std::size_t size;
    };
    std::vector<Block> blocks;
    for (std::size_t k = values.size(); k-- > 0;) {
        blocks.push_back({values[k], weights[k], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double w = prev.weight + top.weight;
            prev.mean = w > 0.0 ? (prev.mean * prev.weight + top.mean * top.weight) / w : (prev.mean + top.mean) / 2;
            prev.weight = w;
            prev.size += top.size;
        }
    }
    std::vector<double> fitted;
    fitted.reserve(values.size());
    for (const auto& b : blocks) {
        fitted.insert(fitted.end(), b.size, b.mean);
    }
    std::reverse(fitted.begin(), fitted.end());
    return fitted;
}

ThresholdResult extract_threshold(const CalibrationCurve& curve, double target) {
    if (!(target > 0.0 && target < 1.0)) {
        raise(ErrorCode::InvalidArgument, "target likelihood must lie in (0, 1)");
    }
    std::vector<double> prices;
    std::vector<double> freqs;
    std::vector<double> weights;
    for (const auto& b : curve.bins) {
        if (b.frequency) {
            prices.push_back((b.lo + b.hi) / 2.0);
            freqs.push_back(*b.frequency);
            weights.push_back(static_cast<double>(b.sample_count));
        }
    }
    if (prices.size() < 2) {
        raise(ErrorCode::TooFewBins, "threshold extraction needs at least 2 calibrated bins, have " +
                                         std::to_string(prices.size()));
    }
    const auto fitted = isotonic_decreasing(freqs, weights);

    ThresholdResult result;
    result.target_likelihood = target;
    result.amount_level = curve.amount_level;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        result.fitted.push_back({prices[i], fitted[i], static_cast<std::size_t>(weights[i])});
    }

    if (fitted.front() < target) {
        result.saturated = true;
        result.threshold_price = prices.front();
        return result;
    }
    // Last knot still at or above the target; the crossing lies after it.
    std::size_t i = 0;
    while (i + 1 < fitted.size() && fitted[i + 1] >= target) {
        ++i;
    }
    if (i + 1 == fitted.size()) {
        result.saturated = true;
        result.threshold_price = prices.back();
        return result;
    }
    const double share = (fitted[i] - target) / (fitted[i] - fitted[i + 1]);
    result.threshold_price = prices[i] + share * (prices[i + 1] - prices[i]);
    return result;
}

std::vector<std::optional<double>> fitted_frequencies(const CalibrationCurve& curve, const ThresholdResult& result) {
    std::vector<std::optional<double>> out(curve.bins.size());
    std::size_t k = 0;
    for (std::size_t b = 0; b < curve.bins.size() && k < result.fitted.size(); ++b) {
        if (curve.bins[b].frequency) {
            out[b] = result.fitted[k++].frequency;
        }
    }
    return out;
}

DetectionSignal detect(const Series& node_series, double threshold, std::string node_id) {
    require_price(node_series, "detection input");
    if (std::isnan(threshold)) {
        raise(ErrorCode::InvalidArgument, "threshold is NaN");
    }
    std::vector<Series::value_type> out(node_series.size());
    const auto values = node_series.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (values[i]) {
            out[i] = *values[i] <= threshold ? 1.0 : 0.0;
        }
    }
    return DetectionSignal{std::move(node_id), Series(node_series.grid(), std::move(out), Unit::Boolean01), threshold,
                           {}};
}

std::vector<DetectionSignal> detect_nodes(const SeriesSet& nodal, double threshold, std::size_t threads) {
    std::vector<const std::pair<const std::string, Series>*> items;
    items.reserve(nodal.size());
    for (const auto& kv : nodal) {
        items.push_back(&kv);
    }
    std::vector<std::optional<DetectionSignal>> slots(items.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            slots[k] = detect(items[k]->second, threshold, items[k]->first);
        }
    };
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, items.size()));
    if (threads == 1) {
        work(0, items.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (items.size() + threads - 1) / threads;
        for (std::size_t begin = 0; begin < items.size(); begin += chunk) {
            pool.emplace_back(work, begin, std::min(items.size(), begin + chunk));
        }
    }
    std::vector<DetectionSignal> out;
    out.reserve(slots.size());
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

DetectionSignal bin_signal(const Series& series, std::span<const double> edges, std::string node_id) {
    require_edges(edges, 1);
    std::vector<Series::value_type> out(series.size());
    const auto values = series.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (values[i]) {
            out[i] = static_cast<double>(std::upper_bound(edges.begin(), edges.end(), *values[i]) - edges.begin());
        }
    }
    return DetectionSignal{std::move(node_id), Series(series.grid(), std::move(out), Unit::BinIndex), std::nullopt,
                           std::vector<double>(edges.begin(), edges.end())};
}

NodeHeatmapStats below_threshold_heatmap(const SeriesSet& nodal, double threshold, Resolution bucket,
                                         std::string_view zone) {
    NodeHeatmapStats stats{threshold, bucket, std::string(zone), {}};
    if (nodal.empty()) {
        return stats;
    }
    const TimeGrid& grid = nodal.begin()->second.grid();
    for (const auto& [id, s] : nodal) {
        require_price(s, "heatmap input");
        if (!s.grid().same_steps(grid)) {
            raise(ErrorCode::GridMismatch, "nodal series do not share one grid");
        }
    }
    check_bucket(grid, bucket);
    const LocalClock clock(zone);
    const auto indices = local_bucket_indices(grid, bucket, clock);
    const auto bucket_count = static_cast<std::size_t>(86400 / bucket.seconds());

    auto finish = [](HeatmapCell& c) {
        if (c.count > 0) {
            c.fraction = static_cast<double>(c.below) / static_cast<double>(c.count);
        }
    };
    for (const auto& [id, s] : nodal) {
        NodeHeatmapRow row{id, std::vector<HeatmapCell>(bucket_count), {}};
        const auto values = s.values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!values[i]) {
                continue;
            }
            HeatmapCell& cell = row.buckets[indices[i]];
            ++cell.count;
            if (*values[i] <= threshold) {
                ++cell.below;
            }
        }
        for (auto& cell : row.buckets) {
            row.total.count += cell.count;
            row.total.below += cell.below;
            finish(cell);
        }
        finish(row.total);
        stats.nodes.push_back(std::move(row));
    }
    return stats;
}

} // namespace curtailkit
