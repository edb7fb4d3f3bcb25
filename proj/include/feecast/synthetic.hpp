#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "feecast/dataset.hpp"
#include "feecast/features.hpp"

namespace feecast::synthetic {

/// Fee regime: log fee level = base + daily sinusoid + AR(1) noise. Every
/// block draws a mempool of fee rates around that level, and all summary
/// columns are derived from the draw, so records satisfy the dataset rules.
struct SyntheticConfig {
    std::size_t n_rows = 1500;
    std::uint64_t seed = 42;
    double period = 144;
    double log_base = std::log(12.0);
    double amplitude = 0.6;
    double ar = 0.8;
    double noise = 0.12;
    std::size_t tx_per_block = 200;
    std::int64_t start_time = 1700000000;
    std::int64_t start_height = 800000;
};

inline Dataset generate(const SyntheticConfig& cfg = {})
{
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::exponential_distribution<double> wait(1.0 / 600.0);
    const auto edges = features::default_bin_edges();

    Dataset d;
    d.provenance = Provenance::synthetic;
    double ar_state = 0;
    double price = 40000;
    double difficulty = 6.0e13;
    std::int64_t ts = cfg.start_time;
    std::vector<double> rates(cfg.tx_per_block);
    for (std::size_t i = 0; i < cfg.n_rows; ++i) {
        FeeRecord r;
        const double interval = std::max(1.0, std::round(wait(rng)));
        ts += static_cast<std::int64_t>(interval);
        r.timestamp = ts;
        r.block_height = cfg.start_height + static_cast<std::int64_t>(i);
        r.block_interval = interval;
        r.block_version = 536870912;
        if (i > 0 && i % 2016 == 0) difficulty *= std::exp(0.03 * z(rng));
        r.difficulty = difficulty;
        r.hash_rate = difficulty * 4294967296.0 / 600.0;
        price *= std::exp(0.002 * z(rng));
        r.bitcoin_price_usd = price;

        ar_state = cfg.ar * ar_state + cfg.noise * z(rng);
        const double season = cfg.amplitude * std::sin(2 * std::numbers::pi * static_cast<double>(i) / cfg.period);
        const double level = std::exp(cfg.log_base + season + ar_state);

        for (auto& x : rates) x = std::max(1.0, level * std::exp(0.5 * z(rng)));
        const auto s = features::summarize_rates(rates);
        r.min_fee_rate = s.min;
        r.max_fee_rate = s.max;
        r.avg_fee_rate = s.avg;
        r.median_fee_rate = s.median;
        r.fee_rate_10th = s.p10;
        r.fee_rate_90th = s.p90;
        r.fee_rate_std = s.std;
        const auto hist = features::histogram_from_rates(rates, edges);
        const auto ratios = features::fee_ratios(hist, 3, 12);
        r.hist_low_fee_ratio = ratios.low;
        r.hist_med_fee_ratio = ratios.med;
        r.hist_high_fee_ratio = ratios.high;
        r.fee_diversity = features::fee_diversity(hist);

        const double pressure = level / std::exp(cfg.log_base);
        r.mempool_size_mb = std::max(0.1, 40.0 * pressure * std::exp(0.1 * z(rng)));
        r.tx_count = std::round(std::clamp(2500.0 * std::exp(0.1 * z(rng)) * std::sqrt(pressure), 200.0, 6000.0));
        r.block_weight = std::clamp(3.99e6 - 2.0e5 * std::abs(z(rng)) / pressure, 1.0e6, 3.999e6);
        r.block_median_fee_rate = std::max(1.0, s.median * std::exp(0.05 * z(rng)));
        d.records.push_back(r);
    }
    return d;
}

} // namespace feecast::synthetic
