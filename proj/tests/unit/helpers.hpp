#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "feecast/dataset.hpp"
#include "feecast/synthetic.hpp"

namespace testutil {

inline std::filesystem::path temp_path(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / "feecast_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

inline std::vector<double> random_series(std::size_t n, std::uint64_t seed, double scale = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng);
    return v;
}

inline feecast::Dataset synthetic(std::size_t n, std::uint64_t seed = 7)
{
    feecast::synthetic::SyntheticConfig cfg;
    cfg.n_rows = n;
    cfg.seed = seed;
    return feecast::synthetic::generate(cfg);
}

} // namespace testutil
