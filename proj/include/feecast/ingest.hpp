#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "feecast/dataset.hpp"
#include "feecast/error.hpp"
#include "feecast/features.hpp"

// After the Eigen-based headers: <resolv.h>, pulled in by httplib, defines a
// `_res` macro that collides with Eigen parameter names.
#include <httplib.h>

namespace feecast::ingest {

using nlohmann::json;

struct RpcEndpoint {
    std::string url = "http://127.0.0.1:8332";
    std::string user;
    std::string password;
    double timeout = 10;     // seconds per request
    int max_retries = 3;     // extra attempts after the first connection failure
    double retry_delay = 0.2; // seconds between connection attempts

    void check() const
    {
        require(timeout > 0, ErrorCode::InvalidArgument, "RPC timeout must be positive");
        require(max_retries >= 0, ErrorCode::InvalidArgument, "max_retries must be >= 0");
    }
};

struct BlockStats {
    std::int64_t height = 0;
    std::int64_t time = 0;
    double weight = 0;
    double version = 0;
    double median_fee_rate = 0;
    double difficulty = 0;
    double hash_rate = 0;
};

struct MempoolSnapshot {
    std::size_t tx_count = 0;
    double size_mb = 0;
    std::vector<double> fee_rates;
    std::int64_t taken_at = 0;
};

struct PriceSource {
    std::string url;
    std::string field_path = "bitcoin.usd"; // dot separated; numeric parts index arrays
    double timeout = 10;
};

struct PriceQuote {
    double usd = 0;
    std::int64_t taken_at = 0;
};

inline std::int64_t unix_now()
{
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

namespace detail {

struct UrlParts {
    std::string origin; // scheme://host[:port]
    std::string path;
};

inline UrlParts split_url(const std::string& url)
{
    const auto scheme_end = url.find("://");
    require(scheme_end != std::string::npos, ErrorCode::InvalidArgument, "URL needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

inline httplib::Client make_client(const std::string& origin, double timeout)
{
    httplib::Client cli(origin);
    const auto sec = static_cast<time_t>(timeout);
    const auto usec = static_cast<time_t>((timeout - static_cast<double>(sec)) * 1e6);
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    return cli;
}

inline double number_at(const json& j, const char* key, const std::string& method)
{
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
        fail(ErrorCode::MalformedResponse, method + ": missing numeric field '" + key + "'");
    }
    return j.at(key).get<double>();
}

} // namespace detail

/// Bitcoin Core JSON-RPC over HTTP with basic auth.
class RpcClient {
public:
    explicit RpcClient(RpcEndpoint ep) : ep_(std::move(ep)) { ep_.check(); }

    [[nodiscard]] const RpcEndpoint& endpoint() const noexcept { return ep_; }

    json call(const std::string& method, json params = json::array()) const
    {
        const auto url = detail::split_url(ep_.url);
        const json body = {{"jsonrpc", "1.0"}, {"id", "feecast"}, {"method", method}, {"params", std::move(params)}};
        const auto payload = body.dump();
        for (int attempt = 0;; ++attempt) {
            auto cli = detail::make_client(url.origin, ep_.timeout);
            if (!ep_.user.empty() || !ep_.password.empty()) cli.set_basic_auth(ep_.user, ep_.password);
            auto res = cli.Post(url.path, payload, "application/json");
            if (!res) {
                if (attempt >= ep_.max_retries) {
                    fail(ErrorCode::RpcUnreachable, method + ": " + httplib::to_string(res.error()) + " after " +
                                                        std::to_string(attempt + 1) + " attempts");
                }
                std::this_thread::sleep_for(std::chrono::duration<double>(ep_.retry_delay));
                continue;
            }
            if (res->status == 401 || res->status == 403) fail(ErrorCode::RpcUnreachable, method + ": authentication rejected");
            json reply;
            try {
                reply = json::parse(res->body);
            } catch (const json::exception&) {
                fail(ErrorCode::MalformedResponse, method + ": HTTP " + std::to_string(res->status) + " with non-JSON body");
            }
            if (reply.contains("error") && !reply.at("error").is_null()) {
                const auto& err = reply.at("error");
                const int code = err.is_object() && err.contains("code") && err.at("code").is_number_integer() ? err.at("code").get<int>() : 0;
                const std::string msg = err.is_object() && err.contains("message") ? err.at("message").dump() : err.dump();
                // -8 invalid parameter (height out of range), -5 unknown block
                if (code == -8 || code == -5) fail(ErrorCode::UnknownBlock, method + ": " + msg);
                fail(ErrorCode::MalformedResponse, method + ": RPC error " + msg);
            }
            if (!reply.contains("result")) fail(ErrorCode::MalformedResponse, method + ": reply has no result");
            return reply.at("result");
        }
    }

    std::int64_t tip_height() const
    {
        const auto info = call("getblockchaininfo");
        return static_cast<std::int64_t>(detail::number_at(info, "blocks", "getblockchaininfo"));
    }

private:
    RpcEndpoint ep_;
};

/// Per-block statistics; the median fee rate is the node's 50th-percentile
/// feerate for the block (0 for a block without fee-paying transactions).
inline BlockStats fetch_block_stats(const RpcClient& rpc, std::int64_t height)
{
    const auto s = rpc.call("getblockstats", json::array({height}));
    BlockStats b;
    b.height = static_cast<std::int64_t>(detail::number_at(s, "height", "getblockstats"));
    b.time = static_cast<std::int64_t>(detail::number_at(s, "time", "getblockstats"));
    b.weight = detail::number_at(s, "total_weight", "getblockstats");
    if (!s.contains("feerate_percentiles") || !s.at("feerate_percentiles").is_array() || s.at("feerate_percentiles").size() != 5) {
        fail(ErrorCode::MalformedResponse, "getblockstats: feerate_percentiles must have 5 entries");
    }
    b.median_fee_rate = s.at("feerate_percentiles").at(2).get<double>();
    if (!s.contains("blockhash") || !s.at("blockhash").is_string()) fail(ErrorCode::MalformedResponse, "getblockstats: missing blockhash");
    const auto header = rpc.call("getblockheader", json::array({s.at("blockhash")}));
    b.version = detail::number_at(header, "version", "getblockheader");
    b.difficulty = detail::number_at(header, "difficulty", "getblockheader");
    const auto hps = rpc.call("getnetworkhashps", json::array({120, height}));
    if (!hps.is_number()) fail(ErrorCode::MalformedResponse, "getnetworkhashps: result is not a number");
    b.hash_rate = hps.get<double>();
    return b;
}

/// Mempool size from getmempoolinfo and per-transaction fee rates (sat/vB)
/// from the verbose listing.
inline MempoolSnapshot fetch_mempool_snapshot(const RpcClient& rpc, const std::function<std::int64_t()>& now = unix_now)
{
    const auto info = rpc.call("getmempoolinfo");
    const auto listing = rpc.call("getrawmempool", json::array({true}));
    if (!listing.is_object()) fail(ErrorCode::MalformedResponse, "getrawmempool: verbose listing is not an object");
    MempoolSnapshot snap;
    snap.size_mb = detail::number_at(info, "bytes", "getmempoolinfo") / 1e6;
    snap.taken_at = now();
    for (const auto& [txid, entry] : listing.items()) {
        const double vsize = detail::number_at(entry, "vsize", "getrawmempool");
        double fee_btc;
        if (entry.contains("fees") && entry.at("fees").is_object()) {
            fee_btc = detail::number_at(entry.at("fees"), "base", "getrawmempool");
        } else {
            fee_btc = detail::number_at(entry, "fee", "getrawmempool");
        }
        if (vsize <= 0 || fee_btc < 0) fail(ErrorCode::MalformedResponse, "getrawmempool: invalid entry " + txid);
        snap.fee_rates.push_back(fee_btc * 1e8 / vsize);
    }
    snap.tx_count = snap.fee_rates.size();
    return snap;
}

/// Walks a dot-separated path; numeric components index arrays. Strings that
/// hold a number are accepted, as many price APIs quote prices as strings.
inline double json_field(const json& root, const std::string& path)
{
    const json* node = &root;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto dot = path.find('.', start);
        if (dot == std::string::npos) dot = path.size();
        const auto key = path.substr(start, dot - start);
        if (node->is_object() && node->contains(key)) {
            node = &node->at(key);
        } else if (node->is_array() && !key.empty() && key.find_first_not_of("0123456789") == std::string::npos &&
                   std::stoul(key) < node->size()) {
            node = &node->at(std::stoul(key));
        } else {
            fail(ErrorCode::FieldMissing, "no field '" + path + "' in price response");
        }
        start = dot + 1;
    }
    if (node->is_number()) return node->get<double>();
    if (node->is_string()) {
        const auto v = feecast::detail::parse_double(node->get<std::string>());
        if (v && std::isfinite(*v)) return *v;
    }
    fail(ErrorCode::FieldMissing, "field '" + path + "' is not numeric");
}

inline PriceQuote fetch_price(const PriceSource& src, const std::function<std::int64_t()>& now = unix_now)
{
    require(!src.url.empty(), ErrorCode::InvalidArgument, "price URL is not configured");
    const auto url = detail::split_url(src.url);
    auto cli = detail::make_client(url.origin, src.timeout);
    auto res = cli.Get(url.path);
    if (!res) fail(ErrorCode::HttpFailure, "price request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) fail(ErrorCode::HttpFailure, "price request returned HTTP " + std::to_string(res->status));
    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::exception&) {
        fail(ErrorCode::HttpFailure, "price response is not JSON");
    }
    return {json_field(body, src.field_path), now()};
}

struct AssembleOptions {
    double freshness_window = 120; // seconds
    features::FeatureSpec features;
};

/// Record for a block with a live mempool snapshot and price. Mempool fee
/// statistics of an empty mempool are 0.
inline FeeRecord assemble_record(const BlockStats& stats, const MempoolSnapshot& snap, const PriceQuote& price,
                                 std::int64_t prev_block_time, const AssembleOptions& opt = {})
{
    auto stale = [&](std::int64_t t) { return std::abs(static_cast<double>(t - stats.time)) > opt.freshness_window; };
    if (stale(snap.taken_at)) fail(ErrorCode::StaleInputs, "mempool snapshot outside the freshness window");
    if (stale(price.taken_at)) fail(ErrorCode::StaleInputs, "price quote outside the freshness window");
    FeeRecord r;
    r.timestamp = stats.time;
    r.block_height = stats.height;
    r.block_weight = stats.weight;
    r.block_interval = static_cast<double>(stats.time - prev_block_time);
    r.block_version = stats.version;
    r.tx_count = static_cast<double>(snap.tx_count);
    r.mempool_size_mb = snap.size_mb;
    const auto s = features::summarize_rates(snap.fee_rates);
    r.min_fee_rate = s.min;
    r.max_fee_rate = s.max;
    r.avg_fee_rate = s.avg;
    r.median_fee_rate = s.median;
    r.fee_rate_10th = s.p10;
    r.fee_rate_90th = s.p90;
    r.fee_rate_std = s.std;
    r.difficulty = stats.difficulty;
    r.hash_rate = stats.hash_rate;
    r.bitcoin_price_usd = price.usd;
    const auto hist = features::histogram_from_rates(snap.fee_rates, opt.features.bin_edges);
    const auto ratios = features::fee_ratios(hist, opt.features.t_low, opt.features.t_high);
    r.hist_low_fee_ratio = ratios.low;
    r.hist_med_fee_ratio = ratios.med;
    r.hist_high_fee_ratio = ratios.high;
    r.fee_diversity = features::fee_diversity(hist);
    r.block_median_fee_rate = stats.median_fee_rate;
    return r;
}

/// Record for a block whose mempool state can no longer be observed: block
/// fields are filled, mempool-derived fields and price are missing.
inline FeeRecord backfill_record(const BlockStats& stats, std::int64_t prev_block_time)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    FeeRecord r;
    r.timestamp = stats.time;
    r.block_height = stats.height;
    r.block_weight = stats.weight;
    r.block_interval = static_cast<double>(stats.time - prev_block_time);
    r.block_version = stats.version;
    r.difficulty = stats.difficulty;
    r.hash_rate = stats.hash_rate;
    r.block_median_fee_rate = stats.median_fee_rate;
    for (auto c : {Column::tx_count, Column::mempool_size_mb, Column::min_fee_rate, Column::max_fee_rate, Column::avg_fee_rate,
                   Column::median_fee_rate, Column::fee_rate_10th, Column::fee_rate_90th, Column::fee_rate_std,
                   Column::bitcoin_price_usd, Column::hist_low_fee_ratio, Column::hist_med_fee_ratio, Column::hist_high_fee_ratio,
                   Column::fee_diversity}) {
        set_value(r, c, nan);
    }
    return r;
}

struct PollOptions {
    double poll_interval = 10;
    double backoff_base = 1;
    double backoff_cap = 60;
    AssembleOptions assemble;
    std::optional<std::int64_t> start_height; // last height already stored; unset = begin at the current tip
    std::size_t max_blocks = 0;               // 0 = unbounded
    std::function<void(double)> sleep = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
    std::function<bool()> stop = [] { return false; };
    std::function<std::int64_t()> now = unix_now;
    std::function<void(const std::string&)> log = [](const std::string& m) { std::cerr << m << '\n'; };
};

/// Appends one record per new block until `stop` returns true or max_blocks
/// records were written. Blocks mined while the loop could not observe them
/// are backfilled; failures are logged and retried with capped exponential
/// backoff. Returns the number of records appended.
inline std::size_t poll_loop(const RpcClient& rpc, const PriceSource& price, const std::function<void(const FeeRecord&)>& sink,
                             const PollOptions& opt = {})
{
    std::optional<std::int64_t> last = opt.start_height;
    std::optional<std::int64_t> prev_time;
    std::size_t appended = 0;
    int failures = 0;
    while (!opt.stop()) {
        try {
            const auto tip = rpc.tip_height();
            if (!last) last = tip - 1;
            for (auto h = *last + 1; h <= tip; ++h) {
                const auto stats = fetch_block_stats(rpc, h);
                if (!prev_time) prev_time = h > 0 ? fetch_block_stats(rpc, h - 1).time : stats.time;
                FeeRecord rec;
                if (h == tip) {
                    const auto snap = fetch_mempool_snapshot(rpc, opt.now);
                    const auto quote = fetch_price(price, opt.now);
                    try {
                        rec = assemble_record(stats, snap, quote, *prev_time, opt.assemble);
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::StaleInputs) throw;
                        opt.log(std::string("block ") + std::to_string(h) + ": " + e.what() + "; storing block fields only");
                        rec = backfill_record(stats, *prev_time);
                    }
                } else {
                    rec = backfill_record(stats, *prev_time);
                }
                sink(rec);
                last = h;
                prev_time = stats.time;
                if (opt.max_blocks && ++appended >= opt.max_blocks) return appended;
                if (!opt.max_blocks) ++appended;
            }
            failures = 0;
            opt.sleep(opt.poll_interval);
        } catch (const Error& e) {
            const double delay = std::min(opt.backoff_cap, opt.backoff_base * std::pow(2.0, failures));
            ++failures;
            opt.log(std::string("poll failed: ") + e.what() + "; retrying in " + format_double(delay) + " s");
            opt.sleep(delay);
        }
    }
    return appended;
}

} // namespace feecast::ingest
