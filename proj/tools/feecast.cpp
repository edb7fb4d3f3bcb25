// Command-line front end: fetch, preprocess, backtest, test, forecast,
// correlations and synth.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "feecast/feecast.hpp"

namespace fs = std::filesystem;
using namespace feecast;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

config::PipelineConfig load(const std::string& path)
{
    if (path.empty()) return config::default_config();
    auto res = config::load_config(path);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    return res.config;
}

Dataset clip_all(const Dataset& d, const config::PipelineConfig& cfg)
{
    if (!cfg.clip_enabled || d.empty()) return d;
    return prep::apply_clip(d, prep::fit_clip(d, cfg.clip, cfg.clip_columns));
}

void print_summary(const eval::MetricsReport& r)
{
    std::cout << r.model << ": MAE " << format_double(r.mae) << "  RMSE " << format_double(r.rmse) << "  U "
              << format_double(r.theils_u) << "  (" << r.folds.size() << " fold" << (r.folds.size() == 1 ? "" : "s") << ", "
              << report::detail::fixed(r.runtime_seconds, 1) << " s)\n";
}

int cmd_fetch(const std::string& cfg_path, const std::string& out, std::size_t blocks)
{
    auto cfg = load(cfg_path);
    const ingest::RpcClient rpc(cfg.rpc);
    const bool fresh = !fs::exists(out) || fs::file_size(out) == 0;
    std::ofstream file(out, std::ios::app);
    if (!file) fail(ErrorCode::IoFailure, "cannot open " + out);
    if (fresh) file << csv_header() << '\n' << std::flush;
    auto opt = cfg.poll;
    opt.max_blocks = blocks;
    opt.stop = [] { return g_stop.load(); };
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const auto n = ingest::poll_loop(rpc, cfg.price, [&](const FeeRecord& r) { file << csv_row(r) << '\n' << std::flush; }, opt);
    std::cout << "appended " << n << " records to " << out << '\n';
    return 0;
}

int cmd_preprocess(const std::string& cfg_path, const std::string& in, const std::string& out, bool clip)
{
    const auto cfg = load(cfg_path);
    auto d = load_dataset(in);
    const auto before = d.size();
    d = prep::fill_missing(prep::dedup(d));
    // Evaluation inputs skip this: backtest and test clip per fold on
    // training rows, and whole-file bounds would leak test quantiles.
    if (clip) d = clip_all(d, cfg);
    const auto report = validate(d);
    if (!report.ok()) std::cerr << "warning: " << report.violations.size() << " validation violations after preprocessing\n";
    save_dataset(d, out);
    std::cout << "wrote " << d.size() << " rows (" << before - d.size() << " duplicates removed) to " << out << '\n';
    return 0;
}

int cmd_backtest(const std::string& cfg_path, const std::string& in, const std::string& model, const std::string& dir, bool plots)
{
    const auto cfg = load(cfg_path);
    const auto d = load_dataset(in);
    const auto spec = cfg.spec_for(eval::model_kind_from_string(model));
    const auto rep = eval::run_cv(eval::factory_for(spec), d, cfg.folds_for(d.size()), cfg.eval_options());
    report::write_report(rep, dir, plots);
    print_summary(rep);
    return 0;
}

int cmd_test(const std::string& cfg_path, const std::string& in, const std::string& model, const std::string& dir, bool plots)
{
    const auto cfg = load(cfg_path);
    const auto d = load_dataset(in);
    const auto spec = cfg.spec_for(eval::model_kind_from_string(model));
    const auto rep = eval::run_test(eval::factory_for(spec), d, cfg.cv.test_len, cfg.eval_options());
    report::write_report(rep, dir, plots, rep.model + "_test");
    print_summary(rep);
    return 0;
}

int cmd_forecast(const std::string& cfg_path, const std::string& in, const std::string& model, long horizon, const std::string& out)
{
    if (horizon <= 0) fail(ErrorCode::HorizonNonPositive, "horizon must be >= 1");
    const auto cfg = load(cfg_path);
    const auto d = clip_all(load_dataset(in), cfg);
    require(!d.empty(), ErrorCode::EmptyInput, "dataset has no rows");
    auto f = eval::make_forecaster(cfg.spec_for(eval::model_kind_from_string(model)));
    const auto values = f->fit_forecast(d, static_cast<std::size_t>(horizon));
    report::write_text(out, report::forecast_csv(values, d.records.back().block_height + 1));
    std::cout << "wrote " << values.size() << " forecasts to " << out << '\n';
    return 0;
}

int cmd_correlations(const std::string& in, const std::string& svg, const std::string& matrix)
{
    const auto c = eval::correlation_matrix(load_dataset(in));
    report::write_text(svg, report::heatmap_svg(c));
    report::write_text(matrix, report::correlation_csv(c));
    for (std::size_t i = 0; i < c.names.size(); ++i) {
        if (c.constant[i]) std::cerr << "warning: column " << c.names[i] << " is constant; its correlations are reported as 0\n";
    }
    std::cout << "wrote " << svg << " and " << matrix << '\n';
    return 0;
}

int cmd_synth(std::size_t rows, std::uint64_t seed, const std::string& out)
{
    synthetic::SyntheticConfig sc;
    sc.n_rows = rows;
    sc.seed = seed;
    save_dataset(synthetic::generate(sc), out);
    std::cout << "wrote " << rows << " synthetic rows to " << out << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bitcoin fee-rate forecasting pipeline"};
    app.require_subcommand(1);
    std::string cfg_path, in, out, model = "sarimax", dir = "reports", svg = "heatmap.svg", matrix = "matrix.csv";
    std::size_t blocks = 0, rows = 1500;
    std::uint64_t seed = 42;
    long horizon = 144;
    bool no_plots = false, no_clip = false;
    const std::string models = "sarimax|trend|t2v|gbm|hybrid|naive";

    auto* fetch = app.add_subcommand("fetch", "Poll a node and append one record per new block");
    fetch->add_option("--config", cfg_path, "TOML config");
    fetch->add_option("--out", out, "Output CSV (appended)")->required();
    fetch->add_option("--blocks", blocks, "Stop after N records (0 = until interrupted)");

    auto* pre = app.add_subcommand("preprocess", "De-duplicate, fill and clip a dataset");
    pre->add_option("--config", cfg_path, "TOML config");
    pre->add_option("--in", in, "Input CSV")->required();
    pre->add_option("--out", out, "Output CSV")->required();
    pre->add_flag("--no-clip", no_clip, "Leave clipping to the evaluation harness");

    auto* bt = app.add_subcommand("backtest", "Expanding-window cross-validation");
    auto* ts = app.add_subcommand("test", "Hold-out evaluation on the final rows");
    for (auto* c : {bt, ts}) {
        c->add_option("--config", cfg_path, "TOML config");
        c->add_option("--in", in, "Preprocessed CSV")->required();
        c->add_option("--model", model, models)->required();
        c->add_option("--report", dir, "Report directory");
        c->add_flag("--no-plots", no_plots, "Skip SVG plots");
    }

    auto* fc = app.add_subcommand("forecast", "Fit on all rows and forecast the next blocks");
    fc->add_option("--config", cfg_path, "TOML config");
    fc->add_option("--in", in, "Preprocessed CSV")->required();
    fc->add_option("--model", model, models)->required();
    fc->add_option("--horizon", horizon, "Blocks to forecast");
    fc->add_option("--out", out, "Forecast CSV")->required();

    auto* cor = app.add_subcommand("correlations", "Pearson correlation heatmap and matrix");
    cor->add_option("--in", in, "Input CSV")->required();
    cor->add_option("--out", svg, "Heatmap SVG");
    cor->add_option("--matrix", matrix, "Matrix CSV");

    auto* syn = app.add_subcommand("synth", "Write a synthetic dataset");
    syn->add_option("--rows", rows, "Row count");
    syn->add_option("--seed", seed, "Random seed");
    syn->add_option("--out", out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*fetch) return cmd_fetch(cfg_path, out, blocks);
        if (*pre) return cmd_preprocess(cfg_path, in, out, !no_clip);
        if (*bt) return cmd_backtest(cfg_path, in, model, dir, !no_plots);
        if (*ts) return cmd_test(cfg_path, in, model, dir, !no_plots);
        if (*fc) return cmd_forecast(cfg_path, in, model, horizon, out);
        if (*cor) return cmd_correlations(in, svg, matrix);
        if (*syn) return cmd_synth(rows, seed, out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
