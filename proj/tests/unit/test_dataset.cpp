#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "feecast/dataset.hpp"
#include "feecast/stats.hpp"
#include "helpers.hpp"

using namespace feecast;

namespace {

Dataset parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_dataset(in);
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(Schema, CanonicalOrderHasTimestampFirstAndTargetLast)
{
    EXPECT_EQ(kColumnNames.front(), "timestamp");
    EXPECT_EQ(kColumnNames.back(), "block_median_fee_rate");
    EXPECT_EQ(feature_columns().size(), kColumnCount - 2);
    for (std::size_t i = 0; i < kColumnCount; ++i) EXPECT_EQ(index_of(*column_from_name(kColumnNames[i])), i);
    EXPECT_FALSE(column_from_name("nope").has_value());
}

TEST(LoadDataset, HeaderOnlyGivesEmptyDataset)
{
    const auto d = parse(csv_header() + "\n");
    EXPECT_EQ(d.size(), 0u);
}

TEST(LoadDataset, EmptyFileIsAnError)
{
    EXPECT_EQ(code_of([] { parse(""); }), ErrorCode::EmptyFile);
}

TEST(LoadDataset, MissingOrReorderedColumnIsAnError)
{
    auto header = csv_header();
    const auto pos = header.find(",tx_count");
    auto missing = header;
    missing.erase(pos, std::string(",tx_count").size());
    EXPECT_EQ(code_of([&] { parse(missing + "\n"); }), ErrorCode::MissingColumn);

    std::string swapped = "block_height,timestamp" + header.substr(std::string("timestamp,block_height").size());
    EXPECT_EQ(code_of([&] { parse(swapped + "\n"); }), ErrorCode::MissingColumn);
}

TEST(LoadDataset, ExtraColumnsAreIgnored)
{
    const auto d0 = testutil::synthetic(3);
    std::ostringstream text;
    text << csv_header() << ",extra\n";
    for (const auto& r : d0.records) text << csv_row(r) << ",99\n";
    const auto d = parse(text.str());
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.records, d0.records);
}

TEST(LoadDataset, MalformedNumberReportsRowAndColumn)
{
    const auto d0 = testutil::synthetic(2);
    auto row = csv_row(d0.records[1]);
    row.replace(row.rfind(','), std::string::npos, ",abc");
    const std::string text = csv_header() + "\n" + csv_row(d0.records[0]) + "\n" + row + "\n";
    try {
        parse(text);
        FAIL() << "expected MalformedNumber";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedNumber);
        EXPECT_NE(std::string(e.what()).find("block_median_fee_rate"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
    }
}

TEST(LoadDataset, MissingFieldsBecomeNaN)
{
    auto d0 = testutil::synthetic(1);
    set_value(d0.records[0], Column::tx_count, std::nan(""));
    std::ostringstream text;
    write_dataset(d0, text);
    const auto d = parse(text.str());
    EXPECT_TRUE(std::isnan(d.records[0].tx_count));
}

TEST(SaveDataset, EmptyDatasetWritesHeaderOnly)
{
    std::ostringstream out;
    write_dataset(Dataset{}, out);
    EXPECT_EQ(out.str(), csv_header() + "\n");
}

TEST(SaveDataset, ThreeRecordsGiveFourLines)
{
    const auto path = testutil::temp_path("three.csv");
    save_dataset(testutil::synthetic(3), path.string());
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 4);
}

TEST(SaveDataset, RoundTripIsExactOnRandomRecords)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    Dataset d;
    for (int i = 0; i < 100; ++i) {
        FeeRecord r;
        r.timestamp = 1600000000 + i;
        r.block_height = 700000 + i;
        for (std::size_t c = 2; c < kColumnCount; ++c) set_value(r, static_cast<Column>(c), u(rng) * std::pow(10.0, i % 7 - 3));
        d.records.push_back(r);
    }
    const auto path = testutil::temp_path("roundtrip.csv");
    save_dataset(d, path.string());
    const auto back = load_dataset(path.string());
    EXPECT_EQ(back.records, d.records);
    const auto path2 = testutil::temp_path("roundtrip2.csv");
    save_dataset(back, path2.string());
    std::ifstream a(path), b(path2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(SaveDataset, UnwritablePathIsIoFailure)
{
    EXPECT_EQ(code_of([] { save_dataset(Dataset{}, "/nonexistent_dir/x.csv"); }), ErrorCode::IoFailure);
    EXPECT_EQ(code_of([] { load_dataset("/nonexistent_dir/x.csv"); }), ErrorCode::IoFailure);
}

TEST(LoadDataset, IsoTimestampsAreAccepted)
{
    auto d0 = testutil::synthetic(1);
    auto row = csv_row(d0.records[0]);
    row.replace(0, row.find(','), "2024-01-02T03:04:05Z");
    const auto d = parse(csv_header() + "\n" + row + "\n");
    EXPECT_EQ(d.records[0].timestamp, 1704164645);
}

TEST(Validate, ValidRatiosPass)
{
    auto d = testutil::synthetic(1);
    auto& r = d.records[0];
    r.hist_low_fee_ratio = 0.5;
    r.hist_med_fee_ratio = 0.3;
    r.hist_high_fee_ratio = 0.2;
    const auto rep = validate(d);
    EXPECT_EQ(rep.count("ratio_sum"), 0u);
    EXPECT_EQ(rep.count("ratio_range"), 0u);
}

TEST(Validate, PercentileOrderViolation)
{
    auto d = testutil::synthetic(1);
    d.records[0].fee_rate_10th = d.records[0].fee_rate_90th + 1;
    const auto rep = validate(d);
    EXPECT_EQ(rep.count("percentile_order"), 1u);
    EXPECT_EQ(rep.violations.front().row, 0u);
}

TEST(Validate, SyntheticRecordsAreValid)
{
    const auto rep = validate(testutil::synthetic(1000, 3));
    EXPECT_TRUE(rep.ok()) << rep.violations.size() << " violations, first: " << rep.violations.front().rule;
}

TEST(Validate, EachRuleFires)
{
    auto base = testutil::synthetic(2);
    auto check = [&](auto mutate, const char* rule) {
        auto d = base;
        mutate(d);
        EXPECT_GE(validate(d).count(rule), 1u) << rule;
    };
    check([](Dataset& d) { d.records[0].min_fee_rate = -1; }, "negative_fee");
    check([](Dataset& d) { d.records[0].avg_fee_rate = d.records[0].max_fee_rate + 1; }, "min_avg_max_order");
    check([](Dataset& d) { d.records[0].hist_low_fee_ratio = 1.5; }, "ratio_range");
    check([](Dataset& d) { d.records[0].hist_low_fee_ratio += 0.1; }, "ratio_sum");
    check([](Dataset& d) { d.records[0].fee_diversity = 1.2; }, "diversity_range");
    check([](Dataset& d) { d.records[1].block_height = d.records[0].block_height; }, "height_monotonic");
    check([](Dataset& d) { d.records[1].timestamp = d.records[0].timestamp - 1; }, "timestamp_monotonic");
}

TEST(Validate, MissingValuesAreExempt)
{
    auto d = testutil::synthetic(1);
    for (auto c : {Column::min_fee_rate, Column::hist_low_fee_ratio, Column::fee_diversity}) set_value(d.records[0], c, std::nan(""));
    EXPECT_TRUE(validate(d).ok());
}

TEST(Validate, PerRecordRulesAreOrderIndependent)
{
    auto d = testutil::synthetic(50, 9);
    d.records[10].fee_rate_10th = 1e9;
    d.records[30].min_fee_rate = -2;
    std::vector<Violation> a, b;
    for (std::size_t i = 0; i < d.size(); ++i) validate_record(d.records[i], i, a);
    for (std::size_t i = d.size(); i-- > 0;) validate_record(d.records[i], i, b);
    std::sort(b.begin(), b.end(), [](const Violation& x, const Violation& y) { return x.row < y.row; });
    EXPECT_EQ(a, b);
}

TEST(NearestRank, MatchesDefinition)
{
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    EXPECT_EQ(stats::nearest_rank(v, 1), 1);
    EXPECT_EQ(stats::nearest_rank(v, 99), 99);
    EXPECT_EQ(stats::nearest_rank(v, 50), 50);
    EXPECT_EQ(stats::nearest_rank(v, 100), 100);
    EXPECT_EQ(stats::nearest_rank(v, 0), 1);
    const std::vector<double> w{15, 20, 35, 40, 50};
    EXPECT_EQ(stats::nearest_rank(w, 30), 20);
    EXPECT_EQ(stats::nearest_rank(w, 40), 20);
    EXPECT_EQ(stats::nearest_rank(w, 50), 35);
}
