#include "hypersweep/ledger.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include "hypersweep/fsutil.hpp"
#include "testutil.hpp"

using namespace hypersweep;
using namespace hypersweep::ledger;

namespace {

std::vector<LedgerRow> fixture_rows(const char* name) {
    return load_csv(testutil::fixtures_dir() / name);
}

std::vector<StatedCheck> fixture_checks(const char* name) {
    return parse_stated_totals(hypersweep::read_file(testutil::fixtures_dir() / name));
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("detection compute ledger matches its stated per-dataset totals") {
    const auto rows = fixture_rows("transformer_compute.csv");
    REQUIRE(rows.size() == 30);
    const auto checks = fixture_checks("transformer_compute_totals.json");
    REQUIRE(checks.size() == 4);

    for (const auto& check : checks) {
        CAPTURE(check.table_id);
        const auto subset = filter_rows(rows, check.where);
        const auto issues = verify(subset, check.totals, 0.05, check.table_id);
        for (const auto& d : issues) {
            CAPTURE(d.column);
            CAPTURE(d.stated);
            CAPTURE(d.computed);
        }
        CHECK(issues.empty());
    }
}

TEST_CASE("campaign summary audit flags exactly the one bad total") {
    const auto rows = fixture_rows("campaign_summary.csv");
    REQUIRE(rows.size() == 3);
    const auto checks = fixture_checks("campaign_summary_totals.json");
    REQUIRE(checks.size() == 1);

    const auto issues =
        verify(filter_rows(rows, checks[0].where), checks[0].totals, 0.05,
               checks[0].table_id);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].column == "epochs");
    CHECK(issues[0].stated == doctest::Approx(35200.0));
    CHECK(issues[0].computed == doctest::Approx(35400.0));
    CHECK(issues[0].delta == doctest::Approx(200.0));
}

TEST_CASE("aggregation is invariant under row order") {
    auto rows = fixture_rows("transformer_compute.csv");
    const auto baseline = aggregate(rows, {"dataset"});

    std::mt19937_64 rng(17);
    for (int round = 0; round < 20; ++round) {
        std::shuffle(rows.begin(), rows.end(), rng);
        const auto shuffled = aggregate(rows, {"dataset"});
        REQUIRE(shuffled.groups.size() == baseline.groups.size());
        for (std::size_t g = 0; g < baseline.groups.size(); ++g) {
            CHECK(shuffled.groups[g].key == baseline.groups[g].key);
            for (const auto& [column, sum] : baseline.groups[g].totals.sums) {
                CHECK(shuffled.groups[g].totals.sums.at(column) == doctest::Approx(sum));
            }
        }
        CHECK(shuffled.grand.sums.at("gpu_hours") ==
              doctest::Approx(baseline.grand.sums.at("gpu_hours")));
    }
}

TEST_CASE("per-dataset groups carry the expected sums") {
    const auto rows = fixture_rows("transformer_compute.csv");
    const auto table = aggregate(rows, {"dataset"});
    REQUIRE(table.groups.size() == 3);  // keys sort: dota, rareplanes, xview
    CHECK(table.groups[0].key.at("dataset") == "dota");
    CHECK(table.groups[0].totals.sums.at("gpu_hours") == doctest::Approx(580.4));
    CHECK(table.groups[1].key.at("dataset") == "rareplanes");
    CHECK(table.groups[1].totals.sums.at("gpu_hours") == doctest::Approx(241.2));
    CHECK(table.groups[1].totals.sums.at("params_millions") == doctest::Approx(674.6));
    CHECK(table.groups[2].key.at("dataset") == "xview");
    CHECK(table.groups[2].totals.sums.at("vram_gb") == doctest::Approx(167.4));

    CHECK(table.grand.sums.at("models") == doctest::Approx(30.0));
    // params cells exist only on one dataset's rows; the others count missing
    CHECK(table.grand.missing.at("params_millions") == 20);
    CHECK(table.grand.sums.at("params_millions") == doctest::Approx(674.6));

    CHECK_THROWS_AS(aggregate(rows, {"flavor"}), UnknownGroupKeyError);
}

TEST_CASE("verify accepts its own computed totals and honors tolerance") {
    const auto rows = fixture_rows("campaign_summary.csv");
    const auto grand = aggregate(rows, {}).grand;

    std::map<std::string, double> stated;
    for (const auto& [column, sum] : grand.sums) stated[column] = sum;
    CHECK(verify(rows, stated).empty());

    stated["gpu_hours"] = grand.sums.at("gpu_hours") + 0.04;  // inside 0.05
    CHECK(verify(rows, stated).empty());
    stated["gpu_hours"] = grand.sums.at("gpu_hours") + 0.06;  // outside
    CHECK(verify(rows, stated).size() == 1);

    CHECK_THROWS_AS(verify(rows, {{"total_flops", 1.0}}), LedgerError);
}

TEST_CASE("filter_rows matches token columns exactly") {
    const auto rows = fixture_rows("transformer_compute.csv");
    CHECK(filter_rows(rows, {{"dataset", "dota"}}).size() == 10);
    CHECK(filter_rows(rows, {{"dataset", "dota"}, {"network", "ssd"}}).size() == 1);
    CHECK(filter_rows(rows, {{"dataset", "imagenet"}}).empty());
    CHECK(filter_rows(rows, {}).size() == rows.size());
}

TEST_CASE("report renders aligned columns with flags for missing data") {
    std::vector<LedgerRow> rows(2);
    rows[0].application = "detection";
    rows[0].network = "10";
    rows[0].models = 30;
    rows[0].params_millions = 2024;
    rows[0].imagery_gb = 1370;
    rows[0].epochs = 9000;
    rows[0].wall_hours = 2142;
    rows[1].application = "deforestation";
    rows[1].network = "1";
    rows[1].models = 60;
    // params intentionally absent
    rows[1].imagery_gb = 31200;
    rows[1].epochs = 12000;
    rows[1].wall_hours = 1380.5;

    const std::string text = report(rows);
    CHECK(report(rows) == text);  // byte-stable

    const auto lines = lines_of(text);
    REQUIRE(lines.size() == 4);  // header, two rows, TOTAL
    CHECK(lines[0].find("Application") == 0);
    CHECK(lines[0].find("Parameters (M)") != std::string::npos);
    for (const auto& line : lines) CHECK(line.size() == lines[0].size());

    CHECK(lines[2].find(" ?") != std::string::npos);       // the absent params cell
    CHECK(lines[2].find("1380.5") != std::string::npos);   // fractional kept
    CHECK(lines[3].find("TOTAL") == 0);
    CHECK(lines[3].find("2024*") != std::string::npos);    // total built on a gap
    CHECK(lines[3].find("90") != std::string::npos);       // 30 + 60 models

    CHECK(lines_of(report({})).size() == 1);  // header only
}

TEST_CASE("csv round-trips rows including absent cells") {
    std::vector<LedgerRow> rows(2);
    rows[0].application = "burned-area";
    rows[0].network = "unet";
    rows[0].dataset = "sentinel";
    rows[0].gpu_hours = 0.1 + 0.2;  // full precision survives
    rows[0].epochs = 14400;
    rows[1].application = "x";
    rows[1].vram_gb = 1.0 / 3.0;

    const auto back = from_csv(to_csv(rows));
    REQUIRE(back.size() == 2);
    CHECK(back == rows);
    CHECK(back[0].gpu_hours == rows[0].gpu_hours);  // exact, not approximate
    CHECK_FALSE(back[1].models.has_value());
}

TEST_CASE("csv rejects malformed input and delimiter-bearing tokens") {
    CHECK_THROWS_AS(from_csv("wrong,header\n"), LedgerError);
    CHECK_THROWS_AS(from_csv(""), LedgerError);

    const std::string header =
        "application,network,dataset,models,params_millions,gpu_hours,vram_gb,"
        "imagery_gb,epochs,wall_hours";
    CHECK_THROWS_AS(from_csv(header + "\na,b,c,1,2\n"), LedgerError);
    CHECK_THROWS_AS(from_csv(header + "\na,b,c,oops,,,,,,\n"), LedgerError);

    std::vector<LedgerRow> rows(1);
    rows[0].application = "a,b";
    CHECK_THROWS_AS(to_csv(rows), LedgerError);
}

TEST_CASE("appending to a ledger file keeps one header and row order") {
    testutil::ScratchDir scratch("ledger-append");
    const auto path = scratch.path / "ledger.csv";

    std::vector<LedgerRow> first(1), second(1);
    first[0].application = "one";
    first[0].models = 1;
    second[0].application = "two";
    second[0].models = 2;

    append_csv(path, first);
    append_csv(path, second);
    const auto rows = load_csv(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].application == "one");
    CHECK(rows[1].application == "two");

    const std::string raw = hypersweep::read_file(path);
    CHECK(raw.find("application") == raw.rfind("application"));  // single header
}

TEST_CASE("stated totals documents are validated") {
    CHECK_THROWS_AS(parse_stated_totals("[]"), LedgerError);
    CHECK_THROWS_AS(parse_stated_totals(R"({"checks": [{"totals": {"bogus": 1}}]})"),
                    LedgerError);
    CHECK_THROWS_AS(
        parse_stated_totals(R"({"checks": [{"where": {"gpu_hours": "x"}, "totals": {}}]})"),
        LedgerError);

    const auto checks = parse_stated_totals(R"({"checks": [
        {"table": "t", "where": {"dataset": "d"}, "totals": {"gpu_hours": 1.5}}
    ]})");
    REQUIRE(checks.size() == 1);
    CHECK(checks[0].table_id == "t");
    CHECK(checks[0].where.at("dataset") == "d");
    CHECK(checks[0].totals.at("gpu_hours") == 1.5);
}
