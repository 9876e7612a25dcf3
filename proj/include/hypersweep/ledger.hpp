#pragma once
// Per-model compute accounting: CSV-backed rows, grouped aggregation with
// compensated sums, audit of stated totals, and a fixed-width summary table.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypersweep::ledger {

struct LedgerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownGroupKeyError : LedgerError {
    explicit UnknownGroupKeyError(const std::string& key)
        : LedgerError("unknown group key: '" + key + "'") {}
};

// One accounting row. Token fields may be empty; numeric fields may be
// absent entirely (blank CSV cell), which aggregation flags rather than
// silently zeroing.
struct LedgerRow {
    std::string application;
    std::string network;
    std::string dataset;
    std::optional<double> models;
    std::optional<double> params_millions;
    std::optional<double> gpu_hours;
    std::optional<double> vram_gb;
    std::optional<double> imagery_gb;
    std::optional<double> epochs;
    std::optional<double> wall_hours;

    bool operator==(const LedgerRow&) const = default;
};

inline constexpr std::array<std::string_view, 3> kTokenColumns = {"application", "network",
                                                                  "dataset"};
inline constexpr std::array<std::string_view, 7> kNumericColumns = {
    "models", "params_millions", "gpu_hours", "vram_gb",
    "imagery_gb", "epochs", "wall_hours"};

std::optional<double> numeric_field(const LedgerRow& row, std::string_view column);

struct ColumnTotals {
    std::map<std::string, double> sums;          // column -> compensated sum
    std::map<std::string, std::size_t> missing;  // column -> absent-cell count
};

struct AggregateGroup {
    std::map<std::string, std::string> key;  // group key -> token value
    ColumnTotals totals;
};

struct AggregateTable {
    std::vector<AggregateGroup> groups;  // sorted by key values
    ColumnTotals grand;
};

// Sums every numeric column per group of the given token keys (subset of
// kTokenColumns; empty = single group). Throws UnknownGroupKeyError.
AggregateTable aggregate(const std::vector<LedgerRow>& rows,
                         const std::vector<std::string>& group_keys);

struct Discrepancy {
    std::string table_id;
    std::string column;
    double stated = 0.0;
    double computed = 0.0;
    double delta = 0.0;  // |stated - computed|, only emitted when > tolerance
};

// Recomputes grand totals and reports every stated column off by more than
// the tolerance. Empty result means fully consistent.
std::vector<Discrepancy> verify(const std::vector<LedgerRow>& rows,
                                const std::map<std::string, double>& stated_totals,
                                double tolerance = 0.05, const std::string& table_id = "");

// Fixed-width summary in the campaign-table column order (Application,
// Networks, Models, Parameters (M), Imagery (GB), Epochs, Time (h)) with a
// TOTAL row. Missing cells render as '?'; affected totals carry a '*' flag.
// Byte-stable for identical input.
std::string report(const std::vector<LedgerRow>& rows);

// Append-only CSV storage with a fixed header in LedgerRow field order.
std::string to_csv(const std::vector<LedgerRow>& rows);
std::vector<LedgerRow> from_csv(std::string_view text);
void append_csv(const std::filesystem::path& path, const std::vector<LedgerRow>& rows);
std::vector<LedgerRow> load_csv(const std::filesystem::path& path);

// Stated-totals document:
//   {"checks": [{"table": ..., "where": {token col -> value}, "totals": {col -> value}}]}
struct StatedCheck {
    std::string table_id;
    std::map<std::string, std::string> where;  // equality filter on token columns
    std::map<std::string, double> totals;
};
std::vector<StatedCheck> parse_stated_totals(std::string_view json_text);
std::vector<LedgerRow> filter_rows(const std::vector<LedgerRow>& rows,
                                   const std::map<std::string, std::string>& where);

}  // namespace hypersweep::ledger
