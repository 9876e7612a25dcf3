#include "hypersweep/ledger.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace hypersweep::ledger {

namespace {

using nlohmann::json;

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

std::optional<double>& numeric_slot(LedgerRow& row, std::string_view column) {
    if (column == "models") return row.models;
    if (column == "params_millions") return row.params_millions;
    if (column == "gpu_hours") return row.gpu_hours;
    if (column == "vram_gb") return row.vram_gb;
    if (column == "imagery_gb") return row.imagery_gb;
    if (column == "epochs") return row.epochs;
    if (column == "wall_hours") return row.wall_hours;
    throw UnknownGroupKeyError(std::string(column));
}

const std::string& token_field(const LedgerRow& row, std::string_view column) {
    if (column == "application") return row.application;
    if (column == "network") return row.network;
    if (column == "dataset") return row.dataset;
    throw UnknownGroupKeyError(std::string(column));
}

ColumnTotals column_totals(const std::vector<const LedgerRow*>& rows) {
    ColumnTotals totals;
    for (std::string_view column : kNumericColumns) {
        KahanSum sum;
        std::size_t missing = 0;
        for (const LedgerRow* row : rows) {
            const auto value = numeric_field(*row, column);
            if (value) {
                sum.add(*value);
            } else {
                ++missing;  // treated as 0 but flagged
            }
        }
        totals.sums[std::string(column)] = sum.sum;
        totals.missing[std::string(column)] = missing;
    }
    return totals;
}

// integral values print without decimals; everything else with one decimal,
// matching the precision of the source tables
std::string format_value(double v) {
    const double rounded = std::round(v);
    char buf[64];
    if (std::abs(v - rounded) < 1e-9) {
        std::snprintf(buf, sizeof buf, "%.0f", rounded);
    } else {
        std::snprintf(buf, sizeof buf, "%.1f", v);
    }
    return buf;
}

std::string format_csv_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip
    return std::string(buf, ptr);
}

void require_token_ok(const std::string& token) {
    if (token.find_first_of(",\"\n\r") != std::string::npos) {
        throw LedgerError("token contains CSV delimiter characters: '" + token + "'");
    }
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

const std::string kCsvHeader =
    "application,network,dataset,models,params_millions,gpu_hours,vram_gb,imagery_gb,"
    "epochs,wall_hours";

}  // namespace

std::optional<double> numeric_field(const LedgerRow& row, std::string_view column) {
    return numeric_slot(const_cast<LedgerRow&>(row), column);
}

AggregateTable aggregate(const std::vector<LedgerRow>& rows,
                         const std::vector<std::string>& group_keys) {
    for (const auto& key : group_keys) {
        if (std::find(kTokenColumns.begin(), kTokenColumns.end(), key) ==
            kTokenColumns.end()) {
            throw UnknownGroupKeyError(key);
        }
    }

    std::map<std::vector<std::string>, std::vector<const LedgerRow*>> grouped;
    std::vector<const LedgerRow*> all;
    for (const auto& row : rows) {
        std::vector<std::string> key;
        key.reserve(group_keys.size());
        for (const auto& k : group_keys) key.push_back(token_field(row, k));
        grouped[key].push_back(&row);
        all.push_back(&row);
    }

    AggregateTable table;
    for (const auto& [key, members] : grouped) {
        AggregateGroup group;
        for (std::size_t i = 0; i < group_keys.size(); ++i) group.key[group_keys[i]] = key[i];
        group.totals = column_totals(members);
        table.groups.push_back(std::move(group));
    }
    table.grand = column_totals(all);
    return table;
}

std::vector<Discrepancy> verify(const std::vector<LedgerRow>& rows,
                                const std::map<std::string, double>& stated_totals,
                                double tolerance, const std::string& table_id) {
    const ColumnTotals grand = aggregate(rows, {}).grand;
    std::vector<Discrepancy> out;
    for (std::string_view column : kNumericColumns) {
        auto it = stated_totals.find(std::string(column));
        if (it == stated_totals.end()) continue;
        const double computed = grand.sums.at(std::string(column));
        const double delta = std::abs(it->second - computed);
        if (delta > tolerance) {
            out.push_back({table_id, std::string(column), it->second, computed, delta});
        }
    }
    for (const auto& [column, _] : stated_totals) {
        if (std::find(kNumericColumns.begin(), kNumericColumns.end(), column) ==
            kNumericColumns.end()) {
            throw LedgerError("stated totals reference unknown column '" + column + "'");
        }
    }
    return out;
}

std::string report(const std::vector<LedgerRow>& rows) {
    const std::vector<std::string> headers = {"Application", "Networks",     "Models",
                                              "Parameters (M)", "Imagery (GB)", "Epochs",
                                              "Time (h)"};
    const std::vector<std::string> columns = {"models", "params_millions", "imagery_gb",
                                              "epochs", "wall_hours"};

    std::vector<std::vector<std::string>> grid;
    grid.push_back(headers);
    if (!rows.empty()) {
        for (const auto& row : rows) {
            std::vector<std::string> cells;
            cells.push_back(row.application.empty() ? "?" : row.application);
            cells.push_back(row.network.empty() ? "?" : row.network);
            for (const auto& column : columns) {
                const auto value = numeric_field(row, column);
                cells.push_back(value ? format_value(*value) : "?");
            }
            grid.push_back(std::move(cells));
        }
        const ColumnTotals grand = aggregate(rows, {}).grand;
        std::vector<std::string> total = {"TOTAL", "-"};
        for (const auto& column : columns) {
            std::string cell = format_value(grand.sums.at(column));
            if (grand.missing.at(column) > 0) cell += "*";  // total excludes missing cells
            total.push_back(std::move(cell));
        }
        grid.push_back(std::move(total));
    }

    std::vector<std::size_t> widths(headers.size(), 0);
    for (const auto& line : grid) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            widths[c] = std::max(widths[c], line[c].size());
        }
    }

    std::string out;
    for (const auto& line : grid) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c > 0) out += "  ";
            if (c == 0) {
                out += line[c];
                out.append(widths[c] - line[c].size(), ' ');
            } else {
                out.append(widths[c] - line[c].size(), ' ');
                out += line[c];
            }
        }
        out += '\n';
    }
    return out;
}

std::string to_csv(const std::vector<LedgerRow>& rows) {
    std::string out = kCsvHeader + "\n";
    for (const auto& row : rows) {
        require_token_ok(row.application);
        require_token_ok(row.network);
        require_token_ok(row.dataset);
        out += row.application + "," + row.network + "," + row.dataset;
        for (std::string_view column : kNumericColumns) {
            out += ',';
            const auto value = numeric_field(row, column);
            if (value) out += format_csv_number(*value);
        }
        out += '\n';
    }
    return out;
}

std::vector<LedgerRow> from_csv(std::string_view text) {
    std::vector<LedgerRow> rows;
    std::size_t pos = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != kCsvHeader) {
                throw LedgerError("ledger CSV: unexpected header '" + std::string(line) + "'");
            }
            saw_header = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 3 + kNumericColumns.size()) {
            throw LedgerError("ledger CSV: wrong field count in line '" + std::string(line) +
                              "'");
        }
        LedgerRow row;
        row.application = fields[0];
        row.network = fields[1];
        row.dataset = fields[2];
        for (std::size_t i = 0; i < kNumericColumns.size(); ++i) {
            const std::string& cell = fields[3 + i];
            if (cell.empty()) continue;
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(),
                                                   value);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw LedgerError("ledger CSV: bad number '" + cell + "'");
            }
            numeric_slot(row, kNumericColumns[i]) = value;
        }
        rows.push_back(std::move(row));
    }
    if (!saw_header) throw LedgerError("ledger CSV: missing header");
    return rows;
}

void append_csv(const std::filesystem::path& path, const std::vector<LedgerRow>& rows) {
    namespace fs = std::filesystem;
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::app);
    if (!out) throw LedgerError("cannot open ledger for append: " + path.string());
    if (fresh) out << kCsvHeader << '\n';
    const std::string body = to_csv(rows);
    out << body.substr(kCsvHeader.size() + 1);  // strip the header line
    if (!out) throw LedgerError("write failed: " + path.string());
}

std::vector<LedgerRow> load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LedgerError("cannot open ledger: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_csv(text);
}

std::vector<StatedCheck> parse_stated_totals(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw LedgerError(std::string("stated totals file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("checks") || !doc["checks"].is_array()) {
        throw LedgerError("stated totals file: missing 'checks' array");
    }
    std::vector<StatedCheck> checks;
    for (const auto& entry : doc["checks"]) {
        StatedCheck check;
        check.table_id = entry.value("table", "");
        if (entry.contains("where")) {
            for (const auto& [k, v] : entry["where"].items()) {
                if (std::find(kTokenColumns.begin(), kTokenColumns.end(), k) ==
                    kTokenColumns.end()) {
                    throw LedgerError("stated totals: 'where' on non-token column '" + k + "'");
                }
                check.where[k] = v.get<std::string>();
            }
        }
        if (!entry.contains("totals") || !entry["totals"].is_object()) {
            throw LedgerError("stated totals: check missing 'totals'");
        }
        for (const auto& [k, v] : entry["totals"].items()) {
            if (std::find(kNumericColumns.begin(), kNumericColumns.end(), k) ==
                kNumericColumns.end()) {
                throw LedgerError("stated totals: unknown column '" + k + "'");
            }
            check.totals[k] = v.get<double>();
        }
        checks.push_back(std::move(check));
    }
    return checks;
}

std::vector<LedgerRow> filter_rows(const std::vector<LedgerRow>& rows,
                                   const std::map<std::string, std::string>& where) {
    std::vector<LedgerRow> out;
    for (const auto& row : rows) {
        bool match = true;
        for (const auto& [column, value] : where) {
            if (token_field(row, column) != value) {
                match = false;
                break;
            }
        }
        if (match) out.push_back(row);
    }
    return out;
}

}  // namespace hypersweep::ledger
