#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "votefusion/errors.hpp"
#include "votefusion/experiment.hpp"

namespace votefusion {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return csv_field(std::get<std::string>(c));
}

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string ordering_label(const std::vector<int>& ordering) {
    if (ordering.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(ordering[i]);
    }
    return s;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& t) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& c = row[i];
            if (const auto* d = std::get_if<double>(&c)) {
                // JSON has no infinities.
                if (std::isfinite(*d)) obj[t.columns[i]] = *d;
                else obj[t.columns[i]] = format_number(*d);
            } else if (const auto* n = std::get_if<std::int64_t>(&c)) {
                obj[t.columns[i]] = *n;
            } else {
                obj[t.columns[i]] = std::get<std::string>(c);
            }
        }
        rows.push_back(std::move(obj));
    }
    return rows.dump(2) + "\n";
}

bool RunResult::checks_passed() const {
    for (const auto& c : checks) {
        if (!c.passed) return false;
    }
    return true;
}

void write_tables(RunResult& result, const std::string& dir, OutputFormat format) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ArgumentError("cannot create output directory '" + dir + "': " + ec.message());

    std::vector<Table> all = result.tables;
    if (!result.checks.empty()) {
        Table t{"checks", {"check", "passed", "detail"}, {}};
        for (const auto& c : result.checks) t.rows.push_back({c.name, std::int64_t{c.passed}, c.detail});
        all.push_back(std::move(t));
    }
    result.files.clear();
    for (const auto& t : all) {
        const auto path = (fs::path(dir) / (t.name + (format == OutputFormat::csv ? ".csv" : ".json"))).string();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw ArgumentError("cannot write '" + path + "'");
        out << (format == OutputFormat::csv ? to_csv(t) : to_json(t));
        result.files.push_back(path);
    }
}

}  // namespace votefusion
