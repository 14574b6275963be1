#include "bracket/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "bracket/errors.hpp"

namespace bracket {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                        : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, const std::string& why) {
    throw Error(Errc::ParseError,
                std::string(source) + ":" + std::to_string(line) + ": " + why);
}

template <class T>
T parse_number(std::string_view field, std::string_view source, std::size_t line,
               const char* column) {
    T value{};
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last) {
        parse_fail(source, line, std::string("invalid ") + column + " '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::FileNotFound, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PanelDataset parse_panel_csv(const std::filesystem::path& path) {
    return parse_panel_csv_text(read_text_file(path), path.string());
}

PanelDataset parse_panel_csv_text(std::string_view text, std::string_view source) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw Error(Errc::SchemaError, std::string(source) + ": missing header");

    const auto header = split_fields(lines[0]);
    std::vector<std::string> cols;
    for (auto h : header) cols.emplace_back(trim(h));
    int se_col = -1, deaths_col = -1;
    const bool starts_ok = cols.size() >= 4 && cols[0] == "unit" && cols[1] == "year" &&
                           cols[2] == "rate" && cols.back() == "population";
    bool middle_ok = starts_ok;
    if (starts_ok) {
        std::size_t i = 3;
        if (i < cols.size() - 1 && cols[i] == "se") se_col = static_cast<int>(i++);
        if (i < cols.size() - 1 && cols[i] == "deaths") deaths_col = static_cast<int>(i++);
        middle_ok = i == cols.size() - 1;
    }
    if (!middle_ok) {
        throw Error(Errc::SchemaError, std::string(source) + ": header must be "
                                           "unit,year,rate[,se][,deaths],population");
    }
    const std::size_t pop_col = cols.size() - 1;

    std::vector<Observation> records;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const std::size_t line_no = ln + 1;
        if (lines[ln].empty()) continue;
        const auto f = split_fields(lines[ln]);
        if (f.size() != cols.size()) {
            parse_fail(source, line_no, "expected " + std::to_string(cols.size()) + " fields, got " +
                                            std::to_string(f.size()));
        }
        Observation o;
        o.unit = std::string(trim(f[0]));
        if (o.unit.empty()) parse_fail(source, line_no, "empty unit");
        o.year = parse_number<int>(trim(f[1]), source, line_no, "year");
        o.rate = parse_number<double>(trim(f[2]), source, line_no, "rate");
        if (!std::isfinite(o.rate) || o.rate < 0.0) parse_fail(source, line_no, "rate must be >= 0");
        if (se_col >= 0) {
            auto s = trim(f[static_cast<std::size_t>(se_col)]);
            if (!s.empty()) {
                o.se = parse_number<double>(s, source, line_no, "se");
                if (!std::isfinite(*o.se) || *o.se < 0.0) parse_fail(source, line_no, "se must be >= 0");
            }
        }
        if (deaths_col >= 0) {
            auto s = trim(f[static_cast<std::size_t>(deaths_col)]);
            if (!s.empty()) {
                o.deaths = parse_number<std::int64_t>(s, source, line_no, "deaths");
                if (*o.deaths < 0) parse_fail(source, line_no, "deaths must be >= 0");
            }
        }
        o.population = parse_number<std::int64_t>(trim(f[pop_col]), source, line_no, "population");
        if (o.population <= 0) parse_fail(source, line_no, "population must be > 0");
        records.push_back(std::move(o));
    }
    try {
        return PanelDataset::from_records(std::move(records));
    } catch (const Error& e) {
        throw Error(Errc::ParseError, std::string(source) + ": " + e.what());
    }
}

std::string format_roundtrip(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string write_panel_csv(const PanelDataset& panel) {
    std::string out = "unit,year,rate,se,deaths,population\n";
    for (const auto& r : panel.records()) {
        // No quoting in this format, so ids that would not read back are refused.
        if (r.unit.find_first_of(",\r\n") != std::string::npos || trim(r.unit) != r.unit) {
            throw Error(Errc::InvalidPanel, "unit id '" + r.unit + "' cannot be written as CSV");
        }
        out += r.unit;
        out += ',' + std::to_string(r.year);
        out += ',' + format_roundtrip(r.rate);
        out += ',';
        if (r.se) out += format_roundtrip(*r.se);
        out += ',';
        if (r.deaths) out += std::to_string(*r.deaths);
        out += ',' + std::to_string(r.population);
        out += '\n';
    }
    return out;
}

AdjacencyGraph parse_adjacency_csv(const std::filesystem::path& path) {
    return parse_adjacency_csv_text(read_text_file(path), path.string());
}

AdjacencyGraph parse_adjacency_csv_text(std::string_view text, std::string_view source) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw Error(Errc::SchemaError, std::string(source) + ": missing header");
    const auto header = split_fields(lines[0]);
    if (header.size() != 2 || trim(header[0]) != "unit_a" || trim(header[1]) != "unit_b") {
        throw Error(Errc::SchemaError, std::string(source) + ": header must be unit_a,unit_b");
    }
    std::vector<std::pair<UnitId, UnitId>> edges;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        const auto f = split_fields(lines[ln]);
        if (f.size() != 2) parse_fail(source, ln + 1, "expected 2 fields");
        std::string a(trim(f[0])), b(trim(f[1]));
        if (a.empty() || b.empty()) parse_fail(source, ln + 1, "empty unit");
        if (a == b) parse_fail(source, ln + 1, "self-edge on " + a);
        edges.emplace_back(std::move(a), std::move(b));
    }
    return AdjacencyGraph::from_edges(edges);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(Errc::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(Errc::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace bracket
