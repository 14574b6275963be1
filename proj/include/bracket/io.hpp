#pragma once
// Flat-file formats: panel CSV, adjacency CSV and atomic file output.

#include <filesystem>
#include <string>
#include <string_view>

#include "bracket/placebo.hpp"
#include "bracket/types.hpp"

namespace bracket {

// Header `unit,year,rate[,se][,deaths],population`. Empty se/deaths cells are
// absent values; se is derived from deaths when missing. Throws FileNotFound,
// ParseError (with line number) or SchemaError.
PanelDataset parse_panel_csv(const std::filesystem::path& path);
PanelDataset parse_panel_csv_text(std::string_view text, std::string_view source = "<memory>");

// Always writes all six columns using shortest round-trip number formatting.
std::string write_panel_csv(const PanelDataset& panel);

// Header `unit_a,unit_b`, one undirected edge per row.
AdjacencyGraph parse_adjacency_csv(const std::filesystem::path& path);
AdjacencyGraph parse_adjacency_csv_text(std::string_view text, std::string_view source = "<memory>");

// Writes to a sibling temp file, then renames. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

// Fixed-point formatting with `decimals` places; "-0.000000" is normalized to "0.000000".
std::string format_fixed(double value, int decimals);
// Shortest representation that parses back to the same double.
std::string format_roundtrip(double value);

}  // namespace bracket
