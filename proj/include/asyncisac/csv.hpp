#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "asyncisac/array_model.hpp"
#include "asyncisac/campaign.hpp"

namespace asyncisac {

/// Header plus one line per row, 17 significant digits, LF endings. An absent stderr is an
/// empty field. Throws DomainError on empty input (nothing is written).
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// write_csv to a file. Empty input raises DomainError before the file is created; an unwritable
/// path raises IoError.
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

/// Parses a file written by emit_csv. Throws IoError on malformed input.
std::vector<ResultRow> read_csv(const std::filesystem::path& path);
std::vector<ResultRow> read_csv(std::istream& in);

/// CSI file: M lines of 2T comma-separated numbers, Re h_{m,0}, Im h_{m,0}, Re h_{m,1}, ...
/// No header. Throws IoError on ragged or non-numeric input.
CsiBlock read_csi_csv(std::istream& in);
CsiBlock read_csi_csv(const std::filesystem::path& path);
void write_csi_csv(std::ostream& out, const CsiBlock& h);

}  // namespace asyncisac
