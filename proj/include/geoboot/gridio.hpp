#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "geoboot/grid.hpp"
#include "geoboot/wells.hpp"

namespace geoboot {

/// Shortest-round-trip decimal formatting; parsing it back recovers the
/// exact double.
std::string format_double(double v);

/// Strict full-token double parse; throws ParseError with `context`.
double parse_double(std::string_view token, std::string_view context);

/// Atomically replaces `path` with `content` (temp file + rename).
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// GSLIB-compatible ASCII grid:
///   line 1: title
///   line 2: <n_vars> <nx> <ny> <nz>   (single-variable grids only)
///   line 3: variable name
///   then one value per line, x fastest, then y, then z.
/// Writing is deterministic and the read/write round trip is bitwise for
/// finite values. Readers reject malformed headers, non-numeric tokens,
/// short bodies and trailing data, all with line numbers.
Grid3D read_grid(const std::filesystem::path& path);
void write_grid(const Grid3D& grid, const std::filesystem::path& path,
                std::string_view title = "geoboot grid");

/// Tab-separated well set: comment header carrying template geometry and
/// offset, a column header, then one row per (well_id, x, y, z, porosity).
void write_wells(const WellSet& wells, const std::filesystem::path& path);
WellSet read_wells(const std::filesystem::path& path);

}  // namespace geoboot
