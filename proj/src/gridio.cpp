#include "geoboot/gridio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "geoboot/error.hpp"

namespace geoboot {

std::string format_double(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view token, std::string_view context) {
  // strip surrounding whitespace
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t' ||
                            token.front() == '\r')) {
    token.remove_prefix(1);
  }
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t' ||
                            token.back() == '\r')) {
    token.remove_suffix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() ||
      token.empty()) {
    throw ParseError(std::string(context) + ": cannot parse value '" +
                     std::string(token) + "'");
  }
  return value;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot open for writing: " + tmp.string());
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

Grid3D read_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open grid file: " + path.string());
  }
  const std::string where = path.string();
  std::string line;
  int line_no = 0;

  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw ParseError(where + ": unexpected end of file at line " +
                       std::to_string(line_no + 1) + " (" + what + ")");
    }
    ++line_no;
  };

  next_line("title");  // free-form, discarded on read

  next_line("header");
  int n_vars = 0, nx = 0, ny = 0, nz = 0;
  {
    std::istringstream header(line);
    if (!(header >> n_vars >> nx >> ny >> nz)) {
      throw ParseError(where + ":" + std::to_string(line_no) +
                       ": malformed header, expected "
                       "'<n_vars> <nx> <ny> <nz>'");
    }
  }
  if (n_vars != 1) {
    throw ParseError(where + ":" + std::to_string(line_no) +
                     ": only single-variable grids supported, got " +
                     std::to_string(n_vars));
  }
  if (nx <= 0 || ny <= 0 || nz <= 0) {
    throw ParseError(where + ":" + std::to_string(line_no) +
                     ": non-positive grid dimensions");
  }

  next_line("variable name");

  const std::size_t expected = static_cast<std::size_t>(nx) *
                               static_cast<std::size_t>(ny) *
                               static_cast<std::size_t>(nz);
  std::vector<double> values;
  values.reserve(expected);
  while (values.size() < expected) {
    if (!std::getline(in, line)) {
      throw ParseError(where + ": unexpected end of file at line " +
                       std::to_string(line_no + 1) + ": expected " +
                       std::to_string(expected) + " values, found " +
                       std::to_string(values.size()));
    }
    ++line_no;
    values.push_back(
        parse_double(line, where + ":" + std::to_string(line_no)));
  }
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t' && c != '\r') {
        blank = false;
        break;
      }
    }
    if (!blank) {
      throw ParseError(where + ":" + std::to_string(line_no) +
                       ": trailing data after " + std::to_string(expected) +
                       " values");
    }
  }

  try {
    return Grid3D::from_values(nx, ny, nz, std::move(values));
  } catch (const Error& e) {
    throw ParseError(where + ": " + e.what());
  }
}

void write_grid(const Grid3D& grid, const std::filesystem::path& path,
                std::string_view title) {
  std::string out;
  out.reserve(grid.size() * 12 + 64);
  out.append(title).push_back('\n');
  out.append("1 ")
      .append(std::to_string(grid.nx()))
      .append(" ")
      .append(std::to_string(grid.ny()))
      .append(" ")
      .append(std::to_string(grid.nz()))
      .push_back('\n');
  out.append("porosity\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.append(format_double(grid[i])).push_back('\n');
  }
  atomic_write(path, out);
}

void write_wells(const WellSet& wells, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "# template=" << wells.tmpl.name << " offset=" << wells.offset[0]
      << "," << wells.offset[1] << "\n";
  out << "# columns=";
  for (std::size_t i = 0; i < wells.tmpl.columns.size(); ++i) {
    if (i > 0) out << ";";
    out << wells.tmpl.columns[i][0] << "," << wells.tmpl.columns[i][1];
  }
  out << "\n";
  out << "well_id\tx\ty\tz\tporosity\n";
  for (int w = 0; w < wells.n_wells(); ++w) {
    const auto [x, y] = wells.well_xy(w);
    const auto& column = wells.data[static_cast<std::size_t>(w)];
    for (std::size_t z = 0; z < column.size(); ++z) {
      out << w << '\t' << x << '\t' << y << '\t' << z << '\t'
          << format_double(column[z]) << '\n';
    }
  }
  atomic_write(path, out.str());
}

WellSet read_wells(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open wells file: " + path.string());
  }
  const std::string where = path.string();
  std::string line;
  int line_no = 0;

  WellSet set;

  // header comment: template name and offset
  if (!std::getline(in, line) || line.rfind("# template=", 0) != 0) {
    throw ParseError(where + ":1: expected '# template=... offset=...'");
  }
  ++line_no;
  {
    const auto offset_pos = line.find(" offset=");
    if (offset_pos == std::string::npos) {
      throw ParseError(where + ":1: missing offset in header");
    }
    set.tmpl.name = line.substr(11, offset_pos - 11);
    const std::string offsets = line.substr(offset_pos + 8);
    const auto comma = offsets.find(',');
    if (comma == std::string::npos) {
      throw ParseError(where + ":1: malformed offset");
    }
    set.offset[0] = static_cast<int>(
        parse_double(offsets.substr(0, comma), where + ":1"));
    set.offset[1] =
        static_cast<int>(parse_double(offsets.substr(comma + 1), where + ":1"));
  }

  if (!std::getline(in, line) || line.rfind("# columns=", 0) != 0) {
    throw ParseError(where + ":2: expected '# columns=x,y;x,y;...'");
  }
  ++line_no;
  {
    std::stringstream cols(line.substr(10));
    std::string pair;
    while (std::getline(cols, pair, ';')) {
      const auto comma = pair.find(',');
      if (comma == std::string::npos) {
        throw ParseError(where + ":2: malformed column pair '" + pair + "'");
      }
      set.tmpl.columns.push_back(
          {static_cast<int>(parse_double(pair.substr(0, comma), where + ":2")),
           static_cast<int>(
               parse_double(pair.substr(comma + 1), where + ":2"))});
    }
  }
  set.tmpl.validate();
  set.data.resize(set.tmpl.columns.size());

  if (!std::getline(in, line) || line.rfind("well_id", 0) != 0) {
    throw ParseError(where + ":3: expected column header");
  }
  ++line_no;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = where + ":" + std::to_string(line_no);
    std::stringstream ss(line);
    std::string f0, f1, f2, f3, f4;
    if (!std::getline(ss, f0, '\t') || !std::getline(ss, f1, '\t') ||
        !std::getline(ss, f2, '\t') || !std::getline(ss, f3, '\t') ||
        !std::getline(ss, f4)) {
      throw ParseError(ctx + ": expected 5 tab-separated fields");
    }
    const int well = static_cast<int>(parse_double(f0, ctx));
    const int x = static_cast<int>(parse_double(f1, ctx));
    const int y = static_cast<int>(parse_double(f2, ctx));
    const int z = static_cast<int>(parse_double(f3, ctx));
    const double value = parse_double(f4, ctx);
    if (well < 0 || well >= set.n_wells()) {
      throw ParseError(ctx + ": well_id out of range");
    }
    const auto expect = set.well_xy(well);
    if (x != expect[0] || y != expect[1]) {
      throw ParseError(ctx + ": well coordinates do not match template");
    }
    auto& column = set.data[static_cast<std::size_t>(well)];
    if (z != static_cast<int>(column.size())) {
      throw ParseError(ctx + ": non-contiguous z index");
    }
    column.push_back(value);
  }

  if (set.data.empty() || set.data.front().empty()) {
    throw ParseError(where + ": no well data rows");
  }
  const std::size_t nz = set.data.front().size();
  for (const auto& column : set.data) {
    if (column.size() != nz) {
      throw ParseError(where + ": ragged well columns");
    }
  }
  return set;
}

}  // namespace geoboot
