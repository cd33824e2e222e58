#include "culturefms/lattice_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "culturefms/errors.hpp"

namespace culturefms {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

int parse_int(std::string_view token, std::size_t line) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ConfigError("lattice", line, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::string format_lattice(const Lattice& lattice) {
  std::ostringstream out;
  out << lattice.width() << ' ' << lattice.height() << ' ' << lattice.features() << ' '
      << lattice.traits() << '\n';
  const bool compact = lattice.traits() <= 10;
  for (int r = 0; r < lattice.height(); ++r) {
    for (int c = 0; c < lattice.width(); ++c) {
      if (c > 0) out << ' ';
      const auto traits = lattice.at({r, c}).traits();
      for (std::size_t f = 0; f < traits.size(); ++f) {
        if (!compact && f > 0) out << ',';
        out << traits[f];
      }
    }
    out << '\n';
  }
  return out.str();
}

Lattice parse_lattice(std::string_view text, Topology topology) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::size_t stop = end == std::string_view::npos ? text.size() : end;
    lines.push_back(text.substr(start, stop - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  while (!lines.empty() && split_ws(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ConfigError("lattice", 1, "empty input");

  const auto header = split_ws(lines[0]);
  if (header.size() != 4) throw ConfigError("lattice", 1, "header must be 'width height F T'");
  const int width = parse_int(header[0], 1);
  const int height = parse_int(header[1], 1);
  const int features = parse_int(header[2], 1);
  const int traits = parse_int(header[3], 1);
  if (width < 1 || height < 1 || features < 1 || traits < 1) {
    throw ConfigError("lattice", 1, "dimensions must be >= 1");
  }
  if (lines.size() != static_cast<std::size_t>(height) + 1) {
    const std::size_t at = lines.size() < static_cast<std::size_t>(height) + 1
                               ? lines.size() + 1
                               : static_cast<std::size_t>(height) + 2;
    throw ConfigError("lattice", at, "expected " + std::to_string(height) + " rows after the header");
  }

  std::vector<CultureVector> cells;
  cells.reserve(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    const std::size_t line_no = static_cast<std::size_t>(r) + 2;
    const auto tokens = split_ws(lines[static_cast<std::size_t>(r) + 1]);
    if (tokens.size() != static_cast<std::size_t>(width)) {
      throw ConfigError("lattice", line_no, "expected " + std::to_string(width) + " cells");
    }
    for (auto token : tokens) {
      std::vector<int> values;
      if (token.find(',') != std::string_view::npos) {
        std::size_t s = 0;
        for (;;) {
          const std::size_t comma = token.find(',', s);
          values.push_back(parse_int(token.substr(s, comma - s), line_no));
          if (comma == std::string_view::npos) break;
          s = comma + 1;
        }
      } else if (traits <= 10) {
        for (char ch : token) {
          if (ch < '0' || ch > '9') {
            throw ConfigError("lattice", line_no, "bad cell '" + std::string(token) + "'");
          }
          values.push_back(ch - '0');
        }
      } else {
        values.push_back(parse_int(token, line_no));
      }
      if (values.size() != static_cast<std::size_t>(features)) {
        throw ConfigError("lattice", line_no,
                          "cell '" + std::string(token) + "' does not have " +
                              std::to_string(features) + " traits");
      }
      for (int v : values) {
        if (v < 0 || v >= traits) {
          throw ConfigError("lattice", line_no, "trait " + std::to_string(v) + " out of range");
        }
      }
      cells.emplace_back(std::move(values));
    }
  }
  return Lattice(width, height, features, traits, std::move(cells), topology);
}

void save_lattice(const Lattice& lattice, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_lattice(lattice);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Lattice load_lattice(const std::filesystem::path& path, Topology topology) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("lattice", 0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lattice(buf.str(), topology);
}

}  // namespace culturefms
