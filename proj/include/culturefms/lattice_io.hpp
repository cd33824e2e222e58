#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "culturefms/lattice.hpp"

namespace culturefms {

/// Plain-text lattice format:
///
///     width height F T
///     012 201 ...        (one line per row, cells separated by a space)
///
/// Each cell is written as its traits concatenated when T <= 10, and
/// comma-separated otherwise. Topology is not stored; it is supplied on load.
std::string format_lattice(const Lattice& lattice);

/// Parses format_lattice output. Throws ConfigError (key "lattice") with the
/// offending line number on malformed input.
Lattice parse_lattice(std::string_view text, Topology topology = {});

void save_lattice(const Lattice& lattice, const std::filesystem::path& path);
Lattice load_lattice(const std::filesystem::path& path, Topology topology = {});

}  // namespace culturefms
