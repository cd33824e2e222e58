#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "culturefms/lattice.hpp"
#include "culturefms/routing.hpp"

namespace culturefms {

/// Largest feature count the renderers accept (one hue per feature).
inline constexpr int kMaxRenderFeatures = 4;

/// One line per row; each cell printed as its trait tuple ("012"), cells
/// separated by a space. Traits are comma-joined when T > 10.
/// Throws RenderError when F > kMaxRenderFeatures.
std::string render_text(const Lattice& lattice);

/// Binary P6 pixmap. Each cell is cell_px square and split into F vertical
/// stripes; stripe hue identifies the feature (green, blue, yellow, red)
/// and its shade the trait, darkest for trait 0. Products are drawn as a
/// centered square: black when Blocked, white otherwise.
std::string render_ppm(const Lattice& lattice, std::span<const Product> products = {},
                       int cell_px = 12);

void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace culturefms
