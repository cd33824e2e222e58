#include "culturefms/render.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "culturefms/errors.hpp"

namespace culturefms {

namespace {

using Rgb = std::array<unsigned char, 3>;

constexpr std::array<Rgb, kMaxRenderFeatures> kHues{{
    {0, 200, 60},    // green
    {40, 90, 255},   // blue
    {255, 215, 0},   // yellow
    {230, 40, 40},   // red
}};

void check_renderable(const Lattice& lattice) {
  if (lattice.features() > kMaxRenderFeatures) {
    throw RenderError("cannot render " + std::to_string(lattice.features()) +
                      " features; limit is " + std::to_string(kMaxRenderFeatures));
  }
}

Rgb shade(int feature, int trait, int traits) {
  const Rgb& base = kHues[static_cast<std::size_t>(feature)];
  Rgb out{};
  for (std::size_t c = 0; c < 3; ++c) {
    out[c] = static_cast<unsigned char>(base[c] * (trait + 2) / (traits + 1));
  }
  return out;
}

}  // namespace

std::string render_text(const Lattice& lattice) {
  check_renderable(lattice);
  std::ostringstream out;
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

std::string render_ppm(const Lattice& lattice, std::span<const Product> products, int cell_px) {
  check_renderable(lattice);
  if (cell_px < 1) throw RenderError("cell size must be >= 1");
  const int w = lattice.width() * cell_px;
  const int h = lattice.height() * cell_px;
  const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::string bytes(header.size() + static_cast<std::size_t>(w) * h * 3, '\0');
  std::copy(header.begin(), header.end(), bytes.begin());
  auto put = [&](int x, int y, const Rgb& rgb) {
    const std::size_t at = header.size() + (static_cast<std::size_t>(y) * w + x) * 3;
    bytes[at] = static_cast<char>(rgb[0]);
    bytes[at + 1] = static_cast<char>(rgb[1]);
    bytes[at + 2] = static_cast<char>(rgb[2]);
  };

  const int features = lattice.features();
  const int stripe = std::max(1, cell_px / features);
  for (int r = 0; r < lattice.height(); ++r) {
    for (int c = 0; c < lattice.width(); ++c) {
      const CultureVector& cell = lattice.at({r, c});
      for (int dx = 0; dx < cell_px; ++dx) {
        const int f = std::min(dx / stripe, features - 1);
        const Rgb rgb = shade(f, cell[static_cast<std::size_t>(f)], lattice.traits());
        for (int dy = 0; dy < cell_px; ++dy) put(c * cell_px + dx, r * cell_px + dy, rgb);
      }
    }
  }

  const int marker = std::max(1, cell_px / 3);
  const int inset = (cell_px - marker) / 2;
  // Active/completed first so a blocked product sharing the cell stays visible.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& p : products) {
      const bool blocked = p.status == ProductStatus::Blocked;
      if (blocked != (pass == 1)) continue;
      if (!lattice.contains(p.position)) throw RenderError("product off-grid");
      const Rgb rgb = blocked ? Rgb{0, 0, 0} : Rgb{255, 255, 255};
      for (int dy = 0; dy < marker; ++dy) {
        for (int dx = 0; dx < marker; ++dx) {
          put(p.position.col * cell_px + inset + dx, p.position.row * cell_px + inset + dy, rgb);
        }
      }
    }
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace culturefms
