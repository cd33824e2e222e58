#include "doctest.h"

#include <filesystem>

#include "culturefms/errors.hpp"
#include "culturefms/lattice_io.hpp"
#include "culturefms/render.hpp"

using namespace culturefms;

namespace {

struct Pixmap {
  int width = 0, height = 0;
  std::string pixels;

  explicit Pixmap(const std::string& bytes) {
    // Independent P6 reader: magic, width, height, maxval, one whitespace byte.
    std::size_t pos = 0;
    auto token = [&] {
      while (std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      const std::size_t start = pos;
      while (!std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      return bytes.substr(start, pos - start);
    };
    REQUIRE(token() == "P6");
    width = std::stoi(token());
    height = std::stoi(token());
    REQUIRE(token() == "255");
    pixels = bytes.substr(pos + 1);
    REQUIRE(pixels.size() == static_cast<std::size_t>(width) * height * 3);
  }

  std::string rgb(int x, int y) const {
    return pixels.substr((static_cast<std::size_t>(y) * width + x) * 3, 3);
  }
};

}  // namespace

TEST_CASE("text render") {
  CHECK(render_text(Lattice::uniform(1, 1, 3, {0, 1, 2})) == "012\n");
  const Lattice two(2, 1, 3, 3, {{0, 1, 2}, {2, 2, 0}});
  CHECK(render_text(two) == "012 220\n");
  const Lattice wide(1, 1, 2, 12, {{11, 3}});
  CHECK(render_text(wide) == "11,3\n");
  CHECK_THROWS_AS(render_text(Lattice::uniform(1, 1, 3, {0, 0, 0, 0, 0})), RenderError);
}

TEST_CASE("pixmap render") {
  SUBCASE("uniform lattice: every cell identical") {
    const Pixmap img(render_ppm(Lattice::uniform(3, 2, 3, {0, 1, 2}), {}, 6));
    CHECK(img.width == 18);
    CHECK(img.height == 12);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) CHECK(img.rgb(x, y) == img.rgb(x % 6, y % 6));
    }
  }
  SUBCASE("stripes differ per feature, shades per trait") {
    const Pixmap img(render_ppm(Lattice(2, 1, 3, 3, {{0, 0, 0}, {2, 0, 0}}), {}, 9));
    CHECK(img.rgb(0, 0) != img.rgb(3, 0));
    CHECK(img.rgb(3, 0) != img.rgb(6, 0));
    CHECK(img.rgb(0, 0) != img.rgb(9, 0));  // same feature, other trait
    CHECK(img.rgb(3, 0) == img.rgb(12, 0));
  }
  SUBCASE("blocked product is drawn black") {
    Lattice l = Lattice::uniform(5, 4, 3, {2, 2, 2});
    Product blocked(0, {2, 3}, {0, 0, 0});
    blocked.status = ProductStatus::Blocked;
    Product done(1, {0, 0}, {2, 2, 2});
    done.status = ProductStatus::Completed;
    const std::vector<Product> products{blocked, done};
    const Pixmap img(render_ppm(l, products, 12));
    CHECK(img.rgb(3 * 12 + 6, 2 * 12 + 6) == std::string(3, '\0'));
    CHECK(img.rgb(6, 6) == std::string(3, '\xff'));
    CHECK(img.rgb(1, 1) != std::string(3, '\0'));
  }
  SUBCASE("too many features") {
    CHECK_THROWS_AS(render_ppm(Lattice::uniform(1, 1, 3, {0, 0, 0, 0, 0})), RenderError);
  }
}

TEST_CASE("lattice text format") {
  const Lattice l(3, 2, 3, 3, {{0, 1, 2}, {2, 2, 2}, {0, 0, 0}, {1, 1, 1}, {1, 0, 2}, {2, 1, 0}});
  const std::string text = format_lattice(l);
  CHECK(text == "3 2 3 3\n012 222 000\n111 102 210\n");
  CHECK(parse_lattice(text) == l);

  const Lattice wide(1, 2, 2, 11, {{10, 0}, {3, 7}});
  CHECK(format_lattice(wide) == "1 2 2 11\n10,0\n3,7\n");
  CHECK(parse_lattice(format_lattice(wide)) == wide);

  const auto path = std::filesystem::temp_directory_path() / "culturefms_io_test.lattice";
  save_lattice(l, path);
  CHECK(load_lattice(path) == l);
  std::filesystem::remove(path);
}

TEST_CASE("malformed lattice files") {
  auto line_of_error = [](std::string_view text) -> std::size_t {
    try {
      parse_lattice(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of_error("") == 1);
  CHECK(line_of_error("3 2 3\n") == 1);
  CHECK(line_of_error("2 1 3 3\n012\n") == 2);
  CHECK(line_of_error("2 1 3 3\n012 013\n") == 2);
  CHECK(line_of_error("2 1 3 3\n012 01\n") == 2);
  CHECK(line_of_error("2 2 3 3\n012 012\n") == 3);
  CHECK(line_of_error("1 1 3 3\n0x2\n") == 2);
}
