#include "culturefms/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "culturefms/errors.hpp"
#include "format.hpp"

namespace culturefms {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto start = s.find_first_not_of(seps, i);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(seps, start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    i = end;
  }
  return out;
}

struct Ctx {
  std::string_view key;
  std::size_t line;

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(std::string(key), line, message);
  }
};

template <typename Int>
Int parse_integer(std::string_view text, const Ctx& ctx) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    ctx.fail("expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view text, const Ctx& ctx) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    ctx.fail("expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

int parse_positive(std::string_view text, const Ctx& ctx) {
  const int v = parse_integer<int>(text, ctx);
  if (v < 1) ctx.fail("must be >= 1, got " + std::string(text));
  return v;
}

std::size_t parse_count(std::string_view text, const Ctx& ctx) {
  const auto v = parse_integer<long long>(text, ctx);
  if (v < 1) ctx.fail("must be >= 1, got " + std::string(text));
  return static_cast<std::size_t>(v);
}

double parse_unit_interval(std::string_view text, const Ctx& ctx) {
  const double v = parse_real(text, ctx);
  if (!(v > 0.0 && v <= 1.0)) ctx.fail("must be in (0, 1], got " + std::string(text));
  return v;
}

template <typename Enum, std::size_t N>
Enum parse_choice(std::string_view text, const std::pair<std::string_view, Enum> (&choices)[N],
                  const Ctx& ctx) {
  std::string allowed;
  for (const auto& [name, value] : choices) {
    if (name == text) return value;
    allowed += (allowed.empty() ? "" : "|") + std::string(name);
  }
  ctx.fail("expected one of " + allowed + ", got '" + std::string(text) + "'");
}

std::vector<int> parse_int_tuple(std::string_view text, const Ctx& ctx) {
  std::vector<int> out;
  for (auto part : split(text, ",")) out.push_back(parse_integer<int>(part, ctx));
  return out;
}

std::string join_tuple(std::span<const int> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::size_t line_of(const KeyLines& lines, std::string_view key) {
  const auto it = lines.find(key);
  return it == lines.end() ? 0 : it->second;
}

}  // namespace

std::string_view to_string(Placement p) noexcept {
  switch (p) {
    case Placement::Center: return "center";
    case Placement::Random: return "random";
    case Placement::Explicit: return "explicit";
  }
  return "center";
}

RunOptions SimConfig::run_options() const {
  RunOptions opts;
  opts.max_iterations = max_iterations;
  opts.sample_every = sample_every;
  opts.snapshot_triggers = snapshot_triggers;
  return opts;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "width",          "height",      "features",       "traits",
      "mode",           "threshold",   "probability_mode", "constant_probability",
      "neighborhood",   "boundary",    "seed",           "max_iterations",
      "sample_every",   "snapshot_triggers", "products", "placement",
      "positions",      "tasks",       "distance",       "replications",
      "output"};
  return keys;
}

void apply_setting(SimConfig& config, std::string_view key, std::string_view raw,
                   std::size_t line) {
  const Ctx ctx{key, line};
  const std::string_view value = trim(raw);

  if (key == "width") {
    config.width = parse_positive(value, ctx);
  } else if (key == "height") {
    config.height = parse_positive(value, ctx);
  } else if (key == "features") {
    config.features = parse_positive(value, ctx);
  } else if (key == "traits") {
    config.traits = parse_positive(value, ctx);
  } else if (key == "mode") {
    static constexpr std::pair<std::string_view, RuleMode> kChoices[]{
        {"classic", RuleMode::Classic}, {"extended", RuleMode::Extended}};
    config.rule.mode = parse_choice(value, kChoices, ctx);
  } else if (key == "threshold") {
    config.rule.threshold = parse_unit_interval(value, ctx);
  } else if (key == "probability_mode") {
    static constexpr std::pair<std::string_view, ProbabilityMode> kChoices[]{
        {"similarity", ProbabilityMode::SimilarityCoupled},
        {"constant", ProbabilityMode::Constant}};
    config.rule.probability = parse_choice(value, kChoices, ctx);
  } else if (key == "constant_probability") {
    config.rule.constant_probability = parse_unit_interval(value, ctx);
  } else if (key == "neighborhood") {
    static constexpr std::pair<std::string_view, Neighborhood> kChoices[]{
        {"von_neumann", Neighborhood::VonNeumann4}, {"moore", Neighborhood::Moore8}};
    config.topology.neighborhood = parse_choice(value, kChoices, ctx);
  } else if (key == "boundary") {
    static constexpr std::pair<std::string_view, Boundary> kChoices[]{
        {"bounded", Boundary::Bounded}, {"torus", Boundary::Torus}};
    config.topology.boundary = parse_choice(value, kChoices, ctx);
  } else if (key == "seed") {
    config.seed = parse_integer<std::uint64_t>(value, ctx);
  } else if (key == "max_iterations") {
    config.max_iterations = parse_count(value, ctx);
  } else if (key == "sample_every") {
    config.sample_every = parse_count(value, ctx);
  } else if (key == "snapshot_triggers") {
    std::vector<double> triggers;
    for (auto part : split(value, " \t,")) {
      const double t = parse_real(part, ctx);
      if (!(t >= 0.0 && t <= 1.0)) ctx.fail("trigger " + std::string(part) + " outside [0, 1]");
      triggers.push_back(t);
    }
    for (std::size_t k = 1; k < triggers.size(); ++k) {
      if (!(triggers[k] < triggers[k - 1])) ctx.fail("triggers must be strictly decreasing");
    }
    config.snapshot_triggers = std::move(triggers);
  } else if (key == "products") {
    config.products = parse_positive(value, ctx);
  } else if (key == "placement") {
    static constexpr std::pair<std::string_view, Placement> kChoices[]{
        {"center", Placement::Center},
        {"random", Placement::Random},
        {"explicit", Placement::Explicit}};
    config.placement = parse_choice(value, kChoices, ctx);
  } else if (key == "positions") {
    std::vector<Position> positions;
    for (auto item : split(value, " \t")) {
      const auto rc = parse_int_tuple(item, ctx);
      if (rc.size() != 2) ctx.fail("position '" + std::string(item) + "' is not row,col");
      positions.push_back({rc[0], rc[1]});
    }
    config.positions = std::move(positions);
  } else if (key == "tasks") {
    std::vector<TaskSequence> tasks;
    if (value != "random") {
      for (auto item : split(value, " \t")) tasks.push_back(parse_int_tuple(item, ctx));
      if (tasks.empty()) ctx.fail("expected 'random' or a list of task tuples");
    }
    config.tasks = std::move(tasks);
  } else if (key == "distance") {
    static constexpr std::pair<std::string_view, DistanceMetric> kChoices[]{
        {"manhattan", DistanceMetric::Manhattan}, {"euclidean", DistanceMetric::Euclidean}};
    config.distance = parse_choice(value, kChoices, ctx);
  } else if (key == "replications") {
    config.replications = parse_count(value, ctx);
  } else if (key == "output") {
    if (value.empty()) ctx.fail("must not be empty");
    config.output = std::string(value);
  } else {
    ctx.fail("unknown key");
  }
}

void validate(const SimConfig& config, const KeyLines& lines) {
  auto fail = [&](std::string_view key, const std::string& message) {
    throw ConfigError(std::string(key), line_of(lines, key), message);
  };
  if (config.placement == Placement::Explicit) {
    if (config.positions.size() != static_cast<std::size_t>(config.products)) {
      fail("positions", "explicit placement needs " + std::to_string(config.products) +
                            " positions, got " + std::to_string(config.positions.size()));
    }
    for (const auto& p : config.positions) {
      if (p.row < 0 || p.row >= config.height || p.col < 0 || p.col >= config.width) {
        fail("positions", "position " + std::to_string(p.row) + "," + std::to_string(p.col) +
                              " is off the grid");
      }
    }
  } else if (!config.positions.empty()) {
    fail("positions", "only allowed with placement: explicit");
  }
  if (!config.tasks.empty()) {
    if (config.tasks.size() != static_cast<std::size_t>(config.products)) {
      fail("tasks", "expected " + std::to_string(config.products) + " task sequences, got " +
                        std::to_string(config.tasks.size()));
    }
    for (const auto& seq : config.tasks) {
      if (seq.size() != static_cast<std::size_t>(config.features)) {
        fail("tasks", "task sequence '" + join_tuple(seq) + "' must have " +
                          std::to_string(config.features) + " entries");
      }
      for (int v : seq) {
        if (v < 0 || v >= config.traits) {
          fail("tasks", "precision " + std::to_string(v) + " outside [0, " +
                            std::to_string(config.traits) + ")");
        }
      }
    }
  }
  for (std::size_t k = 1; k < config.snapshot_triggers.size(); ++k) {
    if (!(config.snapshot_triggers[k] < config.snapshot_triggers[k - 1])) {
      fail("snapshot_triggers", "triggers must be strictly decreasing");
    }
  }
  try {
    config.rule.validate();
  } catch (const ConfigError& e) {
    fail(e.key(), e.what());
  }
}

KeyLines merge_config_text(SimConfig& config, std::string_view text) {
  KeyLines lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? text.npos : end - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) {
        throw ConfigError("", line_no, "expected 'key: value'");
      }
      const std::string key(trim(line.substr(0, colon)));
      if (lines.contains(key)) throw ConfigError(key, line_no, "repeated key");
      apply_setting(config, key, line.substr(colon + 1), line_no);
      lines.emplace(key, line_no);
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

SimConfig load_config_text(std::string_view text) {
  SimConfig config;
  const KeyLines lines = merge_config_text(config, text);
  validate(config, lines);
  return config;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", 0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SimConfig load_config(const std::filesystem::path& path) {
  return load_config_text(read_text_file(path));
}

std::string config_value(const SimConfig& c, std::string_view key) {
  using detail::format_double;
  if (key == "width") return std::to_string(c.width);
  if (key == "height") return std::to_string(c.height);
  if (key == "features") return std::to_string(c.features);
  if (key == "traits") return std::to_string(c.traits);
  if (key == "mode") return std::string(to_string(c.rule.mode));
  if (key == "threshold") return format_double(c.rule.threshold);
  if (key == "probability_mode") return std::string(to_string(c.rule.probability));
  if (key == "constant_probability") return format_double(c.rule.constant_probability);
  if (key == "neighborhood") return std::string(to_string(c.topology.neighborhood));
  if (key == "boundary") return std::string(to_string(c.topology.boundary));
  if (key == "seed") return std::to_string(c.seed);
  if (key == "max_iterations") return std::to_string(c.max_iterations);
  if (key == "sample_every") return std::to_string(c.sample_every);
  if (key == "snapshot_triggers") {
    std::string out;
    for (double t : c.snapshot_triggers) out += (out.empty() ? "" : " ") + format_double(t);
    return out;
  }
  if (key == "products") return std::to_string(c.products);
  if (key == "placement") return std::string(to_string(c.placement));
  if (key == "positions") {
    std::string out;
    for (const auto& p : c.positions) {
      out += (out.empty() ? "" : " ") + std::to_string(p.row) + "," + std::to_string(p.col);
    }
    return out;
  }
  if (key == "tasks") {
    if (c.tasks.empty()) return "random";
    std::string out;
    for (const auto& t : c.tasks) out += (out.empty() ? "" : " ") + join_tuple(t);
    return out;
  }
  if (key == "distance") return std::string(to_string(c.distance));
  if (key == "replications") return std::to_string(c.replications);
  if (key == "output") return c.output;
  throw ConfigError(std::string(key), 0, "unknown key");
}

std::string serialize_config(const SimConfig& config) {
  std::string out;
  for (const auto& key : config_keys()) {
    const std::string value = config_value(config, key);
    if (key == "positions" && value.empty()) continue;
    out += key + ": " + value + "\n";
  }
  return out;
}

}  // namespace culturefms
