#include "msns/io.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "msns/error.hpp"

namespace msns {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Collects every validation failure before reporting.
class ConfigReader {
 public:
  explicit ConfigReader(const json& root) : root_(root) {}

  void check_keys(const json& node, const std::string& prefix,
                  std::initializer_list<const char*> allowed) {
    if (!node.is_object()) {
      fail(prefix.empty() ? "<root>" : prefix, "expected an object");
      return;
    }
    for (const auto& [key, value] : node.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(join(prefix, key), "unknown key");
    }
  }

  const json* section(const std::string& name, bool required) {
    if (!root_.contains(name)) {
      if (required) fail(name, "missing required section");
      return nullptr;
    }
    return &root_.at(name);
  }

  template <typename T>
  void read(const json* node, const std::string& prefix, const char* key, T& out,
            bool required = false) {
    const std::string path = join(prefix, key);
    if (node == nullptr || !node->is_object() || !node->contains(key)) {
      if (required) fail(path, "missing required key");
      return;
    }
    const json& v = node->at(key);
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) return fail(path, "expected a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) return fail(path, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) {
          out = v.get<T>();
        } else if (v.get<long long>() >= 0) {
          out = static_cast<T>(v.get<long long>());
        } else {
          fail(path, "expected a non-negative integer");
        }
      } else {
        out = v.get<T>();
      }
    } else {
      if (!v.is_number()) return fail(path, "expected a number");
      out = v.get<double>();
    }
  }

  void fail(const std::string& path, const std::string& message) {
    errors_.push_back(path + ": " + message);
  }

  void check(bool ok, const std::string& path, const std::string& message) {
    if (!ok) fail(path, message);
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
  }

  const json& root_;
  std::vector<std::string> errors_;
};

void write_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t RunConfig::hash() const {
  json j = json::parse(to_json(*this));
  j.erase("horizon");
  j.erase("output");
  // FNV-1a over the canonical dump.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_json(const RunConfig& c) {
  json j;
  j["grid"] = {{"n", c.n}, {"L", c.length}};
  j["physics"] = {{"nu", c.physics.nu}};
  j["mollifier"] = {{"epsilon", c.mollifier.epsilon}};
  j["window"] = {{"delta_t", c.window.delta_t},
                 {"picard_tol", c.window.picard_tol},
                 {"picard_max_iters", c.window.picard_max_iters},
                 {"substeps", c.window.substeps},
                 {"mode", to_string(c.window.mode)},
                 {"dealias", c.window.dealias == DealiasPolicy::TwoThirds ? "two_thirds" : "none"}};
  j["flow"] = {{"kind", to_string(c.flow.kind)},
               {"amplitude", c.flow.amplitude},
               {"seed", c.flow.seed},
               {"decay_scale", c.flow.decay_scale},
               {"A", c.flow.abc_a},
               {"B", c.flow.abc_b},
               {"C", c.flow.abc_c}};
  j["horizon"] = c.horizon;
  j["output"] = {{"directory", c.output.directory},
                 {"checkpoint_every", c.output.checkpoint_every},
                 {"diagnostics_file", c.output.diagnostics_file}};
  return j.dump(2);
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("parse error: ") + e.what());
  }
  RunConfig c;
  ConfigReader r(root);
  r.check_keys(root, "",
               {"grid", "physics", "mollifier", "window", "flow", "horizon", "output"});
  if (!root.is_object()) {
    throw Error(ErrorKind::Config, "config root must be an object");
  }

  const json* grid = r.section("grid", true);
  if (grid) r.check_keys(*grid, "grid", {"n", "L"});
  r.read(grid, "grid", "n", c.n, true);
  r.read(grid, "grid", "L", c.length);

  const json* physics = r.section("physics", true);
  if (physics) r.check_keys(*physics, "physics", {"nu"});
  r.read(physics, "physics", "nu", c.physics.nu, true);

  const json* mollifier = r.section("mollifier", false);
  if (mollifier) r.check_keys(*mollifier, "mollifier", {"epsilon"});
  r.read(mollifier, "mollifier", "epsilon", c.mollifier.epsilon);

  const json* window = r.section("window", false);
  std::string mode = to_string(c.window.mode);
  std::string dealias = "two_thirds";
  if (window) {
    r.check_keys(*window, "window",
                 {"delta_t", "picard_tol", "picard_max_iters", "substeps", "mode", "dealias"});
  }
  r.read(window, "window", "delta_t", c.window.delta_t);
  r.read(window, "window", "picard_tol", c.window.picard_tol);
  r.read(window, "window", "picard_max_iters", c.window.picard_max_iters);
  r.read(window, "window", "substeps", c.window.substeps);
  r.read(window, "window", "mode", mode);
  r.read(window, "window", "dealias", dealias);

  const json* flow = r.section("flow", true);
  std::string kind = "taylor_green";
  if (flow) {
    r.check_keys(*flow, "flow", {"kind", "amplitude", "seed", "decay_scale", "A", "B", "C"});
  }
  r.read(flow, "flow", "kind", kind, true);
  r.read(flow, "flow", "amplitude", c.flow.amplitude);
  r.read(flow, "flow", "seed", c.flow.seed);
  r.read(flow, "flow", "decay_scale", c.flow.decay_scale);
  r.read(flow, "flow", "A", c.flow.abc_a);
  r.read(flow, "flow", "B", c.flow.abc_b);
  r.read(flow, "flow", "C", c.flow.abc_c);

  if (!root.contains("horizon")) {
    r.fail("horizon", "missing required key");
  } else if (!root.at("horizon").is_number()) {
    r.fail("horizon", "expected a number");
  } else {
    c.horizon = root.at("horizon").get<double>();
  }

  const json* output = r.section("output", false);
  if (output) r.check_keys(*output, "output", {"directory", "checkpoint_every", "diagnostics_file"});
  r.read(output, "output", "directory", c.output.directory);
  r.read(output, "output", "checkpoint_every", c.output.checkpoint_every);
  r.read(output, "output", "diagnostics_file", c.output.diagnostics_file);

  // Invariants.
  r.check(c.n >= 4 && c.n % 2 == 0, "grid.n", "must be an even integer >= 4");
  r.check(c.length > 0.0 && std::isfinite(c.length), "grid.L", "must be positive");
  r.check(c.physics.nu >= 0.0 && std::isfinite(c.physics.nu), "physics.nu", "must be >= 0");
  r.check(c.mollifier.epsilon > 0.0 && c.mollifier.epsilon < 1.0, "mollifier.epsilon",
          "must lie in (0, 1)");
  r.check(c.window.delta_t >= kMinWindowLength && std::isfinite(c.window.delta_t),
          "window.delta_t", "must be >= 1e-6");
  r.check(c.window.picard_tol > 0.0, "window.picard_tol", "must be positive");
  r.check(c.window.picard_max_iters >= 1, "window.picard_max_iters", "must be >= 1");
  r.check(c.window.substeps >= 2, "window.substeps", "must be >= 2");
  if (mode == "mode_solved" || mode == "paper_literal") {
    c.window.mode = window_mode_from_string(mode);
  } else {
    r.fail("window.mode", "must be 'mode_solved' or 'paper_literal'");
  }
  if (dealias == "two_thirds") {
    c.window.dealias = DealiasPolicy::TwoThirds;
  } else if (dealias == "none") {
    c.window.dealias = DealiasPolicy::None;
  } else {
    r.fail("window.dealias", "must be 'two_thirds' or 'none'");
  }
  try {
    c.flow.kind = flow_kind_from_string(kind);
  } catch (const Error&) {
    r.fail("flow.kind", "must be 'taylor_green', 'abc' or 'random_schwartz'");
  }
  r.check(std::isfinite(c.flow.amplitude), "flow.amplitude", "must be finite");
  r.check(c.flow.decay_scale > 0.0 && std::isfinite(c.flow.decay_scale), "flow.decay_scale",
          "must be positive");
  r.check(std::isfinite(c.horizon) && c.horizon >= c.window.delta_t, "horizon",
          "must be >= window.delta_t");
  r.check(c.output.checkpoint_every >= 0, "output.checkpoint_every", "must be >= 0");
  r.check(!c.output.diagnostics_file.empty(), "output.diagnostics_file", "must not be empty");

  if (!r.errors().empty()) {
    std::string message = "invalid configuration:";
    for (const auto& e : r.errors()) message += "\n  " + e;
    throw Error(ErrorKind::Config, message);
  }
  return c;
}

RunConfig load_config(const fs::path& path) { return parse_config(read_all(path)); }

void write_diagnostics(const std::vector<DiagnosticsRecord>& records, const fs::path& path) {
  std::string out = kDiagnosticsHeader;
  out += '\n';
  for (const auto& r : records) {
    out += format_double(r.t) + ',' + format_double(r.sup_norm) + ',' +
           format_double(r.l2_energy) + ',' + format_double(r.enstrophy) + ',' +
           format_double(r.max_divergence) + ',' + std::to_string(r.picard_iters) + ',' +
           format_double(r.picard_final_residual) + '\n';
  }
  write_atomic(path, out);
}

std::vector<DiagnosticsRecord> read_diagnostics(const fs::path& path) {
  std::istringstream in(read_all(path));
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::MalformedCsv, path.string() + ": missing header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line);
  constexpr std::array<const char*, 7> kColumns = {
      "t", "sup_norm", "l2_energy", "enstrophy", "max_divergence", "picard_iters",
      "picard_final_residual"};
  std::array<std::size_t, 7> position{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    const auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) {
      throw Error(ErrorKind::MalformedCsv,
                  path.string() + ": missing column '" + kColumns[c] + "'");
    }
    position[c] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<DiagnosticsRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::MalformedCsv, path.string() + ": row " + std::to_string(row) +
                                               " has " + std::to_string(cells.size()) +
                                               " cells, expected " +
                                               std::to_string(header.size()));
    }
    auto number = [&](std::size_t c) {
      const std::string& text = cells[position[c]];
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (text.empty() || *end != '\0') {
        throw Error(ErrorKind::MalformedCsv, path.string() + ": row " + std::to_string(row) +
                                                 " column '" + kColumns[c] +
                                                 "' is not a number");
      }
      return v;
    };
    DiagnosticsRecord r;
    r.t = number(0);
    r.sup_norm = number(1);
    r.l2_energy = number(2);
    r.enstrophy = number(3);
    r.max_divergence = number(4);
    r.picard_iters = static_cast<int>(number(5));
    r.picard_final_residual = number(6);
    records.push_back(r);
  }
  return records;
}

namespace {

constexpr char kMagic[4] = {'M', 'S', 'N', 'S'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 * 4 + 8;

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
  }
}

template <typename T>
T get_le(const std::string& in, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return std::bit_cast<T>(bits);
}

std::uint32_t crc_of(const std::string& bytes, std::size_t length) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(length)));
}

}  // namespace

void write_checkpoint(const RealVectorField& u, double t, double nu, double epsilon,
                      std::uint64_t config_hash, const fs::path& path) {
  const Grid& grid = u.grid();
  std::string out;
  out.reserve(kHeaderBytes + 8 * u.data().size() + 4);
  out.append(kMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.n()));
  put_le<double>(out, grid.length());
  put_le<double>(out, t);
  put_le<double>(out, nu);
  put_le<double>(out, epsilon);
  put_le<std::uint64_t>(out, config_hash);
  for (double v : u.data()) put_le<double>(out, v);
  put_le<std::uint32_t>(out, crc_of(out, out.size()));
  write_atomic(path, out);
}

Checkpoint read_checkpoint(const fs::path& path) {
  const std::string in = read_all(path);
  const std::string where = path.string() + ": ";
  if (in.size() < 4) throw Error(ErrorKind::BadCrc, where + "truncated before magic");
  if (std::memcmp(in.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::BadMagic, where + "not an MSNS checkpoint");
  }
  if (in.size() < 8) throw Error(ErrorKind::BadCrc, where + "truncated before version");
  const auto version = get_le<std::uint32_t>(in, 4);
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::BadVersion, where + "unsupported checkpoint version " +
                                           std::to_string(version));
  }
  if (in.size() < kHeaderBytes + 4) {
    throw Error(ErrorKind::BadCrc, where + "truncated header");
  }
  const auto n = get_le<std::uint32_t>(in, 8);
  const std::size_t samples = 3 * static_cast<std::size_t>(n) * n * n;
  const std::size_t expected = kHeaderBytes + 8 * samples + 4;
  if (in.size() != expected) {
    throw Error(ErrorKind::BadCrc, where + "size " + std::to_string(in.size()) +
                                       " does not match expected " +
                                       std::to_string(expected));
  }
  if (get_le<std::uint32_t>(in, expected - 4) != crc_of(in, expected - 4)) {
    throw Error(ErrorKind::BadCrc, where + "CRC mismatch");
  }
  Checkpoint c;
  const double length = get_le<double>(in, 12);
  try {
    c.u = RealVectorField(make_grid(static_cast<int>(n), length));
  } catch (const Error& e) {
    throw Error(ErrorKind::Io, where + e.what());
  }
  c.t = get_le<double>(in, 20);
  c.nu = get_le<double>(in, 28);
  c.epsilon = get_le<double>(in, 36);
  c.config_hash = get_le<std::uint64_t>(in, 44);
  auto data = c.u.data();
  for (std::size_t i = 0; i < samples; ++i) data[i] = get_le<double>(in, kHeaderBytes + 8 * i);
  return c;
}

std::string checkpoint_name(std::size_t completed_windows) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "checkpoint_%06zu.bin", completed_windows);
  return buf;
}

}  // namespace msns
