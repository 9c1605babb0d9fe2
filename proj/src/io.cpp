// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include "basinscope/io.hpp"

#include <zlib.h>

#include <bit>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

namespace basinscope {

namespace fs = std::filesystem;

std::string_view to_string(CheckpointFault fault) {
  switch (fault) {
    case CheckpointFault::io: return "io";
    case CheckpointFault::bad_magic: return "bad_magic";
    case CheckpointFault::version_mismatch: return "version_mismatch";
    case CheckpointFault::bad_header: return "bad_header";
    case CheckpointFault::truncated: return "truncated";
    case CheckpointFault::length_mismatch: return "length_mismatch";
    case CheckpointFault::crc_mismatch: return "crc_mismatch";
  }
  return "?";
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded pieces.
  constexpr std::size_t kPiece = 1u << 30;
  for (std::size_t at = 0; at < bytes.size(); at += kPiece) {
    const std::size_t len = std::min(kPiece, bytes.size() - at);
    crc = ::crc32(crc, bytes.data() + at, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

constexpr std::uint8_t kMagic[4] = {'B', 'S', 'C', 'P'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t at) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[at + i]) << (8 * i);
  }
  return value;
}

[[noreturn]] void fail(CheckpointFault fault, const std::string& what) {
  throw CheckpointError(fault, "checkpoint " + std::string(to_string(fault)) + ": " + what);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint) {
  check_params(checkpoint.arch, checkpoint.params);
  const auto widths = checkpoint.arch.widths();
  if (checkpoint.arch.layer_count() > 255) {
    throw invalid_argument("checkpoint format holds at most 255 layers");
  }
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_le<std::uint16_t>(out, kCheckpointVersion);
  out.push_back(static_cast<std::uint8_t>(checkpoint.arch.activation()));
  out.push_back(static_cast<std::uint8_t>(checkpoint.arch.layer_count()));
  for (std::size_t w : widths) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(w));
  put_le<std::uint64_t>(out, checkpoint.seed);
  const std::size_t payload_at = out.size();
  for (double v : checkpoint.params) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  const std::uint32_t crc =
      crc32(std::span<const std::uint8_t>(out).subspan(payload_at));
  put_le<std::uint32_t>(out, crc);
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  const auto need = [&](std::size_t count, const char* part) {
    if (bytes.size() < count) {
      fail(CheckpointFault::truncated, "file ends inside the " + std::string(part) +
                                           " (" + std::to_string(bytes.size()) + " bytes)");
    }
  };
  need(4, "magic");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    fail(CheckpointFault::bad_magic, "expected \"BSCP\"");
  }
  need(6, "version");
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kCheckpointVersion) {
    fail(CheckpointFault::version_mismatch,
         "file has version " + std::to_string(version) + ", reader supports " +
             std::to_string(kCheckpointVersion));
  }
  need(8, "header");
  const std::uint8_t activation_id = bytes[6];
  const std::size_t layers = bytes[7];
  if (activation_id > static_cast<std::uint8_t>(Activation::relu)) {
    fail(CheckpointFault::bad_header, "unknown activation id " + std::to_string(activation_id));
  }
  if (layers == 0) fail(CheckpointFault::bad_header, "zero layers");
  std::size_t at = 8;
  need(at + 4 * (layers + 1) + 8, "header");
  std::vector<std::size_t> widths;
  for (std::size_t i = 0; i <= layers; ++i, at += 4) {
    widths.push_back(get_le<std::uint32_t>(bytes, at));
  }
  const auto seed = get_le<std::uint64_t>(bytes, at);
  at += 8;

  std::optional<MlpArch> arch;
  try {
    arch.emplace(std::move(widths), static_cast<Activation>(activation_id));
  } catch (const Error& e) {
    fail(CheckpointFault::bad_header, e.what());
  }
  const std::size_t count = arch->param_count();
  const std::size_t expected = at + 8 * count + 4;
  if (bytes.size() < expected) {
    fail(CheckpointFault::truncated, "expected " + std::to_string(expected) +
                                         " bytes, found " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    fail(CheckpointFault::length_mismatch,
         "expected " + std::to_string(expected) + " bytes, found " +
             std::to_string(bytes.size()));
  }
  const auto payload = bytes.subspan(at, 8 * count);
  const auto stored = get_le<std::uint32_t>(bytes, at + 8 * count);
  const std::uint32_t actual = crc32(payload);
  if (stored != actual) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "stored %08x, computed %08x", stored, actual);
    fail(CheckpointFault::crc_mismatch, buf);
  }
  ParamVector params(count);
  for (std::size_t i = 0; i < count; ++i) {
    params[i] = std::bit_cast<double>(get_le<std::uint64_t>(payload, 8 * i));
  }
  return Checkpoint{std::move(*arch), seed, std::move(params)};
}

void save_checkpoint(const fs::path& path, const Checkpoint& checkpoint) {
  const auto bytes = encode_checkpoint(checkpoint);
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(CheckpointFault::io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

// ---------------------------------------------------------------------------

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw invalid_argument("not a nonnegative integer: '" + std::string(text) + "'");
  }
  return v;
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw precondition_failed("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw precondition_failed("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw precondition_failed("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) text_ += ',';
    text_ += columns[i];
  }
  text_ += '\n';
}

CsvWriter& CsvWriter::cell(double value) { return cell(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::cell(std::uint64_t value) {
  return cell(std::string_view(std::to_string(value)));
}

CsvWriter& CsvWriter::cell(std::string_view value) {
  if (in_row_ == columns_) throw invalid_argument("CSV row has too many cells");
  if (in_row_) text_ += ',';
  text_ += value;
  ++in_row_;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw invalid_argument("CSV row has too few cells");
  text_ += '\n';
  in_row_ = 0;
}

void CsvWriter::save(const fs::path& path) const { write_file(path, text_); }

std::string dataset_csv(std::span<const LabeledDataset* const> parts) {
  CsvWriter csv({"x", "y", "label", "role"});
  for (const LabeledDataset* ds : parts) {
    for (std::size_t i = 0; i < ds->size(); ++i) {
      csv.cell(ds->points(i, 0)).cell(ds->points(i, 1))
          .cell(static_cast<std::uint64_t>(ds->labels[i]))
          .cell(to_string(ds->role));
      csv.end_row();
    }
  }
  return csv.text();
}

std::string metrics_csv(std::span<const EpochMetrics> metrics) {
  CsvWriter csv({"epoch", "train_loss", "train_acc", "test_acc"});
  for (const auto& m : metrics) {
    csv.cell(static_cast<std::uint64_t>(m.epoch)).cell(m.train_loss).cell(m.train_acc)
        .cell(m.test_acc);
    csv.end_row();
  }
  return csv.text();
}

// ---------------------------------------------------------------------------

namespace {

std::string join_sizes(std::span<const std::size_t> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(text.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void manifest_error(const std::string& what) {
  throw Error(ErrorKind::format, "manifest: " + what);
}

}  // namespace

std::string serialize_manifest(const RunManifest& m) {
  std::vector<std::pair<std::string, std::string>> kv;
  const auto add = [&](std::string key, std::string value) {
    if (value.find('\n') != std::string::npos) {
      throw invalid_argument("manifest value for '" + key + "' contains a newline");
    }
    kv.emplace_back(std::move(key), std::move(value));
  };
  add("experiment", m.experiment);
  add("toolkit_version", m.toolkit_version);
  if (const auto* s = std::get_if<SwissRollSpec>(&m.dataset.generator)) {
    add("dataset.generator", "swissroll");
    add("dataset.n_points", std::to_string(s->n_points));
    add("dataset.noise_sd", format_double(s->noise_sd));
    add("dataset.turns", format_double(s->turns));
  } else {
    const auto& r = std::get<RingsSpec>(m.dataset.generator);
    add("dataset.generator", "rings");
    add("dataset.n_per_ring", std::to_string(r.n_per_ring));
    std::string radii;
    for (std::size_t i = 0; i < r.radii.size(); ++i) {
      if (i) radii += ',';
      radii += format_double(r.radii[i]);
    }
    add("dataset.radii", radii);
    add("dataset.noise_sd", format_double(r.noise_sd));
  }
  add("dataset.train_fraction", format_double(m.dataset.train_fraction));
  add("dataset.n_poison", std::to_string(m.dataset.n_poison));
  add("dataset.seed", std::to_string(m.dataset.seed));
  add("arch.widths", join_sizes(m.arch.widths()));
  add("arch.activation", std::string(to_string(m.arch.activation())));
  add("train.objective",
      m.config.objective.kind == ObjectiveKind::clean ? "clean" : "poisoned");
  add("train.beta", format_double(m.config.objective.beta));
  add("train.optimizer", std::string(to_string(m.config.optimizer)));
  add("train.learning_rate", format_double(m.config.learning_rate));
  add("train.momentum_coef", format_double(m.config.momentum_coef));
  add("train.batch_size", std::to_string(m.config.batch_size));
  add("train.epochs", std::to_string(m.config.epochs));
  add("train.checkpoint_every", std::to_string(m.config.checkpoint_every));
  add("train.seed", std::to_string(m.config.seed));
  for (const auto& [role, path] : m.files) {
    if (role.empty() || role.find_first_of(" =\t") != std::string::npos) {
      throw invalid_argument("bad manifest file role '" + role + "'");
    }
    add("file." + role, path);
  }
  if (m.wall_clock) add("wall_clock", *m.wall_clock);

  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

RunManifest parse_manifest(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find(" = ");
    if (eq == std::string_view::npos) {
      manifest_error("line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!kv.emplace(key, std::string(line.substr(eq + 3))).second) {
      manifest_error("duplicate key '" + key + "'");
    }
  }
  const auto take = [&](std::string_view key) -> std::string {
    const auto it = kv.find(key);
    if (it == kv.end()) manifest_error("missing key '" + std::string(key) + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  const auto take_double = [&](std::string_view key) { return parse_double(take(key)); };
  const auto take_uint = [&](std::string_view key) { return parse_uint(take(key)); };

  try {
    RunManifest m;
    m.experiment = take("experiment");
    m.toolkit_version = take("toolkit_version");
    const std::string generator = take("dataset.generator");
    if (generator == "swissroll") {
      SwissRollSpec s;
      s.n_points = take_uint("dataset.n_points");
      s.noise_sd = take_double("dataset.noise_sd");
      s.turns = take_double("dataset.turns");
      m.dataset.generator = s;
    } else if (generator == "rings") {
      RingsSpec r;
      r.n_per_ring = take_uint("dataset.n_per_ring");
      const std::string radii = take("dataset.radii");
      const auto parts = split_commas(radii);
      if (parts.size() != r.radii.size()) manifest_error("dataset.radii needs four values");
      for (std::size_t i = 0; i < parts.size(); ++i) r.radii[i] = parse_double(parts[i]);
      r.noise_sd = take_double("dataset.noise_sd");
      m.dataset.generator = r;
    } else {
      manifest_error("unknown generator '" + generator + "'");
    }
    m.dataset.train_fraction = take_double("dataset.train_fraction");
    m.dataset.n_poison = take_uint("dataset.n_poison");
    m.dataset.seed = take_uint("dataset.seed");

    std::vector<std::size_t> widths;
    const std::string widths_text = take("arch.widths");
    for (auto part : split_commas(widths_text)) widths.push_back(parse_uint(part));
    m.arch = MlpArch(std::move(widths), parse_activation(take("arch.activation")));

    const std::string objective = take("train.objective");
    const double beta = take_double("train.beta");
    if (objective == "clean") {
      m.config.objective = ObjectiveSpec::clean();
      m.config.objective.beta = beta;
    } else if (objective == "poisoned") {
      m.config.objective = ObjectiveSpec::poisoned(beta);
    } else {
      manifest_error("unknown objective '" + objective + "'");
    }
    m.config.optimizer = parse_optimizer(take("train.optimizer"));
    m.config.learning_rate = take_double("train.learning_rate");
    m.config.momentum_coef = take_double("train.momentum_coef");
    m.config.batch_size = take_uint("train.batch_size");
    m.config.epochs = take_uint("train.epochs");
    m.config.checkpoint_every = take_uint("train.checkpoint_every");
    m.config.seed = take_uint("train.seed");

    if (auto it = kv.find("wall_clock"); it != kv.end()) {
      m.wall_clock = it->second;
      kv.erase(it);
    }
    for (auto it = kv.begin(); it != kv.end();) {
      if (it->first.starts_with("file.")) {
        m.files.emplace(it->first.substr(5), it->second);
        it = kv.erase(it);
      } else {
        ++it;
      }
    }
    if (!kv.empty()) manifest_error("unknown key '" + kv.begin()->first + "'");
    return m;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::format) throw;
    manifest_error(e.what());
  }
}

fs::path resolve_file(const fs::path& manifest_path, const std::string& file) {
  const fs::path p(file);
  if (p.is_absolute()) return p;
  return manifest_path.parent_path() / p;
}

void save_manifest(const fs::path& path, const RunManifest& manifest) {
  for (const auto& [role, file] : manifest.files) {
    if (!fs::exists(resolve_file(path, file))) {
      throw precondition_failed("manifest references missing file '" + file +
                                "' (" + role + ")");
    }
  }
  write_file(path, serialize_manifest(manifest));
}

RunManifest load_manifest(const fs::path& path) {
  return parse_manifest(read_file(path));
}

}  // namespace basinscope
