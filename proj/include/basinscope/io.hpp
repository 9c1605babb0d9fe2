// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "basinscope/datasets.hpp"
#include "basinscope/error.hpp"
#include "basinscope/mlp.hpp"
#include "basinscope/optim.hpp"

namespace basinscope {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Checkpoints
//
//   "BSCP" | u16 version | u8 activation | u8 layer count L
//   | (L + 1) x u32 widths | u64 seed | P x f64 | u32 CRC32(payload)
//
// All integers and floats little-endian.

inline constexpr std::uint16_t kCheckpointVersion = 1;

enum class CheckpointFault : std::uint8_t {
  io,
  bad_magic,
  version_mismatch,
  bad_header,
  truncated,
  length_mismatch,
  crc_mismatch,
};

std::string_view to_string(CheckpointFault fault);

class CheckpointError : public Error {
 public:
  CheckpointError(CheckpointFault fault, const std::string& what)
      : Error(ErrorKind::format, what), fault_(fault) {}
  CheckpointFault fault() const { return fault_; }

 private:
  CheckpointFault fault_;
};

struct Checkpoint {
  MlpArch arch;
  std::uint64_t seed = 0;
  ParamVector params;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run manifests: flat `key = value` text, one entry per line.

struct RunManifest {
  std::string experiment;
  DatasetSpec dataset;
  MlpArch arch = MlpArch::swissroll_default();
  TrainConfig config;
  /// Role name to path. Relative paths are taken relative to the manifest.
  std::map<std::string, std::string> files;
  std::string toolkit_version{kToolkitVersion};
  std::optional<std::string> wall_clock;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string serialize_manifest(const RunManifest& manifest);
RunManifest parse_manifest(std::string_view text);

/// Throws a precondition error if any referenced file is missing.
void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);

/// `file` resolved against the directory holding `manifest_path`.
std::filesystem::path resolve_file(const std::filesystem::path& manifest_path,
                                   const std::string& file);

// ---------------------------------------------------------------------------
// Text output

/// Shortest "%.17g" rendering; parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

/// Builds a CSV in memory: header row first, then one call per row.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  CsvWriter& cell(double value);
  CsvWriter& cell(std::uint64_t value);
  CsvWriter& cell(std::string_view value);
  void end_row();

  const std::string& text() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string text_;
};

void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// x,y,label,role
std::string dataset_csv(std::span<const LabeledDataset* const> parts);
/// epoch,train_loss,train_acc,test_acc
std::string metrics_csv(std::span<const EpochMetrics> metrics);

}  // namespace basinscope
