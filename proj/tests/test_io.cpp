// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>

#include "basinscope/io.hpp"
#include "support.hpp"

using namespace basinscope;
using namespace basinscope::testing;
namespace fs = std::filesystem;

namespace {

Checkpoint sample_checkpoint() {
  const MlpArch arch({2, 5, 3, 2}, Activation::relu);
  Rng rng(1);
  return Checkpoint{arch, 0x0123456789abcdefULL, random_params(arch, rng, 1.0)};
}

CheckpointFault fault_of(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    CHECK(e.kind() == ErrorKind::format);
    return e.fault();
  }
  FAIL("decode accepted corrupt bytes");
  return CheckpointFault::io;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("basinscope_test_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("crc32 check value") {
  const std::string s = "123456789";
  CHECK(crc32({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}) == 0xCBF43926u);
}

TEST_CASE("checkpoint layout") {
  const Checkpoint c = sample_checkpoint();
  const auto bytes = encode_checkpoint(c);
  // magic, version, activation, layer count, 4 widths, seed, payload, crc
  CHECK(bytes.size() == 4 + 2 + 1 + 1 + 4 * 4 + 8 + 8 * c.params.size() + 4);
  CHECK(std::memcmp(bytes.data(), "BSCP", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[7] == 3);
  CHECK(bytes[8] == 2);  // input width, little endian
  // First parameter, little endian.
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | bytes[32 + k];
  double first;
  std::memcpy(&first, &bits, sizeof first);
  CHECK(first == c.params[0]);
}

TEST_CASE("checkpoint round trip is exact") {
  const Checkpoint c = sample_checkpoint();
  CHECK(decode_checkpoint(encode_checkpoint(c)) == c);
  const fs::path dir = scratch_dir("round_trip");
  save_checkpoint(dir / "a.bscp", c);
  const Checkpoint back = load_checkpoint(dir / "a.bscp");
  CHECK(back == c);
  save_checkpoint(dir / "b.bscp", back);
  CHECK(read_file(dir / "a.bscp") == read_file(dir / "b.bscp"));
}

TEST_CASE("each corruption has its own fault") {
  const auto good = encode_checkpoint(sample_checkpoint());
  SUBCASE("magic") {
    auto b = good;
    b[0] = 'X';
    CHECK(fault_of(b) == CheckpointFault::bad_magic);
  }
  SUBCASE("version") {
    auto b = good;
    b[4] = 2;
    CHECK(fault_of(b) == CheckpointFault::version_mismatch);
  }
  SUBCASE("activation id") {
    auto b = good;
    b[6] = 9;
    CHECK(fault_of(b) == CheckpointFault::bad_header);
  }
  SUBCASE("zero width") {
    auto b = good;
    b[12] = 0;
    CHECK(fault_of(b) == CheckpointFault::bad_header);
  }
  SUBCASE("truncated") {
    auto b = good;
    b.pop_back();
    CHECK(fault_of(b) == CheckpointFault::truncated);
    b.resize(5);
    CHECK(fault_of(b) == CheckpointFault::truncated);
  }
  SUBCASE("extra bytes") {
    auto b = good;
    b.push_back(0);
    CHECK(fault_of(b) == CheckpointFault::length_mismatch);
  }
  SUBCASE("payload byte flipped") {
    auto b = good;
    b[40] ^= 0x10;
    CHECK(fault_of(b) == CheckpointFault::crc_mismatch);
  }
  SUBCASE("crc byte flipped") {
    auto b = good;
    b.back() ^= 0x01;
    CHECK(fault_of(b) == CheckpointFault::crc_mismatch);
  }
}

TEST_CASE("missing checkpoint file") {
  try {
    load_checkpoint(scratch_dir("missing") / "nope.bscp");
    FAIL("expected an error");
  } catch (const CheckpointError& e) {
    CHECK(e.fault() == CheckpointFault::io);
  }
}

TEST_CASE("shipped fixture loads") {
  const Checkpoint c = load_checkpoint(BASINSCOPE_FIXTURES "/swissroll_good_seed0.bscp");
  CHECK(c.arch == MlpArch::swissroll_default());
  CHECK(c.seed == 0);
  CHECK(c.params.size() == 1170);
}

TEST_CASE("manifest round trip") {
  const fs::path dir = scratch_dir("manifest");
  write_file(dir / "final.bscp", "x");
  write_file(dir / "metrics.csv", "x");
  RunManifest m;
  m.experiment = "train";
  m.dataset.seed = 17;
  m.dataset.generator = RingsSpec::with_gap(0.03);
  m.config.learning_rate = 0.1;
  m.config.objective = ObjectiveSpec::poisoned(0.9);
  m.config.optimizer = OptimizerKind::momentum;
  m.files["final"] = "final.bscp";
  m.files["metrics"] = "metrics.csv";
  const std::string text = serialize_manifest(m);
  CHECK(parse_manifest(text) == m);
  CHECK(text.find("wall_clock") == std::string::npos);

  save_manifest(dir / "manifest.txt", m);
  CHECK(load_manifest(dir / "manifest.txt") == m);
  CHECK(resolve_file(dir / "manifest.txt", "final.bscp") == dir / "final.bscp");

  m.wall_clock = "2026-01-01T00:00:00Z";
  CHECK(parse_manifest(serialize_manifest(m)) == m);
}

TEST_CASE("manifest errors") {
  const fs::path dir = scratch_dir("manifest_errors");
  RunManifest m;
  m.experiment = "train";
  m.files["final"] = "absent.bscp";
  try {
    save_manifest(dir / "manifest.txt", m);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("absent.bscp") != std::string::npos);
  }
  m.files.clear();
  const std::string text = serialize_manifest(m);
  CHECK_THROWS_AS(parse_manifest(text + "bogus.key = 1\n"), Error);
  CHECK_THROWS_AS(parse_manifest(text + "experiment = again\n"), Error);
  const std::size_t cut = text.find("train.epochs");
  REQUIRE(cut != std::string::npos);
  std::string missing = text;
  missing.erase(cut, text.find('\n', cut) - cut + 1);
  CHECK_THROWS_AS(parse_manifest(missing), Error);
}

TEST_CASE("doubles survive text with 17 digits") {
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-300.0, 300.0));
    const double back = parse_double(format_double(v));
    CHECK(std::memcmp(&v, &back, sizeof v) == 0);
  }
  CHECK(parse_double(format_double(0.1)) == 0.1);
  CHECK(std::isnan(parse_double(format_double(std::numeric_limits<double>::quiet_NaN()))));
  CHECK_THROWS_AS(parse_double("1.5x"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
  CHECK(parse_uint("42") == 42);
  CHECK_THROWS_AS(parse_uint("-1"), Error);
}

TEST_CASE("csv writer") {
  CsvWriter csv({"a", "b", "c"});
  csv.cell(0.5).cell(std::uint64_t{7}).cell("x");
  csv.end_row();
  CHECK(csv.text() == "a,b,c\n0.5,7,x\n");
  CsvWriter bad({"a", "b"});
  bad.cell(1.0);
  CHECK_THROWS_AS(bad.end_row(), Error);
}

TEST_CASE("dataset csv lists every part with its role") {
  LabeledDataset a = make_swissroll(4, 0.0, 1.5, 0);
  LabeledDataset b = make_swissroll(2, 0.0, 1.5, 1);
  b.role = Role::poison;
  const LabeledDataset* parts[] = {&a, &b};
  const std::string text = dataset_csv(parts);
  CHECK(text.rfind("x,y,label,role\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 7);
  CHECK(text.find(",poison\n") != std::string::npos);
}
