#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dpforge/config.hpp"
#include "dpforge/raindrop.hpp"

namespace dpforge {

struct BackgroundPair {
  std::string id;
  std::filesystem::path left;
  std::filesystem::path right;
  int width = 0;
  int height = 0;
};

struct IngestResult {
  std::vector<BackgroundPair> pairs;  // sorted by id
  std::vector<std::string> warnings;  // one per rejected file or id
};

// Scans `dir` for <id>_left.png / <id>_right.png 16-bit grayscale pairs.
// Throws GenerationError("no background pairs ...") when nothing valid remains.
IngestResult ingest_backgrounds(const std::filesystem::path& dir);

enum class Split { train, test };
const char* to_string(Split split);

// Background-level split: ids are ranked by a seeded hash and the first
// round(n * ratio) go to train.
std::vector<Split> assign_splits(const std::vector<std::string>& ids, double ratio,
                                 std::uint64_t master_seed);

// Manifest keys of the files written per sample.
inline const std::vector<std::string>& sample_file_keys() {
  static const std::vector<std::string> keys{"I_l", "I_r", "I_c", "B_l", "B_r", "B_c",
                                             "M_l", "M_r", "M_c", "M_blur_l", "M_blur_r", "M_aifr"};
  return keys;
}

struct SampleRecord {
  std::string id;
  std::string background_id;
  int variant = 0;
  Split split = Split::train;
  std::uint64_t seed = 0;
  double raindrop_depth_mm = 0.0;
  double coc_radius_px = 0.0;
  double coc_radius_mm = 0.0;
  std::map<std::string, std::string> files;  // key -> path relative to the manifest
  RaindropLayout layout;
};

struct FailureRecord {
  std::string id;
  std::string message;
};

struct GenerationReport {
  std::vector<SampleRecord> records;
  std::vector<FailureRecord> failures;
  std::vector<std::string> warnings;
  std::filesystem::path manifest_path;
};

// Renders variants_per_background samples per background pair into
// config.output_root and writes manifest.jsonl there. Failed samples are
// recorded (and listed in failures.jsonl) rather than aborting the run.
GenerationReport generate_dataset(const GenerationConfig& config,
                                  const std::filesystem::path& backgrounds_dir);

// Expected sample count for a run.
constexpr std::size_t expected_sample_count(std::size_t backgrounds, int variants) {
  return backgrounds * static_cast<std::size_t>(variants);
}

std::string record_to_json_line(const SampleRecord& record);
SampleRecord record_from_json_line(const std::string& line);
std::vector<SampleRecord> read_manifest(const std::filesystem::path& path);

struct Violation {
  std::string sample_id;
  std::string kind;
  std::string detail;
};

struct VerifyReport {
  std::size_t records = 0;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Reloads every sample of a manifest and re-checks combined consistency,
// background purity, mask nesting and file presence.
VerifyReport verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace dpforge
