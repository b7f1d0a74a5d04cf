#include "dpforge/dataset.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <tuple>

#include <json.hpp>

#include "dpforge/compositor.hpp"
#include "dpforge/errors.hpp"
#include "dpforge/png_io.hpp"
#include "dpforge/seed.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dpforge {

const char* to_string(Split split) { return split == Split::train ? "train" : "test"; }

IngestResult ingest_backgrounds(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("background directory not found: " + dir.string());

  std::map<std::string, fs::path> lefts, rights;
  IngestResult result;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    auto ends_with = [&](std::string_view suffix) {
      return name.size() > suffix.size() && name.ends_with(suffix);
    };
    if (ends_with("_left.png")) {
      lefts[name.substr(0, name.size() - 9)] = entry.path();
    } else if (ends_with("_right.png")) {
      rights[name.substr(0, name.size() - 10)] = entry.path();
    }
  }

  std::set<std::string> ids;
  for (const auto& [id, p] : lefts) ids.insert(id);
  for (const auto& [id, p] : rights) ids.insert(id);

  for (const auto& id : ids) {
    auto l = lefts.find(id);
    auto r = rights.find(id);
    if (l == lefts.end() || r == rights.end()) {
      result.warnings.push_back(id + ": missing " + (l == lefts.end() ? "left" : "right") +
                                " counterpart");
      continue;
    }
    try {
      const auto li = read_png_info(l->second);
      const auto ri = read_png_info(r->second);
      for (const auto* info : {&li, &ri}) {
        if (!info->grayscale || info->bit_depth != 16) {
          throw FormatError("expected 16-bit single-channel PNG, got " +
                            std::to_string(info->bit_depth) + "-bit" +
                            (info->grayscale ? "" : " color"));
        }
      }
      if (li.width != ri.width || li.height != ri.height) {
        throw FormatError("left/right geometry mismatch");
      }
      result.pairs.push_back({id, l->second, r->second, li.width, li.height});
    } catch (const std::exception& e) {
      result.warnings.push_back(id + ": " + e.what());
    }
  }
  if (result.pairs.empty()) {
    throw GenerationError("no background pairs found in " + dir.string());
  }
  return result;
}

std::vector<Split> assign_splits(const std::vector<std::string>& ids, double ratio,
                                 std::uint64_t master_seed) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  const std::uint64_t salt = mix64(master_seed ^ 0x5b1d5b1d5b1d5b1dULL);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = mix64(salt ^ stable_hash(ids[a]));
    const auto kb = mix64(salt ^ stable_hash(ids[b]));
    return ka != kb ? ka < kb : ids[a] < ids[b];
  });
  const auto n_train = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(ids.size())));
  std::vector<Split> splits(ids.size(), Split::test);
  for (std::size_t i = 0; i < n_train && i < order.size(); ++i) splits[order[i]] = Split::train;
  return splits;
}

namespace {

json layout_to_json(const RaindropLayout& layout) {
  json shapes = json::array();
  for (const auto& s : layout.shapes) {
    shapes.push_back({{"cx", s.cx},
                      {"cy", s.cy},
                      {"radius_px", s.radius_px},
                      {"eccentricity", s.eccentricity},
                      {"axis_angle_rad", s.axis_angle_rad},
                      {"cap_height_ratio", s.cap_height_ratio},
                      {"tail_length_px", s.tail_length_px}});
  }
  return {{"seed", layout.seed},
          {"background_depth_mm", layout.geometry.background_depth_mm},
          {"raindrop_depth_mm", layout.geometry.raindrop_depth_mm},
          {"shapes", shapes}};
}

RaindropLayout layout_from_json(const json& j) {
  RaindropLayout layout;
  layout.seed = j.at("seed").get<std::uint64_t>();
  layout.geometry.background_depth_mm = j.at("background_depth_mm").get<double>();
  layout.geometry.raindrop_depth_mm = j.at("raindrop_depth_mm").get<double>();
  for (const auto& s : j.at("shapes")) {
    layout.shapes.push_back({s.at("cx").get<double>(), s.at("cy").get<double>(),
                             s.at("radius_px").get<double>(), s.at("eccentricity").get<double>(),
                             s.at("axis_angle_rad").get<double>(),
                             s.at("cap_height_ratio").get<double>(),
                             s.at("tail_length_px").get<double>()});
  }
  return layout;
}

// Combined codes are formed from the stored side codes, so the three files
// satisfy |2c - (l + r)| <= 1 exactly.
GrayImage combine_codes(const GrayImage& l, const GrayImage& r) {
  GrayImage c{l.width, l.height, 16, {}};
  c.samples.resize(l.samples.size());
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    c.samples[i] = static_cast<std::uint16_t>((static_cast<unsigned>(l.samples[i]) + r.samples[i] + 1) / 2);
  }
  return c;
}

void write_sample(const DpSample& s, const fs::path& root, const SampleRecord& rec) {
  auto path = [&](const char* key) { return root / rec.files.at(key); };
  fs::create_directories(path("I_l").parent_path());
  const auto il = quantize16(s.rainy_left);
  const auto ir = quantize16(s.rainy_right);
  const auto bl = quantize16(s.clean_left);
  const auto br = quantize16(s.clean_right);
  write_gray_png(path("I_l"), il);
  write_gray_png(path("I_r"), ir);
  write_gray_png(path("I_c"), combine_codes(il, ir));
  write_gray_png(path("B_l"), bl);
  write_gray_png(path("B_r"), br);
  write_gray_png(path("B_c"), combine_codes(bl, br));
  write_gray_png(path("M_l"), binary_mask8(s.mask_left));
  write_gray_png(path("M_r"), binary_mask8(s.mask_right));
  write_gray_png(path("M_c"), binary_mask8(s.mask_combined));
  write_gray_png(path("M_blur_l"), quantize16(s.soft_mask_left.plane()));
  write_gray_png(path("M_blur_r"), quantize16(s.soft_mask_right.plane()));
  write_gray_png(path("M_aifr"), binary_mask8(s.mask_aifr));
}

}  // namespace

std::string record_to_json_line(const SampleRecord& r) {
  json j{{"id", r.id},
         {"background_id", r.background_id},
         {"variant", r.variant},
         {"split", to_string(r.split)},
         {"seed", r.seed},
         {"d_mm", r.raindrop_depth_mm},
         {"r_px", r.coc_radius_px},
         {"r_mm", r.coc_radius_mm},
         {"files", r.files},
         {"layout", layout_to_json(r.layout)}};
  return j.dump();
}

SampleRecord record_from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    SampleRecord r;
    r.id = j.at("id").get<std::string>();
    r.background_id = j.at("background_id").get<std::string>();
    r.variant = j.at("variant").get<int>();
    const auto split = j.at("split").get<std::string>();
    if (split != "train" && split != "test") throw FormatError("bad split '" + split + "'");
    r.split = split == "train" ? Split::train : Split::test;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.raindrop_depth_mm = j.at("d_mm").get<double>();
    r.coc_radius_px = j.at("r_px").get<double>();
    r.coc_radius_mm = j.at("r_mm").get<double>();
    r.files = j.at("files").get<std::map<std::string, std::string>>();
    r.layout = layout_from_json(j.at("layout"));
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest record: ") + e.what());
  }
}

std::vector<SampleRecord> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  std::vector<SampleRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) records.push_back(record_from_json_line(line));
  }
  return records;
}

GenerationReport generate_dataset(const GenerationConfig& config, const fs::path& backgrounds_dir) {
  config.validate();
  if (config.output_root.empty()) throw ConfigError("output root is not set");
  const auto ingest = ingest_backgrounds(backgrounds_dir);
  const RenderSettings settings = config.render_settings();

  std::vector<std::string> ids;
  for (const auto& p : ingest.pairs) ids.push_back(p.id);
  const auto splits = assign_splits(ids, config.split_ratio, config.master_seed);

  const int variants = config.variants_per_background;
  const std::size_t total = expected_sample_count(ingest.pairs.size(), variants);
  std::vector<std::optional<SampleRecord>> records(total);
  std::vector<std::optional<FailureRecord>> failures(total);

  fs::create_directories(config.output_root);
  const int threads = config.jobs > 0 ? config.jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t n = 0; n < total; ++n) {
    const auto& bg = ingest.pairs[n / variants];
    const int variant = static_cast<int>(n % variants);
    SampleRecord rec;
    rec.background_id = bg.id;
    rec.variant = variant;
    rec.id = bg.id + "_v" + std::to_string(variant);
    rec.split = splits[n / variants];
    rec.seed = derive_sample_seed(config.master_seed, bg.id, static_cast<std::uint64_t>(variant));
    const std::string dir = std::string(to_string(rec.split)) + "/" + rec.id + "/";
    for (const auto& key : sample_file_keys()) rec.files[key] = dir + key + ".png";
    try {
      const auto left = read_plane(bg.left);
      const auto right = read_plane(bg.right);
      rec.layout = sample_layout(config.layout, left.width(), left.height(), rec.seed);
      const auto sample = render_sample(left, right, rec.layout, config.camera, settings);
      rec.raindrop_depth_mm = sample.geometry.raindrop_depth_mm;
      rec.coc_radius_px = sample.coc.px;
      rec.coc_radius_mm = sample.coc.mm;
      write_sample(sample, config.output_root, rec);
      records[n] = std::move(rec);
    } catch (const std::exception& e) {
      failures[n] = FailureRecord{rec.id, e.what()};
    }
  }

  GenerationReport report;
  report.warnings = ingest.warnings;
  report.manifest_path = config.output_root / "manifest.jsonl";
  std::ofstream manifest(report.manifest_path, std::ios::trunc);
  if (!manifest) throw FormatError("cannot write " + report.manifest_path.string());
  for (auto& r : records) {
    if (!r) continue;
    manifest << record_to_json_line(*r) << '\n';
    report.records.push_back(std::move(*r));
  }
  for (auto& f : failures) {
    if (f) report.failures.push_back(std::move(*f));
  }
  const auto failures_path = config.output_root / "failures.jsonl";
  if (report.failures.empty()) {
    fs::remove(failures_path);
  } else {
    std::ofstream out(failures_path, std::ios::trunc);
    for (const auto& f : report.failures) out << json{{"id", f.id}, {"error", f.message}}.dump() << '\n';
  }
  return report;
}

namespace {

class SampleChecker {
 public:
  SampleChecker(const SampleRecord& rec, const fs::path& root, std::vector<Violation>& out)
      : rec_(rec), root_(root), out_(out) {}

  void run() {
    std::map<std::string, GrayImage> img;
    for (const auto& key : sample_file_keys()) {
      auto it = rec_.files.find(key);
      if (it == rec_.files.end()) {
        flag("missing-file", key + " not listed in record");
        continue;
      }
      const fs::path p = root_ / it->second;
      if (!fs::exists(p)) {
        flag("missing-file", it->second);
        continue;
      }
      try {
        img.emplace(key, read_gray_png(p));
      } catch (const std::exception& e) {
        flag("unreadable-file", e.what());
      }
    }
    if (img.size() != sample_file_keys().size()) return;

    const auto& ref = img.at("I_l");
    for (const auto& [key, g] : img) {
      if (g.width != ref.width || g.height != ref.height) {
        flag("geometry", key + " differs from I_l");
        return;
      }
    }
    for (const char* key : {"I_l", "I_r", "I_c", "B_l", "B_r", "B_c", "M_blur_l", "M_blur_r"}) {
      if (img.at(key).bit_depth != 16) flag("bit-depth", std::string(key) + " is not 16-bit");
    }
    for (const char* key : {"M_l", "M_r", "M_c", "M_aifr"}) {
      const auto& m = img.at(key);
      if (std::any_of(m.samples.begin(), m.samples.end(), [&](auto v) { return v != 0 && v != m.max_code(); })) {
        flag("mask-binary", std::string(key) + " is not binary");
      }
    }

    const std::size_t n = ref.samples.size();
    auto count = [&](auto pred) {
      std::size_t c = 0;
      for (std::size_t i = 0; i < n; ++i) c += pred(i) ? 1 : 0;
      return c;
    };
    auto s = [&](const char* key, std::size_t i) { return static_cast<int>(img.at(key).samples[i]); };

    for (auto [c, l, r] : {std::tuple{"I_c", "I_l", "I_r"}, std::tuple{"B_c", "B_l", "B_r"}}) {
      const auto bad = count([&](std::size_t i) { return std::abs(2 * s(c, i) - s(l, i) - s(r, i)) > 1; });
      if (bad) flag("combined-consistency", std::string(c) + " != average at " + std::to_string(bad) + " px");
    }
    for (auto [i_key, b_key, m_key] :
         {std::tuple{"I_l", "B_l", "M_blur_l"}, std::tuple{"I_r", "B_r", "M_blur_r"}}) {
      const auto bad = count([&](std::size_t i) { return s(m_key, i) == 0 && s(i_key, i) != s(b_key, i); });
      if (bad) flag("background-purity", std::string(i_key) + " differs from background outside " + m_key + " at " + std::to_string(bad) + " px");
    }
    for (auto [bin, soft] : {std::pair{"M_aifr", "M_blur_l"}, std::pair{"M_aifr", "M_blur_r"},
                             std::pair{"M_l", "M_blur_l"}, std::pair{"M_r", "M_blur_r"}}) {
      const auto bad = count([&](std::size_t i) { return s(bin, i) != 0 && s(soft, i) == 0; });
      if (bad) flag("mask-nesting", std::string(bin) + " outside support of " + soft + " at " + std::to_string(bad) + " px");
    }
    const auto bad_max = count([&](std::size_t i) { return s("M_c", i) != std::max(s("M_l", i), s("M_r", i)); });
    if (bad_max) flag("mask-nesting", "M_c != max(M_l, M_r) at " + std::to_string(bad_max) + " px");
  }

 private:
  void flag(std::string kind, std::string detail) {
    out_.push_back({rec_.id, std::move(kind), std::move(detail)});
  }

  const SampleRecord& rec_;
  const fs::path& root_;
  std::vector<Violation>& out_;
};

}  // namespace

VerifyReport verify_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw FormatError("cannot open manifest " + manifest_path.string());
  const fs::path root = manifest_path.parent_path();

  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }

  VerifyReport report;
  report.records = lines.size();
  std::vector<std::vector<Violation>> per_record(lines.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      const auto id = record_from_json_line(lines[i]).id;
      if (!seen.insert(id).second) per_record[i].push_back({id, "duplicate-id", "sample id repeated"});
    } catch (const std::exception&) {
    }
  }

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      const auto rec = record_from_json_line(lines[i]);
      SampleChecker(rec, root, per_record[i]).run();
    } catch (const std::exception& e) {
      per_record[i].push_back({"line " + std::to_string(i + 1), "unreadable-record", e.what()});
    }
  }
  for (auto& v : per_record) {
    report.violations.insert(report.violations.end(), v.begin(), v.end());
  }
  return report;
}

}  // namespace dpforge
