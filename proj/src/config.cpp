#include "dpforge/config.hpp"

#include <functional>
#include <map>
#include <string>

#include "dpforge/errors.hpp"

namespace dpforge {

void GenerationConfig::validate() const {
  try {
    camera.validate();
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("[camera] ") + e.what());
  }
  layout.validate();
  if (!(refraction.water_ior >= 1.0)) throw ConfigError("water_ior must be >= 1");
  if (!(refraction.tir_darkening >= 0.0 && refraction.tir_darkening <= 1.0)) {
    throw ConfigError("tir_darkening must lie in [0, 1]");
  }
  if (psf.rows < 1 || psf.cols < 1) throw ConfigError("psf rows/cols must be >= 1");
  if (psf_source == PsfSource::file && (psf_left_path.empty() || psf_right_path.empty())) {
    throw ConfigError("psf source 'file' needs both left and right paths");
  }
  if (convolution.overlap_px < 0) throw ConfigError("overlap_px must be >= 0");
  if (!(mask_threshold > 0.0 && mask_threshold < 1.0)) throw ConfigError("mask_threshold must lie in (0, 1)");
  if (variants_per_background < 1) throw ConfigError("variants_per_background must be >= 1");
  if (!(split_ratio >= 0.0 && split_ratio <= 1.0)) throw ConfigError("split_ratio must lie in [0, 1]");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
}

RenderSettings GenerationConfig::render_settings() const {
  RenderSettings s;
  s.psf = psf;
  s.convolution = convolution;
  s.refraction = refraction;
  s.mask_threshold = mask_threshold;
  if (psf_source == PsfSource::file) {
    s.left_template = load_psf_grid(psf_left_path);
    s.right_template = load_psf_grid(psf_right_path);
  }
  return s;
}

namespace {

double as_number(const TomlDocument::Value& v, const std::string& key) {
  if (auto* d = std::get_if<double>(&v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw ConfigError("'" + key + "' must be a number");
}

std::int64_t as_integer(const TomlDocument::Value& v, const std::string& key) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw ConfigError("'" + key + "' must be an integer");
}

std::string as_string(const TomlDocument::Value& v, const std::string& key) {
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError("'" + key + "' must be a string");
}

using Setter = std::function<void(const TomlDocument::Value&, const std::string&)>;

auto number(double& field) {
  return [&field](const TomlDocument::Value& v, const std::string& k) { field = as_number(v, k); };
}
auto integer(int& field) {
  return [&field](const TomlDocument::Value& v, const std::string& k) {
    field = static_cast<int>(as_integer(v, k));
  };
}

}  // namespace

GenerationConfig config_from_toml(const TomlDocument& doc) {
  GenerationConfig cfg;
  std::string psf_source = "synthetic";
  std::string left_path, right_path, output_root;
  std::int64_t seed = 0;

  const std::map<std::string, std::map<std::string, Setter>> schema{
      {"camera",
       {{"focal_length_mm", number(cfg.camera.focal_length_mm)},
        {"f_stop", number(cfg.camera.f_stop)},
        {"pixel_pitch_um", number(cfg.camera.pixel_pitch_um)}}},
      {"scene",
       {{"background_depth_mm", number(cfg.layout.background_depth_mm)},
        {"depth_min_mm", number(cfg.layout.depth_min_mm)},
        {"depth_max_mm", number(cfg.layout.depth_max_mm)}}},
      {"layout",
       {{"mean_drop_count", number(cfg.layout.mean_drop_count)},
        {"radius_min_px", number(cfg.layout.radius_min_px)},
        {"radius_max_px", number(cfg.layout.radius_max_px)},
        {"coverage_target", number(cfg.layout.coverage_target)},
        {"tail_probability", number(cfg.layout.tail_probability)},
        {"tail_length_min", number(cfg.layout.tail_length_min)},
        {"tail_length_max", number(cfg.layout.tail_length_max)},
        {"eccentricity_max", number(cfg.layout.eccentricity_max)},
        {"cap_height_min", number(cfg.layout.cap_height_min)},
        {"cap_height_max", number(cfg.layout.cap_height_max)},
        {"max_adjust_steps", integer(cfg.layout.max_adjust_steps)},
        {"water_ior", number(cfg.refraction.water_ior)},
        {"tir_darkening", number(cfg.refraction.tir_darkening)}}},
      {"psf",
       {{"rows", integer(cfg.psf.rows)},
        {"cols", integer(cfg.psf.cols)},
        {"max_shear", number(cfg.psf.max_shear)},
        {"overlap_px", integer(cfg.convolution.overlap_px)},
        {"fft_min_kernel", integer(cfg.convolution.fft_min_kernel)},
        {"mask_threshold", number(cfg.mask_threshold)},
        {"source", [&](const auto& v, const auto& k) { psf_source = as_string(v, k); }},
        {"left_path", [&](const auto& v, const auto& k) { left_path = as_string(v, k); }},
        {"right_path", [&](const auto& v, const auto& k) { right_path = as_string(v, k); }}}},
      {"output",
       {{"variants_per_background", integer(cfg.variants_per_background)},
        {"split_ratio", number(cfg.split_ratio)},
        {"seed", [&](const auto& v, const auto& k) { seed = as_integer(v, k); }},
        {"jobs", integer(cfg.jobs)},
        {"root", [&](const auto& v, const auto& k) { output_root = as_string(v, k); }}}},
  };

  for (const auto& name : doc.table_names()) {
    const auto* table = doc.table(name);
    if (name.empty()) {
      if (!table->empty()) throw ConfigError("config keys must live inside a [section]");
      continue;
    }
    auto section = schema.find(name);
    if (section == schema.end()) throw ConfigError("unknown config section [" + name + "]");
    for (const auto& [key, value] : *table) {
      auto setter = section->second.find(key);
      if (setter == section->second.end()) {
        throw ConfigError("unknown key '" + key + "' in [" + name + "]");
      }
      setter->second(value, name + "." + key);
    }
  }

  if (psf_source == "synthetic") {
    cfg.psf_source = PsfSource::synthetic;
  } else if (psf_source == "file") {
    cfg.psf_source = PsfSource::file;
  } else {
    throw ConfigError("psf.source must be 'synthetic' or 'file'");
  }
  cfg.psf_left_path = left_path;
  cfg.psf_right_path = right_path;
  cfg.output_root = output_root;
  if (seed < 0) throw ConfigError("output.seed must be >= 0");
  cfg.master_seed = static_cast<std::uint64_t>(seed);
  cfg.camera.focus_distance_mm = cfg.layout.background_depth_mm;
  cfg.validate();
  return cfg;
}

GenerationConfig load_config(const std::filesystem::path& path) {
  auto cfg = config_from_toml(TomlDocument::load(path));
  // Relative PSF paths resolve against the config file's directory.
  const auto base = path.parent_path();
  if (!cfg.psf_left_path.empty() && cfg.psf_left_path.is_relative()) cfg.psf_left_path = base / cfg.psf_left_path;
  if (!cfg.psf_right_path.empty() && cfg.psf_right_path.is_relative()) cfg.psf_right_path = base / cfg.psf_right_path;
  return cfg;
}

}  // namespace dpforge
