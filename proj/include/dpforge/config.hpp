#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dpforge/compositor.hpp"
#include "dpforge/optics.hpp"
#include "dpforge/raindrop.hpp"
#include "dpforge/toml_lite.hpp"

namespace dpforge {

enum class PsfSource { synthetic, file };

// Everything needed to expand a background directory into a dataset.
//
// TOML sections: [camera] [scene] [layout] [psf] [output]. Unknown keys are an
// error so that typos do not silently fall back to defaults.
struct GenerationConfig {
  CameraConfig camera;
  LayoutParams layout;  // also carries depth range and background depth
  RefractionOptions refraction;

  PsfSource psf_source = PsfSource::synthetic;
  HalfDiskOptions psf;
  std::filesystem::path psf_left_path;
  std::filesystem::path psf_right_path;
  PatchwiseOptions convolution;
  double mask_threshold = 0.05;

  int variants_per_background = 4;
  double split_ratio = 0.8;  // fraction of backgrounds assigned to train
  std::uint64_t master_seed = 0;
  int jobs = 0;  // 0 = all hardware threads
  std::filesystem::path output_root;

  void validate() const;

  // Builds render settings, loading calibrated PSF files when configured.
  RenderSettings render_settings() const;
};

GenerationConfig config_from_toml(const TomlDocument& doc);
GenerationConfig load_config(const std::filesystem::path& path);

}  // namespace dpforge
