// forge: dual-pixel raindrop dataset generator and checker.
//
// Exit codes: 0 success, 1 partial failures / violations, 2 config or I/O error.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dpforge/config.hpp"
#include "dpforge/dataset.hpp"
#include "dpforge/errors.hpp"
#include "dpforge/metrics.hpp"
#include "dpforge/psf.hpp"
#include "dpforge/synthetic.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kConfigError = 2;

int run_gen(const std::string& config_path, const std::string& backgrounds, const std::string& out,
            const std::optional<std::uint64_t>& seed, const std::optional<int>& jobs) {
  auto cfg = dpforge::load_config(config_path);
  cfg.output_root = out;
  if (seed) cfg.master_seed = *seed;
  if (jobs) cfg.jobs = *jobs;
  cfg.validate();

  const auto report = dpforge::generate_dataset(cfg, backgrounds);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : report.failures) std::cerr << "failed: " << f.id << ": " << f.message << '\n';
  std::size_t train = 0;
  for (const auto& r : report.records) train += r.split == dpforge::Split::train ? 1 : 0;
  std::cout << "generated " << report.records.size() << " samples (" << train << " train, "
            << report.records.size() - train << " test), " << report.failures.size()
            << " failed\nmanifest: " << report.manifest_path.string() << '\n';
  return report.failures.empty() ? kOk : kPartial;
}

int run_verify(const std::string& manifest) {
  const auto report = dpforge::verify_manifest(manifest);
  for (const auto& v : report.violations) {
    std::cout << v.sample_id << '\t' << v.kind << '\t' << v.detail << '\n';
  }
  std::cout << report.records << " records, " << report.violations.size() << " violations\n";
  return report.ok() ? kOk : kPartial;
}

int run_psf(double radius, const std::string& side, const std::string& orientation, int rows,
            int cols, double shear, const std::string& out) {
  const dpforge::Side s = side == "left" ? dpforge::Side::left
                          : side == "right" ? dpforge::Side::right
                                            : dpforge::Side::full;
  const auto grid = dpforge::synthesize_half_disk_grid(radius, s, orientation == "back" ? 1 : -1,
                                                       {rows, cols, shear});
  dpforge::save_psf_grid(grid, out);
  std::cout << "wrote " << grid.rows() << "x" << grid.cols() << " " << dpforge::to_string(s)
            << " grid, kernel " << grid.kernel_size() << "px, radius " << radius << "px to "
            << out << '\n';
  return kOk;
}

int run_metrics(const std::string& pred, const std::string& gt, const std::string& manifest,
                const std::string& pred_key, const std::string& gt_key) {
  dpforge::MetricReport report;
  if (!manifest.empty()) {
    report = dpforge::evaluate_manifest(manifest, pred_key, gt_key);
  } else {
    if (pred.empty() || gt.empty()) throw dpforge::ConfigError("need --pred and --gt, or --manifest");
    report = dpforge::evaluate_pairs(pred, gt);
  }
  std::cout << dpforge::format_report(report);
  return report.unmatched.empty() ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-pixel raindrop dataset forge"};
  app.require_subcommand(1);

  std::string config_path, backgrounds, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  auto* gen = app.add_subcommand("gen", "Render rainy/clean DP samples from background pairs");
  gen->add_option("--config", config_path, "TOML generation config")->required()->check(CLI::ExistingFile);
  gen->add_option("--backgrounds", backgrounds, "Directory of <id>_left.png/<id>_right.png")->required();
  gen->add_option("--out", out, "Output root")->required();
  gen->add_option("--seed", seed, "Master seed (overrides the config)");
  gen->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  std::string manifest;
  auto* verify = app.add_subcommand("verify", "Re-check sample invariants of a generated set");
  verify->add_option("--manifest", manifest, "manifest.jsonl")->required();

  double radius = 0.0;
  std::string side = "left", orientation = "front", psf_out;
  int rows = 6, cols = 8;
  double shear = 0.15;
  auto* psf = app.add_subcommand("psf", "Write a synthesized half-disk PSF grid (.dppsf)");
  psf->add_option("--radius", radius, "PSF radius in pixels")->required()->check(CLI::NonNegativeNumber);
  psf->add_option("--side", side)->check(CLI::IsMember({"left", "right", "full"}));
  psf->add_option("--orientation", orientation)->check(CLI::IsMember({"front", "back"}));
  psf->add_option("--rows", rows)->check(CLI::PositiveNumber);
  psf->add_option("--cols", cols)->check(CLI::PositiveNumber);
  psf->add_option("--shear", shear, "Largest per-cell horizontal shear");
  psf->add_option("--out", psf_out)->required();

  std::string pred, gt, metrics_manifest, pred_key = "I_c", gt_key = "B_c";
  auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM between predictions and ground truth");
  metrics->add_option("--pred", pred, "Prediction PNG or directory");
  metrics->add_option("--gt", gt, "Ground-truth PNG or directory");
  metrics->add_option("--manifest", metrics_manifest, "Compare two file keys of a manifest instead");
  metrics->add_option("--pred-key", pred_key, "Manifest key used as prediction (default I_c)");
  metrics->add_option("--gt-key", gt_key, "Manifest key used as ground truth (default B_c)");

  int bg_count = 4, bg_width = 640, bg_height = 480;
  std::uint64_t bg_seed = 1;
  double bg_noise = 0.0;
  std::string bg_out;
  auto* backgrounds_cmd =
      app.add_subcommand("make-backgrounds", "Write procedural 16-bit background pairs for demos");
  backgrounds_cmd->add_option("--out", bg_out)->required();
  backgrounds_cmd->add_option("--count", bg_count)->check(CLI::PositiveNumber);
  backgrounds_cmd->add_option("--width", bg_width)->check(CLI::PositiveNumber);
  backgrounds_cmd->add_option("--height", bg_height)->check(CLI::PositiveNumber);
  backgrounds_cmd->add_option("--seed", bg_seed);
  backgrounds_cmd->add_option("--right-noise", bg_noise, "Gaussian noise sigma added to right halves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) return run_gen(config_path, backgrounds, out, seed, jobs);
    if (*verify) return run_verify(manifest);
    if (*psf) return run_psf(radius, side, orientation, rows, cols, shear, psf_out);
    if (*metrics) return run_metrics(pred, gt, metrics_manifest, pred_key, gt_key);
    if (*backgrounds_cmd) {
      dpforge::write_synthetic_backgrounds(bg_out, bg_count, bg_width, bg_height, bg_seed, bg_noise);
      std::cout << "wrote " << bg_count << " background pairs to " << bg_out << '\n';
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
