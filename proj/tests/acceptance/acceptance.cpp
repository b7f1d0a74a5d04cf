// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.
// Usage: acceptance <path-to-forge>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dpforge/compositor.hpp"
#include "dpforge/convolve.hpp"
#include "dpforge/dataset.hpp"
#include "dpforge/metrics.hpp"
#include "dpforge/optics.hpp"
#include "dpforge/psf.hpp"
#include "dpforge/raindrop.hpp"
#include "support/oracles.hpp"

using namespace dpforge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double max_abs(const ImagePlane& a, const ImagePlane& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a.pixels()[i] - b.pixels()[i]));
  return w;
}

Outcome in_focus() {
  const int w = 320, h = 240;
  const auto bg = oracle::random_plane(w, h, 21);
  LayoutParams p;
  p.radius_max_px = 24.0;
  auto layout = sample_layout(p, w, h, 8);
  layout.geometry.raindrop_depth_mm = layout.geometry.background_depth_mm;
  const auto s = render_sample(bg, bg, layout, CameraConfig{});
  double outside = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (s.mask_aifr.at(x, y) == 0.0) {
        outside = std::max(outside, std::abs(s.rainy_left.at(x, y) - bg.at(x, y)));
        outside = std::max(outside, std::abs(s.rainy_right.at(x, y) - bg.at(x, y)));
      }
  const double lr = max_abs(s.rainy_left, s.rainy_right);
  return {s.coc.px == 0.0 && outside == 0.0 && lr == 0.0 && s.mask_aifr.coverage() > 0.0,
          fmt("r_px=%g max|I-B| outside mask=%g max|I_l-I_r|=%g", s.coc.px, outside, lr)};
}

Outcome coc_oracle() {
  const CameraConfig cam;
  const double a = std::abs(coc_radius(cam, {10000.0, 200.0}).mm);
  const double b = std::abs(coc_radius(cam, {10000.0, 250.0}).mm);
  const bool ok = std::abs(a - 0.0306403) <= 1e-6 && std::abs(b - 0.0243872) <= 1e-6;
  return {ok, fmt("|r|(200)=%.9f |r|(250)=%.9f mm", a, b)};
}

Outcome disparity_law() {
  const int w = 480, h = 360, cx = 240, cy = 180;
  bool ok = true;
  std::ostringstream detail;
  const auto texture = oracle::random_plane(w, h, 5);
  for (double r : {5.0, 10.0, 20.0}) {
    RaindropMask m(w, h, MaskKind::binary);
    m.set(cx, cy, 1.0);
    ImagePlane drop(w, h, 0.0);
    drop.at(cx, cy) = 1.0;
    const auto l = blur_side(drop, m, synthesize_half_disk_grid(r, Side::left, -1));
    const auto rr = blur_side(drop, m, synthesize_half_disk_grid(r, Side::right, -1));
    const int reach = static_cast<int>(std::ceil(1.5 * r)) + 2;
    const double lag = oracle::xcorr_lag(l.raindrops, rr.raindrops, cx - reach, cy - reach, cx + reach + 1,
                                         cy + reach + 1, reach + 4);
    const double expected = 8.0 * r / (3.0 * std::numbers::pi);
    ok &= lag > 0.0 && std::abs(lag - expected) <= 0.1 * expected;

    // textured background far from the drop, identical on both sides
    const auto il = alpha_blend(l.alpha, l.raindrops, texture);
    const auto ir = alpha_blend(rr.alpha, rr.raindrops, texture);
    const double bg_lag = oracle::xcorr_lag(il, ir, 20, 20, 120, 120, 10);
    ok &= std::abs(bg_lag) < 0.5;
    detail << "r=" << r << " lag=" << lag << " (8r/3pi=" << expected << ") bg_lag=" << bg_lag << "; ";
  }
  return {ok, detail.str()};
}

Outcome convolution_oracle() {
  PatchwiseOptions direct, fft;
  direct.method = ConvolutionMethod::direct;
  fft.method = ConvolutionMethod::fft;
  direct.clamp_output = fft.clamp_output = false;
  const auto grid = synthesize_half_disk_grid(8.0, Side::left, -1, {2, 2, 0.15});
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto img = oracle::random_plane(64, 64, 100 + seed);
    worst = std::max(worst, max_abs(patchwise_convolve(img, grid, fft), patchwise_convolve(img, grid, direct)));
  }
  const auto k = synthesize_half_disk_grid(6.0, Side::right, -1, {1, 1, 0.0}).kernel(0, 0);
  const auto img = oracle::random_plane(128, 96, 7);
  const double global = max_abs(patchwise_convolve(img, PsfGrid::uniform(3, 4, k), fft),
                                oracle::convolve_global(img, k));
  return {worst <= 1e-5 && global <= 1e-4, fmt("fft vs direct max=%g, uniform vs global max=%g", worst, global)};
}

Outcome energy() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto grid = synthesize_half_disk_grid(4.0 + 3.0 * seed, seed % 2 ? Side::left : Side::right, -1,
                                                {3, 4, 0.15});
    const auto img = oracle::random_plane(256, 192, 40 + seed);
    const auto out = patchwise_convolve(img, grid);
    const int m = grid.kernel_size() / 2;
    double a = 0.0, b = 0.0;
    for (int y = m; y < img.height() - m; ++y)
      for (int x = m; x < img.width() - m; ++x) {
        a += img.at(x, y);
        b += out.at(x, y);
      }
    const double n = static_cast<double>(img.width() - 2 * m) * (img.height() - 2 * m);
    worst = std::max(worst, std::abs(a - b) / n);
  }
  return {worst <= 1e-3, fmt("max interior mean drift=%g", worst)};
}

int run(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

Outcome determinism(const std::string& forge, const fs::path& work) {
  const auto bgs = work / "backgrounds";
  const auto cfg = work / "gen.toml";
  {
    std::ofstream f(cfg);
    f << "[output]\nseed = 2024\nvariants_per_background = 4\n";
  }
  if (run(forge + " make-backgrounds --out " + bgs.string() + " --count 5 --width 640 --height 480 --seed 3 --right-noise 0.005") != 0)
    return {false, "make-backgrounds failed"};
  const auto gen = [&](const fs::path& out, int jobs) {
    return run(forge + " gen --config " + cfg.string() + " --backgrounds " + bgs.string() + " --out " +
               out.string() + " --jobs " + std::to_string(jobs));
  };
  if (gen(work / "run_a", 0) != 0 || gen(work / "run_b", 1) != 0) return {false, "forge gen failed"};
  const auto diff = oracle::compare_trees(work / "run_a", work / "run_b");
  const auto records = read_manifest(work / "run_a" / "manifest.jsonl");
  std::vector<std::string> ids;
  for (int i = 0; i < 613; ++i) ids.push_back("scene" + std::to_string(i));
  const auto splits = assign_splits(ids, 0.8, 2024);
  const auto train = 4 * std::count(splits.begin(), splits.end(), Split::train);
  const bool ok = diff.empty() && records.size() == 20 && expected_sample_count(5, 4) == records.size() &&
                  expected_sample_count(613, 4) == 2452 && train == 1960 && 2452 - train == 492;
  std::ostringstream d;
  d << "trees " << (diff.empty() ? "identical" : diff) << ", samples=" << records.size()
    << ", 613x4=" << expected_sample_count(613, 4) << " (train " << train << " / test " << 2452 - train << ")";
  return {ok, d.str()};
}

Outcome verify(const std::string& forge, const fs::path& work) {
  const auto manifest = work / "run_a" / "manifest.jsonl";
  if (!fs::exists(manifest)) return {false, "no manifest from the determinism run"};
  const int code = run(forge + " verify --manifest " + manifest.string());
  const auto report = verify_manifest(manifest);
  return {code == 0 && report.ok() && report.records == 20,
          fmt("forge verify exit=%g records=%g violations=%g", code, static_cast<double>(report.records),
              static_cast<double>(report.violations.size()))};
}

Outcome metrics_oracle() {
  const auto a = oracle::random_plane(64, 48, 1);
  auto b = oracle::random_plane(64, 48, 2);
  for (std::size_t i = 0; i < b.size(); ++i) b.pixels()[i] = 0.5 * (a.pixels()[i] + b.pixels()[i]);
  const double self = ssim(a, a);
  const double p = psnr_from_mse(0.01, 1.0);
  const double asym = std::abs(ssim(a, b) - ssim(b, a));
  return {self == 1.0 && std::abs(p - 20.0) < 1e-12 && asym <= 1e-9 && psnr(a, a) == 100.0,
          fmt("SSIM(x,x)=%.17g PSNR(mse 0.01)=%.12g |SSIM(a,b)-SSIM(b,a)|=%g", self, p, asym)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <forge executable>\n");
    return 2;
  }
  const std::string forge = argv[1];
  const auto work = oracle::fresh_dir("acceptance");

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"in-focus degeneracy", in_focus},
      {"CoC formula oracle", coc_oracle},
      {"disparity law", disparity_law},
      {"convolution oracle", convolution_oracle},
      {"energy conservation", energy},
      {"pipeline determinism + counts", [&] { return determinism(forge, work); }},
      {"sample invariants via forge verify", [&] { return verify(forge, work); }},
      {"metrics oracle", metrics_oracle},
  };

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
