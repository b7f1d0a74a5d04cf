#include "dpforge/convolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dpforge/errors.hpp"

namespace dpforge {

namespace {

// FFTW's planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class FftwPlan {
 public:
  explicit FftwPlan(fftw_plan plan) : plan_(plan) {
    if (!plan_) throw std::runtime_error("FFTW planning failed");
  }
  ~FftwPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

struct Region {
  int x0, y0, x1, y1;  // half-open
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

// Input block covering `out` plus a kernel half-width halo, edge-replicated.
std::vector<double> gather_block(const ImagePlane& img, const Region& out, int half) {
  const int bw = out.width() + 2 * half;
  const int bh = out.height() + 2 * half;
  std::vector<double> block(static_cast<std::size_t>(bw) * bh);
  for (int j = 0; j < bh; ++j) {
    const int y = std::clamp(out.y0 - half + j, 0, img.height() - 1);
    for (int i = 0; i < bw; ++i) {
      const int x = std::clamp(out.x0 - half + i, 0, img.width() - 1);
      block[static_cast<std::size_t>(j) * bw + i] = img.at(x, y);
    }
  }
  return block;
}

std::vector<double> convolve_direct(const std::vector<double>& block, const Region& out,
                                    const PsfKernel& kernel) {
  const int half = kernel.half();
  const int bw = out.width() + 2 * half;
  std::vector<double> result(static_cast<std::size_t>(out.width()) * out.height(), 0.0);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      double acc = 0.0;
      for (int dy = -half; dy <= half; ++dy) {
        const double* row = &block[static_cast<std::size_t>(y + half - dy) * bw + (x + half)];
        for (int dx = -half; dx <= half; ++dx) {
          acc += kernel.at(dx, dy) * row[-dx];
        }
      }
      result[static_cast<std::size_t>(y) * out.width() + x] = acc;
    }
  }
  return result;
}

// Circular convolution of the block with the kernel; the wrap-around only
// touches the first k-1 rows/columns, which are exactly the halo discarded here.
std::vector<double> convolve_fft(const std::vector<double>& block, const Region& out,
                                 const PsfKernel& kernel) {
  const int k = kernel.size();
  const int bw = out.width() + k - 1;
  const int bh = out.height() + k - 1;
  const int cw = bw / 2 + 1;
  const std::size_t real_n = static_cast<std::size_t>(bw) * bh;
  const std::size_t complex_n = static_cast<std::size_t>(cw) * bh;

  auto signal = fftw_buffer<double>(real_n);
  auto taps = fftw_buffer<double>(real_n);
  auto signal_hat = fftw_buffer<fftw_complex>(complex_n);
  auto taps_hat = fftw_buffer<fftw_complex>(complex_n);

  std::unique_ptr<FftwPlan> fwd_signal, fwd_taps, inverse;
  {
    std::lock_guard lock(planner_mutex());
    fwd_signal = std::make_unique<FftwPlan>(
        fftw_plan_dft_r2c_2d(bh, bw, signal.get(), signal_hat.get(), FFTW_ESTIMATE));
    fwd_taps = std::make_unique<FftwPlan>(
        fftw_plan_dft_r2c_2d(bh, bw, taps.get(), taps_hat.get(), FFTW_ESTIMATE));
    inverse = std::make_unique<FftwPlan>(
        fftw_plan_dft_c2r_2d(bh, bw, signal_hat.get(), signal.get(), FFTW_ESTIMATE));
  }

  std::copy(block.begin(), block.end(), signal.get());
  std::fill(taps.get(), taps.get() + real_n, 0.0);
  const auto weights = kernel.weights();
  for (int j = 0; j < k; ++j) {
    std::copy_n(&weights[static_cast<std::size_t>(j) * k], k, &taps[static_cast<std::size_t>(j) * bw]);
  }

  fwd_signal->execute();
  fwd_taps->execute();
  for (std::size_t i = 0; i < complex_n; ++i) {
    const std::complex<double> a(signal_hat[i][0], signal_hat[i][1]);
    const std::complex<double> b(taps_hat[i][0], taps_hat[i][1]);
    const auto p = a * b;
    signal_hat[i][0] = p.real();
    signal_hat[i][1] = p.imag();
  }
  inverse->execute();

  const double scale = 1.0 / static_cast<double>(real_n);
  std::vector<double> result(static_cast<std::size_t>(out.width()) * out.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      result[static_cast<std::size_t>(y) * out.width() + x] =
          signal[static_cast<std::size_t>(y + k - 1) * bw + (x + k - 1)] * scale;
    }
  }
  return result;
}

// Linear feather weight along one axis for a patch [core0, core1) of an image
// of length n; ramps only toward interior neighbours.
double feather(int p, int core0, int core1, int n, int overlap) {
  if (overlap <= 0) return 1.0;
  double w = 1.0;
  if (core0 > 0) w = std::min(w, (p - (core0 - overlap) + 0.5) / (2.0 * overlap));
  if (core1 < n) w = std::min(w, ((core1 + overlap) - p - 0.5) / (2.0 * overlap));
  return std::max(w, 0.0);
}

}  // namespace

ImagePlane patchwise_convolve(const ImagePlane& img, const PsfGrid& grid,
                              const PatchwiseOptions& options) {
  const int w = img.width();
  const int h = img.height();
  const int rows = grid.rows();
  const int cols = grid.cols();
  if (options.overlap_px < 0) throw ConfigError("overlap must be >= 0");

  std::vector<int> xs(cols + 1), ys(rows + 1);
  for (int c = 0; c <= cols; ++c) xs[c] = static_cast<int>(static_cast<long long>(c) * w / cols);
  for (int r = 0; r <= rows; ++r) ys[r] = static_cast<int>(static_cast<long long>(r) * h / rows);
  int min_patch = w + h;
  for (int c = 0; c < cols; ++c) min_patch = std::min(min_patch, xs[c + 1] - xs[c]);
  for (int r = 0; r < rows; ++r) min_patch = std::min(min_patch, ys[r + 1] - ys[r]);
  if (grid.kernel_size() > min_patch) {
    throw ConfigError("PSF kernel of size " + std::to_string(grid.kernel_size()) +
                      " exceeds the smallest patch (" + std::to_string(min_patch) + " px) of a " +
                      std::to_string(rows) + "x" + std::to_string(cols) + " grid on " +
                      std::to_string(w) + "x" + std::to_string(h));
  }

  const int cells = rows * cols;
  std::vector<Region> regions(static_cast<std::size_t>(cells));
  std::vector<std::vector<double>> outputs(static_cast<std::size_t>(cells));
  for (int cell = 0; cell < cells; ++cell) {
    const int r = cell / cols;
    const int c = cell % cols;
    regions[cell] = {std::max(0, xs[c] - options.overlap_px), std::max(0, ys[r] - options.overlap_px),
                     std::min(w, xs[c + 1] + options.overlap_px),
                     std::min(h, ys[r + 1] + options.overlap_px)};
  }

#pragma omp parallel for schedule(dynamic)
  for (int cell = 0; cell < cells; ++cell) {
    const PsfKernel& kernel = grid.kernel(cell / cols, cell % cols);
    const Region& region = regions[cell];
    const auto block = gather_block(img, region, kernel.half());
    const bool all_zero = std::all_of(block.begin(), block.end(), [](double v) { return v == 0.0; });
    bool use_fft = false;
    switch (options.method) {
      case ConvolutionMethod::automatic:
        use_fft = kernel.size() >= options.fft_min_kernel;
        break;
      case ConvolutionMethod::direct:
        break;
      case ConvolutionMethod::fft:
        use_fft = true;
        break;
    }
    if (all_zero) {
      outputs[cell].assign(static_cast<std::size_t>(region.width()) * region.height(), 0.0);
    } else if (use_fft) {
      outputs[cell] = convolve_fft(block, region, kernel);
    } else {
      outputs[cell] = convolve_direct(block, region, kernel);
    }
  }

  ImagePlane acc(w, h, 0.0);
  ImagePlane weight(w, h, 0.0);
  for (int cell = 0; cell < cells; ++cell) {
    const int r = cell / cols;
    const int c = cell % cols;
    const Region& region = regions[cell];
    const auto& out = outputs[cell];
    for (int y = region.y0; y < region.y1; ++y) {
      const double wy = feather(y, ys[r], ys[r + 1], h, options.overlap_px);
      for (int x = region.x0; x < region.x1; ++x) {
        const double wt = wy * feather(x, xs[c], xs[c + 1], w, options.overlap_px);
        if (wt <= 0.0) continue;
        acc.at(x, y) += wt * out[static_cast<std::size_t>(y - region.y0) * region.width() + (x - region.x0)];
        weight.at(x, y) += wt;
      }
    }
  }

  auto a = acc.pixels();
  auto wt = weight.pixels();
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = wt[i] == 1.0 ? a[i] : a[i] / wt[i];
  }
  if (options.clamp_output) acc.clamp_unit();
  return acc;
}

}  // namespace dpforge
