#include "vortexlab/transforms.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace vlab::spectral {

namespace {

// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct AlignedBuffer {
  double* data = nullptr;
  std::size_t size = 0;

  ~AlignedBuffer() { fftw_free(data); }

  double* reserve(std::size_t n) {
    if (n > size) {
      fftw_free(data);
      data = static_cast<double*>(fftw_malloc(sizeof(double) * n));
      if (data == nullptr) throw std::bad_alloc();
      size = n;
    }
    return data;
  }
};

thread_local AlignedBuffer tl_in;
thread_local AlignedBuffer tl_out;

fftw_r2r_kind kind_of(Basis b) { return b == Basis::cosine ? FFTW_REDFT00 : FFTW_RODFT00; }

int axis_length(int g, Basis b) { return b == Basis::cosine ? g : g - 2; }
int axis_offset(Basis b) { return b == Basis::cosine ? 0 : 1; }

double analysis_scale(int g, Basis b, int mode) {
  const double denom = g - 1;
  if (b == Basis::cosine && (mode == 0 || mode == g - 1)) return 0.5 / denom;
  return 1.0 / denom;
}

double synthesis_scale(int g, Basis b, int mode) {
  if (b == Basis::cosine && (mode == 0 || mode == g - 1)) return 1.0;
  return 0.5;
}

// Plans are created against fftw_malloc'ed scratch and executed with the new-array
// interface on thread-local buffers of identical alignment.
fftw_plan get_plan(int ny, int nx, fftw_r2r_kind ky, fftw_r2r_kind kx) {
  using Key = std::tuple<int, int, int, int>;
  static std::map<Key, fftw_plan> cache;
  const Key key{ny, nx, static_cast<int>(ky), static_cast<int>(kx)};
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const std::size_t n = static_cast<std::size_t>(ny) * nx;
  auto* in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  auto* out = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  fftw_plan p = ny == 1 ? fftw_plan_r2r_1d(nx, in, out, kx, FFTW_ESTIMATE)
                        : fftw_plan_r2r_2d(ny, nx, in, out, ky, kx, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (p == nullptr) throw std::runtime_error("FFTW failed to create a plan");
  cache.emplace(key, p);
  return p;
}

void check_size(std::size_t have, std::size_t want, const char* what) {
  if (have != want) throw std::invalid_argument(std::string(what) + ": size mismatch");
}

}  // namespace

void analyze(std::span<const double> values, std::span<double> coeffs, int g, Basis bx,
             Basis by) {
  const std::size_t total = static_cast<std::size_t>(g) * g;
  check_size(values.size(), total, "analyze");
  check_size(coeffs.size(), total, "analyze");
  const int lx = axis_length(g, bx), ly = axis_length(g, by);
  const int ox = axis_offset(bx), oy = axis_offset(by);
  double* in = tl_in.reserve(static_cast<std::size_t>(lx) * ly);
  double* out = tl_out.reserve(static_cast<std::size_t>(lx) * ly);
  for (int j = 0; j < ly; ++j) {
    for (int i = 0; i < lx; ++i) {
      in[j * lx + i] = values[static_cast<std::size_t>(j + oy) * g + (i + ox)];
    }
  }
  fftw_execute_r2r(get_plan(ly, lx, kind_of(by), kind_of(bx)), in, out);
  std::fill(coeffs.begin(), coeffs.end(), 0.0);
  for (int j = 0; j < ly; ++j) {
    const int ky = j + oy;
    const double sy = analysis_scale(g, by, ky);
    for (int i = 0; i < lx; ++i) {
      const int kx = i + ox;
      coeffs[static_cast<std::size_t>(ky) * g + kx] =
          out[j * lx + i] * sy * analysis_scale(g, bx, kx);
    }
  }
}

void synthesize(std::span<const double> coeffs, std::span<double> values, int g, Basis bx,
                Basis by) {
  const std::size_t total = static_cast<std::size_t>(g) * g;
  check_size(values.size(), total, "synthesize");
  check_size(coeffs.size(), total, "synthesize");
  const int lx = axis_length(g, bx), ly = axis_length(g, by);
  const int ox = axis_offset(bx), oy = axis_offset(by);
  double* in = tl_in.reserve(static_cast<std::size_t>(lx) * ly);
  double* out = tl_out.reserve(static_cast<std::size_t>(lx) * ly);
  for (int j = 0; j < ly; ++j) {
    const int ky = j + oy;
    const double sy = synthesis_scale(g, by, ky);
    for (int i = 0; i < lx; ++i) {
      const int kx = i + ox;
      in[j * lx + i] =
          coeffs[static_cast<std::size_t>(ky) * g + kx] * sy * synthesis_scale(g, bx, kx);
    }
  }
  fftw_execute_r2r(get_plan(ly, lx, kind_of(by), kind_of(bx)), in, out);
  std::fill(values.begin(), values.end(), 0.0);
  for (int j = 0; j < ly; ++j) {
    for (int i = 0; i < lx; ++i) {
      values[static_cast<std::size_t>(j + oy) * g + (i + ox)] = out[j * lx + i];
    }
  }
}

void analyze_1d(std::span<const double> values, std::span<double> coeffs, Basis basis) {
  const int g = static_cast<int>(values.size());
  check_size(coeffs.size(), values.size(), "analyze_1d");
  const int len = axis_length(g, basis), off = axis_offset(basis);
  double* in = tl_in.reserve(len);
  double* out = tl_out.reserve(len);
  for (int i = 0; i < len; ++i) in[i] = values[i + off];
  fftw_execute_r2r(get_plan(1, len, kind_of(basis), kind_of(basis)), in, out);
  std::fill(coeffs.begin(), coeffs.end(), 0.0);
  for (int i = 0; i < len; ++i) coeffs[i + off] = out[i] * analysis_scale(g, basis, i + off);
}

void synthesize_1d(std::span<const double> coeffs, std::span<double> values, Basis basis) {
  const int g = static_cast<int>(values.size());
  check_size(coeffs.size(), values.size(), "synthesize_1d");
  const int len = axis_length(g, basis), off = axis_offset(basis);
  double* in = tl_in.reserve(len);
  double* out = tl_out.reserve(len);
  for (int i = 0; i < len; ++i) in[i] = coeffs[i + off] * synthesis_scale(g, basis, i + off);
  fftw_execute_r2r(get_plan(1, len, kind_of(basis), kind_of(basis)), in, out);
  std::fill(values.begin(), values.end(), 0.0);
  for (int i = 0; i < len; ++i) values[i + off] = out[i];
}

}  // namespace vlab::spectral
