#include "kernels_impl.hpp"

// Reference kernels. Reductions are blocked into 8 (f32) / 4 (f64) partial
// accumulators combined in the same order as the AVX2 horizontal sums, so the
// two backends agree bit-for-bit.

namespace zop::kernels::scalar {

// Reductions run four independent 8-wide accumulators (breaking the add
// latency chain), pairwise-combined, then a single 8-wide stage and a scalar
// tail. The AVX2 variant performs the identical operation sequence.

float dot_f32(const float* a, const float* b, std::size_t n) {
  float acc[4][8] = {};
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 8; ++j)
        acc[k][j] += a[i + 8 * k + j] * b[i + 8 * k + j];
  float v[8];
  for (int j = 0; j < 8; ++j)
    v[j] = (acc[0][j] + acc[2][j]) + (acc[1][j] + acc[3][j]);
  for (; i + 8 <= n; i += 8)
    for (int j = 0; j < 8; ++j) v[j] += a[i + j] * b[i + j];
  float r = ((v[0] + v[4]) + (v[2] + v[6])) + ((v[1] + v[5]) + (v[3] + v[7]));
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

float sum_f32(const float* x, std::size_t n) {
  float acc[4][8] = {};
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 8; ++j) acc[k][j] += x[i + 8 * k + j];
  float v[8];
  for (int j = 0; j < 8; ++j)
    v[j] = (acc[0][j] + acc[2][j]) + (acc[1][j] + acc[3][j]);
  for (; i + 8 <= n; i += 8)
    for (int j = 0; j < 8; ++j) v[j] += x[i + j];
  float r = ((v[0] + v[4]) + (v[2] + v[6])) + ((v[1] + v[5]) + (v[3] + v[7]));
  for (; i < n; ++i) r += x[i];
  return r;
}

void matvec_f32(const float* w, std::size_t rows, std::size_t cols,
                const float* x, const float* bias, float* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    float v = dot_f32(w + r * cols, x, cols);
    y[r] = bias ? v + bias[r] : v;
  }
}

void matmul_f32(const float* w, std::size_t rows, std::size_t cols,
                const float* x, std::size_t n, const float* bias, float* y) {
  for (std::size_t block = 0; block < n; block += 8) {
    const std::size_t stop = block + 8 < n ? block + 8 : n;
    for (std::size_t r = 0; r < rows; ++r) {
      const float* wr = w + r * cols;
      for (std::size_t i = block; i < stop; ++i) {
        const float v = dot_f32(wr, x + i * cols, cols);
        y[i * rows + r] = bias ? v + bias[r] : v;
      }
    }
  }
}

void axpy_f32(float a, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void affine_f32(const float* x, float a, float b, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b;
}

void add_scaled_clip01_f32(const float* x, const float* p, float a, float* y,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    float v = x[i] + a * p[i];
    v = v > 0.0f ? v : 0.0f;
    v = v < 1.0f ? v : 1.0f;
    y[i] = v;
  }
}

void conv3x3_f32(const float* padded, std::size_t h, std::size_t w,
                 const float* k, float bias, float* out) {
  const std::size_t pw = w + 2;
  for (std::size_t y = 0; y < h; ++y) {
    float* orow = out + y * w;
    for (std::size_t x = 0; x < w; ++x) orow[x] = bias;
    for (int dy = 0; dy < 3; ++dy) {
      const float* irow = padded + (y + dy) * pw;
      for (int dx = 0; dx < 3; ++dx) {
        const float kv = k[dy * 3 + dx];
        for (std::size_t x = 0; x < w; ++x) orow[x] += kv * irow[x + dx];
      }
    }
  }
}

static inline float tanh_rational(float u) {
  using namespace tanhf_rational;
  u = u > -kClamp ? u : -kClamp;
  u = u < kClamp ? u : kClamp;
  const float z = u * u;
  float p = kAlpha13;
  p = p * z + kAlpha11;
  p = p * z + kAlpha9;
  p = p * z + kAlpha7;
  p = p * z + kAlpha5;
  p = p * z + kAlpha3;
  p = p * z + kAlpha1;
  p = p * u;
  float q = kBeta6;
  q = q * z + kBeta4;
  q = q * z + kBeta2;
  q = q * z + kBeta0;
  return p / q;
}

void gelu_f32(float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float v = x[i];
    const float inner = kGeluSqrt2OverPi * (v + kGeluCubicCoeff * (v * v * v));
    x[i] = 0.5f * v * (1.0f + tanh_rational(inner));
  }
}

void add_scaled_f64(const double* x, const double* d, double a, double* y,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * d[i];
}

void axpby_f64(double a, const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void accum_recip_scaled_f64(double s, const double* d, double* g,
                            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) g[i] += s / d[i];
}

void axpy_f64(double s, const double* u, double* g, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) g[i] += s * u[i];
}

void scale_f64(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  double acc[4][4] = {};
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        acc[k][j] += a[i + 4 * k + j] * b[i + 4 * k + j];
  double v[4];
  for (int j = 0; j < 4; ++j)
    v[j] = (acc[0][j] + acc[2][j]) + (acc[1][j] + acc[3][j]);
  for (; i + 4 <= n; i += 4)
    for (int j = 0; j < 4; ++j) v[j] += a[i + j] * b[i + j];
  double r = (v[0] + v[2]) + (v[1] + v[3]);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

}  // namespace zop::kernels::scalar
