#if defined(__x86_64__)

#include <immintrin.h>

#include "kernels_impl.hpp"

// AVX2 variants. No FMA: mul+add keeps rounding identical to the scalar
// reference. Tails fall back to the scalar element sequence.

namespace zop::kernels::avx2 {

static inline float hsum256(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  __m128 s = _mm_add_ps(lo, hi);           // [0+4, 1+5, 2+6, 3+7]
  __m128 sh = _mm_movehl_ps(s, s);         // [2+6, 3+7, *, *]
  __m128 t = _mm_add_ps(s, sh);            // [(0+4)+(2+6), (1+5)+(3+7), ..]
  __m128 u = _mm_shuffle_ps(t, t, 0x55);
  return _mm_cvtss_f32(_mm_add_ss(t, u));
}

static inline double hsum256d(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);          // [0+2, 1+3]
  __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

float dot_f32(const float* a, const float* b, std::size_t n) {
  __m256 acc0 = _mm256_setzero_ps(), acc1 = _mm256_setzero_ps();
  __m256 acc2 = _mm256_setzero_ps(), acc3 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    acc0 = _mm256_add_ps(acc0, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                             _mm256_loadu_ps(b + i)));
    acc1 = _mm256_add_ps(acc1, _mm256_mul_ps(_mm256_loadu_ps(a + i + 8),
                                             _mm256_loadu_ps(b + i + 8)));
    acc2 = _mm256_add_ps(acc2, _mm256_mul_ps(_mm256_loadu_ps(a + i + 16),
                                             _mm256_loadu_ps(b + i + 16)));
    acc3 = _mm256_add_ps(acc3, _mm256_mul_ps(_mm256_loadu_ps(a + i + 24),
                                             _mm256_loadu_ps(b + i + 24)));
  }
  __m256 v = _mm256_add_ps(_mm256_add_ps(acc0, acc2),
                           _mm256_add_ps(acc1, acc3));
  for (; i + 8 <= n; i += 8)
    v = _mm256_add_ps(v, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                       _mm256_loadu_ps(b + i)));
  float r = hsum256(v);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

float sum_f32(const float* x, std::size_t n) {
  __m256 acc0 = _mm256_setzero_ps(), acc1 = _mm256_setzero_ps();
  __m256 acc2 = _mm256_setzero_ps(), acc3 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    acc0 = _mm256_add_ps(acc0, _mm256_loadu_ps(x + i));
    acc1 = _mm256_add_ps(acc1, _mm256_loadu_ps(x + i + 8));
    acc2 = _mm256_add_ps(acc2, _mm256_loadu_ps(x + i + 16));
    acc3 = _mm256_add_ps(acc3, _mm256_loadu_ps(x + i + 24));
  }
  __m256 v = _mm256_add_ps(_mm256_add_ps(acc0, acc2),
                           _mm256_add_ps(acc1, acc3));
  for (; i + 8 <= n; i += 8) v = _mm256_add_ps(v, _mm256_loadu_ps(x + i));
  float r = hsum256(v);
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
  const __m256 av = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_add_ps(_mm256_loadu_ps(y + i),
                             _mm256_mul_ps(av, _mm256_loadu_ps(x + i)));
    _mm256_storeu_ps(y + i, v);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void affine_f32(const float* x, float a, float b, float* y, std::size_t n) {
  const __m256 av = _mm256_set1_ps(a);
  const __m256 bv = _mm256_set1_ps(b);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i,
                     _mm256_add_ps(_mm256_mul_ps(av, _mm256_loadu_ps(x + i)),
                                   bv));
  for (; i < n; ++i) y[i] = a * x[i] + b;
}

void add_scaled_clip01_f32(const float* x, const float* p, float a, float* y,
                           std::size_t n) {
  const __m256 av = _mm256_set1_ps(a);
  const __m256 zero = _mm256_setzero_ps();
  const __m256 one = _mm256_set1_ps(1.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_add_ps(_mm256_loadu_ps(x + i),
                             _mm256_mul_ps(av, _mm256_loadu_ps(p + i)));
    v = _mm256_max_ps(v, zero);
    v = _mm256_min_ps(v, one);
    _mm256_storeu_ps(y + i, v);
  }
  for (; i < n; ++i) {
    float v = x[i] + a * p[i];
    v = v > 0.0f ? v : 0.0f;
    v = v < 1.0f ? v : 1.0f;
    y[i] = v;
  }
}

void conv3x3_f32(const float* padded, std::size_t h, std::size_t w,
                 const float* k, float bias, float* out) {
  const std::size_t pw = w + 2;
  const __m256 bv = _mm256_set1_ps(bias);
  __m256 kv[9];
  for (int t = 0; t < 9; ++t) kv[t] = _mm256_set1_ps(k[t]);
  for (std::size_t y = 0; y < h; ++y) {
    float* orow = out + y * w;
    const float* irow = padded + y * pw;
    std::size_t x = 0;
    for (; x + 8 <= w; x += 8) {
      __m256 acc = bv;
      for (int dy = 0; dy < 3; ++dy)
        for (int dx = 0; dx < 3; ++dx)
          acc = _mm256_add_ps(
              acc, _mm256_mul_ps(kv[dy * 3 + dx],
                                 _mm256_loadu_ps(irow + dy * pw + x + dx)));
      _mm256_storeu_ps(orow + x, acc);
    }
    for (; x < w; ++x) {
      float acc = bias;
      for (int dy = 0; dy < 3; ++dy)
        for (int dx = 0; dx < 3; ++dx)
          acc += k[dy * 3 + dx] * irow[dy * pw + x + dx];
      orow[x] = acc;
    }
  }
}

static inline __m256 tanh_rational(__m256 u) {
  using namespace tanhf_rational;
  const __m256 clamp = _mm256_set1_ps(kClamp);
  const __m256 nclamp = _mm256_set1_ps(-kClamp);
  u = _mm256_max_ps(u, nclamp);
  u = _mm256_min_ps(u, clamp);
  const __m256 z = _mm256_mul_ps(u, u);
  __m256 p = _mm256_set1_ps(kAlpha13);
  p = _mm256_add_ps(_mm256_mul_ps(p, z), _mm256_set1_ps(kAlpha11));
  p = _mm256_add_ps(_mm256_mul_ps(p, z), _mm256_set1_ps(kAlpha9));
  p = _mm256_add_ps(_mm256_mul_ps(p, z), _mm256_set1_ps(kAlpha7));
  p = _mm256_add_ps(_mm256_mul_ps(p, z), _mm256_set1_ps(kAlpha5));
  p = _mm256_add_ps(_mm256_mul_ps(p, z), _mm256_set1_ps(kAlpha3));
  p = _mm256_add_ps(_mm256_mul_ps(p, z), _mm256_set1_ps(kAlpha1));
  p = _mm256_mul_ps(p, u);
  __m256 q = _mm256_set1_ps(kBeta6);
  q = _mm256_add_ps(_mm256_mul_ps(q, z), _mm256_set1_ps(kBeta4));
  q = _mm256_add_ps(_mm256_mul_ps(q, z), _mm256_set1_ps(kBeta2));
  q = _mm256_add_ps(_mm256_mul_ps(q, z), _mm256_set1_ps(kBeta0));
  return _mm256_div_ps(p, q);
}

static inline float tanh_rational_scalar(float u) {
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
  const __m256 c0 = _mm256_set1_ps(kGeluSqrt2OverPi);
  const __m256 c1 = _mm256_set1_ps(kGeluCubicCoeff);
  const __m256 half = _mm256_set1_ps(0.5f);
  const __m256 one = _mm256_set1_ps(1.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 v3 = _mm256_mul_ps(v, _mm256_mul_ps(v, v));
    const __m256 inner =
        _mm256_mul_ps(c0, _mm256_add_ps(v, _mm256_mul_ps(c1, v3)));
    const __m256 t = tanh_rational(inner);
    _mm256_storeu_ps(
        x + i, _mm256_mul_ps(_mm256_mul_ps(half, v), _mm256_add_ps(one, t)));
  }
  for (; i < n; ++i) {
    const float v = x[i];
    const float inner = kGeluSqrt2OverPi * (v + kGeluCubicCoeff * (v * v * v));
    x[i] = 0.5f * v * (1.0f + tanh_rational_scalar(inner));
  }
}

void add_scaled_f64(const double* x, const double* d, double a, double* y,
                    std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_add_pd(_mm256_loadu_pd(x + i),
                             _mm256_mul_pd(av, _mm256_loadu_pd(d + i))));
  for (; i < n; ++i) y[i] = x[i] + a * d[i];
}

void axpby_f64(double a, const double* x, double b, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_add_pd(_mm256_mul_pd(av, _mm256_loadu_pd(x + i)),
                             _mm256_mul_pd(bv, _mm256_loadu_pd(y + i))));
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void accum_recip_scaled_f64(double s, const double* d, double* g,
                            std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        g + i, _mm256_add_pd(_mm256_loadu_pd(g + i),
                             _mm256_div_pd(sv, _mm256_loadu_pd(d + i))));
  for (; i < n; ++i) g[i] += s / d[i];
}

void axpy_f64(double s, const double* u, double* g, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        g + i, _mm256_add_pd(_mm256_loadu_pd(g + i),
                             _mm256_mul_pd(sv, _mm256_loadu_pd(u + i))));
  for (; i < n; ++i) g[i] += s * u[i];
}

void scale_f64(double a, double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                             _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                             _mm256_loadu_pd(b + i + 4)));
    acc2 = _mm256_add_pd(acc2, _mm256_mul_pd(_mm256_loadu_pd(a + i + 8),
                                             _mm256_loadu_pd(b + i + 8)));
    acc3 = _mm256_add_pd(acc3, _mm256_mul_pd(_mm256_loadu_pd(a + i + 12),
                                             _mm256_loadu_pd(b + i + 12)));
  }
  __m256d v = _mm256_add_pd(_mm256_add_pd(acc0, acc2),
                            _mm256_add_pd(acc1, acc3));
  for (; i + 4 <= n; i += 4)
    v = _mm256_add_pd(v, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                       _mm256_loadu_pd(b + i)));
  double r = hsum256d(v);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

}  // namespace zop::kernels::avx2

#endif  // __x86_64__
