#pragma once

#include <cstddef>

// Data-parallel inner loops used by the optimizers and the image pipeline.
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. The two variants perform the same floating
// point operations in the same order, so results are bit-identical across
// backends (reductions use a fixed 8-lane (f32) / 4-lane (f64) blocking).

namespace zop::kernels {

enum class Backend { scalar, avx2 };

Backend active();
bool supported(Backend b);
void force(Backend b);  // throws std::runtime_error if unsupported on this host
const char* backend_name(Backend b);

// ---- f32 (image / network pipeline) ----

// Blocked dot product: sum_i a[i]*b[i].
float dot_f32(const float* a, const float* b, std::size_t n);

// Blocked sum: sum_i x[i].
float sum_f32(const float* x, std::size_t n);

// y[r] = dot(w[r*cols .. ], x) + (bias ? bias[r] : 0), row-major w.
void matvec_f32(const float* w, std::size_t rows, std::size_t cols,
                const float* x, const float* bias, float* y);

// Batched matvec: x holds n row-major inputs of length cols, y holds n
// row-major outputs of length rows. Each output element is the exact
// dot_f32 of a w row with an x row; inputs are tiled in blocks of 8 so a
// large w streams from memory once per tile instead of once per input.
void matmul_f32(const float* w, std::size_t rows, std::size_t cols,
                const float* x, std::size_t n, const float* bias, float* y);

// y[i] += a * x[i]
void axpy_f32(float a, const float* x, float* y, std::size_t n);

// y[i] = a * x[i] + b
void affine_f32(const float* x, float a, float b, float* y, std::size_t n);

// y[i] = min(max(x[i] + a*p[i], 0), 1)
void add_scaled_clip01_f32(const float* x, const float* p, float a, float* y,
                           std::size_t n);

// 3x3 single-channel convolution over a zero-padded (h+2)x(w+2) input plane.
// out is h*w, out[y*w+x] = bias + sum_{t} k[t] * padded[(y+dy)*(w+2)+x+dx].
void conv3x3_f32(const float* padded, std::size_t h, std::size_t w,
                 const float* k, float bias, float* out);

// In-place GELU, tanh form; identical rational tanh approximation in both
// backends.
void gelu_f32(float* x, std::size_t n);

// ---- f64 (optimizer state arithmetic) ----

// y[i] = x[i] + a * d[i]
void add_scaled_f64(const double* x, const double* d, double a, double* y,
                    std::size_t n);

// y[i] = a * x[i] + b * y[i]
void axpby_f64(double a, const double* x, double b, double* y, std::size_t n);

// g[i] += s / d[i]
void accum_recip_scaled_f64(double s, const double* d, double* g,
                            std::size_t n);

// g[i] += s * u[i]
void axpy_f64(double s, const double* u, double* g, std::size_t n);

// x[i] *= a
void scale_f64(double a, double* x, std::size_t n);

double dot_f64(const double* a, const double* b, std::size_t n);

}  // namespace zop::kernels
