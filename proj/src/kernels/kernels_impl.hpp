#pragma once

#include <cstddef>

// Per-backend entry points. The public dispatchers in kernels.cpp pick one
// table at startup.

namespace zop::kernels {

// Shared rational tanh approximation (clamped, f32). Both backends evaluate
// this exact operation sequence so gelu_f32 is bit-identical across them.
namespace tanhf_rational {
inline constexpr float kClamp = 7.90531110763549805f;
inline constexpr float kAlpha1 = 4.89352455891786e-03f;
inline constexpr float kAlpha3 = 6.37261928875436e-04f;
inline constexpr float kAlpha5 = 1.48572235717979e-05f;
inline constexpr float kAlpha7 = 5.12229709037114e-08f;
inline constexpr float kAlpha9 = -8.60467152213735e-11f;
inline constexpr float kAlpha11 = 2.00018790482477e-13f;
inline constexpr float kAlpha13 = -2.76076847742355e-16f;
inline constexpr float kBeta0 = 4.89352518554385e-03f;
inline constexpr float kBeta2 = 2.26843463243900e-03f;
inline constexpr float kBeta4 = 1.18534705686654e-04f;
inline constexpr float kBeta6 = 1.19825839466702e-06f;
}  // namespace tanhf_rational

inline constexpr float kGeluSqrt2OverPi = 0.7978845608028654f;
inline constexpr float kGeluCubicCoeff = 0.044715f;

#define ZOP_KERNEL_DECLS                                                      \
  float dot_f32(const float* a, const float* b, std::size_t n);              \
  float sum_f32(const float* x, std::size_t n);                              \
  void matvec_f32(const float* w, std::size_t rows, std::size_t cols,        \
                  const float* x, const float* bias, float* y);              \
  void matmul_f32(const float* w, std::size_t rows, std::size_t cols,        \
                  const float* x, std::size_t n, const float* bias,          \
                  float* y);                                                 \
  void axpy_f32(float a, const float* x, float* y, std::size_t n);           \
  void affine_f32(const float* x, float a, float b, float* y,                \
                  std::size_t n);                                            \
  void add_scaled_clip01_f32(const float* x, const float* p, float a,        \
                             float* y, std::size_t n);                       \
  void conv3x3_f32(const float* padded, std::size_t h, std::size_t w,        \
                   const float* k, float bias, float* out);                  \
  void gelu_f32(float* x, std::size_t n);                                    \
  void add_scaled_f64(const double* x, const double* d, double a, double* y, \
                      std::size_t n);                                        \
  void axpby_f64(double a, const double* x, double b, double* y,             \
                 std::size_t n);                                             \
  void accum_recip_scaled_f64(double s, const double* d, double* g,          \
                              std::size_t n);                                \
  void axpy_f64(double s, const double* u, double* g, std::size_t n);        \
  void scale_f64(double a, double* x, std::size_t n);                        \
  double dot_f64(const double* a, const double* b, std::size_t n);

namespace scalar {
ZOP_KERNEL_DECLS
}

#if defined(__x86_64__)
namespace avx2 {
ZOP_KERNEL_DECLS
}
#endif

#undef ZOP_KERNEL_DECLS

}  // namespace zop::kernels
