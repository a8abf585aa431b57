#include "zop/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace zop::kernels {

namespace {

bool host_has_avx2() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("ZOPROMPT_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && host_has_avx2()) return Backend::avx2;
  }
  return host_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = initial_backend();

}  // namespace

Backend active() { return g_backend; }

bool supported(Backend b) {
  return b == Backend::scalar || (b == Backend::avx2 && host_has_avx2());
}

void force(Backend b) {
  if (!supported(b))
    throw std::runtime_error("kernel backend not supported on this host");
  g_backend = b;
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

#if defined(__x86_64__)
#define ZOP_DISPATCH(fn, ...) \
  return g_backend == Backend::avx2 ? avx2::fn(__VA_ARGS__) \
                                    : scalar::fn(__VA_ARGS__)
#else
#define ZOP_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

float dot_f32(const float* a, const float* b, std::size_t n) {
  ZOP_DISPATCH(dot_f32, a, b, n);
}
float sum_f32(const float* x, std::size_t n) { ZOP_DISPATCH(sum_f32, x, n); }
void matvec_f32(const float* w, std::size_t rows, std::size_t cols,
                const float* x, const float* bias, float* y) {
  ZOP_DISPATCH(matvec_f32, w, rows, cols, x, bias, y);
}
void matmul_f32(const float* w, std::size_t rows, std::size_t cols,
                const float* x, std::size_t n, const float* bias, float* y) {
  ZOP_DISPATCH(matmul_f32, w, rows, cols, x, n, bias, y);
}
void axpy_f32(float a, const float* x, float* y, std::size_t n) {
  ZOP_DISPATCH(axpy_f32, a, x, y, n);
}
void affine_f32(const float* x, float a, float b, float* y, std::size_t n) {
  ZOP_DISPATCH(affine_f32, x, a, b, y, n);
}
void add_scaled_clip01_f32(const float* x, const float* p, float a, float* y,
                           std::size_t n) {
  ZOP_DISPATCH(add_scaled_clip01_f32, x, p, a, y, n);
}
void conv3x3_f32(const float* padded, std::size_t h, std::size_t w,
                 const float* k, float bias, float* out) {
  ZOP_DISPATCH(conv3x3_f32, padded, h, w, k, bias, out);
}
void gelu_f32(float* x, std::size_t n) { ZOP_DISPATCH(gelu_f32, x, n); }
void add_scaled_f64(const double* x, const double* d, double a, double* y,
                    std::size_t n) {
  ZOP_DISPATCH(add_scaled_f64, x, d, a, y, n);
}
void axpby_f64(double a, const double* x, double b, double* y,
               std::size_t n) {
  ZOP_DISPATCH(axpby_f64, a, x, b, y, n);
}
void accum_recip_scaled_f64(double s, const double* d, double* g,
                            std::size_t n) {
  ZOP_DISPATCH(accum_recip_scaled_f64, s, d, g, n);
}
void axpy_f64(double s, const double* u, double* g, std::size_t n) {
  ZOP_DISPATCH(axpy_f64, s, u, g, n);
}
void scale_f64(double a, double* x, std::size_t n) {
  ZOP_DISPATCH(scale_f64, a, x, n);
}
double dot_f64(const double* a, const double* b, std::size_t n) {
  ZOP_DISPATCH(dot_f64, a, b, n);
}

#undef ZOP_DISPATCH

}  // namespace zop::kernels
