#pragma once

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace tavns::detail {

// FFTW's planner is not thread-safe; executing an existing plan is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Batched 1D DST-I (RODFT00) or DCT-I (REDFT00), with FFTW's unnormalized
/// definitions, computed as a real FFT of the odd/even extension of length
/// 2n. Faster than FFTW's own r2r codelets under FFTW_ESTIMATE.
class SymmetricBatch {
 public:
  SymmetricBatch(int len, int howmany, fftw_r2r_kind kind)
      : len_(len), howmany_(howmany), odd_(kind == FFTW_RODFT00) {
    half_ = odd_ ? len + 1 : len - 1;
    L_ = 2 * half_;
    std::lock_guard lock(planner_mutex());
    ext_ = fftw_alloc_real(static_cast<std::size_t>(L_) * howmany);
    out_ = fftw_alloc_complex(static_cast<std::size_t>(L_ / 2 + 1) * howmany);
    plan_ = fftw_plan_many_dft_r2c(1, &L_, howmany, ext_, nullptr, 1, L_, out_, nullptr, 1, L_ / 2 + 1,
                                   FFTW_ESTIMATE);
  }
  ~SymmetricBatch() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(ext_);
    fftw_free(out_);
  }
  SymmetricBatch(const SymmetricBatch&) = delete;
  SymmetricBatch& operator=(const SymmetricBatch&) = delete;

  /// Transforms row r = src[r*src_row + j*src_col], j < len, into
  /// dst[r*dst_row + k*dst_col].
  void run(const double* src, long src_row, long src_col, double* dst, long dst_row, long dst_col) {
    const int n = half_;
    for (int r = 0; r < howmany_; ++r) {
      double* e = ext_ + static_cast<std::size_t>(r) * L_;
      const double* x = src + r * src_row;
      if (odd_) {
        e[0] = 0.0;
        e[n] = 0.0;
        for (int j = 1; j < n; ++j) {
          const double v = x[(j - 1) * src_col];
          e[j] = v;
          e[L_ - j] = -v;
        }
      } else {
        for (int j = 0; j <= n; ++j) e[j] = x[j * src_col];
        for (int j = 1; j < n; ++j) e[L_ - j] = e[j];
      }
    }
    fftw_execute(plan_);
    for (int r = 0; r < howmany_; ++r) {
      const fftw_complex* y = out_ + static_cast<std::size_t>(r) * (L_ / 2 + 1);
      double* d = dst + r * dst_row;
      if (odd_)
        for (int k = 0; k < len_; ++k) d[k * dst_col] = -y[k + 1][1];
      else
        for (int k = 0; k < len_; ++k) d[k * dst_col] = y[k][0];
    }
  }

 private:
  int len_;
  int howmany_;
  bool odd_;
  int half_ = 0;
  int L_ = 0;
  double* ext_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

/// 2D real-to-real transform on a (rows x cols) row-major array, computed
/// in place in an owned buffer. krow acts along the row index (slow axis),
/// kcol along the contiguous axis, as in fftw_plan_r2r_2d.
class R2RPlan {
 public:
  R2RPlan(int rows, int cols, fftw_r2r_kind krow, fftw_r2r_kind kcol)
      : rows_(rows), cols_(cols), along_cols_(cols, rows, kcol), along_rows_(rows, cols, krow) {
    buf_.resize(static_cast<std::size_t>(rows) * cols);
    tmp_.resize(buf_.size());
  }

  double* buffer() noexcept { return buf_.data(); }
  void execute() {
    // contiguous axis, written transposed; then the slow axis back in place
    along_cols_.run(buf_.data(), cols_, 1, tmp_.data(), 1, rows_);
    along_rows_.run(tmp_.data(), rows_, 1, buf_.data(), 1, cols_);
  }

 private:
  int rows_;
  int cols_;
  SymmetricBatch along_cols_;
  SymmetricBatch along_rows_;
  std::vector<double> buf_;
  std::vector<double> tmp_;
};

/// n x n real <-> n x (n/2+1) complex pair sharing owned buffers.
class R2CPlan {
 public:
  explicit R2CPlan(int n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    cplx_ = fftw_alloc_complex(static_cast<std::size_t>(n) * (n / 2 + 1));
    fwd_ = fftw_plan_dft_r2c_2d(n, n, real_, cplx_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(n, n, cplx_, real_, FFTW_ESTIMATE);
  }
  ~R2CPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
  }
  R2CPlan(const R2CPlan&) = delete;
  R2CPlan& operator=(const R2CPlan&) = delete;

  double* real() noexcept { return real_; }
  std::complex<double>* cplx() noexcept { return reinterpret_cast<std::complex<double>*>(cplx_); }
  void forward() noexcept { fftw_execute(fwd_); }
  /// Destroys the complex buffer's contents.
  void backward() noexcept { fftw_execute(bwd_); }

 private:
  int n_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

inline R2RPlan& r2r_plan(int rows, int cols, fftw_r2r_kind krow, fftw_r2r_kind kcol) {
  using Key = std::tuple<int, int, int, int>;
  thread_local std::map<Key, std::unique_ptr<R2RPlan>> cache;
  auto& slot = cache[Key{rows, cols, static_cast<int>(krow), static_cast<int>(kcol)}];
  if (!slot) slot = std::make_unique<R2RPlan>(rows, cols, krow, kcol);
  return *slot;
}

inline R2CPlan& r2c_plan(int n) {
  thread_local std::map<int, std::unique_ptr<R2CPlan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<R2CPlan>(n);
  return *slot;
}

}  // namespace tavns::detail
