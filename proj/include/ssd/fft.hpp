#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <vector>

namespace ssd::detail {

// Process-wide cache of FFTW plans, one per transform length.
//
// Plan creation is not thread-safe and is serialized here; execution through
// the new-array interface is safe to call concurrently on distinct buffers.
// Plans are created with FFTW_ESTIMATE so the algorithm choice (and hence the
// exact floating-point result) is deterministic across runs, and with
// FFTW_UNALIGNED so std::vector storage can be passed directly.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  // Real-to-complex forward transform; out has n/2 + 1 bins.
  void forward_r2c(const std::vector<double>& in,
                   std::vector<std::complex<double>>& out) {
    const int n = static_cast<int>(in.size());
    out.assign(n / 2 + 1, std::complex<double>{});
    fftw_execute_dft_r2c(plan_r2c(n), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
  }

  // Complex-to-real inverse transform scaled by 1/n. Takes the spectrum by
  // value because FFTW's c2r destroys its input.
  void inverse_c2r(std::vector<std::complex<double>> spec, int n,
                   std::vector<double>& out) {
    out.assign(n, 0.0);
    fftw_execute_dft_c2r(plan_c2r(n),
                         reinterpret_cast<fftw_complex*>(spec.data()),
                         out.data());
    const double inv = 1.0 / n;
    for (double& v : out) v *= inv;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  FftPlans() = default;

  fftw_plan plan_r2c(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = r2c_.find(n);
    if (it != r2c_.end()) return it->second;
    std::vector<double> in(n, 0.0);
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(
        n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    r2c_.emplace(n, p);
    return p;
  }

  fftw_plan plan_c2r(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = c2r_.find(n);
    if (it != c2r_.end()) return it->second;
    std::vector<std::complex<double>> in(n / 2 + 1);
    std::vector<double> out(n, 0.0);
    fftw_plan p = fftw_plan_dft_c2r_1d(
        n, reinterpret_cast<fftw_complex*>(in.data()), out.data(),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    c2r_.emplace(n, p);
    return p;
  }

  std::mutex mu_;
  std::map<int, fftw_plan> r2c_;
  std::map<int, fftw_plan> c2r_;
};

}  // namespace ssd::detail
