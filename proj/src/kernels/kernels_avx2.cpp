// SPDX-License-Identifier: Apache-2.0
//
// beamacq: slow-time beam acquisition and fast-time channel estimation
// for wideband hybrid-beamforming massive MIMO
// Copyright (C) 2026 The beamacq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "beamacq/kernels.hpp"

#include <stdexcept>

#if defined(BEAMACQ_HAVE_AVX2_TU)
#include <immintrin.h>

namespace beamacq::kernels::avx2 {

namespace {

// Two std::complex<double> per register: [re0, im0, re1, im1].
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

cplx cdotc(std::span<const cplx> a, std::span<const cplx> b) {
  const std::size_t n = a.size();
  __m256d same0 = _mm256_setzero_pd(), same1 = _mm256_setzero_pd();
  __m256d cross0 = _mm256_setzero_pd(), cross1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = load2(a.data() + i), b0 = load2(b.data() + i);
    const __m256d a1 = load2(a.data() + i + 2), b1 = load2(b.data() + i + 2);
    same0 = _mm256_fmadd_pd(a0, b0, same0);
    same1 = _mm256_fmadd_pd(a1, b1, same1);
    cross0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0x5), cross0);
    cross1 = _mm256_fmadd_pd(a1, _mm256_permute_pd(b1, 0x5), cross1);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d a0 = load2(a.data() + i), b0 = load2(b.data() + i);
    same0 = _mm256_fmadd_pd(a0, b0, same0);
    cross0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0x5), cross0);
  }
  const __m256d same = _mm256_add_pd(same0, same1);
  const __m256d cross = _mm256_add_pd(cross0, cross1);
  // cross lanes hold (ar*bi, ai*br); imaginary part is their difference.
  alignas(32) double c[4];
  _mm256_store_pd(c, cross);
  double re = hsum(same);
  double im = (c[0] - c[1]) + (c[2] - c[3]);
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

void her_update(std::span<cplx> a, std::span<const cplx> u, double w) {
  const std::size_t n = u.size();
  for (std::size_t c = 0; c < n; ++c) {
    const cplx s = w * std::conj(u[c]);
    const __m256d sr = _mm256_set1_pd(s.real());
    const __m256d si = _mm256_set1_pd(s.imag());
    cplx* col = a.data() + c * n;
    std::size_t r = 0;
    for (; r + 2 <= n; r += 2) {
      const __m256d uv = load2(u.data() + r);
      const __m256d t = _mm256_mul_pd(_mm256_permute_pd(uv, 0x5), si);
      const __m256d prod = _mm256_fmaddsub_pd(uv, sr, t);
      store2(col + r, _mm256_add_pd(load2(col + r), prod));
    }
    for (; r < n; ++r) col[r] += u[r] * s;
  }
}

double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x.data() + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x.data() + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x.data() + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

void abs2_accumulate(std::span<double> dst, std::span<const cplx> src, double scale) {
  const std::size_t n = dst.size();
  const __m256d k = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d z01 = load2(src.data() + i);
    const __m256d z23 = load2(src.data() + i + 2);
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(z01, z01), _mm256_mul_pd(z23, z23));
    // hadd leaves (|z0|^2, |z2|^2, |z1|^2, |z3|^2)
    const __m256d norms = _mm256_permute4x64_pd(h, 0xD8);
    _mm256_storeu_pd(dst.data() + i, _mm256_fmadd_pd(k, norms, _mm256_loadu_pd(dst.data() + i)));
  }
  for (; i < n; ++i) dst[i] += scale * std::norm(src[i]);
}

}  // namespace beamacq::kernels::avx2

#else

namespace beamacq::kernels::avx2 {

[[noreturn]] static void unavailable() { throw std::runtime_error("AVX2 kernels not compiled for this target"); }

cplx cdotc(std::span<const cplx>, std::span<const cplx>) { unavailable(); }
void her_update(std::span<cplx>, std::span<const cplx>, double) { unavailable(); }
double sum(std::span<const double>) { unavailable(); }
void abs2_accumulate(std::span<double>, std::span<const cplx>, double) { unavailable(); }

}  // namespace beamacq::kernels::avx2

#endif
