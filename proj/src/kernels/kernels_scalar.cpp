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

namespace beamacq::kernels::scalar {

cplx cdotc(std::span<const cplx> a, std::span<const cplx> b) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void her_update(std::span<cplx> a, std::span<const cplx> u, double w) {
  const std::size_t n = u.size();
  for (std::size_t c = 0; c < n; ++c) {
    const cplx s = w * std::conj(u[c]);
    cplx* col = a.data() + c * n;
    for (std::size_t r = 0; r < n; ++r) col[r] += u[r] * s;
  }
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

void abs2_accumulate(std::span<double> dst, std::span<const cplx> src, double scale) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * std::norm(src[i]);
}

}  // namespace beamacq::kernels::scalar
