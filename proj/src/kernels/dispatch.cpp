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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace beamacq::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("BEAMACQ_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && avx2_available()) return Isa::avx2;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_available() {
#if defined(BEAMACQ_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available())
    throw std::runtime_error("AVX2 requested but not supported by this CPU/build");
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

cplx cdotc(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cdotc: length mismatch");
  return active_isa() == Isa::avx2 ? avx2::cdotc(a, b) : scalar::cdotc(a, b);
}

void her_update(std::span<cplx> a, std::span<const cplx> u, double w) {
  if (a.size() != u.size() * u.size()) throw std::invalid_argument("her_update: matrix is not n x n");
  active_isa() == Isa::avx2 ? avx2::her_update(a, u, w) : scalar::her_update(a, u, w);
}

double sum(std::span<const double> x) {
  return active_isa() == Isa::avx2 ? avx2::sum(x) : scalar::sum(x);
}

void abs2_accumulate(std::span<double> dst, std::span<const cplx> src, double scale) {
  if (dst.size() != src.size()) throw std::invalid_argument("abs2_accumulate: length mismatch");
  active_isa() == Isa::avx2 ? avx2::abs2_accumulate(dst, src, scale)
                            : scalar::abs2_accumulate(dst, src, scale);
}

}  // namespace beamacq::kernels
