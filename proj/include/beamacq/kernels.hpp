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

#pragma once

// Data-parallel inner loops shared by the estimators.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is selected once at runtime from CPUID; it can
// be pinned with BEAMACQ_ISA=scalar|avx2 or set_isa() (tests use the latter to
// compare both paths on identical inputs).

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace beamacq::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

// Returns the ISA used by the dispatched entry points below.
Isa active_isa();

// True when the running CPU can execute the AVX2 variant.
bool avx2_available();

// Forces an ISA. Requesting avx2 on a CPU without it throws std::runtime_error.
void set_isa(Isa isa);

std::string_view isa_name(Isa isa);

// sum_i conj(a_i) * b_i
cplx cdotc(std::span<const cplx> a, std::span<const cplx> b);

// A += w * u u^H for a column-major n x n matrix stored in `a` (n = u.size()).
void her_update(std::span<cplx> a, std::span<const cplx> u, double w);

double sum(std::span<const double> x);

// dst_i += scale * |src_i|^2
void abs2_accumulate(std::span<double> dst, std::span<const cplx> src, double scale);

namespace scalar {
cplx cdotc(std::span<const cplx> a, std::span<const cplx> b);
void her_update(std::span<cplx> a, std::span<const cplx> u, double w);
double sum(std::span<const double> x);
void abs2_accumulate(std::span<double> dst, std::span<const cplx> src, double scale);
}  // namespace scalar

namespace avx2 {
cplx cdotc(std::span<const cplx> a, std::span<const cplx> b);
void her_update(std::span<cplx> a, std::span<const cplx> u, double w);
double sum(std::span<const double> x);
void abs2_accumulate(std::span<double> dst, std::span<const cplx> src, double scale);
}  // namespace avx2

}  // namespace beamacq::kernels
