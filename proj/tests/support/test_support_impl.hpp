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

#include "beamacq/beam_design.hpp"

#include <sstream>

namespace beamacq::testing {

namespace detail {

inline std::string fail(const std::string& what, int instance, double value, double tol) {
  std::ostringstream os;
  os << what << " instance " << instance << ": " << value << " > " << tol;
  return os.str();
}

}  // namespace detail

inline std::string check_hermitian_eig_invariants(int instances, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> size(1, 24);
  for (int t = 0; t < instances; ++t) {
    const Index n = size(rng);
    const CMatrix a = random_hermitian(rng, n);
    const HermitianEig e = hermitian_eig(a);
    const double scale = std::max(1.0, a.norm());
    const double recon = (e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint() - a).norm() / scale;
    if (recon > 1e-11) return detail::fail("hermitian_eig reconstruction", t, recon, 1e-11);
    const double orth = (e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).norm();
    if (orth > 1e-11) return detail::fail("hermitian_eig orthonormality", t, orth, 1e-11);
    for (Index i = 1; i < n; ++i)
      if (e.values(i) > e.values(i - 1)) return detail::fail("hermitian_eig ordering", t, e.values(i), e.values(i - 1));
    for (Index c = 0; c < n; ++c) {
      Index peak = 0;
      e.vectors.col(c).cwiseAbs().maxCoeff(&peak);
      const double im = std::abs(e.vectors(peak, c).imag());
      if (im > 1e-12 || e.vectors(peak, c).real() < 0.0) return detail::fail("hermitian_eig phase", t, im, 1e-12);
    }
  }
  return {};
}

inline std::string check_generalized_eig_invariants(int instances, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> size(2, 20);
  for (int t = 0; t < instances; ++t) {
    const Index n = size(rng);
    std::uniform_int_distribution<Index> dd(1, n);
    const Index d = dd(rng);
    const CMatrix a = random_hermitian(rng, n);
    const CMatrix b = random_hpd(rng, n, 1e3);
    const GeneralizedEig g = generalized_eig(a, b, d);
    const double scale = a.norm() + b.norm() * g.values.cwiseAbs().maxCoeff();
    const double res =
        (a * g.vectors - b * g.vectors * g.values.cast<cplx>().asDiagonal()).norm() / std::max(1.0, scale);
    if (res > 1e-9) return detail::fail("generalized_eig residual", t, res, 1e-9);
    const double borth = (g.vectors.adjoint() * b * g.vectors - CMatrix::Identity(d, d)).norm();
    if (borth > 1e-8) return detail::fail("generalized_eig B-orthonormality", t, borth, 1e-8);
    const RVector ref = direct_generalized_values(a, b);
    const double vals = (g.values - ref.head(d)).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff());
    if (vals > 1e-8) return detail::fail("generalized_eig vs direct B^-1 A", t, vals, 1e-8);
  }
  return {};
}

inline std::string check_pseudo_inverse_invariants(int instances, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> size(1, 16);
  for (int t = 0; t < instances; ++t) {
    const Index r = size(rng), c = size(rng);
    std::uniform_int_distribution<Index> rk(1, std::min(r, c));
    const Index k = rk(rng);
    const CMatrix a = random_matrix(rng, r, k) * random_matrix(rng, k, c);
    const CMatrix p = pseudo_inverse(a, 1e-10);
    const double s = std::max(1.0, a.norm() * p.norm());
    const double e1 = (a * p * a - a).norm() / std::max(1.0, a.norm());
    const double e2 = (p * a * p - p).norm() / std::max(1.0, p.norm());
    const CMatrix ap = a * p, pa = p * a;
    const double e3 = (ap - ap.adjoint()).norm() / s;
    const double e4 = (pa - pa.adjoint()).norm() / s;
    const double worst = std::max({e1, e2, e3, e4});
    if (worst > 1e-8) return detail::fail("pseudo_inverse Penrose conditions", t, worst, 1e-8);
    if (numerical_rank(a) != k) return detail::fail("numerical_rank", t, static_cast<double>(numerical_rank(a)), static_cast<double>(k));
  }
  return {};
}

inline std::string check_solver_invariants(int instances, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> size(1, 20);
  for (int t = 0; t < instances; ++t) {
    const Index n = size(rng), m = size(rng);
    const CMatrix a = random_hpd(rng, n, 1e3);
    const CMatrix b = random_matrix(rng, n, m);
    const CMatrix x = solve_hpd(a, b);
    const double r1 = (a * x - b).norm() / (a.norm() * x.norm());
    if (r1 > 1e-12) return detail::fail("solve_hpd residual", t, r1, 1e-12);
    const CMatrix g = random_matrix(rng, n, n);
    const CMatrix y = solve_square(g, b);
    const double r2 = (g * y - b).norm() / (g.norm() * y.norm());
    if (r2 > 1e-12) return detail::fail("solve_square residual", t, r2, 1e-12);
  }
  return {};
}

inline std::string check_orthonormalize_invariants(int instances, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> size(1, 20);
  for (int t = 0; t < instances; ++t) {
    const Index r = size(rng);
    std::uniform_int_distribution<Index> cc(1, r);
    const Index c = cc(rng);
    const CMatrix a = random_matrix(rng, r, c);
    const CMatrix q = orthonormalize_columns(a);
    const double orth = (q.adjoint() * q - CMatrix::Identity(c, c)).norm();
    if (orth > 1e-12) return detail::fail("orthonormalize_columns orthonormality", t, orth, 1e-12);
    const double span = (q * (q.adjoint() * a) - a).norm() / a.norm();
    if (span > 1e-12) return detail::fail("orthonormalize_columns span", t, span, 1e-12);
    // Column j of Q lies in span(a_0..a_j) with positive projection on a_j's new direction.
    for (Index j = 0; j < c; ++j) {
      const cplx proj = q.col(j).dot(a.col(j));
      if (proj.real() <= 0.0 || std::abs(proj.imag()) > 1e-9 * std::abs(proj))
        return detail::fail("orthonormalize_columns alignment", t, std::arg(proj), 0.0);
    }
  }
  return {};
}

inline std::string check_greedy_vs_exhaustive(int max_dg, int max_clusters, int lambda_draws, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 8);
  long cases = 0;
  for (int c = 1; c <= max_clusters; ++c)
    for (int dg = 0; dg <= max_dg; ++dg)
      for (int draw = 0; draw < lambda_draws; ++draw) {
        std::vector<RVector> lambdas;
        int capacity = 0;
        for (int l = 0; l < c; ++l) {
          RVector v(len(rng));
          for (Index i = 0; i < v.size(); ++i) v(i) = std::pow(10.0, 4.0 * u(rng) - 1.0);
          std::sort(v.data(), v.data() + v.size(), std::greater<>());
          lambdas.push_back(v);
          capacity += static_cast<int>(v.size());
        }
        if (dg > capacity) continue;
        const int floor = dg >= c ? 1 : 0;
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> arg;
        for_each_composition(dg, c, [&](const std::vector<int>& d) {
          for (int l = 0; l < c; ++l)
            if (d[static_cast<std::size_t>(l)] < floor || d[static_cast<std::size_t>(l)] > lambdas[static_cast<std::size_t>(l)].size()) return;
          const double cost = allocation_cost(lambdas, d);
          if (cost < best - 1e-15) {
            best = cost;
            arg = d;
          }
        });
        const auto greedy = allocate_rf_chains(lambdas, dg, FloorPolicy::adaptive);
        int sum = 0;
        for (int v : greedy) sum += v;
        if (sum != dg) return detail::fail("greedy allocation total", static_cast<int>(cases), sum, dg);
        const double gc = allocation_cost(lambdas, greedy);
        if (gc > best + 1e-12 * std::max(1.0, best))
          return detail::fail("greedy allocation cost above exhaustive optimum", static_cast<int>(cases), gc, best);
        ++cases;
      }
  return {};
}

}  // namespace beamacq::testing
