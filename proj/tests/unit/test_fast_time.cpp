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

#include "beamacq/fast_time_est.hpp"
#include "beamacq/signals.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace beamacq;
using namespace beamacq::testing;

namespace {

struct Problem {
  int N = 8, L = 4, T = 12, K = 2, dg = 3;
  CMatrix x, s, r_eta;
  std::vector<CMatrix> per_delay;
};

Problem make_problem(std::uint64_t seed, int T = 12) {
  Problem p;
  p.T = T;
  Rng rng(seed);
  p.x = training_matrix(extend_pilots(kasami_pilots(p.K, std::min(T, 63), p.L), T), {0, 1}, T);
  p.s = orthonormalize_columns(random_matrix(rng, p.N, p.dg));
  p.per_delay.assign(static_cast<std::size_t>(p.L), CMatrix::Zero(p.N, p.N));
  for (int l : {0, 2, 3}) {
    const CMatrix a = random_matrix(rng, p.N, 2);
    p.per_delay[static_cast<std::size_t>(l)] = 2.0 * a * a.adjoint();
  }
  p.r_eta = random_hpd(rng, p.N, 10.0);
  return p;
}

CMatrix beam(const CMatrix& r, const CMatrix& s) { return s.adjoint() * r * s; }

// Brute-force LMMSE over the stacked model y = (X (x) I) h + eta.
struct Oracle {
  CMatrix a, c_hh, c_yy, w;
};

Oracle oracle(const Problem& p) {
  Oracle o;
  const Index n = static_cast<Index>(p.K) * p.L * p.dg;
  o.a = kron(p.x, CMatrix::Identity(p.dg, p.dg));
  o.c_hh = CMatrix::Zero(n, n);
  for (int k = 0; k < p.K; ++k)
    for (int l = 0; l < p.L; ++l)
      o.c_hh.block((k * p.L + l) * p.dg, (k * p.L + l) * p.dg, p.dg, p.dg) = beam(p.per_delay[static_cast<std::size_t>(l)], p.s);
  o.c_yy = o.a * o.c_hh * o.a.adjoint() + kron(CMatrix::Identity(p.T, p.T), beam(p.r_eta, p.s));
  o.w = o.c_yy.fullPivLu().solve(o.a * o.c_hh);
  return o;
}

double oracle_mse(const Oracle& o, const CMatrix& w) {
  return (o.c_hh - w.adjoint() * o.a * o.c_hh - o.c_hh * o.a.adjoint() * w + w.adjoint() * o.c_yy * w).trace().real();
}

}  // namespace

TEST(FastTime, RrMmseEqualsStackedLmmse) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Problem p = make_problem(seed);
    const Oracle o = oracle(p);
    const CMatrix w = rr_mmse_matrix(p.x, p.per_delay, p.r_eta, p.s, p.L);
    EXPECT_LT(rel_err(w, o.w), 1e-9);
  }
}

TEST(FastTime, AnalyticNmseMatchesQuadraticForm) {
  const Problem p = make_problem(4);
  const Oracle o = oracle(p);
  Rng rng(5);
  const CMatrix w_rand = 0.1 * random_matrix(rng, o.w.rows(), o.w.cols());
  for (const CMatrix& w : {o.w, w_rand, ls_matrix(p.x, p.dg)}) {
    const NmseParts n = analytic_nmse(w, p.s, p.per_delay, p.r_eta, p.x, p.L);
    EXPECT_NEAR(n.denominator, o.c_hh.trace().real(), 1e-9 * n.denominator);
    EXPECT_NEAR(n.numerator, oracle_mse(o, w), 1e-8 * std::max(1.0, n.numerator));
  }
  // the Wiener filter minimizes the error
  EXPECT_LT(analytic_nmse(o.w, p.s, p.per_delay, p.r_eta, p.x, p.L).ratio(),
            analytic_nmse(w_rand, p.s, p.per_delay, p.r_eta, p.x, p.L).ratio());
}

TEST(FastTime, AnalyticMatchesMonteCarlo) {
  const Problem p = make_problem(6);
  const CMatrix w = rr_mmse_matrix(p.x, p.per_delay, p.r_eta, p.s, p.L);
  const NmseParts n = analytic_nmse(w, p.s, p.per_delay, p.r_eta, p.x, p.L);
  Rng rng(7);
  std::vector<Eigen::LLT<CMatrix>> chol;
  for (const auto& r : p.per_delay) chol.emplace_back(r + 1e-14 * CMatrix::Identity(p.N, p.N));
  Eigen::LLT<CMatrix> eta_chol(p.r_eta);
  double err = 0.0, energy = 0.0;
  const int draws = 4000;
  for (int i = 0; i < draws; ++i) {
    std::vector<std::vector<CVector>> h(static_cast<std::size_t>(p.K), std::vector<CVector>(static_cast<std::size_t>(p.L)));
    CMatrix y = eta_chol.matrixL() * random_matrix(rng, p.N, p.T) * std::sqrt(0.5);
    for (int k = 0; k < p.K; ++k)
      for (int l = 0; l < p.L; ++l) {
        if (p.per_delay[static_cast<std::size_t>(l)].isZero()) continue;
        h[k][l] = chol[static_cast<std::size_t>(l)].matrixL() * random_matrix(rng, p.N, 1) * std::sqrt(0.5);
        for (int t = 0; t < p.T; ++t) y.col(t) += p.x(t, k * p.L + l) * h[k][l];
      }
    const CVector hb = effective_channel(h, p.s, p.L);
    const CVector est = estimate_channels(w, [&] {
      CVector v(p.T * p.dg);
      for (int t = 0; t < p.T; ++t) v.segment(t * p.dg, p.dg) = p.s.adjoint() * y.col(t);
      return v;
    }());
    err += (hb - est).squaredNorm();
    energy += hb.squaredNorm();
  }
  EXPECT_NEAR(err / draws, n.numerator, 0.05 * n.numerator);
  EXPECT_NEAR(energy / draws, n.denominator, 0.05 * n.denominator);
}

TEST(FastTime, LsInvertsTallTraining) {
  const Problem p = make_problem(8, 20);  // 20 >= K L = 8
  const CMatrix w = ls_matrix(p.x, p.dg);
  const CMatrix a = kron(p.x, CMatrix::Identity(p.dg, p.dg));
  EXPECT_LT((w.adjoint() * a - CMatrix::Identity(a.cols(), a.cols())).norm(), 1e-10);
  // wide branch: (X X^H)^{-1} X
  const Problem q = make_problem(8, 6);
  const CMatrix w2 = ls_matrix(q.x, 1);
  EXPECT_LT(rel_err(w2, (q.x * q.x.adjoint()).inverse() * q.x), 1e-10);
  EXPECT_THROW(ls_matrix(CMatrix::Zero(4, 2), 1), NumericsError);
}

TEST(FastTime, BaLsRecoversClusterStructuredChannelsExactly) {
  // Two clusters: delays {0, 2} on beams 0..1, delay {3} on beam 2. With no
  // noise and channels confined to their cluster's beams, BA-LS is exact.
  const Problem p = make_problem(9);
  GroupBeamformer b;
  b.s = p.s;
  b.clusters = {{0, 2}, {3}};
  b.d = {2, 1};
  b.offset = {0, 2};
  const CMatrix w = ba_ls_matrix(p.x, b, p.L);
  Rng rng(10);
  CVector hb = CVector::Zero(static_cast<Index>(p.K) * p.L * p.dg);
  for (int k = 0; k < p.K; ++k) {
    for (int l : {0, 2}) hb.segment((k * p.L + l) * p.dg, 2) = random_matrix(rng, 2, 1);
    hb((k * p.L + 3) * p.dg + 2) = random_matrix(rng, 1, 1)(0, 0);
  }
  const CVector y = kron(p.x, CMatrix::Identity(p.dg, p.dg)) * hb;
  EXPECT_LT((estimate_channels(w, y) - hb).norm(), 1e-9 * hb.norm());

  b.fallback = true;
  EXPECT_TRUE(ba_ls_matrix(p.x, b, p.L).isZero());
}

TEST(FastTime, BaLsRankCheckNamesCluster) {
  const Problem p = make_problem(11, 3);
  GroupBeamformer b;
  b.s = p.s;
  b.clusters = {{1}};
  b.d = {3};
  b.offset = {0};
  CMatrix x = p.x;
  x.col(1) = x.col(p.L + 1);  // identical delay-1 pilots: the masked block has rank one
  try {
    ba_ls_matrix(x, b, p.L);
    FAIL();
  } catch (const NumericsError& e) {
    EXPECT_NE(std::string(e.what()).find("cluster 0"), std::string::npos);
  }
}

TEST(FastTime, EffectiveChannelLayout) {
  Rng rng(12);
  const CMatrix s = orthonormalize_columns(random_matrix(rng, 4, 2));
  std::vector<std::vector<CVector>> h(2, std::vector<CVector>(3));
  h[1][2] = random_matrix(rng, 4, 1);
  const CVector e = effective_channel(h, s, 3);
  ASSERT_EQ(e.size(), 12);
  EXPECT_LT((e.segment((1 * 3 + 2) * 2, 2) - s.adjoint() * h[1][2]).norm(), 1e-14);
  EXPECT_NEAR(e.head(10).norm(), 0.0, 0.0);
  EXPECT_EQ(parse_estimator("ba_ls"), EstimatorKind::ba_ls);
  EXPECT_STREQ(estimator_name(EstimatorKind::rr_mmse), "rr_mmse");
  EXPECT_THROW(parse_estimator("zf"), ConfigError);
}
