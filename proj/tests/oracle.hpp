// Copyright 2026 The qnetsup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent reference computations for tests. Nothing here calls into the
// library's metric code; states are built from explicit bit strings.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "qnetsup/engine.hpp"

namespace oracle {

using qnetsup::cplx;
using qnetsup::Matrix;
using qnetsup::Vector;

// Real cyclic Jacobi on the 2n x 2n embedding [[Re,-Im],[Im,Re]]; every
// eigenvalue of h shows up twice there.
inline std::vector<double> jacobi_eigenvalues(const Matrix& h) {
  const int n = static_cast<int>(h.rows());
  const int N = 2 * n;
  std::vector<double> a(static_cast<std::size_t>(N) * N);
  auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * N + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A(i, j) = h(i, j).real();
      A(i + n, j + n) = h(i, j).real();
      A(i, j + n) = -h(i, j).imag();
      A(i + n, j) = h(i, j).imag();
    }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) off += A(i, j) * A(i, j);
    if (off < 1e-26) break;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2 * A(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (int k = 0; k < N; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev;
  for (int i = 0; i < N; ++i) ev.push_back(A(i, i));
  std::sort(ev.begin(), ev.end());
  std::vector<double> out;
  for (int i = 0; i < N; i += 2) out.push_back(0.5 * (ev[i] + ev[i + 1]));
  return out;
}

// Density matrix over registers with dims `dims` (big endian); the listed
// positions are traced out by direct index loops.
inline Matrix trace_out(const Matrix& rho, const std::vector<int>& dims,
                        const std::vector<int>& keep_pos) {
  const int R = static_cast<int>(dims.size());
  std::vector<int> keep(R, 0);
  for (int p : keep_pos) keep[p] = 1;
  auto digits = [&](long x) {
    std::vector<int> d(R);
    for (int r = R - 1; r >= 0; --r) {
      d[r] = static_cast<int>(x % dims[r]);
      x /= dims[r];
    }
    return d;
  };
  long kd = 1;
  for (int p : keep_pos) kd *= dims[p];
  Matrix out = Matrix::Zero(kd, kd);
  const long D = rho.rows();
  for (long i = 0; i < D; ++i) {
    auto di = digits(i);
    for (long j = 0; j < D; ++j) {
      auto dj = digits(j);
      bool same = true;
      for (int r = 0; r < R && same; ++r)
        if (!keep[r] && di[r] != dj[r]) same = false;
      if (!same) continue;
      long ki = 0, kj = 0;
      for (int p : keep_pos) {
        ki = ki * dims[p] + di[p];
        kj = kj * dims[p] + dj[p];
      }
      out(ki, kj) += rho(i, j);
    }
  }
  return out;
}

inline Matrix partial_transpose(const Matrix& rho, const std::vector<int>& dims,
                                const std::vector<int>& side_pos) {
  const int R = static_cast<int>(dims.size());
  std::vector<int> in(R, 0);
  for (int p : side_pos) in[p] = 1;
  const long D = rho.rows();
  Matrix out(D, D);
  std::vector<int> di(R), dj(R);
  for (long i = 0; i < D; ++i)
    for (long j = 0; j < D; ++j) {
      long x = i, y = j;
      for (int r = R - 1; r >= 0; --r) {
        di[r] = static_cast<int>(x % dims[r]);
        dj[r] = static_cast<int>(y % dims[r]);
        x /= dims[r];
        y /= dims[r];
      }
      for (int r = 0; r < R; ++r)
        if (in[r]) std::swap(di[r], dj[r]);
      long ii = 0, jj = 0;
      for (int r = 0; r < R; ++r) {
        ii = ii * dims[r] + di[r];
        jj = jj * dims[r] + dj[r];
      }
      out(ii, jj) = rho(i, j);
    }
  return out;
}

inline double negativity(const Matrix& rho, const std::vector<int>& dims,
                         const std::vector<int>& side_pos) {
  auto ev = jacobi_eigenvalues(partial_transpose(rho, dims, side_pos));
  double neg = 0;
  for (double x : ev)
    if (x < 0) neg -= x;
  return neg;
}

// Sum of amplitude * |digits>, digits given as strings over '0'..'9'.
inline Vector ket(const std::vector<int>& dims,
                  const std::vector<std::pair<std::string, cplx>>& terms) {
  long D = 1;
  for (int d : dims) D *= d;
  Vector v = Vector::Zero(D);
  for (const auto& [s, a] : terms) {
    long idx = 0;
    for (std::size_t r = 0; r < dims.size(); ++r) idx = idx * dims[r] + (s.at(r) - '0');
    v[idx] += a;
  }
  return v;
}

inline Vector normalized(Vector v) { return v / v.norm(); }

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (long i = 0; i < a.size(); ++i)
    for (long j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

inline double overlap2(const Vector& a, const Vector& b) {
  return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

inline double trace_distance(const Matrix& a, const Matrix& b) {
  double s = 0;
  for (double x : jacobi_eigenvalues(a - b)) s += std::abs(x);
  return s / 2;
}

}  // namespace oracle
