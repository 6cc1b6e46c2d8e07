// Copyright 2026 The AspectSim Authors.
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

// Brute-force reference implementations used to check the statistics code.
// They share nothing with the library beyond the label enum.

#ifndef ASPECTSIM_TESTS_SUPPORT_STAT_ORACLES_H_
#define ASPECTSIM_TESTS_SUPPORT_STAT_ORACLES_H_

#include <cmath>
#include <cstddef>
#include <vector>

#include "aspectsim/corpus.h"

namespace aspectsim::testing {

// Rank of v[i] = (#values below) + (#values equal + 1) / 2, by pairwise counts.
inline std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double below = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) ++below;
      if (w == v[i]) ++equal;
    }
    r[i] = below + (equal + 1) / 2;
  }
  return r;
}

inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return oracle_pearson(oracle_ranks(x), oracle_ranks(y));
}

// Kappa from an explicit 5x5 confusion matrix over every label value.
inline double oracle_kappa(const std::vector<SimilarityLabel>& a,
                           const std::vector<SimilarityLabel>& b) {
  constexpr std::size_t k = kAllLabels.size();
  double m[k][k] = {};
  for (std::size_t i = 0; i < a.size(); ++i) {
    m[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])] += 1;
  }
  const double n = static_cast<double>(a.size());
  double po = 0, pe = 0;
  for (std::size_t i = 0; i < k; ++i) {
    po += m[i][i];
    double row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += m[i][j];
      col += m[j][i];
    }
    pe += (row / n) * (col / n);
  }
  po /= n;
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1 - pe);
}

}  // namespace aspectsim::testing

#endif  // ASPECTSIM_TESTS_SUPPORT_STAT_ORACLES_H_
