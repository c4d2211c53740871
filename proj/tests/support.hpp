#pragma once

#include <kgf/gframe.hpp>
#include <kgf/random.hpp>

#include <cmath>
#include <initializer_list>
#include <vector>

namespace kgf::test {

inline const AlgebraShape& scalar_shape() {
  static const AlgebraShape s(std::vector<int>{1});
  return s;
}

// Operator whose coefficient (i, j) is rows[i][j] * 1_A.
inline ModuleOperator op(std::initializer_list<std::initializer_list<double>> rows,
                         const AlgebraShape& shape = scalar_shape()) {
  std::vector<AlgebraElement> coeffs;
  std::size_t c = 0;
  for (const auto& row : rows) {
    c = row.size();
    for (double v : row) coeffs.push_back(AlgebraElement::scalar(shape, cplx(v)));
  }
  return ModuleOperator(shape, rows.size(), c, std::move(coeffs));
}

// Member A^d -> A^1 sending x to sum_i x_i w_i.
inline ModuleOperator row_functional(std::initializer_list<double> w, const AlgebraShape& shape = scalar_shape()) {
  std::vector<AlgebraElement> coeffs;
  for (double v : w) coeffs.push_back(AlgebraElement::scalar(shape, cplx(v)));
  return ModuleOperator(shape, w.size(), 1, std::move(coeffs));
}

inline GFrame ci1() { return GFrame({row_functional({1, 0}), row_functional({0, 1}), row_functional({1, 1})}); }

inline GFrame coordinate_frame(const AlgebraShape& shape, std::size_t d) {
  const std::vector<std::size_t> ones(d, 1);
  return canonical_g_orthonormal_basis(shape, d, ones);
}

inline double dist(const ModuleOperator& a, const ModuleOperator& b) { return uniform_norm(a - b); }

inline double dist(const ModuleVector& a, const ModuleVector& b) {
  const ModuleVector d = a - b;
  return std::sqrt(max_seminorm(inner(d, d)));
}

inline ModuleVector random_vector(Rng& rng, const AlgebraShape& shape, std::size_t d) {
  std::vector<AlgebraElement> comps;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<Mat> blocks;
    for (int n : shape.dims()) blocks.push_back(rng.gaussian(n, n));
    comps.emplace_back(shape, std::move(blocks));
  }
  return ModuleVector(shape, std::move(comps));
}

inline AlgebraElement random_element(Rng& rng, const AlgebraShape& shape) {
  std::vector<Mat> blocks;
  for (int n : shape.dims()) blocks.push_back(rng.gaussian(n, n));
  return AlgebraElement(shape, std::move(blocks));
}

}  // namespace kgf::test
