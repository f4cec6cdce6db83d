#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

namespace cissifs {

/// Thrown when an exact int64 matrix operation would overflow.
struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

namespace detail {

template <class T>
inline T checked_add(T a, T b) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    T r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int64 matrix entry overflow (add)");
    return r;
  } else {
    return a + b;
  }
}

template <class T>
inline T checked_mul(T a, T b) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    T r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int64 matrix entry overflow (mul)");
    return r;
  } else {
    return a * b;
  }
}

}  // namespace detail

/// Dense row-major matrix. Small sizes only (N is the number of basic cells).
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<T>& data() const noexcept { return data_; }

  std::vector<T> row(std::size_t r) const {
    return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }

  template <class U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = static_cast<U>((*this)(i, j));
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          out(i, j) = detail::checked_add(out(i, j), detail::checked_mul(aik, b(k, j)));
      }
    return out;
  }

  friend Matrix operator*(const T& s, const Matrix& a) {
    Matrix out = a;
    for (auto& x : out.data_) x = detail::checked_mul(s, x);
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << (i ? ",[" : "[");
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? "," : "") << m(i, j);
      os << ']';
    }
    return os << ']';
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<std::int64_t>;
using RealMatrix = Matrix<double>;

/// Row vector times matrix.
template <class T>
std::vector<T> row_times(const std::vector<T>& v, const Matrix<T>& m) {
  if (v.size() != m.rows()) throw std::invalid_argument("vector/matrix shape mismatch");
  std::vector<T> out(m.cols(), T(0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (v[i] == T(0)) continue;
    for (std::size_t j = 0; j < m.cols(); ++j)
      out[j] = detail::checked_add(out[j], detail::checked_mul(v[i], m(i, j)));
  }
  return out;
}

/// Entrywise sum. Submultiplicative on nonnegative matrices.
template <class T>
T sum_norm(const Matrix<T>& m) {
  T s(0);
  for (const auto& x : m.data()) s = detail::checked_add(s, x);
  return s;
}

/// Smallest column sum. Supermultiplicative on nonnegative matrices.
template <class T>
T min_col_sum(const Matrix<T>& m) {
  if (m.cols() == 0) return T(0);
  T best{};
  for (std::size_t j = 0; j < m.cols(); ++j) {
    T s(0);
    for (std::size_t i = 0; i < m.rows(); ++i) s = detail::checked_add(s, m(i, j));
    if (j == 0 || s < best) best = s;
  }
  return best;
}

template <class T>
bool is_allowable(const Matrix<T>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < m.cols(); ++j) any = any || m(i, j) > T(0);
    if (!any) return false;
  }
  for (std::size_t j = 0; j < m.cols(); ++j) {
    bool any = false;
    for (std::size_t i = 0; i < m.rows(); ++i) any = any || m(i, j) > T(0);
    if (!any) return false;
  }
  return true;
}

template <class T>
bool is_strictly_positive(const Matrix<T>& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](const T& x) { return x > T(0); });
}

template <class T>
Eigen::MatrixXd to_eigen(const Matrix<T>& m) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(m(i, j));
  return e;
}

/// Largest eigenvalue modulus, from a full real eigen-decomposition.
template <class T>
double spectral_radius(const Matrix<T>& m) {
  if (!m.square()) throw std::invalid_argument("spectral radius needs a square matrix");
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(m), /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    // Gershgorin row bound; nonnegative entries make it the max row sum.
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m.cols(); ++j) s += std::abs(static_cast<double>(m(i, j)));
      best = std::max(best, s);
    }
    return best;
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Exact test for a nonnegative integer matrix having spectral radius exactly 1.
///
/// The spectral radius is the maximum over strongly connected components of the
/// component's own spectral radius. An irreducible nonnegative integer block has
/// radius >= its minimum row sum, with equality only if all row sums agree, so
/// the radius is exactly 1 iff every nontrivial component has all in-component
/// row sums equal to 1 and at least one such component exists.
inline bool has_unit_spectral_radius(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (!m.square() || n == 0) return false;
  // Tarjan SCC, iterative-free recursion is fine at these sizes.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  int counter = 0, ncomp = 0;
  auto strong = [&](auto&& self, std::size_t v) -> void {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w = 0; w < n; ++w) {
      if (m(v, w) <= 0) continue;
      if (index[w] < 0) {
        self(self, w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        std::size_t w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] < 0) strong(strong, v);

  bool any_cycle = false;
  for (int c = 0; c < ncomp; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < n; ++v)
      if (comp[v] == c) members.push_back(v);
    std::int64_t self_loop = members.size() == 1 ? m(members[0], members[0]) : 1;
    if (members.size() == 1 && self_loop == 0) continue;  // trivial component
    any_cycle = true;
    for (std::size_t v : members) {
      std::int64_t s = 0;
      for (std::size_t w : members) s += m(v, w);
      if (s != 1) return false;
    }
  }
  return any_cycle;
}

/// Exact determinant of an integer matrix (fraction-free Bareiss elimination).
template <class Big>
Big exact_determinant(const Matrix<Big>& m) {
  if (!m.square()) throw std::invalid_argument("determinant needs a square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return Big(1);
  Matrix<Big> a = m;
  Big prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == Big(0)) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k) == Big(0)) ++swap;
      if (swap == n) return Big(0);
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(swap, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign > 0 ? a(n - 1, n - 1) : Big(-a(n - 1, n - 1));
}

}  // namespace cissifs
