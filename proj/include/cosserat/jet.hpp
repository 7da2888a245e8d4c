#pragma once

// Forward-mode automatic differentiation over a fixed number of local
// coordinates. Jet1 carries the gradient, Jet2 the gradient and the packed
// upper triangle of the Hessian. Only the ring operations are provided: the
// element energies are polynomials in their local coordinates.

#include <array>
#include <cstddef>
#include <limits>

#include <Eigen/Core>

namespace cosserat::ad {

template <int N>
struct Jet1 {
  static constexpr int size = N;

  double v = 0.0;
  std::array<double, N> g{};

  Jet1() = default;
  Jet1(double value) : v(value) {}  // NOLINT: implicit lift of constants

  static Jet1 variable(double value, int index) {
    Jet1 j(value);
    j.g[index] = 1.0;
    return j;
  }

  Jet1& operator+=(const Jet1& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) g[i] += o.g[i];
    return *this;
  }
  Jet1& operator-=(const Jet1& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) g[i] -= o.g[i];
    return *this;
  }
  Jet1& operator*=(const Jet1& o) {
    for (int i = 0; i < N; ++i) g[i] = g[i] * o.v + v * o.g[i];
    v *= o.v;
    return *this;
  }
  Jet1& operator*=(double s) {
    v *= s;
    for (auto& x : g) x *= s;
    return *this;
  }
  Jet1& operator/=(double s) { return *this *= (1.0 / s); }
};

template <int N>
struct Jet2 {
  static constexpr int size = N;
  static constexpr int packed = N * (N + 1) / 2;

  double v = 0.0;
  std::array<double, N> g{};
  std::array<double, packed> h{};  // row-major upper triangle

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT: implicit lift of constants

  static Jet2 variable(double value, int index) {
    Jet2 j(value);
    j.g[index] = 1.0;
    return j;
  }

  static constexpr int index(int i, int j) {
    // i <= j
    return i * N - i * (i - 1) / 2 + (j - i);
  }
  double hessian(int i, int j) const { return i <= j ? h[index(i, j)] : h[index(j, i)]; }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) g[i] += o.g[i];
    for (int k = 0; k < packed; ++k) h[k] += o.h[k];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) g[i] -= o.g[i];
    for (int k = 0; k < packed; ++k) h[k] -= o.h[k];
    return *this;
  }
  Jet2& operator*=(const Jet2& o) {
    int k = 0;
    for (int i = 0; i < N; ++i) {
      for (int j = i; j < N; ++j, ++k) {
        h[k] = h[k] * o.v + v * o.h[k] + g[i] * o.g[j] + g[j] * o.g[i];
      }
    }
    for (int i = 0; i < N; ++i) g[i] = g[i] * o.v + v * o.g[i];
    v *= o.v;
    return *this;
  }
  Jet2& operator*=(double s) {
    v *= s;
    for (auto& x : g) x *= s;
    for (auto& x : h) x *= s;
    return *this;
  }
  Jet2& operator/=(double s) { return *this *= (1.0 / s); }
};

#define COSSERAT_JET_OPERATORS(JET)                                                   \
  template <int N>                                                                    \
  JET<N> operator+(JET<N> a, const JET<N>& b) { return a += b; }                      \
  template <int N>                                                                    \
  JET<N> operator-(JET<N> a, const JET<N>& b) { return a -= b; }                      \
  template <int N>                                                                    \
  JET<N> operator*(JET<N> a, const JET<N>& b) { return a *= b; }                      \
  template <int N>                                                                    \
  JET<N> operator+(JET<N> a, double b) { a.v += b; return a; }                        \
  template <int N>                                                                    \
  JET<N> operator+(double a, JET<N> b) { b.v += a; return b; }                        \
  template <int N>                                                                    \
  JET<N> operator-(JET<N> a, double b) { a.v -= b; return a; }                        \
  template <int N>                                                                    \
  JET<N> operator-(double a, const JET<N>& b) { return JET<N>(a) - b; }               \
  template <int N>                                                                    \
  JET<N> operator*(JET<N> a, double b) { return a *= b; }                             \
  template <int N>                                                                    \
  JET<N> operator*(double a, JET<N> b) { return b *= a; }                             \
  template <int N>                                                                    \
  JET<N> operator/(JET<N> a, double b) { return a /= b; }                             \
  template <int N>                                                                    \
  JET<N> operator-(JET<N> a) { return a *= -1.0; }                                    \
  template <int N>                                                                    \
  JET<N> operator+(const JET<N>& a) { return a; }                                     \
  template <int N>                                                                    \
  bool operator<(const JET<N>& a, const JET<N>& b) { return a.v < b.v; }              \
  template <int N>                                                                    \
  bool operator>(const JET<N>& a, const JET<N>& b) { return a.v > b.v; }              \
  template <int N>                                                                    \
  bool operator==(const JET<N>& a, const JET<N>& b) { return a.v == b.v; }            \
  template <int N>                                                                    \
  bool operator!=(const JET<N>& a, const JET<N>& b) { return a.v != b.v; }            \
  template <int N>                                                                    \
  JET<N> abs2(const JET<N>& a) { return a * a; }                                      \
  template <int N>                                                                    \
  JET<N> conj(const JET<N>& a) { return a; }                                          \
  template <int N>                                                                    \
  JET<N> real(const JET<N>& a) { return a; }                                          \
  template <int N>                                                                    \
  JET<N> imag(const JET<N>&) { return JET<N>(0.0); }

COSSERAT_JET_OPERATORS(Jet1)
COSSERAT_JET_OPERATORS(Jet2)

#undef COSSERAT_JET_OPERATORS

inline double value(double x) { return x; }
template <int N>
double value(const Jet1<N>& x) { return x.v; }
template <int N>
double value(const Jet2<N>& x) { return x.v; }

}  // namespace cosserat::ad

namespace Eigen {

template <class JetT>
struct CosseratJetTraits {
  using Real = JetT;
  using NonInteger = JetT;
  using Nested = JetT;
  using Literal = JetT;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = JetT::size + 1,
    MulCost = 3 * JetT::size + 1
  };
  static JetT epsilon() { return JetT(std::numeric_limits<double>::epsilon()); }
  static JetT dummy_precision() { return JetT(1e-12); }
  static JetT highest() { return JetT(std::numeric_limits<double>::max()); }
  static JetT lowest() { return JetT(std::numeric_limits<double>::lowest()); }
  static int digits10() { return std::numeric_limits<double>::digits10; }
  static int digits() { return std::numeric_limits<double>::digits; }
  static JetT infinity() { return JetT(std::numeric_limits<double>::infinity()); }
  static JetT quiet_NaN() { return JetT(std::numeric_limits<double>::quiet_NaN()); }
};

template <int N>
struct NumTraits<cosserat::ad::Jet1<N>> : CosseratJetTraits<cosserat::ad::Jet1<N>> {};
template <int N>
struct NumTraits<cosserat::ad::Jet2<N>> : CosseratJetTraits<cosserat::ad::Jet2<N>> {};

template <int N, typename Op>
struct ScalarBinaryOpTraits<cosserat::ad::Jet1<N>, double, Op> {
  using ReturnType = cosserat::ad::Jet1<N>;
};
template <int N, typename Op>
struct ScalarBinaryOpTraits<double, cosserat::ad::Jet1<N>, Op> {
  using ReturnType = cosserat::ad::Jet1<N>;
};
template <int N, typename Op>
struct ScalarBinaryOpTraits<cosserat::ad::Jet2<N>, double, Op> {
  using ReturnType = cosserat::ad::Jet2<N>;
};
template <int N, typename Op>
struct ScalarBinaryOpTraits<double, cosserat::ad::Jet2<N>, Op> {
  using ReturnType = cosserat::ad::Jet2<N>;
};

}  // namespace Eigen
