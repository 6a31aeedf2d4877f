#ifndef HHEAT_MOSER_HPP
#define HHEAT_MOSER_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace hheat {

// Exact rational on 64-bit numerator/denominator with overflow checks.
class Rational {
 public:
  Rational(std::int64_t num = 0, std::int64_t den = 1) : n_(num), d_(den) { normalize(); }

  std::int64_t num() const { return n_; }
  std::int64_t den() const { return d_; }
  double to_double() const { return double(n_) / double(d_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(checked(__int128(a.n_) * b.d_ + __int128(b.n_) * a.d_),
                    checked(__int128(a.d_) * b.d_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational(-b.n_, b.d_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(checked(__int128(a.n_) * b.n_), checked(__int128(a.d_) * b.d_));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.n_ == 0) throw std::domain_error("Rational: division by zero");
    return Rational(checked(__int128(a.n_) * b.d_), checked(__int128(a.d_) * b.n_));
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.n_ == b.n_ && a.d_ == b.d_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

  Rational pow(int e) const {
    if (e < 0) return Rational(1) / pow(-e);
    Rational r(1), base(*this);
    while (e) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

 private:
  static std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Rational: 64-bit overflow");
    return std::int64_t(v);
  }
  void normalize() {
    if (d_ == 0) throw std::domain_error("Rational: zero denominator");
    if (d_ < 0) {
      n_ = -n_;
      d_ = -d_;
    }
    const std::int64_t g = std::gcd(n_ < 0 ? -n_ : n_, d_);
    if (g > 1) {
      n_ /= g;
      d_ /= g;
    }
  }
  std::int64_t n_, d_;
};

// State of the sup-bound recursion k_{n+1}^{1/(1+beta)} <= Cbar 2^n b^{-1} k_n:
// exponent bookkeeping a_n, d_n in exact rationals plus the running bound k_n.
struct MoserState {
  Rational beta;   // > 0
  Rational a;      // a_n = sum_{j=0}^{n-2} (1+beta)^j
  Rational dcoef;  // d_n = sum_{j=0}^{n-2} (j+1)(1+beta)^{n-2-j}
  int n = 2;       // >= 2
  double k = 0;    // current iterate bound k_n >= 0

  static MoserState initial(const Rational& beta, double k1, double Cbar, double b) {
    if (!(beta.to_double() > 0)) throw std::invalid_argument("MoserState: beta must be > 0");
    if (!(k1 >= 0)) throw std::invalid_argument("MoserState: k must be >= 0");
    // n = 2: single-term sums give a_2 = 1, d_2 = 1; k_2 saturates the n=1 step.
    MoserState st{beta, Rational(1), Rational(1), 2, 0};
    st.k = std::pow(Cbar * 2.0 / b * k1, 1.0 + beta.to_double());
    return st;
  }
};

// One step of the recursion: a_{n+1} = a_n (1+beta) + 1, d_{n+1} = d_n (1+beta) + n,
// and the bound update k_{n+1} = (Cbar 2^n b^{-1} k_n)^{1+beta} taken with equality.
inline MoserState moser_advance(const MoserState& state, double Cbar, double b) {
  if (!(b > 0) || !(Cbar > 0)) throw std::invalid_argument("moser_advance: need Cbar, b > 0");
  const Rational one_plus_beta = state.beta + Rational(1);
  MoserState next = state;
  next.a = state.a * one_plus_beta + Rational(1);
  next.dcoef = state.dcoef * one_plus_beta + Rational(state.n);
  next.n = state.n + 1;
  next.k = std::pow(Cbar * std::pow(2.0, state.n) / b * state.k, 1.0 + state.beta.to_double());
  return next;
}

// Closed-form exponents a_n, d_n evaluated directly from their defining sums.
inline Rational moser_a_closed(const Rational& beta, int n) {
  if (n < 2) throw std::invalid_argument("moser_a_closed: n >= 2");
  const Rational q = beta + Rational(1);
  Rational s(0);
  for (int j = 0; j <= n - 2; ++j) s = s + q.pow(j);
  return s;
}

inline Rational moser_d_closed(const Rational& beta, int n) {
  if (n < 2) throw std::invalid_argument("moser_d_closed: n >= 2");
  const Rational q = beta + Rational(1);
  Rational s(0);
  for (int j = 0; j <= n - 2; ++j) s = s + Rational(j + 1) * q.pow(n - 2 - j);
  return s;
}

}  // namespace hheat

#endif  // HHEAT_MOSER_HPP
