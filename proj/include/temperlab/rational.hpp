#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace temperlab {

// Exact rational on 64-bit numerator/denominator. All arithmetic goes
// through 128-bit intermediates and throws std::overflow_error instead of
// wrapping, so exact-mode results are either correct or loudly absent.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rat(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("Rat: zero denominator");
    i128 n = num, d = den;
    if (d < 0) { n = -n; d = -d; }
    reduce_assign(n, d);
  }

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }
  bool is_integer() const { return den_ == 1; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rat operator-() const { return Rat(unsafe{}, -num_, den_); }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rat& operator+=(const Rat& o) { *this = *this + o; return *this; }
  Rat& operator-=(const Rat& o) { *this = *this - o; return *this; }
  Rat& operator*=(const Rat& o) { *this = *this * o; return *this; }
  Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) { return i128(a.num_) * b.den_ < i128(b.num_) * a.den_; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  Rat abs() const { return num_ < 0 ? -*this : *this; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "p", "p/q", or a plain decimal like "-1.25".
  static Rat parse(const std::string& s);

  // Nearest rational with denominator <= max_den, if one lies within tol.
  static std::optional<Rat> approximate(double x, long long max_den, double tol);

  size_t hash() const {
    size_t h = std::hash<long long>()(num_);
    return h ^ (std::hash<long long>()(den_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }

 private:
  using i128 = __int128;
  struct unsafe {};
  Rat(unsafe, long long n, long long d) : num_(n), den_(d) {}

  static i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a;
  }
  static Rat from_i128(i128 n, i128 d) {
    Rat r;
    if (d < 0) { n = -n; d = -d; }
    r.reduce_assign(n, d);
    return r;
  }
  void reduce_assign(i128 n, i128 d) {
    if (d == 0) throw std::invalid_argument("Rat: zero denominator");
    if (n == 0) { num_ = 0; den_ = 1; return; }
    i128 g = gcd128(n, d);
    n /= g; d /= g;
    constexpr i128 kMax = 0x7fffffffffffffffLL;
    if (n > kMax || n < -kMax || d > kMax) throw std::overflow_error("Rat: 64-bit overflow");
    num_ = static_cast<long long>(n);
    den_ = static_cast<long long>(d);
  }

  long long num_;
  long long den_;
};

inline Rat Rat::parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("Rat::parse: empty string");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    long long p = std::stoll(s.substr(0, slash));
    long long q = std::stoll(s.substr(slash + 1));
    return Rat(p, q);
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rat(std::stoll(s));
  std::string intpart = s.substr(0, dot), frac = s.substr(dot + 1);
  long long den = 1;
  for (size_t i = 0; i < frac.size(); ++i) {
    if (den > 900'000'000'000'000'000LL / 10) throw std::overflow_error("Rat::parse: too many digits");
    den *= 10;
  }
  bool neg = !intpart.empty() && intpart[0] == '-';
  long long ip = intpart.empty() || intpart == "-" || intpart == "+" ? 0 : std::stoll(intpart);
  long long fp = frac.empty() ? 0 : std::stoll(frac);
  Rat r = Rat(ip) + (neg ? -Rat(fp, den) : Rat(fp, den));
  return r;
}

inline std::optional<Rat> Rat::approximate(double x, long long max_den, double tol) {
  // Stern-Brocot / continued-fraction walk.
  if (!(x == x) || x > 9.2e18 || x < -9.2e18) return std::nullopt;
  double y = x;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(y);
    if (fl > 9.2e18 || fl < -9.2e18) return std::nullopt;
    long long a = static_cast<long long>(fl);
    long long p2, q2;
    if (__builtin_mul_overflow(a, p1, &p2) || __builtin_add_overflow(p2, p0, &p2)) return std::nullopt;
    if (__builtin_mul_overflow(a, q1, &q2) || __builtin_add_overflow(q2, q0, &q2)) return std::nullopt;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double r = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(r - x) <= tol) return Rat(p1, q1);
    double rem = y - fl;
    if (rem < 1e-15) break;
    y = 1.0 / rem;
  }
  return std::nullopt;
}

}  // namespace temperlab

template <>
struct std::hash<temperlab::Rat> {
  size_t operator()(const temperlab::Rat& r) const { return r.hash(); }
};
