#include "cohertest/rmt.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cohertest {

MpContext MpContext::from_ratio(double c, int b, long n) {
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("aspect ratio c must lie in (0,1)");
  MpContext ctx;
  ctx.c = c;
  ctx.b = b;
  ctx.n = n;
  const double sq = std::sqrt(c);
  ctx.lambda_minus = (1.0 - sq) * (1.0 - sq);
  ctx.lambda_plus = (1.0 + sq) * (1.0 + sq);
  return ctx;
}

MpContext MpContext::from_dims(int m, int b, long n, RatioConvention conv) {
  const double denom = conv == RatioConvention::m_over_b_plus_one
                           ? static_cast<double>(b) + 1.0
                           : static_cast<double>(b);
  return from_ratio(static_cast<double>(m) / denom, b, n);
}

double v_n(int b, long n) {
  if (b % 2 != 0) throw ConfigError("v_n requires an even smoothing span");
  const double bb = static_cast<double>(b);
  const double nn = static_cast<double>(n);
  return bb * (bb + 2.0) / (12.0 * nn * nn);
}

double MpContext::v_n() const { return cohertest::v_n(b, n); }

double mp_density(double c, double lambda) {
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("aspect ratio c must lie in (0,1)");
  const double sq = std::sqrt(c);
  const double lo = (1.0 - sq) * (1.0 - sq);
  const double hi = (1.0 + sq) * (1.0 + sq);
  if (lambda <= lo || lambda >= hi) return 0.0;
  return std::sqrt((hi - lambda) * (lambda - lo)) / (2.0 * std::numbers::pi * c * lambda);
}

double mp_moment(double c, int k) {
  if (k < 0 || k > 12) throw ConfigError("mp_moment supports 0 <= k <= 12");
  if (k == 0) return 1.0;
  auto binom = [](int n, int r) {
    double value = 1.0;
    for (int i = 0; i < r; ++i) value = value * (n - i) / (i + 1);
    return value;
  };
  double sum = 0.0;
  double c_pow = 1.0;
  for (int r = 0; r < k; ++r) {
    sum += c_pow / (r + 1.0) * binom(k, r) * binom(k - 1, r);
    c_pow *= c;
  }
  return sum;
}

namespace {

void check_off_support(double c, cplx z) {
  const double sq = std::sqrt(c);
  const double lo = (1.0 - sq) * (1.0 - sq);
  const double hi = (1.0 + sq) * (1.0 + sq);
  if (z.imag() == 0.0 && z.real() >= lo && z.real() <= hi)
    throw NumericError("Stieltjes transform evaluated on the MP support");
}

cplx zttilde_product(double c, cplx z, cplx t) {
  // z t ttilde = -t / (1 + c t)
  return -t / (1.0 + c * t);
}

}  // namespace

cplx stieltjes_t(double c, cplx z) {
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("aspect ratio c must lie in (0,1)");
  check_off_support(c, z);
  if (std::abs(z) < 1e-300) return cplx(1.0 / (1.0 - c), 0.0);

  // Roots of c z t^2 + (z + c - 1) t + 1 = 0, stable q-form.
  const cplx a = c * z;
  const cplx bq = z + (c - 1.0);
  const cplx disc = std::sqrt(bq * bq - 4.0 * a);
  const cplx s = (std::real(std::conj(bq) * disc) >= 0.0) ? disc : -disc;
  const cplx q = -0.5 * (bq + s);
  const cplx t1 = q / a;
  const cplx t2 = 1.0 / q;

  // Exactly one root satisfies c |z t ttilde|^2 < 1 off the support; that is
  // the Stieltjes branch (it also carries Im t > 0 on C+ and the -1/z tail).
  const double m1 = c * std::norm(zttilde_product(c, z, t1));
  const double m2 = c * std::norm(zttilde_product(c, z, t2));
  return m1 < m2 ? t1 : t2;
}

cplx stieltjes_ttilde(double c, cplx z) {
  const cplx t = stieltjes_t(c, z);
  return -1.0 / (z * (1.0 + c * t));
}

cplx p_of_z(double c, cplx z) {
  const cplx u = zttilde_product(c, z, stieltjes_t(c, z));
  return -c * u * u * u / (1.0 - c * u * u);
}

cplx s_of_z(double c, cplx z) {
  const cplx u = zttilde_product(c, z, stieltjes_t(c, z));
  return std::sqrt(c) * u * u / (1.0 - c * u * u);
}

TestFunction TestFunction::quadratic() {
  return TestFunction(Kind::polynomial, {1.0, -2.0, 1.0}, "quadratic");
}

TestFunction TestFunction::log_function() {
  return TestFunction(Kind::log, {}, "log");
}

TestFunction TestFunction::polynomial(std::vector<double> coeffs, std::string name) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.empty()) coeffs.push_back(0.0);
  if (coeffs.size() > 13) throw ConfigError("polynomial test functions support degree <= 12");
  return TestFunction(Kind::polynomial, std::move(coeffs), std::move(name));
}

int TestFunction::degree() const {
  if (kind_ == Kind::log) return -1;
  return static_cast<int>(coeffs_.size()) - 1;
}

double TestFunction::eval(double lambda) const {
  if (kind_ == Kind::log) {
    if (!(lambda > 0.0)) throw NumericError("log test function needs lambda > 0");
    return std::log(lambda);
  }
  double value = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) value = value * lambda + *it;
  return value;
}

bool TestFunction::has_frobenius_shortcut() const {
  return kind_ == Kind::polynomial && coeffs_.size() == 3 && coeffs_[0] == 1.0 &&
         coeffs_[1] == -2.0 && coeffs_[2] == 1.0;
}

int TestFunction::max_l(double c) const {
  if (kind_ == Kind::polynomial) return std::max(degree() - 1, 0);
  // <D_l, log>^2 contributes c^{l-1} to the variance series; cut the tail
  // below machine precision.
  return static_cast<int>(std::ceil(1.0 - 40.0 / std::log(c))) + 1;
}

namespace {

// Laurent polynomial on exponents [min_exp, min_exp + size - 1].
struct Laurent {
  int min_exp = 0;
  std::vector<double> coef;

  double at(int exponent) const {
    const int idx = exponent - min_exp;
    if (idx < 0 || idx >= static_cast<int>(coef.size())) return 0.0;
    return coef[idx];
  }
};

Laurent multiply(const Laurent& x, const Laurent& y) {
  Laurent out;
  out.min_exp = x.min_exp + y.min_exp;
  out.coef.assign(x.coef.size() + y.coef.size() - 1, 0.0);
  for (size_t i = 0; i < x.coef.size(); ++i)
    for (size_t j = 0; j < y.coef.size(); ++j) out.coef[i + j] += x.coef[i] * y.coef[j];
  return out;
}

Laurent add_scalar(Laurent x, double s) {
  if (x.coef.empty()) return {0, {s}};
  const int idx = -x.min_exp;
  if (idx < 0 || idx >= static_cast<int>(x.coef.size()))
    throw NumericError("Laurent constant term out of range");
  x.coef[idx] += s;
  return x;
}

// f(psi(w)) with psi(w) = (w+1)(w+c)/w = w + (1+c) + c/w, by Horner.
Laurent compose_with_psi(const std::vector<double>& coeffs, double c) {
  const Laurent psi{-1, {c, 1.0 + c, 1.0}};
  Laurent acc{0, {coeffs.back()}};
  for (int j = static_cast<int>(coeffs.size()) - 2; j >= 0; --j)
    acc = add_scalar(multiply(acc, psi), coeffs[j]);
  return acc;
}

}  // namespace

double mp_integral(const TestFunction& f, double c) {
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("aspect ratio c must lie in (0,1)");
  if (f.kind() == TestFunction::Kind::log)
    return (c - 1.0) / c * std::log1p(-c) - 1.0;
  double sum = 0.0;
  const auto& coeffs = f.coeffs();
  for (int k = 0; k < static_cast<int>(coeffs.size()); ++k)
    if (coeffs[k] != 0.0) sum += coeffs[k] * mp_moment(c, k);
  return sum;
}

double d_pairing(const TestFunction& f, double c) {
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("aspect ratio c must lie in (0,1)");
  if (f.kind() == TestFunction::Kind::log) return -c / 2.0;
  // <D, f> = (1/2 pi i) weighted contour integral of f(z) p(z); under
  // z = psi(w) the integrand becomes -c f(psi(w))/w^3 on a negatively
  // oriented contour around [-sqrt(c), sqrt(c)], leaving the residue at 0.
  return c * compose_with_psi(f.coeffs(), c).at(2);
}

double dl_pairing(const TestFunction& f, double c, int l) {
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("aspect ratio c must lie in (0,1)");
  if (l < 1) throw ConfigError("dl_pairing requires l >= 1");
  if (f.kind() == TestFunction::Kind::log)
    return ((l % 2 == 0) ? -1.0 : 1.0) * std::pow(c, 0.5 * (l + 1)) / (l + 1.0);
  if (l >= f.degree()) return 0.0;
  return -std::pow(c, 0.5 * (l + 1)) * compose_with_psi(f.coeffs(), c).at(l + 1);
}

double sigma2(const TestFunction& f, double c) {
  // Expanding the variance kernel 1/(1 - c u_1 u_2)^2 - 1 termwise gives one
  // (l+1) weight per pairing squared.
  const int top = f.max_l(c);
  double sum = 0.0;
  bool any_nonzero = false;
  for (int l = 1; l <= top; ++l) {
    const double pairing = dl_pairing(f, c, l);
    if (pairing != 0.0) any_nonzero = true;
    sum += (l + 1.0) * pairing * pairing;
  }
  if (!any_nonzero)
    throw NumericError("test function has <D_l, f> = 0 for every l >= 1; the statistic is degenerate");
  return sum / (c * c);
}

}  // namespace cohertest
