#pragma once

#include <string>
#include <vector>

#include "cohertest/types.hpp"

namespace cohertest {

// How the finite-sample aspect ratio entering the Marchenko-Pastur
// recentering is formed from (M, B). The smoothed periodogram averages B+1
// rank-one terms, so the matched Wishart matrix has B+1 columns and the
// unbiased choice is M/(B+1); M/B is the literal limit parametrization and is
// kept selectable. The difference shifts the mean of the recentered LSS by
// O(1), so the default matters.
enum class RatioConvention { m_over_b_plus_one, m_over_b };

struct MpContext {
  double c = 0.0;  // aspect ratio in (0,1)
  int b = 0;       // smoothing span
  long n = 0;      // sample count
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;

  static MpContext from_ratio(double c, int b, long n);
  static MpContext from_dims(int m, int b, long n,
                             RatioConvention conv = RatioConvention::m_over_b_plus_one);

  // Window second moment (1/(B+1)) sum (b'/N)^2 = B(B+2)/(12 N^2).
  double v_n() const;
};

double v_n(int b, long n);

// Marchenko-Pastur density with parameter c at lambda.
double mp_density(double c, double lambda);

// k-th moment of the MP distribution via the Narayana expansion,
// sum_{r=0}^{k-1} c^r/(r+1) C(k,r) C(k-1,r). Supported for k <= 12.
double mp_moment(double c, int k);

// Stieltjes transform t(z) of MP(c): the root of
// c z t^2 + (z + c - 1) t + 1 = 0 on the branch with Im t > 0 for Im z > 0
// and t ~ -1/z at infinity. z must lie off the support.
cplx stieltjes_t(double c, cplx z);

// Companion transform ttilde(z) = -1/(z(1 + c t(z))), the Stieltjes transform
// of c mu_MP + (1-c) delta_0.
cplx stieltjes_ttilde(double c, cplx z);

// Stieltjes transform of the recentering distribution D:
// p(z) = -c u^3 / (1 - c u^2) with u = z t(z) ttilde(z).
cplx p_of_z(double c, cplx z);

// s(z) = sqrt(c) u^2 / (1 - c u^2); s(z) (sqrt(c) u)^l is the Stieltjes
// transform of the distribution D_l.
cplx s_of_z(double c, cplx z);

class TestFunction {
 public:
  enum class Kind { polynomial, log };

  // f(lambda) = (lambda - 1)^2, the default test function.
  static TestFunction quadratic();
  // f(lambda) = log(lambda).
  static TestFunction log_function();
  // f(lambda) = sum_j coeffs[j] lambda^j.
  static TestFunction polynomial(std::vector<double> coeffs, std::string name = "poly");

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int degree() const;  // polynomial degree; -1 for log
  const std::vector<double>& coeffs() const { return coeffs_; }

  double eval(double lambda) const;

  // The quadratic admits the Frobenius shortcut (1/M)||C||_F^2 - 1.
  bool has_frobenius_shortcut() const;

  // Largest l with a possibly nonzero <D_l, f>; for log this is a truncation
  // rule for the geometric tail at aspect ratio c.
  int max_l(double c) const;

 private:
  TestFunction(Kind kind, std::vector<double> coeffs, std::string name)
      : kind_(kind), coeffs_(std::move(coeffs)), name_(std::move(name)) {}
  Kind kind_;
  std::vector<double> coeffs_;
  std::string name_;
};

// integral of f against MP(c). Polynomials via mp_moment; log in closed form
// (c-1)/c log(1-c) - 1.
double mp_integral(const TestFunction& f, double c);

// <D, f>. Polynomials by the residue at w = 0 under z = psi(w) = (w+1)(w+c)/w:
// c times the coefficient of w^2 in f(psi(w)). log gives exactly -c/2.
double d_pairing(const TestFunction& f, double c);

// <D_l, f> for l >= 1: -c^{(l+1)/2} times the coefficient of w^{l+1} in
// f(psi(w)); zero for polynomial f when l >= degree. log in closed form
// (-1)^{l+1} c^{(l+1)/2} / (l+1).
double dl_pairing(const TestFunction& f, double c, int l);

// Asymptotic variance of B theta: (1/c^2) sum_{l>=1} (l+1) <D_l,f>^2.
// Throws NumericError when every pairing vanishes (the statistic would be
// degenerate, e.g. f constant or f linear).
double sigma2(const TestFunction& f, double c);

}  // namespace cohertest
