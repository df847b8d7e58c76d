#include "stcov/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stcov/quadrature.hpp"

namespace stcov {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

/* Taylor coefficients of 1/Gamma(1+x) around x = 0. */
constexpr double kRG1 = 0.57721566490153286061;
constexpr double kRG3 = -0.042002635034095235529;
constexpr double kRG5 = -0.042197734555544336748;
constexpr double kRG7 = 0.0072189432466630995424;
constexpr double kRG9 = -0.00021524167411495097282;

/* Gamma1(mu) = [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu), the difference
 * quotient Temme's series needs; series form near 0 avoids cancellation. */
double temme_gamma1(double mu) {
  if (std::abs(mu) < 0.05) {
    const double m2 = mu * mu;
    return -(kRG1 + m2 * (kRG3 + m2 * (kRG5 + m2 * (kRG7 + m2 * kRG9))));
  }
  return (1.0 / std::tgamma(1.0 - mu) - 1.0 / std::tgamma(1.0 + mu)) / (2.0 * mu);
}

/* K_mu and (x/2) K_{mu+1} for |mu| <= 1/2, x <= 2: Temme's series.  The
 * caller applies the final 2/x factor, which can exceed double range when x
 * is extremely small. */
void bessel_k_temme(double mu, double x, int max_iter, double& kmu, double& kmu1_halfx) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double x2 = 0.5 * x;
  const double pimu = kPi * mu;
  const double fact = (std::abs(pimu) < 1e-15) ? 1.0 : pimu / std::sin(pimu);
  const double d = -std::log(x2);
  const double e = mu * d;
  const double fact2 = (std::abs(e) < 1e-15) ? 1.0 : std::sinh(e) / e;
  const double gam1 = temme_gamma1(mu);
  const double gampl = 1.0 / std::tgamma(1.0 + mu);
  const double gammi = 1.0 / std::tgamma(1.0 - mu);
  const double gam2 = 0.5 * (gammi + gampl);

  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  const double ee = std::exp(e);
  double p = 0.5 * ee / gampl;
  double q = 0.5 / (ee * gammi);
  double c = 1.0;
  const double x2sq = x2 * x2;
  double sum1 = p;
  int k = 1;
  for (; k <= max_iter; ++k) {
    ff = (k * ff + p + q) / (k * k - mu * mu);
    c *= x2sq / k;
    p /= (k - mu);
    q /= (k + mu);
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - k * ff);
    if (std::abs(del) < std::abs(sum) * eps) break;
  }
  if (k > max_iter) throw std::runtime_error("bessel_k: series did not converge");
  kmu = sum;
  kmu1_halfx = sum1;
}

/* K_mu and K_{mu+1} scaled by e^x, for |mu| <= 1/2, x > 2: Steed's CF2. */
void bessel_k_cf2(double mu, double x, int max_iter, double& kmu_s, double& kmu1_s) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double delh = d;
  double h = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double c = a1, q = a1, a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= max_iter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  if (i > max_iter) throw std::runtime_error("bessel_k: continued fraction did not converge");
  h = a1 * h;
  kmu_s = std::sqrt(kPi / (2.0 * x)) / s;
  kmu1_s = kmu_s * (mu + x + 0.5 - h) / x;
}

/* e^x K_nu(x) as mant * 2^e2, with upward order recurrence rescaled whenever
 * the mantissa grows large so that arbitrarily large orders stay finite. */
struct ScaledBessel {
  double mant;
  long e2;
};

ScaledBessel bessel_k_core(double nu, double x, const EvalConfig& cfg) {
  require(std::isfinite(nu) && std::isfinite(x), "bessel_k: non-finite argument");
  require(x > 0.0, "bessel_k: x must be > 0");
  nu = std::abs(nu);  /* K_nu = K_{-nu} */

  const int nl = static_cast<int>(std::floor(nu + 0.5));
  const double mu = nu - nl; /* in [-1/2, 1/2) */
  const int max_iter = std::max(cfg.max_quad_nodes, 1000);

  double kmu, kmu1;
  if (x <= 2.0) {
    double s1;
    bessel_k_temme(mu, x, max_iter, kmu, s1);
    if (x < 1e-100) {
      /* The order recurrence multiplies by ~2/x per step, which no fixed
       * mantissa rescaling survives at this scale; recur on logarithms
       * instead.  e^x = 1 to double precision here, so ln(e^x K) = ln K. */
      constexpr double ln2 = 0.6931471805599453094;
      double lp = std::log(kmu);
      double lc = std::log(s1) + ln2 - std::log(x);
      for (int k = 0; k < nl; ++k) {
        const double lf = std::log(2.0 * (mu + k + 1)) - std::log(x);
        const double lnext = lf + lc + std::log1p(std::exp(lp - lc - lf));
        lp = lc;
        lc = lnext;
      }
      ScaledBessel out;
      out.e2 = static_cast<long>(std::floor(lp / ln2));
      out.mant = std::exp(lp - out.e2 * ln2);
      return out;
    }
    const double ex = std::exp(x); /* x <= 2: safe */
    kmu = kmu * ex;
    kmu1 = s1 * 2.0 / x * ex;
  } else {
    bessel_k_cf2(mu, x, max_iter, kmu, kmu1);
  }

  ScaledBessel out{kmu, 0};
  double prev = kmu, cur = kmu1;
  for (int k = 0; k < nl; ++k) {
    const double next = prev + (2.0 * (mu + k + 1) / x) * cur;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 0x1p+500) {
      prev = std::ldexp(prev, -500);
      cur = std::ldexp(cur, -500);
      out.e2 += 500;
    }
  }
  /* after nl steps the pair is (K_{mu+nl}, K_{mu+nl+1}); the target order
   * nu = mu + nl is the first element */
  out.mant = prev;
  return out;
}

}  // namespace

double log_gamma(double x) {
  require(std::isfinite(x) && x > 0.0, "log_gamma: requires finite x > 0");
  return std::lgamma(x);
}

double log_bessel_k(double nu, double x, const EvalConfig& cfg) {
  const ScaledBessel s = bessel_k_core(nu, x, cfg);
  return std::log(s.mant) + s.e2 * 0.6931471805599453094 - x;
}

double bessel_k(double nu, double x, const EvalConfig& cfg) {
  const double v = std::exp(log_bessel_k(nu, x, cfg));
  if (!std::isfinite(v))
    throw std::overflow_error("bessel_k: overflow; use log_bessel_k");
  return v;
}

double bessel_k_scaled(double nu, double x, const EvalConfig& cfg) {
  const ScaledBessel s = bessel_k_core(nu, x, cfg);
  const double v = std::ldexp(s.mant, static_cast<int>(std::min<long>(s.e2, 3000)));
  if (!std::isfinite(v))
    throw std::overflow_error("bessel_k_scaled: overflow; use log_bessel_k");
  return v;
}

double tricomi_u(double a, double b, double x, const EvalConfig& cfg) {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(x),
          "tricomi_u: non-finite argument");
  require(a > 0.0, "tricomi_u: a must be > 0");
  require(x >= 0.0, "tricomi_u: x must be >= 0");
  if (x == 0.0) {
    require(b < 1.0, "tricomi_u: x = 0 requires b < 1");
    return std::exp(std::lgamma(1.0 - b) - std::lgamma(1.0 + a - b));
  }

  /* After t = e^s - 1 the integrand is
   *   exp((a-1) ln(e^s - 1) + (b-a) s - x (e^s - 1)),   s in (0, S),
   * truncated where x(e^S - 1) = 800 (tail < e^-800 relative). */
  const double T = 800.0 / x;
  const double S = std::min(700.0, std::log1p(T));

  QuadSpec qs;
  qs.rel_tol = cfg.rel_tol;
  qs.abs_tol = 1e-300;
  qs.max_subdivisions = std::max(8, cfg.max_quad_nodes / 30);

  QuadResult r;
  if (a < 1.0) {
    /* Neutralize the t^(a-1) endpoint singularity with w = s^a; the
     * transformed integrand tends to 1/a at w = 0. */
    const double inv_a = 1.0 / a;
    auto g = [&](double w) {
      const double s = std::pow(w, inv_a);
      if (!(s > 0.0) || s >= S) return 0.0;
      const double t = std::expm1(s);
      const double lr = std::log1p(t / s - 1.0); /* ln((e^s-1)/s) */
      return inv_a * std::exp((a - 1.0) * lr + (b - a) * s - x * t);
    };
    r = integrate(g, 0.0, std::pow(S, a), qs);
  } else {
    auto g = [&](double s) {
      const double t = std::expm1(s);
      const double lt = std::log(t);
      const double expo = (a - 1.0) * lt + (b - a) * s - x * t;
      return (expo < -745.0) ? 0.0 : std::exp(expo);
    };
    /* Interior peak at t solving x t^2 + (x+2-b) t = a-1; split there so the
     * subdivision queue starts on both flanks. */
    const double B = x + 2.0 - b;
    double s_split = 0.0;
    if (a > 1.0 && B > 0.0) {
      const double tp = 2.0 * (a - 1.0) / (B + std::sqrt(B * B + 4.0 * x * (a - 1.0)));
      s_split = std::log1p(tp);
    }
    if (s_split > 0.0 && s_split < 0.99 * S) {
      QuadSpec half = qs;
      half.max_subdivisions = qs.max_subdivisions / 2;
      const QuadResult r1 = integrate(g, 0.0, s_split, half);
      const QuadResult r2 = integrate(g, s_split, S, half);
      r.value = r1.value + r2.value;
      r.err_est = r1.err_est + r2.err_est;
      r.n_subdivisions = r1.n_subdivisions + r2.n_subdivisions;
      r.converged = r1.converged && r2.converged;
    } else {
      r = integrate(g, 0.0, S, qs);
    }
  }
  if (!r.converged)
    throw std::runtime_error("tricomi_u: quadrature did not converge within budget");
  /* I known positive; divide by Gamma(a) in log space to dodge overflow. */
  return std::exp(std::log(r.value) - std::lgamma(a));
}

}  // namespace stcov
