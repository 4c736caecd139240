#include "csbm/theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "csbm/errors.hpp"
#include "csbm/ridge.hpp"

namespace csbm {

namespace {

constexpr double kExpLimit = 700.0;

double guarded_exp(double x, bool* clamped) {
  if (x > kExpLimit || x < -kExpLimit) {
    if (clamped) *clamped = true;
    x = std::clamp(x, -kExpLimit, kExpLimit);
  }
  return std::exp(x);
}

double g_value(double t, double a, double b, double c, double zeta, double s, bool* clamped) {
  const double D = a + b + 2.0 * s;
  if (!(D > 0.0)) throw ParameterError("rate_g: a_tau + b_tau + 2s must be positive");
  const double rc = std::sqrt(c);
  const double g1 = -2.0 * t * s * zeta * rc / D - 2.0 * t * t * s * s * zeta * zeta / (D * D);
  const double u = 2.0 * t * zeta * rc / D;
  const double g2 = -0.5 * a * (guarded_exp(u, clamped) - 1.0) - 0.5 * b * (guarded_exp(-u, clamped) - 1.0);
  return g1 + g2;
}

double I_t_value(double t, double a, double b, double c, bool* clamped) {
  if (!(a > 0.0 && b > 0.0)) throw ParameterError("rate_I_t: a_tau and b_tau must be positive");
  const double l = std::log(a / b);
  const double pa = guarded_exp(t * l, clamped);
  const double pb = guarded_exp(-t * l, clamped);
  return 0.5 * (a - a * pa + b - b * pb) - 2.0 * c * (t + t * t);
}

}  // namespace

double rate_I(double a_tau, double b_tau, double c_tau) {
  if (a_tau < 0.0 || b_tau < 0.0) throw ParameterError("rate_I: a_tau, b_tau must be nonnegative");
  const double diff = std::sqrt(a_tau) - std::sqrt(b_tau);
  return 0.5 * (diff * diff + c_tau);
}

double rate_I_t(double t, double a_tau, double b_tau, double c_tau) {
  return I_t_value(t, a_tau, b_tau, c_tau, nullptr);
}

double rate_g(double t, double a_tau, double b_tau, double c_tau, double zeta, double s) {
  return g_value(t, a_tau, b_tau, c_tau, zeta, s, nullptr);
}

SupResult sup_1d(const std::function<double(double)>& f, double lo, double hi, double max_abs) {
  constexpr int kGrid = 64;
  for (;;) {
    double best_t = lo;
    double best_v = -INFINITY;
    int best_k = 0;
    const double step = (hi - lo) / (kGrid - 1);
    for (int k = 0; k < kGrid; ++k) {
      const double t = lo + k * step;
      const double v = f(t);
      if (v > best_v) {
        best_v = v;
        best_t = t;
        best_k = k;
      }
    }
    const bool at_lo = best_k == 0;
    const bool at_hi = best_k == kGrid - 1;
    if (at_lo || at_hi) {
      if ((at_lo && lo <= -max_abs) || (at_hi && hi >= max_abs)) {
        std::ostringstream os;
        os << "sup_1d: maximizer not bracketed within |t| <= " << max_abs;
        throw NumericError(os.str());
      }
      const double width = hi - lo;
      if (at_lo) lo = std::max(-max_abs, lo - width);
      if (at_hi) hi = std::min(max_abs, hi + width);
      continue;
    }
    // Golden-section search on the two grid cells around the best point.
    double x0 = best_t - step;
    double x1 = best_t + step;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = x1 - inv_phi * (x1 - x0);
    double d = x0 + inv_phi * (x1 - x0);
    double fc = f(c);
    double fd = f(d);
    while (x1 - x0 > 1e-10) {
      if (fc > fd) {
        x1 = d;
        d = c;
        fd = fc;
        c = x1 - inv_phi * (x1 - x0);
        fc = f(c);
      } else {
        x0 = c;
        c = d;
        fc = fd;
        d = x0 + inv_phi * (x1 - x0);
        fd = f(d);
      }
    }
    SupResult r;
    const double mid = 0.5 * (x0 + x1);
    const double fm = f(mid);
    if (fm >= best_v) {
      r.argmax = mid;
      r.value = fm;
    } else {
      r.argmax = best_t;
      r.value = best_v;
    }
    return r;
  }
}

SupResult sup_rate_I_t(double a_tau, double b_tau, double c_tau) {
  bool clamped = false;
  SupResult r = sup_1d([&](double t) { return I_t_value(t, a_tau, b_tau, c_tau, &clamped); });
  r.clamped = clamped;
  return r;
}

SupResult sup_rate_g(double a_tau, double b_tau, double c_tau, double zeta, double s) {
  bool clamped = false;
  SupResult r =
      sup_1d([&](double t) { return g_value(t, a_tau, b_tau, c_tau, zeta, s, &clamped); });
  r.clamped = clamped;
  return r;
}

double rate_J(double a_tau, double b_tau, double c_tau, double zeta, double s) {
  return sup_rate_g(a_tau, b_tau, c_tau, zeta, s).value;
}

std::pair<double, double> boundary_solve(double other, double c_tau, double target_I) {
  if (other < 0.0) throw ParameterError("boundary_solve: fixed rate must be nonnegative");
  const double slack = 2.0 * target_I - c_tau;
  if (slack < 0.0) {
    std::ostringstream os;
    os << "boundary_solve: no real root (target " << target_I << " < c_tau/2 = " << c_tau / 2 << ")";
    throw ParameterError(os.str());
  }
  const double r = std::sqrt(other);
  const double w = std::sqrt(slack);
  return {(r + w) * (r + w), (r - w) * (r - w)};
}

double unsupervised_c0(double theta, double q_m, int d, int m) {
  if (!(q_m > 0.0) || m <= 0) throw ParameterError("unsupervised_c0: q_m and m must be positive");
  const double t2 = theta * theta;
  if (t2 == 0.0) return 0.0;
  return t2 * t2 / (q_m * (t2 + static_cast<double>(d) / m));
}

TheoryPoint theory_point(const ModelParams& p, double lambda, const std::vector<double>& s_values) {
  TheoryPoint tp;
  tp.a_tau = p.a_tau;
  tp.b_tau = p.b_tau;
  tp.c_tau = p.c_tau();
  tp.I = rate_I(p.a_tau, p.b_tau, p.c_tau());
  tp.I_unsup = rate_I(p.spec.a, p.spec.b, unsupervised_c0(p.theta, p.q_m, p.d(), p.m));
  if (p.a_tau != p.b_tau) tp.s_opt = optimal_s(p.a_tau, p.b_tau, p.c_tau());
  const KappaZeta kz = kappa_zeta(p.a_tau, p.b_tau, p.c_tau(), tp.s_opt.value_or(0.0), p.tau(), lambda);
  tp.kappa = kz.kappa;
  tp.zeta = kz.zeta;
  tp.risk_limit = asymptotic_risk(kz.kappa, p.tau(), lambda);
  if (kz.zeta != 0.0) {
    for (double s : s_values) {
      if (p.a_tau + p.b_tau + 2.0 * s > 0.0) tp.J_at[s] = rate_J(p.a_tau, p.b_tau, p.c_tau(), kz.zeta, s);
    }
  }
  return tp;
}

}  // namespace csbm
