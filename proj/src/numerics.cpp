#include "agdesign/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace agdesign::num {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("norm_cdf: input must be finite");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

namespace {

// Wichura's PPND16 rational approximations (algorithm AS 241).
double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return q < 0.0 ? -val : val;
}

}  // namespace

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("norm_quantile: p must lie strictly inside (0,1)");
  double x = ppnd16(p);
  // One Halley step against the CDF sharpens the tail digits.
  const double pdf = norm_pdf(x);
  if (pdf > 1e-280) {
    const double u = (norm_cdf(x) - p) / pdf;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace {

// Series for the lower incomplete gamma, reliable for a < nu + 1.
double lower_gamma_series(double nu, double a) {
  double ap = nu;
  double term = 1.0 / nu;
  double sum = term;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= a / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(-a + nu * std::log(a));
}

// Lentz continued fraction for the upper incomplete gamma, for a >= nu + 1.
double upper_gamma_cf(double nu, double a) {
  constexpr double tiny = 1e-300;
  double b = a + 1.0 - nu;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - nu);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-a + nu * std::log(a));
}

}  // namespace

double inc_gamma_lower(double nu, double a) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw DomainError("inc_gamma_lower: nu must be positive");
  if (!(a >= 0.0) || !std::isfinite(a))
    throw DomainError("inc_gamma_lower: a must be finite and >= 0");
  if (a == 0.0) return 0.0;
  if (a < nu + 1.0) return lower_gamma_series(nu, a);
  return std::tgamma(nu) - upper_gamma_cf(nu, a);
}

double inc_gamma_between(double nu, double a, double b) {
  if (!(b >= 0.0) || !(b <= a))
    throw DomainError("inc_gamma_between: need 0 <= b <= a");
  if (a == b) return 0.0;
  return inc_gamma_lower(nu, a) - inc_gamma_lower(nu, b);
}

namespace {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double integral;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    const double sum = fv1[j] + fv2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
    if (j % 2 == 1) resg += kWg[(j - 1) / 2] * sum;
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  resasc *= std::fabs(half);
  resabs *= std::fabs(half);
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double round_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  err = std::max(err, round_floor);
  return {resk * half, err};
}

struct Segment {
  double a, b, integral, error;
};

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const Quadrature& q, std::span<const double> break_points) {
  if (!(q.abs_tol > 0.0) || !(q.rel_tol > 0.0) || q.max_subdivisions < 1)
    throw DomainError("integrate: tolerances must be positive, max_subdivisions >= 1");
  if (!(lo <= hi)) throw DomainError("integrate: need lo <= hi");
  if (lo == hi) return 0.0;

  std::vector<double> edges;
  edges.push_back(lo);
  for (double bp : break_points)
    if (bp > lo && bp < hi) edges.push_back(bp);
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Segment> segs;
  segs.reserve(static_cast<std::size_t>(q.max_subdivisions) + edges.size());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const auto r = gk15(f, edges[i], edges[i + 1]);
    segs.push_back({edges[i], edges[i + 1], r.integral, r.error});
  }

  for (int n = 0; n < q.max_subdivisions; ++n) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].integral;
      err += segs[i].error;
      if (segs[i].error > segs[worst].error) worst = i;
    }
    if (err <= std::max(q.abs_tol, q.rel_tol * std::fabs(total))) return total;
    Segment s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    if (mid <= s.a || mid >= s.b) break;  // interval at machine resolution
    const auto left = gk15(f, s.a, mid);
    const auto right = gk15(f, mid, s.b);
    segs[worst] = {s.a, mid, left.integral, left.error};
    segs.push_back({mid, s.b, right.integral, right.error});
  }

  double total = 0.0, err = 0.0;
  for (const auto& s : segs) {
    total += s.integral;
    err += s.error;
  }
  if (err <= std::max(q.abs_tol, q.rel_tol * std::fabs(total))) return total;
  throw NumericError("integrate: did not converge within max_subdivisions", total);
}

double invert_monotone(const std::function<double(double)>& f, double target,
                       double lo, double hi) {
  if (!(lo <= hi)) throw DomainError("invert_monotone: need lo <= hi");
  const double flo = f(lo);
  const double fhi = f(hi);
  if (!(target >= flo) || !(target <= fhi))
    throw NumericError("invert_monotone: target outside [f(lo), f(hi)]");
  if (target == flo) return lo;
  if (target == fhi) return hi;
  const double width_tol = 1e-13 * (hi - lo);
  double a = lo, b = hi;
  for (int i = 0; i < 200 && (b - a) > width_tol; ++i) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (f(mid) < target)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace agdesign::num
