#include "shearinst/profiles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "shearinst/error.hpp"

namespace shearinst {
namespace {

constexpr double kPi = std::numbers::pi;

// d^order/dy^order of sin(w y + phase)
double sine_derivative(double w, double phase, double y, int order) {
  return std::pow(w, order) * std::sin(w * y + phase + order * kPi / 2.0);
}

double poly_derivative(const std::vector<double>& c, double y, int order) {
  double result = 0.0;
  for (std::size_t j = c.size(); j-- > static_cast<std::size_t>(order);) {
    double falling = 1.0;
    for (int m = 0; m < order; ++m) falling *= static_cast<double>(j - m);
    result = result * y + c[j] * falling;
  }
  return result;
}

double find_zero(const ShearProfile& p, const Interval& d) {
  const int samples = 4096;
  double prev_y = d.lo;
  double prev_u = p.eval(prev_y, 0);
  for (int i = 1; i <= samples; ++i) {
    const double y = d.lo + d.length() * i / samples;
    const double u = p.eval(y, 0);
    if (prev_u == 0.0 && i > 1) return prev_y;
    if ((prev_u < 0.0 && u > 0.0) || (prev_u > 0.0 && u < 0.0)) {
      double lo = prev_y, hi = y, ulo = prev_u;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double um = p.eval(mid, 0);
        if (um == 0.0) return mid;
        if ((um < 0.0) == (ulo < 0.0)) {
          lo = mid;
          ulo = um;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev_y = y;
    prev_u = u;
  }
  fail(ErrorCode::InvalidArgument, "custom profile has no zero in its domain");
}

}  // namespace

ShearProfile ShearProfile::sine(double beta) {
  require(beta > 0.0, ErrorCode::InvalidArgument, "sine profile needs beta > 0");
  return ShearProfile(SineFamily{beta}, Interval{-1.0, 1.0}, DomainKind::Channel, 0.0, 3);
}

ShearProfile ShearProfile::sheet_base(double half_width) {
  require(half_width > 2.0, ErrorCode::InvalidArgument, "sheet base profile needs half width > 2");
  return ShearProfile(SheetBaseFamily{half_width}, Interval{-half_width, half_width}, DomainKind::Line,
                      0.0, 1);
}

ShearProfile ShearProfile::custom(std::vector<double> poly, std::vector<SineTerm> terms, Interval domain,
                                  DomainKind kind) {
  require(domain.hi > domain.lo, ErrorCode::InvalidArgument, "empty custom domain");
  ShearProfile p(CustomFamily{std::move(poly), std::move(terms)}, domain, kind, 0.0, 3);
  p.a_ = find_zero(p, domain);
  return p;
}

ShearProfile ShearProfile::linear() { return custom({0.0, 1.0}, {}); }

double ShearProfile::eval(double y, int order) const {
  if (order < 0 || order > derivative_order_available())
    fail(ErrorCode::UnsupportedOrder, "derivative order " + std::to_string(order));
  if (!domain_.contains_closed(y, 1e-12 * domain_.length()))
    fail(ErrorCode::OutOfDomain, "y = " + std::to_string(y) + " outside " + describe());
  return eval_unchecked(y, order);
}

double ShearProfile::eval_unchecked(double y, int order) const {
  struct Visitor {
    double y;
    int order;
    double operator()(const SineFamily& s) const { return -sine_derivative(s.beta, 0.0, y, order); }
    double operator()(const SheetBaseFamily&) const {
      if (y < -2.0) return order == 0 ? 1.0 : 0.0;
      if (y > 2.0) return order == 0 ? -1.0 : 0.0;
      return -sine_derivative(kPi / 4.0, 0.0, y, order);
    }
    double operator()(const RescaledFamily& r) const {
      return std::pow(r.k, order) * r.base->eval_unchecked(r.k * y, order);
    }
    double operator()(const CustomFamily& c) const {
      double v = poly_derivative(c.poly, y, order);
      for (const auto& t : c.terms) v += t.amplitude * sine_derivative(t.frequency, t.phase, y, order);
      return v;
    }
  };
  return std::visit(Visitor{y, order}, family_);
}

double ShearProfile::continuous_ratio(double y) const {
  if (!domain_.contains_closed(y, 1e-12 * domain_.length()))
    fail(ErrorCode::OutOfDomain, "y = " + std::to_string(y) + " outside " + describe());
  if (std::abs(y - a_) <= ratio_tolerance()) {
    const double du = eval_unchecked(a_, 1);
    require(du != 0.0, ErrorCode::RatioUndefined, "U'(a) = 0");
    return -eval_unchecked(a_, 3) / du;
  }
  return -eval_unchecked(y, 2) / eval_unchecked(y, 0);
}

std::string ShearProfile::describe() const {
  std::ostringstream os;
  struct Visitor {
    std::ostringstream& os;
    void operator()(const SineFamily& s) const { os << "sine(beta=" << s.beta << ")"; }
    void operator()(const SheetBaseFamily& s) const { os << "sheet(half_width=" << s.half_width << ")"; }
    void operator()(const RescaledFamily& r) const { os << "rescaled(" << r.base->describe() << ", k=" << r.k << ")"; }
    void operator()(const CustomFamily& c) const {
      os << "custom(poly=" << c.poly.size() << ", terms=" << c.terms.size() << ")";
    }
  };
  std::visit(Visitor{os}, family_);
  return os.str();
}

ShearProfile rescale_profile(const ShearProfile& base, double k) {
  require(base.kind() == DomainKind::Line, ErrorCode::InvalidArgument, "rescaling needs a line-domain base profile");
  require(k >= 1.0, ErrorCode::InvalidArgument, "rescaling needs k >= 1");
  auto shared = std::make_shared<const ShearProfile>(base);
  return ShearProfile(RescaledFamily{shared, k}, Interval{-1.0, 1.0}, DomainKind::Channel, base.a() / k,
                      base.global_smoothness());
}

AssumptionReport check_assumptions(const ShearProfile& profile, int n_samples) {
  require(n_samples >= 64, ErrorCode::InvalidArgument, "check_assumptions needs at least 64 samples");
  AssumptionReport r;
  const Interval& d = profile.domain();
  r.min_ratio = INFINITY;
  int last_sign = 0;
  for (int j = 0; j < n_samples; ++j) {
    const double y = d.lo + d.length() * (j + 0.5) / n_samples;
    const double u = profile.eval(y, 0);
    const int s = (u > 0.0) - (u < 0.0);
    if (s != 0) {
      if (last_sign != 0 && s != last_sign) ++r.sign_changes;
      last_sign = s;
    }
    r.min_ratio = std::min(r.min_ratio, profile.continuous_ratio(y));
  }
  r.min_ratio = std::min(r.min_ratio, profile.continuous_ratio(profile.a()));
  r.abs_du_at_a = std::abs(profile.eval(profile.a(), 1));
  r.u_at_a = profile.eval(profile.a(), 0);
  r.pass = r.sign_changes == 1 && r.min_ratio >= -1e-12 && r.abs_du_at_a > 0.0 &&
           std::abs(r.u_at_a) <= 1e-12;
  return r;
}

}  // namespace shearinst
