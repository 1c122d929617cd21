#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace shearinst {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool contains_closed(double y, double slack = 0.0) const { return y >= lo - slack && y <= hi + slack; }
};

enum class DomainKind { Channel, Line };

/// One term A*sin(w*y + phase) of a custom profile.
struct SineTerm {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

class ShearProfile;

struct SineFamily {
  double beta;
};
struct SheetBaseFamily {
  double half_width;
};
struct RescaledFamily {
  std::shared_ptr<const ShearProfile> base;
  double k;
};
/// Polynomial (ascending coefficients) plus a finite sine series; derivatives are exact.
struct CustomFamily {
  std::vector<double> poly;
  std::vector<SineTerm> terms;
};

using ProfileFamily = std::variant<SineFamily, SheetBaseFamily, RescaledFamily, CustomFamily>;

/// Analytic shear-velocity profile U(y) with a single zero at a.
///
/// Profiles are immutable once built. Every family evaluates U and its first
/// three derivatives in closed form. The sheet base profile
/// U0(y) = -sin(pi y / 4) on [-2, 2], +-1 outside, is only C^1 across |y| = 2;
/// its second and third derivatives there are reported one-sided from the
/// inside and `global_smoothness()` returns 1.
class ShearProfile {
 public:
  static ShearProfile sine(double beta);
  static ShearProfile sheet_base(double half_width = 64.0);
  static ShearProfile custom(std::vector<double> poly, std::vector<SineTerm> terms,
                             Interval domain = {}, DomainKind kind = DomainKind::Channel);
  /// U(y) = y on (-1, 1).
  static ShearProfile linear();

  double eval(double y, int order) const;
  double continuous_ratio(double y) const;

  double a() const { return a_; }
  const Interval& domain() const { return domain_; }
  DomainKind kind() const { return kind_; }
  int derivative_order_available() const { return 3; }
  int global_smoothness() const { return smoothness_; }
  double ratio_tolerance() const { return 1e-6 * domain_.length(); }
  const ProfileFamily& family() const { return family_; }
  std::string describe() const;

 private:
  ShearProfile(ProfileFamily family, Interval domain, DomainKind kind, double a, int smoothness)
      : family_(std::move(family)), domain_(domain), kind_(kind), a_(a), smoothness_(smoothness) {}

  double eval_unchecked(double y, int order) const;

  friend ShearProfile rescale_profile(const ShearProfile& base, double k);

  ProfileFamily family_;
  Interval domain_;
  DomainKind kind_;
  double a_;
  int smoothness_;
};

/// U(y) = U0(k y) on (-1, 1); derivatives pick up k^order.
ShearProfile rescale_profile(const ShearProfile& base, double k);

struct AssumptionReport {
  int sign_changes = 0;
  double min_ratio = 0.0;
  double abs_du_at_a = 0.0;
  double u_at_a = 0.0;
  bool pass = false;
};

AssumptionReport check_assumptions(const ShearProfile& profile, int n_samples);

}  // namespace shearinst
