#pragma once

#include <vector>

#include "shearinst/discretization.hpp"
#include "shearinst/profiles.hpp"

namespace shearinst {

enum class Normalization { L2Unit, H1Unit };

/// Ground state of -phi'' + (U''/U) phi = -alpha^2 phi with Dirichlet ends.
struct NeutralMode {
  double alpha_sq = 0.0;
  RVec phi;
  Grid grid;
  double residual = 0.0;
  Normalization normalization = Normalization::L2Unit;

  double alpha() const;
  /// Value at y by the natural spline through the nodes.
  double value_at(double y) const;
};

/// Potential U''/U at the nodes, with the continuous extension at the zero.
RVec neutral_potential(const ShearProfile& profile, const Grid& grid);

/// Maximal eigenvalue and L2-unit ground state on (-1, 1).
NeutralMode solve_neutral(const ShearProfile& profile, const Grid& grid);

/// int |phi'|^2 + int (U''/U) |phi|^2, divided by ||phi||^2.
double rayleigh_quotient(std::span<const double> phi, const ShearProfile& profile, const Grid& grid);

/// Uniform grid on (-A, A) with spacing 4 / (2q + 1). For even integer A the
/// seams at |y| = 2 of the sheet profile fall on cell midpoints.
Grid line_grid(double half_width, int q);

/// Bound state of the line problem truncated to (-A, A), H1-unit.
NeutralMode solve_truncated_line(const ShearProfile& profile, double half_width, const Grid& grid);

struct LineLimitRow {
  double half_width;
  double beta_sq;
};

struct LineLimit {
  double alpha0_sq = 0.0;
  double alpha0 = 0.0;
  std::vector<LineLimitRow> table;
  bool monotone = false;
};

LineLimit line_eigenvalue_limit(const ShearProfile& profile, std::span<const double> widths, int q = 128);

}  // namespace shearinst
