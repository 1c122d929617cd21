#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "shearinst/discretization.hpp"
#include "shearinst/neutral_modes.hpp"
#include "shearinst/profiles.hpp"

namespace shearinst {

class DenseT;

/// Discrete K, T, P and R_{eps,c} around a channel neutral mode.
///
/// With A = S + alpha^2 M, H = S + M (alpha^2 + U''/U) and u = M phi, the
/// operators are K = A^{-1} M, T = A^{-1} (H + u u^T) and R = A^{-1} M diag(W)
/// where W = eps + c (-U''/U) / (U - c). Hence T^{-1} R = (H + u u^T)^{-1} M W
/// and every projected solve reduces to a tridiagonal system with a rank-two
/// correction. H is singular (its kernel is phi), so the correction is taken
/// around H + rho e_j e_j^T at the node j where |phi| peaks.
///
/// projection_weight w replaces u by sqrt(w) u. Roots of the reduced function
/// do not depend on w, but its poles sit near |eps + c lambda| ~ w, so
/// rescaled profiles whose H grows like k^2 need w of the same order.
class RayleighOperators {
 public:
  RayleighOperators(ShearProfile profile, NeutralMode mode, double projection_weight = 1.0);
  ~RayleighOperators();
  RayleighOperators(const RayleighOperators&) = delete;
  RayleighOperators& operator=(const RayleighOperators&) = delete;

  const ShearProfile& profile() const { return profile_; }
  const NeutralMode& mode() const { return mode_; }
  const Grid& grid() const { return mode_.grid; }
  const TridiagonalOperator& K() const { return k_; }
  std::span<const double> potential() const { return potential_; }
  std::span<const double> ratio() const { return ratio_; }
  double projection_weight() const { return weight_; }

  /// W = eps + c (-U''/U) / (U - c) at the nodes.
  CVec coefficient(double eps, cplx c) const;

  /// Solves (H - M diag(shift) + u u^T) x = rhs; shift may be empty (zero).
  CVec solve_shifted(std::span<const cplx> shift, std::span<const cplx> rhs) const;

  /// Dense T = I + K (diag(potential) + P), factorized once on first use.
  const DenseT& dense_T() const;

 private:
  ShearProfile profile_;
  NeutralMode mode_;
  double weight_ = 1.0;
  TridiagonalOperator k_;
  RVec potential_;
  RVec ratio_;
  RVec uvals_;
  RVec u_;
  RVec h_diag_;  // diagonal of H + rho e_j e_j^T
  std::size_t pin_ = 0;
  double rho_ = 0.0;
  std::unique_ptr<LowRankTridiagonalSolver<double>> unshifted_;
  mutable std::once_flag dense_once_;
  mutable std::unique_ptr<DenseT> dense_;
};

/// Dense T with an LU factorization.
class DenseT {
 public:
  explicit DenseT(const RayleighOperators& ops);
  ~DenseT();
  CVec apply(std::span<const cplx> x) const;
  CVec solve(std::span<const cplx> b) const;
  /// Smallest singular value by inverse iteration on T^T T.
  double smallest_singular_value(int iterations = 60) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

CVec apply_P(const RayleighOperators& ops, std::span<const cplx> f);
CVec apply_K(const RayleighOperators& ops, std::span<const cplx> f);
CVec apply_T(const RayleighOperators& ops, std::span<const cplx> x);
CVec apply_R(const RayleighOperators& ops, double eps, cplx c, std::span<const cplx> f);

enum class TSolver { Banded, Dense };

CVec solve_T(const RayleighOperators& ops, std::span<const cplx> b, TSolver solver = TSolver::Banded);

struct ProjectedMethod {
  enum Kind { Direct, Neumann } kind = Direct;
  int max_terms = 200;

  static ProjectedMethod direct() { return {}; }
  static ProjectedMethod neumann(int max_terms = 200) { return {Neumann, max_terms}; }
};

struct NeumannCertificate {
  int terms = 0;
  double contraction_ratio = 0.0;
  std::vector<double> term_norms;
};

struct ProjectedSolution {
  CVec psi;
  NeumannCertificate certificate;
};

/// psi solving T psi = R psi + R phi.
ProjectedSolution solve_projected(const RayleighOperators& ops, double eps, cplx c,
                                  ProjectedMethod method = ProjectedMethod::direct());

/// || T psi - R psi - R phi ||_{L2} / || R phi ||_{L2}.
double projected_residual(const RayleighOperators& ops, double eps, cplx c, std::span<const cplx> psi);

/// Operator norm of R_{eps,c} on H^1_0 (energy norm of A) by power iteration.
double r_norm_probe(const RayleighOperators& ops, double eps, cplx c, int iterations = 40);

}  // namespace shearinst
