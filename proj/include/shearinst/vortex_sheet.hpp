#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "shearinst/dispersion.hpp"

namespace shearinst {

/// Inner and outer cutoffs with quintic smoothstep transitions.
/// chi_out rises 0 -> 1 over out_lo/k <= |y| <= out_hi/k; chi_in falls
/// 1 -> 0 over in_lo/k <= |y| <= L/k.
struct CutoffPair {
  double k = 1.0;
  double L = 32.0;
  double out_lo = 2.0;
  double out_hi = 3.5;
  double in_lo = 5.0;

  double chi_in(double y, int order = 0) const;
  double chi_out(double y, int order = 0) const;
};

CutoffPair build_cutoffs(double k, double L, double out_hi = 3.5);

/// (1 / 2 alpha0) int exp(-alpha0 |xi - eta|) F(eta) d eta on a uniform grid, O(n).
CVec inner_helmholtz(double alpha0, const Grid& xi_grid, std::span<const cplx> F);

struct InnerNeutral {
  double alpha0 = 0.0;
  double alpha0_sq = 0.0;
  NeutralMode phi0;
  LineLimit limit;
};

/// Line bound state for the base profile on (-A, A), H1-unit, with the
/// width-extrapolated eigenvalue.
InnerNeutral solve_inner_neutral(const ShearProfile& base, double half_width, int q = 128);

/// sqrt(L / k) ||f'|| + sqrt(k L) ||f||.
double z_norm(std::span<const cplx> f, const Grid& grid, double k, double L);

struct GluedSolution {
  double k = 0.0;
  double L = 0.0;
  double eps = 0.0;
  cplx c;
  /// delta = eps / k^2 - (alpha~^2 / k^2 - alpha0^2) with the line limit alpha0.
  double delta = 0.0;
  /// Same with the inner-region discrete eigenvalue; this one drives the solve.
  double delta_h = 0.0;
  cplx G;
  CVec Psi;      // inner nodes
  RVec Phi0;     // inner nodes, H1 unit in xi
  CVec phi_out;  // all channel nodes
  CVec phi;      // assembled field on the channel nodes
  double psi_h1 = 0.0;
  double phiout_z = 0.0;
  double assembled_residual = 0.0;
  int iterations = 0;
  double contraction = 0.0;
  int winding = 0;
};

/// Block operators of the glued problem for one (k, L, eps) on a channel grid.
///
/// The inner problem lives on the channel nodes with |k y| < Xi_eff, where
/// Xi_eff = min(max(2 L, 8 / alpha0), k); Phi0 is the discrete ground state
/// there. Couplings are the discrete commutators [S, chi], so the assembled
/// phi = chi_out phi_out + chi_in (Phi0 + Psi) solves the discrete channel
/// equation whenever the block system and G = 0 hold.
class GluedSystem {
 public:
  GluedSystem(const ShearProfile& rescaled, const NeutralMode& channel_mode, double k, double L, double eps,
              double alpha0_line, CutoffPair cutoffs);
  ~GluedSystem();

  double k() const { return k_; }
  double L() const { return L_; }
  double eps() const { return eps_; }
  double xi_eff() const { return xi_eff_; }
  const CutoffPair& cutoffs() const { return cut_; }
  const RayleighOperators& inner_ops() const { return *inner_; }
  double delta() const { return delta_; }
  double delta_h() const { return delta_h_; }

  GluedSolution solve(cplx c, int max_iterations = 200) const;
  cplx G(cplx c) const { return solve(c).G; }

  /// Operator norms of B : Z -> H1 and C : H1 -> Z by power iteration.
  double probe_B(int iterations = 60) const;
  double probe_C(int iterations = 60) const;

 private:
  CVec commutator(const RVec& chi, std::span<const cplx> x) const;
  CVec extend(std::span<const cplx> inner) const;
  CVec restrict_inner(std::span<const cplx> full) const;
  double h1_xi(std::span<const cplx> inner) const;

  ShearProfile profile_;
  Grid grid_;
  double k_, L_, eps_, alpha_sq_;
  double xi_eff_ = 0.0;
  double delta_ = 0.0, delta_h_ = 0.0;
  CutoffPair cut_;
  int first_ = 0, count_ = 0;
  RVec chi_in_, chi_out_;
  TridiagonalOperator stiff_;
  std::unique_ptr<TridiagonalLU<double>> outer_;
  std::unique_ptr<RayleighOperators> inner_;
  RVec phi0_;
};

/// Secant root of G_sheet from -delta / lambda0 with a winding certificate
/// on the disk of radius delta / (2 |lambda0|).
GluedSolution solve_sheet_reduced(const GluedSystem& system, cplx lambda0, int winding_samples = 128);

/// Uniform channel grid whose spacing in xi = k y is 4 / (2q + 1) for every k,
/// the line_grid lattice, so the kinks at xi = +-2 fall on cell midpoints.
/// The discrete problems for growing k are nested boxes of one lattice and
/// alpha~/k increases with k by eigenvalue interlacing. k must be even.
Grid sheet_grid(double k, int q);

struct SheetScanOptions {
  int q = 400;
  int tau_decades = 4;
  double line_half_width = 32.0;
  bool parallel = false;
};

struct SheetScanRow {
  double k = 0.0;
  double alpha_tilde = 0.0;
  double alpha_ratio = 0.0;
  double eps = 0.0;
  double im_c_channel = 0.0;
  double im_c_glued = 0.0;
  double growth_rate = 0.0;
  double psi_h1 = 0.0;
  double phiout_z = 0.0;
  double residual = 0.0;
  double delta = 0.0;
  double abs_c = 0.0;
  /// (psi_h1 + phiout_z) / (eps/k^2 + |alpha~^2/k^2 - alpha0^2| + |c| + L^{-1/2}).
  double estimate_constant = 0.0;
  std::string failure;
};

struct SheetScan {
  double L = 0.0;
  double xi = 0.0;
  double alpha0 = 0.0;
  cplx lambda0;
  std::vector<SheetScanRow> rows;
};

SheetScan scaling_scan(std::span<const double> k_list, double eps_hat, double L, const SheetScanOptions& options = {});

struct CouplingRow {
  double L;
  double norm_B;
  double norm_C;
};

struct CouplingScan {
  double k = 0.0;
  std::vector<CouplingRow> rows;
  double slope_B = 0.0;
  double slope_C = 0.0;
};

/// Probe norms of B and C across L at fixed k (eps = 0, c = 0).
CouplingScan coupling_scan(double k, std::span<const double> L_list, const SheetScanOptions& options = {});

}  // namespace shearinst
