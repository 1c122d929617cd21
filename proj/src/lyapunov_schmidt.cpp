#include "shearinst/lyapunov_schmidt.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "shearinst/error.hpp"

namespace shearinst {
namespace {

CVec weighted(std::span<const double> mass, std::span<const cplx> w, std::span<const cplx> x) {
  CVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = mass[i] * (w.empty() ? 1.0 : w[i]) * x[i];
  return out;
}

// (S + M q) x without the M^{-1}
CVec band_apply(const TridiagonalOperator& op, std::span<const cplx> x) {
  CVec y = op.apply(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= op.mass[i];
  return y;
}

double l2(std::span<const cplx> x, const Grid& g) { return norm(x, g, NormKind::L2); }

}  // namespace

RayleighOperators::RayleighOperators(ShearProfile profile, NeutralMode mode, double projection_weight)
    : profile_(std::move(profile)), mode_(std::move(mode)), weight_(projection_weight) {
  require(weight_ > 0.0, ErrorCode::InvalidArgument, "projection weight must be positive");
  require(mode_.normalization == Normalization::L2Unit, ErrorCode::InvalidArgument,
          "projection needs an L2-unit neutral mode");
  const Grid& g = mode_.grid;
  const std::size_t n = mode_.phi.size();
  k_ = helmholtz_operator(g, mode_.alpha_sq);
  potential_ = neutral_potential(profile_, g);
  ratio_.resize(n);
  for (std::size_t i = 0; i < n; ++i) ratio_[i] = -potential_[i];
  uvals_ = g.sample([&](double y) { return profile_.eval(y, 0); });
  u_.resize(n);
  h_diag_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    u_[i] = std::sqrt(weight_) * k_.mass[i] * mode_.phi[i];
    h_diag_[i] = k_.diag[i] + k_.mass[i] * potential_[i];
    if (std::abs(mode_.phi[i]) > std::abs(mode_.phi[pin_])) pin_ = i;
  }
  rho_ = 1.0 / (mode_.phi[pin_] * mode_.phi[pin_]);
  h_diag_[pin_] += rho_;
  RVec pin_col(n, 0.0);
  pin_col[pin_] = 1.0;
  unshifted_ = std::make_unique<LowRankTridiagonalSolver<double>>(
      k_.off, h_diag_, k_.off, std::vector<RVec>{u_, pin_col}, RVec{1.0, -rho_}, std::vector<RVec>{u_, pin_col});
}

RayleighOperators::~RayleighOperators() = default;

CVec RayleighOperators::coefficient(double eps, cplx c) const {
  CVec w(ratio_.size(), cplx(eps));
  if (c == cplx(0.0)) return w;
  if (c.imag() == 0.0) fail(ErrorCode::DivergentCoefficient, "real nonzero c puts a pole on the grid");
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += c * ratio_[i] / (uvals_[i] - c);
  return w;
}

CVec RayleighOperators::solve_shifted(std::span<const cplx> shift, std::span<const cplx> rhs) const {
  require(grid().conforms(rhs.size()), ErrorCode::ShapeMismatch, "projected rhs size");
  if (shift.empty()) return unshifted_->solve<cplx>(rhs);
  require(grid().conforms(shift.size()), ErrorCode::ShapeMismatch, "shift size");
  const std::size_t n = rhs.size();
  CVec diag(n), off(k_.off.begin(), k_.off.end());
  for (std::size_t i = 0; i < n; ++i) diag[i] = h_diag_[i] - k_.mass[i] * shift[i];
  CVec uc(u_.begin(), u_.end()), pin(n, 0.0);
  pin[pin_] = 1.0;
  LowRankTridiagonalSolver<cplx> solver(off, diag, off, {uc, pin}, {cplx(1.0), cplx(-rho_)}, {uc, pin});
  return solver.solve<cplx>(rhs);
}

struct DenseT::Impl {
  Eigen::MatrixXd t;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

DenseT::DenseT(const RayleighOperators& ops) : impl_(std::make_unique<Impl>()) {
  const std::size_t n = ops.mode().phi.size();
  const auto& k = ops.K();
  const TridiagonalLU<double> a(k.off, k.diag, k.off);
  const auto pot = ops.potential();
  const auto& phi = ops.mode().phi;
  impl_->t.resize(n, n);
  RVec col(n);
  for (std::size_t j = 0; j < n; ++j) {
    // (H + u u^T) e_j = A e_j + M V e_j + u u_j
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = k.mass[j] * pot[j];
    for (std::size_t i = 0; i < n; ++i) col[i] += ops.projection_weight() * k.mass[i] * phi[i] * k.mass[j] * phi[j];
    const RVec x = a.solve<double>(col);
    for (std::size_t i = 0; i < n; ++i) impl_->t(i, j) = x[i] + (i == j ? 1.0 : 0.0);
  }
  impl_->lu.compute(impl_->t);
  const double det_scale = impl_->lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  require(det_scale > 1e-14 * impl_->t.cwiseAbs().maxCoeff(), ErrorCode::SingularT, "dense T is numerically singular");
}

DenseT::~DenseT() = default;

CVec DenseT::apply(std::span<const cplx> x) const {
  const Eigen::Index n = impl_->t.rows();
  require(static_cast<Eigen::Index>(x.size()) == n, ErrorCode::ShapeMismatch, "dense T operand size");
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = x[i];
  const Eigen::VectorXcd y = impl_->t.cast<cplx>() * v;
  return CVec(y.data(), y.data() + n);
}

CVec DenseT::solve(std::span<const cplx> b) const {
  const Eigen::Index n = impl_->t.rows();
  require(static_cast<Eigen::Index>(b.size()) == n, ErrorCode::ShapeMismatch, "dense T rhs size");
  Eigen::VectorXd re(n), im(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    re[i] = b[i].real();
    im[i] = b[i].imag();
  }
  const Eigen::VectorXd xr = impl_->lu.solve(re), xi = impl_->lu.solve(im);
  CVec out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = cplx(xr[i], xi[i]);
  return out;
}

double DenseT::smallest_singular_value(int iterations) const {
  const Eigen::Index n = impl_->t.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
  double growth = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd y = impl_->lu.transpose().solve(x);
    const Eigen::VectorXd z = impl_->lu.solve(y);
    growth = z.norm();
    x = z / growth;
  }
  return 1.0 / std::sqrt(growth);
}

const DenseT& RayleighOperators::dense_T() const {
  std::call_once(dense_once_, [this] { dense_ = std::make_unique<DenseT>(*this); });
  return *dense_;
}

CVec apply_P(const RayleighOperators& ops, std::span<const cplx> f) {
  const auto& phi = ops.mode().phi;
  require(ops.grid().conforms(f.size()), ErrorCode::ShapeMismatch, "projection operand size");
  const auto w = ops.grid().weights();
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * phi[i];
  CVec out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = s * phi[i];
  return out;
}

CVec apply_K(const RayleighOperators& ops, std::span<const cplx> f) { return helmholtz_solve(ops.K(), f); }

CVec apply_T(const RayleighOperators& ops, std::span<const cplx> x) {
  CVec f = apply_P(ops, x);
  const auto pot = ops.potential();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] += pot[i] * x[i];
  CVec out = apply_K(ops, f);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += x[i];
  return out;
}

CVec apply_R(const RayleighOperators& ops, double eps, cplx c, std::span<const cplx> f) {
  require(ops.grid().conforms(f.size()), ErrorCode::ShapeMismatch, "R operand size");
  const CVec w = ops.coefficient(eps, c);
  CVec g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = w[i] * f[i];
  return apply_K(ops, g);
}

CVec solve_T(const RayleighOperators& ops, std::span<const cplx> b, TSolver solver) {
  require(ops.grid().conforms(b.size()), ErrorCode::ShapeMismatch, "T rhs size");
  if (solver == TSolver::Dense) return ops.dense_T().solve(b);
  return ops.solve_shifted({}, band_apply(ops.K(), b));
}

ProjectedSolution solve_projected(const RayleighOperators& ops, double eps, cplx c, ProjectedMethod method) {
  const CVec w = ops.coefficient(eps, c);
  const auto mass = ops.grid().weights();
  const CVec phi = to_complex(ops.mode().phi);
  ProjectedSolution out;
  if (method.kind == ProjectedMethod::Direct) {
    out.psi = ops.solve_shifted(w, weighted(mass, w, phi));
    return out;
  }
  require(method.max_terms >= 1, ErrorCode::InvalidArgument, "Neumann series needs max_terms >= 1");
  CVec term = ops.solve_shifted({}, weighted(mass, w, phi));
  out.psi.assign(term.size(), 0.0);
  auto& cert = out.certificate;
  int rising = 0;
  for (int k = 1;; ++k) {
    const double tn = norm(term, ops.grid(), NormKind::H1);
    for (std::size_t i = 0; i < term.size(); ++i) out.psi[i] += term[i];
    cert.term_norms.push_back(tn);
    cert.terms = k;
    if (k >= 2) {
      const double r = tn / cert.term_norms[k - 2];
      cert.contraction_ratio = std::max(cert.contraction_ratio, r);
      rising = r >= 1.0 ? rising + 1 : 0;
      if (rising >= 3) fail(ErrorCode::NeumannDiverging, "Neumann terms stopped decaying");
    }
    if (tn < 1e-12) return out;
    if (k >= method.max_terms) fail(ErrorCode::NeumannDiverging, "Neumann series did not reach 1e-12 in max_terms");
    term = ops.solve_shifted({}, weighted(mass, w, term));
  }
}

double projected_residual(const RayleighOperators& ops, double eps, cplx c, std::span<const cplx> psi) {
  const CVec phi = to_complex(ops.mode().phi);
  const CVec tpsi = apply_T(ops, psi);
  const CVec rpsi = apply_R(ops, eps, c, psi);
  const CVec rphi = apply_R(ops, eps, c, phi);
  CVec r(psi.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = tpsi[i] - rpsi[i] - rphi[i];
  const double scale = l2(rphi, ops.grid());
  return scale > 0.0 ? l2(r, ops.grid()) / scale : l2(r, ops.grid());
}

double r_norm_probe(const RayleighOperators& ops, double eps, cplx c, int iterations) {
  const CVec w = ops.coefficient(eps, c);
  const std::size_t n = w.size();
  auto energy = [&](std::span<const cplx> x) {
    const CVec ax = band_apply(ops.K(), x);
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i]) * ax[i];
    return std::sqrt(std::abs(s.real()));
  };
  CVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = ops.mode().phi[i] + 0.5 * std::sin(3.0 * (i + 1.0));
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nx = energy(x);
    for (auto& v : x) v /= nx;
    CVec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = w[i] * x[i];
    y = apply_K(ops, y);
    estimate = energy(y);
    for (std::size_t i = 0; i < n; ++i) y[i] *= std::conj(w[i]);
    x = apply_K(ops, y);
  }
  return estimate;
}

}  // namespace shearinst
