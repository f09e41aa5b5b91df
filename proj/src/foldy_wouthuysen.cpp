#include "propertime/foldy_wouthuysen.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "propertime/error.hpp"
#include "propertime/linalg.hpp"

namespace propertime {
namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

const GammaBasis& gammas() {
  static const GammaBasis basis = build_gamma_basis();
  return basis;
}

}  // namespace

void LatticeConfig::validate() const {
  for (int a = 0; a < 2; ++a) {
    if (dims[a] < 8) {
      throw Error(ErrorKind::GridTooCoarse, "lattice needs >= 8 sites per axis");
    }
    if (!(length[a] > 0.0)) throw Error(ErrorKind::InvalidArgument, "box length must be positive");
  }
  if (!(mass > 0.0)) throw Error(ErrorKind::NonpositiveMass, "lattice mass must be positive");
  if (!(std::abs(charge * potential) < mass)) {
    throw Error(ErrorKind::InvalidArgument, "|e phi| must stay below the mass");
  }
}

Eigen::MatrixXcd lift(const Complex4x4& gamma, const Eigen::MatrixXcd& site_op) {
  const Eigen::Index m = site_op.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(4 * m, 4 * m);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (gamma(a, b) != Complex(0.0)) out.block(a * m, b * m, m, m) = gamma(a, b) * site_op;
    }
  }
  return out;
}

Eigen::MatrixXcd site_momentum(const LatticeConfig& cfg, int axis) {
  cfg.validate();
  const int m = cfg.sites();
  const double h = cfg.spacing(axis);
  // -i * (8 (f+1 - f-1) - (f+2 - f-2)) / 12h
  const std::array<std::pair<int, double>, 4> stencil{
      {{1, 8.0}, {-1, -8.0}, {2, -1.0}, {-2, 1.0}}};
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(m, m);
  for (int iy = 0; iy < cfg.dims[1]; ++iy) {
    for (int ix = 0; ix < cfg.dims[0]; ++ix) {
      const int row = cfg.site(ix, iy);
      for (const auto& [shift, c] : stencil) {
        const int col = axis == 0 ? cfg.site(wrap(ix + shift, cfg.dims[0]), iy)
                                  : cfg.site(ix, wrap(iy + shift, cfg.dims[1]));
        p(row, col) += -kI * c / (12.0 * h);
      }
    }
  }
  return p;
}

std::array<double, 2> vector_potential(const LatticeConfig& cfg, int ix, int iy) {
  const double x = cfg.coordinate(0, ix);
  const double y = cfg.coordinate(1, iy);
  return {-0.5 * cfg.field * y, 0.5 * cfg.field * x};
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> site_kinetic(const LatticeConfig& cfg) {
  Eigen::MatrixXcd pi1 = site_momentum(cfg, 0);
  Eigen::MatrixXcd pi2 = site_momentum(cfg, 1);
  for (int iy = 0; iy < cfg.dims[1]; ++iy) {
    for (int ix = 0; ix < cfg.dims[0]; ++ix) {
      const int s = cfg.site(ix, iy);
      const auto a = vector_potential(cfg, ix, iy);
      pi1(s, s) -= cfg.charge * a[0];
      pi2(s, s) -= cfg.charge * a[1];
    }
  }
  return {std::move(pi1), std::move(pi2)};
}

KineticPair build_kinetic(const LatticeConfig& cfg) {
  auto [pi1, pi2] = site_kinetic(cfg);
  const Complex4x4 id = Complex4x4::Identity();
  return {{lift(id, pi1), "pi1", true}, {lift(id, pi2), "pi2", true}};
}

LatticeOperator build_dirac_hamiltonian(const LatticeConfig& cfg) {
  const auto [pi1, pi2] = site_kinetic(cfg);
  const GammaBasis& g = gammas();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(cfg.sites(), cfg.sites());
  Eigen::MatrixXcd h = lift(g.alpha[0], pi1) + lift(g.alpha[1], pi2) + lift(cfg.mass * g.beta, id);
  h.diagonal().array() += cfg.charge * cfg.potential;
  return {std::move(h), "H", true};
}

LatticeOperator fw_generator(const LatticeConfig& cfg) {
  const auto [pi1, pi2] = site_kinetic(cfg);
  const GammaBasis& g = gammas();
  const double scale = 1.0 / (2.0 * cfg.mass);
  Eigen::MatrixXcd s =
      lift(scale * g.beta * g.alpha[0], pi1) + lift(scale * g.beta * g.alpha[1], pi2);
  return {std::move(s), "S", false};
}

LatticeOperator fw_unitary(const LatticeConfig& cfg) {
  const double radius = FwLattice(cfg).generator_radius();
  if (radius > kMaxGeneratorRadius) {
    throw Error(ErrorKind::InvalidArgument,
                "spectral radius of S is " + std::to_string(radius) + ", above 1.5");
  }
  const LatticeOperator s = fw_generator(cfg);
  Eigen::MatrixXcd u = s.matrix.exp();
  const Eigen::MatrixXcd defect =
      u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  const double residual = defect.cwiseAbs().maxCoeff();
  if (!(residual <= kUnitarityResidual)) {
    throw Error(ErrorKind::ExpDiverged, "U^dagger U deviates from I by " + std::to_string(residual));
  }
  return {std::move(u), "U", false};
}

LatticeOperator beta_truncated(const LatticeConfig& cfg) {
  const auto [pi1, pi2] = site_kinetic(cfg);
  const GammaBasis& g = gammas();
  const double m = cfg.mass;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(cfg.sites(), cfg.sites());
  const Eigen::MatrixXcd pi_sq = pi1 * pi1 + pi2 * pi2;
  Eigen::MatrixXcd out = lift(g.beta, id);
  out -= lift(g.alpha[0] / m, pi1) + lift(g.alpha[1] / m, pi2);
  out -= lift(g.beta / (2.0 * m * m), pi_sq);
  out += lift(cfg.charge * cfg.field / (2.0 * m * m) * g.beta * g.spin[2], id);
  return {std::move(out), "beta_truncated", true};
}

double spin_field_coefficient(const LatticeOperator& op, const LatticeConfig& cfg) {
  const GammaBasis& g = gammas();
  const Complex4x4 probe = g.beta * g.spin[2];
  const Eigen::Index m = cfg.sites();
  Complex trace = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (probe(b, a) == Complex(0.0)) continue;
      trace += std::conj(probe(b, a)) * op.matrix.block(b * m, a * m, m, m).trace();
    }
  }
  return trace.real() / static_cast<double>(4 * m);
}

LatticeOperator positive_projector_lattice(const LatticeOperator& hamiltonian, double mass) {
  const HermitianEigen eig = hermitian_eigen(hamiltonian.matrix);
  const Eigen::Index n = eig.values.size();
  Eigen::Index first_positive = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(eig.values(i)) < 1e-8 * mass) {
      throw Error(ErrorKind::ZeroEigenvalue, "eigenvalue too close to zero to assign a branch");
    }
    if (eig.values(i) > 0.0 && first_positive == n) first_positive = i;
  }
  const auto positive = eig.vectors.rightCols(n - first_positive);
  return {positive * positive.adjoint(), "P+", true};
}

FwLattice::FwLattice(LatticeConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  std::tie(pi1_, pi2_) = site_kinetic(cfg_);
  pi_sq_ = pi1_ * pi1_ + pi2_ * pi2_;
  const Eigen::Index m = cfg_.sites();
  // sigma1 pi1 + sigma2 pi2 = [[0, pi1 - i pi2], [pi1 + i pi2, 0]]
  pauli_kinetic_ = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  pauli_kinetic_.topRightCorner(m, m) = pi1_ - kI * pi2_;
  pauli_kinetic_.bottomLeftCorner(m, m) = pi1_ + kI * pi2_;
  HermitianEigen eig = hermitian_eigen(pauli_kinetic_);
  kin_values_ = std::move(eig.values);
  kin_vectors_ = std::move(eig.vectors);
}

double FwLattice::generator_radius() const {
  return kin_values_.cwiseAbs().maxCoeff() / (2.0 * cfg_.mass);
}

Eigen::VectorXcd FwLattice::apply_block(const Eigen::VectorXcd& x, const Eigen::VectorXd& f) const {
  Eigen::VectorXcd y = kin_vectors_.adjoint() * x;
  y.array() *= f.array();
  return kin_vectors_ * y;
}

Eigen::VectorXcd FwLattice::apply_pi_squared(const Eigen::VectorXcd& two_spinor) const {
  const Eigen::Index m = cfg_.sites();
  Eigen::VectorXcd out(2 * m);
  out.head(m) = pi_sq_ * two_spinor.head(m);
  out.tail(m) = pi_sq_ * two_spinor.tail(m);
  return out;
}

Eigen::VectorXcd FwLattice::apply_spin_z(const Eigen::VectorXcd& two_spinor) const {
  const Eigen::Index m = cfg_.sites();
  Eigen::VectorXcd out(2 * m);
  out.head(m) = two_spinor.head(m);
  out.tail(m) = -two_spinor.tail(m);
  return out;
}

LatticeSpinor FwLattice::apply_hamiltonian(const LatticeSpinor& psi) const {
  const Eigen::Index n = 2 * cfg_.sites();
  LatticeSpinor out(2 * n);
  out.head(n) = cfg_.mass * psi.head(n) + pauli_kinetic_ * psi.tail(n);
  out.tail(n) = pauli_kinetic_ * psi.head(n) - cfg_.mass * psi.tail(n);
  out += cfg_.charge * cfg_.potential * psi;
  return out;
}

LatticeSpinor FwLattice::rotate(const LatticeSpinor& psi, double sign) const {
  const Eigen::Index n = 2 * cfg_.sites();
  const Eigen::VectorXd angle = kin_values_ / (2.0 * cfg_.mass);
  const Eigen::VectorXd c = angle.array().cos();
  const Eigen::VectorXd s = sign * angle.array().sin();
  const Eigen::VectorXcd up = kin_vectors_.adjoint() * psi.head(n);
  const Eigen::VectorXcd low = kin_vectors_.adjoint() * psi.tail(n);
  LatticeSpinor out(2 * n);
  out.head(n) = kin_vectors_ * (c.cwiseProduct(up) + s.cwiseProduct(low));
  out.tail(n) = kin_vectors_ * (c.cwiseProduct(low) - s.cwiseProduct(up));
  return out;
}

LatticeSpinor FwLattice::apply_unitary(const LatticeSpinor& psi) const { return rotate(psi, 1.0); }

LatticeSpinor FwLattice::apply_unitary_adjoint(const LatticeSpinor& psi) const {
  return rotate(psi, -1.0);
}

LatticeSpinor FwLattice::project_positive(const LatticeSpinor& psi) const {
  const Eigen::Index n = 2 * cfg_.sites();
  const double m = cfg_.mass;
  const Eigen::VectorXd inv_energy =
      (kin_values_.array().square() + m * m).rsqrt().matrix();
  LatticeSpinor scaled(2 * n);
  scaled.head(n) = apply_block(psi.head(n), inv_energy);
  scaled.tail(n) = apply_block(psi.tail(n), inv_energy);
  // sign(H) = H0 |H0|^-1 with H0 the potential-free operator.
  LatticeSpinor sign(2 * n);
  sign.head(n) = m * scaled.head(n) + pauli_kinetic_ * scaled.tail(n);
  sign.tail(n) = pauli_kinetic_ * scaled.head(n) - m * scaled.tail(n);
  return 0.5 * (psi + sign);
}

LatticeSpinor FwLattice::apply_beta_truncated(const LatticeSpinor& psi) const {
  const Eigen::Index n = 2 * cfg_.sites();
  const double m = cfg_.mass;
  const double zeeman = cfg_.charge * cfg_.field / (2.0 * m * m);
  LatticeSpinor out(2 * n);
  const Eigen::VectorXcd up = psi.head(n);
  const Eigen::VectorXcd low = psi.tail(n);
  out.head(n) = up - pauli_kinetic_ * low / m - apply_pi_squared(up) / (2.0 * m * m) +
                zeeman * apply_spin_z(up);
  out.tail(n) = -low - pauli_kinetic_ * up / m + apply_pi_squared(low) / (2.0 * m * m) -
                zeeman * apply_spin_z(low);
  return out;
}

LatticeSpinor FwLattice::gaussian(const LatticePacket& packet) const {
  const Eigen::Index m = cfg_.sites();
  if (!(packet.width > 0.0)) throw Error(ErrorKind::InvalidArgument, "packet width must be positive");
  const Spin2 spin = packet.spin.normalized();
  const Eigen::Index offset = packet.lower ? 2 * m : 0;
  LatticeSpinor psi = LatticeSpinor::Zero(4 * m);
  for (int iy = 0; iy < cfg_.dims[1]; ++iy) {
    for (int ix = 0; ix < cfg_.dims[0]; ++ix) {
      const double dx = cfg_.coordinate(0, ix) - packet.center[0];
      const double dy = cfg_.coordinate(1, iy) - packet.center[1];
      const double envelope = std::exp(-(dx * dx + dy * dy) / (4.0 * packet.width * packet.width));
      const Complex wave = std::polar(envelope, packet.momentum[0] * dx + packet.momentum[1] * dy);
      const int s = cfg_.site(ix, iy);
      psi(offset + s) = wave * spin(0);
      psi(offset + m + s) = wave * spin(1);
    }
  }
  return psi.normalized();
}

LatticeSpinor FwLattice::positive_packet(const LatticePacket& packet) const {
  const LatticeSpinor psi = project_positive(gaussian(packet));
  const double n = psi.norm();
  if (n < 1e-8) throw Error(ErrorKind::ZeroProjection, "packet has no positive-energy part");
  return psi / n;
}

double FwLattice::exact_rate(const LatticeSpinor& psi) const {
  const Eigen::Index n = 2 * cfg_.sites();
  return psi.head(n).squaredNorm() - psi.tail(n).squaredNorm();
}

double FwLattice::rate_pauli_side(const LatticeSpinor& psi) const {
  const Eigen::Index n = 2 * cfg_.sites();
  const double m = cfg_.mass;
  const Eigen::VectorXcd large = apply_unitary(psi).head(n);
  const double kinetic = large.dot(apply_pi_squared(large)).real();
  const double spin = large.dot(apply_spin_z(large)).real();
  return large.squaredNorm() - kinetic / (2.0 * m * m) +
         cfg_.charge * cfg_.field / (2.0 * m * m) * spin;
}

double FwLattice::small_component_ratio(const LatticeSpinor& psi) const {
  const Eigen::Index n = 2 * cfg_.sites();
  const LatticeSpinor rotated = apply_unitary(psi);
  return rotated.tail(n).norm() / rotated.head(n).norm();
}

double FwLattice::cross_term(const LatticeSpinor& psi) const {
  const Eigen::Index n = 2 * cfg_.sites();
  const LatticeSpinor rotated = apply_unitary(psi);
  const Complex overlap = rotated.head(n).dot(pauli_kinetic_ * rotated.tail(n));
  return std::abs(2.0 * overlap.real() / cfg_.mass);
}

double FwLattice::beta_expansion_residual(const LatticeSpinor& psi) const {
  const Eigen::Index n = 2 * cfg_.sites();
  LatticeSpinor back = apply_unitary_adjoint(psi);
  back.tail(n) = -back.tail(n);
  return (apply_unitary(back) - apply_beta_truncated(psi)).norm();
}

double small_component_ratio(const LatticeConfig& cfg, const LatticeSpinor& psi) {
  return FwLattice(cfg).small_component_ratio(psi);
}

double rate_pauli_side(const LatticeConfig& cfg, const LatticeSpinor& psi) {
  return FwLattice(cfg).rate_pauli_side(psi);
}

LatticeConfig ScalingStudy::lattice_at(double vscale) const {
  LatticeConfig cfg = reference;
  cfg.length = {reference.length[0] / vscale, reference.length[1] / vscale};
  cfg.field = reference.field * vscale * vscale;
  return cfg;
}

LatticePacket ScalingStudy::packet_at(double vscale) const {
  LatticePacket p;
  p.momentum = {vscale * reference.mass, 0.0};
  p.width = packet_width / vscale;
  p.spin = spin;
  return p;
}

void ScalingStudy::validate() const {
  reference.validate();
  if (!(packet_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "packet_width must be positive");
  for (int a = 0; a < 2; ++a) {
    if (0.5 * reference.length[a] < 4.0 * packet_width) {
      throw Error(ErrorKind::InvalidArgument, "packet must sit at least 4 widths inside the box");
    }
  }
}

std::vector<ScalingRow> fw_scaling_study(const ScalingStudy& study, std::span<const double> vscales) {
  study.validate();
  for (std::size_t i = 0; i < vscales.size(); ++i) {
    if (!(vscales[i] > 0.0) || (i > 0 && !(vscales[i] < vscales[i - 1]))) {
      throw Error(ErrorKind::InvalidArgument, "vscales must be positive and strictly decreasing");
    }
  }
  std::vector<ScalingRow> rows;
  rows.reserve(vscales.size());
  for (double s : vscales) {
    const FwLattice lattice(study.lattice_at(s));
    ScalingRow row;
    row.vscale = s;
    row.generator_radius = lattice.generator_radius();
    if (row.generator_radius > kMaxGeneratorRadius) {
      throw Error(ErrorKind::InvalidArgument,
                  "vscale " + std::to_string(s) + " puts the spectral radius of S above 1.5");
    }
    const LatticeSpinor psi = lattice.positive_packet(study.packet_at(s));
    row.res_beta = lattice.beta_expansion_residual(psi);
    row.exact_rate = lattice.exact_rate(psi);
    row.pauli_rate = lattice.rate_pauli_side(psi);
    row.res_rate = std::abs(row.exact_rate - row.pauli_rate);
    row.ratio_small = lattice.small_component_ratio(psi);
    row.cross = lattice.cross_term(psi);
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::pair<double, double>> verify_beta_expansion(const ScalingStudy& study,
                                                             std::span<const double> vscales) {
  std::vector<std::pair<double, double>> out;
  for (const ScalingRow& row : fw_scaling_study(study, vscales)) {
    out.emplace_back(row.vscale, row.res_beta);
  }
  return out;
}

}  // namespace propertime
