#include "steerkit/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "steerkit/errors.hpp"

namespace steerkit {

const char* party_name(Party p) { return p == Party::Alice ? "alice" : "bob"; }
Party other(Party p) { return p == Party::Alice ? Party::Bob : Party::Alice; }

namespace pauli {

Matrix2c identity() { return Matrix2c::Identity(); }

Matrix2c x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2c y() {
  Matrix2c m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Matrix2c z() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}

const std::array<Matrix2c, 3>& xyz() {
  static const std::array<Matrix2c, 3> s{x(), y(), z()};
  return s;
}

}  // namespace pauli

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
  MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatrixXc partial_trace_first(const MatrixXc& m, int dim_a, int dim_b) {
  MatrixXc out = MatrixXc::Zero(dim_b, dim_b);
  for (int k = 0; k < dim_a; ++k) out += m.block(k * dim_b, k * dim_b, dim_b, dim_b);
  return out;
}

MatrixXc partial_trace_second(const MatrixXc& m, int dim_a, int dim_b) {
  MatrixXc out = MatrixXc::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_a; ++j)
      for (int k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
  return out;
}

namespace {

Matrix4c hermitian_part(const Matrix4c& m) { return (m + m.adjoint()) / 2.0; }

}  // namespace

DensityMatrix4::DensityMatrix4(const Matrix4c& m) {
  if (!m.allFinite()) throw ValidationError("density matrix has non-finite entries");
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    std::ostringstream os;
    os << "density matrix is not Hermitian (max |rho - rho^dag| = " << herm << ")";
    throw ValidationError(os.str());
  }
  m_ = hermitian_part(m);
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "density matrix trace is " << tr << ", expected 1";
    throw ValidationError(os.str());
  }
  const double lmin = eigenvalues().minCoeff();
  if (lmin < -kPsdTol) {
    std::ostringstream os;
    os << "density matrix is not positive semidefinite (smallest eigenvalue " << lmin << ")";
    throw ValidationError(os.str());
  }
}

DensityMatrix4 DensityMatrix4::repaired(const Matrix4c& m) {
  if (!m.allFinite()) throw ValidationError("density matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(hermitian_part(m));
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  const double total = ev.sum();
  if (!(total > 0.0)) throw ValidationError("cannot repair a matrix with no positive spectrum");
  ev /= total;
  Matrix4c out = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  out = hermitian_part(out);
  // Pin the trace to one exactly on the diagonal.
  const double tr = out.trace().real();
  for (int i = 0; i < 4; ++i) out(i, i) = cplx(out(i, i).real() / tr, 0.0);
  return DensityMatrix4(out);
}

Matrix2c DensityMatrix4::reduced(Party keep) const {
  return keep == Party::Alice ? Matrix2c(partial_trace_second(m_, 2, 2))
                              : Matrix2c(partial_trace_first(m_, 2, 2));
}

Eigen::Vector4d DensityMatrix4::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

WernerSpec::WernerSpec(double m) : mu(m) {
  if (!(m >= 0.0 && m <= 1.0)) {
    std::ostringstream os;
    os << "Werner parameter mu = " << m << " outside [0, 1]";
    throw DomainError(os.str());
  }
}

DensityMatrix4 werner_state(const WernerSpec& spec) {
  Matrix4c m = Matrix4c::Identity() * ((1.0 - spec.mu) / 4.0);
  const double h = spec.mu / 2.0;
  m(kHV, kHV) += h;
  m(kVH, kVH) += h;
  m(kHV, kVH) -= h;
  m(kVH, kHV) -= h;
  return DensityMatrix4(m);
}

DensityMatrix4 singlet_state() { return werner_state(1.0); }
DensityMatrix4 maximally_mixed_state() { return werner_state(0.0); }

DensityMatrix4 basis_state(int index) {
  if (index < 0 || index > 3) throw DomainError("basis index outside 0..3");
  Matrix4c m = Matrix4c::Zero();
  m(index, index) = 1.0;
  return DensityMatrix4(m);
}

BlochForm bloch_decompose(const DensityMatrix4& rho) {
  const auto& s = pauli::xyz();
  const Matrix2c id = Matrix2c::Identity();
  const Matrix4c& m = rho.matrix();
  BlochForm bf;
  for (int i = 0; i < 3; ++i) {
    bf.a(i) = (m * kron(s[i], id)).trace().real();
    bf.b(i) = (m * kron(id, s[i])).trace().real();
    for (int j = 0; j < 3; ++j) bf.T(i, j) = (m * kron(s[i], s[j])).trace().real();
  }
  return bf;
}

Matrix4c bloch_reassemble(const Vec3& a, const Vec3& b, const Mat3& T) {
  const auto& s = pauli::xyz();
  const Matrix2c id = Matrix2c::Identity();
  Matrix4c m = Matrix4c::Identity();
  for (int i = 0; i < 3; ++i) {
    m += a(i) * kron(s[i], id);
    m += b(i) * kron(id, s[i]);
    for (int j = 0; j < 3; ++j) m += T(i, j) * kron(s[i], s[j]);
  }
  return m / 4.0;
}

bool is_canonical_shape(const Mat3& T, double tol) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j && std::abs(T(i, j)) > tol) return false;
  if (T(0, 0) < -tol || T(1, 1) < -tol) return false;
  return std::abs(T(0, 0)) + tol >= std::abs(T(1, 1)) &&
         std::abs(T(1, 1)) + tol >= std::abs(T(2, 2));
}

BlochForm canonical_form(const BlochForm& bf) {
  BlochForm out = bf;
  out.canonical = true;
  if (is_canonical_shape(bf.T, 1e-12)) return out;

  Eigen::JacobiSVD<Mat3> svd(bf.T, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  if (u.determinant() < 0) u.col(2) *= -1.0;
  if (v.determinant() < 0) v.col(2) *= -1.0;
  const Mat3 ra = u.transpose();
  const Mat3 rb = v.transpose();

  out.T = ra * bf.T * rb.transpose();
  out.a = ra * bf.a;
  out.b = rb * bf.b;
  out.rot_a = ra * bf.rot_a;
  out.rot_b = rb * bf.rot_b;
  return out;
}

Matrix4c psd_sqrt(const Matrix4c& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(hermitian_part(m));
  const Eigen::Vector4d root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix4& rho, const DensityMatrix4& sigma) {
  const Matrix4c r = psd_sqrt(rho.matrix());
  const Matrix4c inner = hermitian_part(r * sigma.matrix() * r);
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(inner, Eigen::EigenvaluesOnly);
  const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(tr * tr, 0.0, 1.0);
}

WernerMatch closest_werner(const DensityMatrix4& rho) {
  // Working on sqrt(F) keeps the objective concave in mu.
  auto f = [&](double mu) { return fidelity(rho, werner_state(mu)); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  WernerMatch best{0.5 * (lo + hi), 0.0};
  best.fidelity = f(best.mu);
  for (double edge : {0.0, 1.0}) {
    const double fe = f(edge);
    if (fe > best.fidelity) best = {edge, fe};
  }
  return best;
}

LossyState lossy_embed(const DensityMatrix4& rho, double epsilon, Party party) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    std::ostringstream os;
    os << "heralding efficiency " << epsilon << " outside [0, 1]";
    throw DomainError(os.str());
  }
  return LossyState{rho, epsilon, party};
}

MatrixXc expand(const LossyState& s) {
  MatrixXc embed = MatrixXc::Zero(3, 2);
  embed(0, 0) = 1.0;
  embed(1, 1) = 1.0;
  MatrixXc vac = MatrixXc::Zero(3, 3);
  vac(2, 2) = 1.0;
  const MatrixXc id2 = MatrixXc::Identity(2, 2);
  const MatrixXc rho = s.rho.matrix();

  if (s.lossy_party == Party::Alice) {
    const MatrixXc iso = kron(embed, id2);
    const MatrixXc rho_b = s.rho.reduced(Party::Bob);
    return s.epsilon * iso * rho * iso.adjoint() + (1.0 - s.epsilon) * kron(vac, rho_b);
  }
  const MatrixXc iso = kron(id2, embed);
  const MatrixXc rho_a = s.rho.reduced(Party::Alice);
  return s.epsilon * iso * rho * iso.adjoint() + (1.0 - s.epsilon) * kron(rho_a, vac);
}

Matrix4c apply_local_unitaries(const Matrix4c& rho, const Matrix2c& ua, const Matrix2c& ub) {
  const Matrix4c u = kron(ua, ub);
  return u * rho * u.adjoint();
}

Mat3 bloch_rotation(const Matrix2c& u) {
  const auto& s = pauli::xyz();
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * (s[i] * u * s[j] * u.adjoint()).trace().real();
  return r;
}

Matrix2c random_unitary2(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector4d q;
  for (int i = 0; i < 4; ++i) q(i) = g(rng);
  q.normalize();
  const cplx i1(0.0, 1.0);
  Matrix2c u = q(0) * pauli::identity() +
               i1 * (q(1) * pauli::x() + q(2) * pauli::y() + q(3) * pauli::z());
  return u;
}

DensityMatrix4 random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix4c gm;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gm(i, j) = cplx(g(rng), g(rng));
  Matrix4c m = gm * gm.adjoint();
  m = hermitian_part(m) / m.trace().real();
  return DensityMatrix4(m);
}

}  // namespace steerkit
