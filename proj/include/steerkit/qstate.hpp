#pragma once

#include <array>
#include <complex>
#include <random>

#include <Eigen/Dense>

namespace steerkit {

using cplx = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using MatrixXc = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Party { Alice, Bob };

const char* party_name(Party p);
Party other(Party p);

// Basis order {HH, HV, VH, VV}, H = |0>, V = |1>, Alice is the left factor.
inline constexpr int kHH = 0, kHV = 1, kVH = 2, kVV = 3;

namespace pauli {
Matrix2c identity();
Matrix2c x();
Matrix2c y();
Matrix2c z();
// sigma_1..3 as an array, index 0 -> x.
const std::array<Matrix2c, 3>& xyz();
}  // namespace pauli

Matrix4c kron(const Matrix2c& a, const Matrix2c& b);
MatrixXc kron(const MatrixXc& a, const MatrixXc& b);

// Trace out one factor of an operator on C^dA (x) C^dB.
MatrixXc partial_trace_first(const MatrixXc& m, int dim_a, int dim_b);
MatrixXc partial_trace_second(const MatrixXc& m, int dim_a, int dim_b);

/// A validated two-qubit density matrix.
///
/// Construction checks Hermiticity (1e-12), unit trace (1e-12) and
/// positivity (smallest eigenvalue >= -1e-10) and throws ValidationError
/// otherwise. Instances are immutable.
class DensityMatrix4 {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kPsdTol = 1e-10;

  explicit DensityMatrix4(const Matrix4c& m);

  // Builds a state from noisy data: Hermitian part, eigenvalues clipped at
  // zero, trace renormalized to one. Throws if the trace is not positive.
  static DensityMatrix4 repaired(const Matrix4c& m);

  const Matrix4c& matrix() const noexcept { return m_; }
  cplx operator()(int row, int col) const { return m_(row, col); }

  // Reduced state of one party.
  Matrix2c reduced(Party keep) const;
  Eigen::Vector4d eigenvalues() const;

 private:
  Matrix4c m_;
};

struct WernerSpec {
  double mu;

  explicit WernerSpec(double mu);
};

// mu |Psi-><Psi-| + (1 - mu)/4 I4.
DensityMatrix4 werner_state(const WernerSpec& spec);
inline DensityMatrix4 werner_state(double mu) { return werner_state(WernerSpec{mu}); }
DensityMatrix4 singlet_state();
DensityMatrix4 maximally_mixed_state();
// Projector onto a computational basis product state (index into {HH,HV,VH,VV}).
DensityMatrix4 basis_state(int index);

/// Local Bloch vectors and correlation matrix of a two-qubit state,
/// optionally expressed in the frame where T is diagonal.
struct BlochForm {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  Mat3 T = Mat3::Zero();
  bool canonical = false;
  Mat3 rot_a = Mat3::Identity();
  Mat3 rot_b = Mat3::Identity();

  const Vec3& bloch(Party p) const { return p == Party::Alice ? a : b; }
};

BlochForm bloch_decompose(const DensityMatrix4& rho);

// (1/4)[I + a.sigma (x) I + I (x) b.sigma + T_ij sigma_i (x) sigma_j].
Matrix4c bloch_reassemble(const Vec3& a, const Vec3& b, const Mat3& T);
inline Matrix4c bloch_reassemble(const BlochForm& bf) {
  return bloch_reassemble(bf.a, bf.b, bf.T);
}

/// Rotates both local frames so that T becomes diagonal.
///
/// T' = R_A T R_B^T with R_A, R_B proper rotations from a sign-corrected
/// SVD; |T'_11| >= |T'_22| >= |T'_33|, T'_11, T'_22 >= 0 and any reflection
/// is absorbed into the sign of T'_33. An input that already has this shape
/// is returned unchanged (with canonical = true), which makes the map
/// idempotent even when singular values are degenerate.
BlochForm canonical_form(const BlochForm& bf);

// Checks the canonical-shape conditions at the given tolerance.
bool is_canonical_shape(const Mat3& T, double tol = 1e-10);

// Hermitian PSD square root (eigenvalues clipped at zero).
Matrix4c psd_sqrt(const Matrix4c& m);

// Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2, clipped to [0, 1].
double fidelity(const DensityMatrix4& rho, const DensityMatrix4& sigma);

struct WernerMatch {
  double mu;
  double fidelity;
};

// Werner parameter maximizing the fidelity with rho. The square-root
// fidelity is concave along the Werner line, so golden-section search on
// [0, 1] converges to the global maximum.
WernerMatch closest_werner(const DensityMatrix4& rho);

/// Two-qubit state plus heralding efficiency of the party whose photon may
/// be lost. The (2+1) x 2 dimensional matrix is only built by expand().
struct LossyState {
  DensityMatrix4 rho;
  double epsilon;
  Party lossy_party;
};

LossyState lossy_embed(const DensityMatrix4& rho, double epsilon, Party party);

// eps rho + (1 - eps) |nu><nu| (x) rho_other on the 6-dimensional space.
// The lossy party's factor has basis {|0>, |1>, |nu>}; Alice stays the left
// factor in either case, so the matrix is 6x6 with index 2*a + b (Bob
// lossy: 3*a + b).
MatrixXc expand(const LossyState& s);

// Conjugates rho by ua (x) ub.
Matrix4c apply_local_unitaries(const Matrix4c& rho, const Matrix2c& ua, const Matrix2c& ub);

// SO(3) rotation induced on Bloch vectors by U: R_ij = Tr(sigma_i U sigma_j U^dag)/2.
Mat3 bloch_rotation(const Matrix2c& u);

// Haar-random single-qubit unitary.
Matrix2c random_unitary2(std::mt19937_64& rng);

// Random full-rank state G G^dag / Tr(G G^dag) with G complex Gaussian.
DensityMatrix4 random_state(std::mt19937_64& rng);

}  // namespace steerkit
