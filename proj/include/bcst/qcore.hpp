#pragma once

// Dense statevector engine for registers of at most eight qubits.
//
// Basis indices are big-endian: qubit 0 is the most significant bit, so a
// basis string such as |00111> reads left to right as qubits 0..4.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bcst/bell_kind.hpp"
#include "bcst/random.hpp"

namespace bcst {

using Amplitude = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr std::size_t kMaxQubits = 8;
inline constexpr double kTolerance = 1e-12;
inline constexpr double kPsdFloor = 1e-10;
inline constexpr double kDegenerateProbability = 1e-14;

class StateVector {
 public:
  /// Validates length (a power of two, at most 2^8) and unit norm.
  explicit StateVector(std::vector<Amplitude> amps);

  static StateVector basis(std::size_t num_qubits, std::size_t index);
  static StateVector qubit(Amplitude alpha, Amplitude beta);
  /// Rescales to unit norm; rejects the zero vector.
  static StateVector normalized(std::vector<Amplitude> amps);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  Amplitude operator[](std::size_t index) const { return amps_[index]; }
  double norm_squared() const;

 private:
  std::size_t num_qubits_ = 0;
  std::vector<Amplitude> amps_;
};

/// Orthonormal single-qubit measurement basis {|a>, |b>}.
class SingleQubitBasis {
 public:
  SingleQubitBasis(std::array<Amplitude, 2> ket_a, std::array<Amplitude, 2> ket_b);

  static SingleQubitBasis computational();
  static SingleQubitBasis hadamard();
  /// |a> = cos(theta)|0> + e^{i phi} sin(theta)|1>, |b> its orthogonal complement.
  static SingleQubitBasis from_angles(double theta, double phi);

  const std::array<Amplitude, 2>& ket_a() const noexcept { return a_; }
  const std::array<Amplitude, 2>& ket_b() const noexcept { return b_; }
  StateVector state_a() const { return StateVector::qubit(a_[0], a_[1]); }
  StateVector state_b() const { return StateVector::qubit(b_[0], b_[1]); }

 private:
  std::array<Amplitude, 2> a_;
  std::array<Amplitude, 2> b_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and the PSD floor.
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  const Eigen::MatrixXcd& entries() const noexcept { return rho_; }
  Eigen::VectorXd eigenvalues() const;

 private:
  std::size_t num_qubits_ = 0;
  Eigen::MatrixXcd rho_;
};

enum class Outcome { A, B };

std::string_view to_string(Outcome outcome);

struct QubitBranch {
  Outcome outcome;
  double probability;
  StateVector collapsed;  ///< full register, measured qubit left in |a> or |b>
  StateVector remainder;  ///< register with the measured qubit removed
};

struct BellBranch {
  BellKind outcome;
  double probability;
  StateVector collapsed;  ///< full register, measured pair left in the Bell state
  StateVector remainder;  ///< register with the measured pair removed
};

// ---- construction ---------------------------------------------------------

StateVector tensor(std::span<const StateVector> parts);
StateVector tensor(std::initializer_list<StateVector> parts);

/// `perm[i]` is the output position of input qubit i.
StateVector permute_qubits(const StateVector& s, std::span<const std::size_t> perm);

// ---- gates ----------------------------------------------------------------

bool is_unitary(const Eigen::MatrixXcd& u, double tol = kTolerance);
StateVector apply_1q(const StateVector& s, std::size_t q, const Mat2& u);
/// q1 indexes the first tensor factor of u's basis, q2 the second.
StateVector apply_2q(const StateVector& s, std::size_t q1, std::size_t q2, const Mat4& u);

// ---- projection and measurement -------------------------------------------

/// Unnormalized projection of the qubits `qubits` onto `ket` (a state on
/// exactly those qubits, in that order); the projected qubits are removed.
/// Returns the squared norm of the branch through `probability`.
std::vector<Amplitude> project_onto(const StateVector& s, std::span<const std::size_t> qubits,
                                    const StateVector& ket, double& probability);

/// Both branches with their exact probabilities, skipping degenerate ones.
std::vector<QubitBranch> measure_qubit_all(const StateVector& s, std::size_t q,
                                           const SingleQubitBasis& basis);
/// Outcome a iff `random` < P(a).
QubitBranch measure_qubit(const StateVector& s, std::size_t q, const SingleQubitBasis& basis,
                          double random);
QubitBranch measure_qubit(const StateVector& s, std::size_t q, const SingleQubitBasis& basis,
                          RandomStream& rng);

/// All non-degenerate Bell outcomes on (q1, q2), in BellKind order.
std::vector<BellBranch> measure_bell_pair_all(const StateVector& s, std::size_t q1,
                                              std::size_t q2);
/// Walks the outcomes in BellKind order and picks the first whose cumulative
/// probability exceeds `random`.
BellBranch measure_bell_pair(const StateVector& s, std::size_t q1, std::size_t q2,
                             double random);
BellBranch measure_bell_pair(const StateVector& s, std::size_t q1, std::size_t q2,
                             RandomStream& rng);

/// Embeds `ket` on the given qubits of an otherwise-provided remainder;
/// inverse of project_onto for a successful branch.
StateVector embed(const StateVector& remainder, std::span<const std::size_t> qubits,
                  const StateVector& ket);

// ---- analysis -------------------------------------------------------------

/// Partial trace onto `keep`, ordered as given.
DensityMatrix reduced_density(const StateVector& s, std::span<const std::size_t> keep);
DensityMatrix reduced_density(const StateVector& s, std::initializer_list<std::size_t> keep);
double purity(const DensityMatrix& rho);
double fidelity_pure(const StateVector& s1, const StateVector& s2);
/// <psi|rho|psi>
double fidelity_mixed(const DensityMatrix& rho, const StateVector& psi);
bool equal_up_to_global_phase(const StateVector& s1, const StateVector& s2,
                              double tol = kTolerance);
/// Largest componentwise |s1 - s2|.
double max_abs_difference(const StateVector& s1, const StateVector& s2);

/// Index of qubit q once the qubits in `removed` are deleted from the register.
std::size_t index_after_removal(std::size_t q, std::span<const std::size_t> removed);

}  // namespace bcst
