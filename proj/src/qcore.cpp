#include "bcst/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bcst/error.hpp"

namespace bcst {
namespace {

std::size_t qubits_for_dimension(std::size_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0) {
    throw Error(ErrorCode::InvalidState,
                "amplitude count " + std::to_string(dim) + " is not a power of two");
  }
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if (n > kMaxQubits) {
    throw Error(ErrorCode::CapacityExceeded,
                std::to_string(n) + " qubits requested, limit is " + std::to_string(kMaxQubits));
  }
  return n;
}

// Bit of basis index `x` belonging to qubit q of an n-qubit register.
inline std::size_t bit_of(std::size_t x, std::size_t n, std::size_t q) {
  return (x >> (n - 1 - q)) & 1U;
}

void check_index(std::size_t q, std::size_t n) {
  if (q >= n) {
    throw Error(ErrorCode::IndexOutOfRange,
                "qubit " + std::to_string(q) + " in a " + std::to_string(n) + "-qubit register");
  }
}

void check_distinct(std::span<const std::size_t> qubits, std::size_t n) {
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    check_index(qubits[i], n);
    for (std::size_t j = 0; j < i; ++j) {
      if (qubits[i] == qubits[j]) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "qubit " + std::to_string(qubits[i]) + " listed twice");
      }
    }
  }
}

// Splits a full basis index into (index over `selected`, index over the rest),
// both big-endian in the order the qubits are listed.
struct IndexSplitter {
  std::size_t n;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> rest;

  IndexSplitter(std::size_t num_qubits, std::span<const std::size_t> sel)
      : n(num_qubits), selected(sel.begin(), sel.end()) {
    for (std::size_t q = 0; q < n; ++q) {
      if (std::find(selected.begin(), selected.end(), q) == selected.end()) rest.push_back(q);
    }
  }

  std::size_t gather(std::size_t x, const std::vector<std::size_t>& qubits) const {
    std::size_t out = 0;
    for (std::size_t q : qubits) out = (out << 1) | bit_of(x, n, q);
    return out;
  }
  std::size_t sub(std::size_t x) const { return gather(x, selected); }
  std::size_t remainder(std::size_t x) const { return gather(x, rest); }
};

Eigen::VectorXcd as_vector(const StateVector& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dimension()));
  for (std::size_t i = 0; i < s.dimension(); ++i) v[static_cast<Eigen::Index>(i)] = s[i];
  return v;
}

}  // namespace

// ---- StateVector ----------------------------------------------------------

StateVector::StateVector(std::vector<Amplitude> amps)
    : num_qubits_(qubits_for_dimension(amps.size())), amps_(std::move(amps)) {
  for (const auto& a : amps_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw Error(ErrorCode::InvalidState, "non-finite amplitude");
    }
  }
  const double norm = norm_squared();
  if (std::abs(norm - 1.0) > kTolerance) {
    throw Error(ErrorCode::InvalidState, "squared norm " + std::to_string(norm) + " is not 1");
  }
}

StateVector StateVector::basis(std::size_t num_qubits, std::size_t index) {
  if (num_qubits > kMaxQubits) {
    throw Error(ErrorCode::CapacityExceeded, std::to_string(num_qubits) + " qubits requested");
  }
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw Error(ErrorCode::IndexOutOfRange, "basis index out of range");
  std::vector<Amplitude> amps(dim, 0.0);
  amps[index] = 1.0;
  return StateVector(std::move(amps));
}

StateVector StateVector::qubit(Amplitude alpha, Amplitude beta) {
  return StateVector({alpha, beta});
}

StateVector StateVector::normalized(std::vector<Amplitude> amps) {
  double norm = 0.0;
  for (const auto& a : amps) norm += std::norm(a);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::InvalidState, "cannot normalize a zero or non-finite vector");
  }
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& a : amps) a *= scale;
  return StateVector(std::move(amps));
}

double StateVector::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return sum;
}

// ---- SingleQubitBasis -----------------------------------------------------

SingleQubitBasis::SingleQubitBasis(std::array<Amplitude, 2> ket_a, std::array<Amplitude, 2> ket_b)
    : a_(ket_a), b_(ket_b) {
  const double na = std::norm(a_[0]) + std::norm(a_[1]);
  const double nb = std::norm(b_[0]) + std::norm(b_[1]);
  const Amplitude overlap = std::conj(a_[0]) * b_[0] + std::conj(a_[1]) * b_[1];
  if (std::abs(na - 1.0) > kTolerance || std::abs(nb - 1.0) > kTolerance ||
      std::abs(overlap) > kTolerance) {
    throw Error(ErrorCode::InvalidParameter, "measurement basis is not orthonormal");
  }
}

SingleQubitBasis SingleQubitBasis::computational() {
  return SingleQubitBasis({1.0, 0.0}, {0.0, 1.0});
}

SingleQubitBasis SingleQubitBasis::hadamard() {
  const double h = 1.0 / std::sqrt(2.0);
  return SingleQubitBasis({h, h}, {h, -h});
}

SingleQubitBasis SingleQubitBasis::from_angles(double theta, double phi) {
  const Amplitude phase = std::polar(1.0, phi);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return SingleQubitBasis({c, phase * s}, {s, -phase * c});
}

// ---- DensityMatrix --------------------------------------------------------

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : rho_(std::move(entries)) {
  if (rho_.rows() != rho_.cols()) {
    throw Error(ErrorCode::InvalidState, "density matrix is not square");
  }
  num_qubits_ = qubits_for_dimension(static_cast<std::size_t>(rho_.rows()));
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kTolerance) {
    throw Error(ErrorCode::InvalidState, "density matrix is not Hermitian");
  }
  if (std::abs(rho_.trace() - Amplitude(1.0)) > kTolerance) {
    throw Error(ErrorCode::InvalidState, "density matrix trace is not 1");
  }
  if (eigenvalues().minCoeff() < -kPsdFloor) {
    throw Error(ErrorCode::InvalidState, "density matrix has a negative eigenvalue");
  }
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

std::string_view to_string(Outcome outcome) { return outcome == Outcome::A ? "a" : "b"; }

// ---- construction ---------------------------------------------------------

StateVector tensor(std::span<const StateVector> parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.num_qubits();
  if (total > kMaxQubits) {
    throw Error(ErrorCode::CapacityExceeded, "tensor product would need " +
                                                 std::to_string(total) + " qubits");
  }
  std::vector<Amplitude> amps{1.0};
  for (const auto& p : parts) {
    std::vector<Amplitude> next;
    next.reserve(amps.size() * p.dimension());
    for (const auto& x : amps) {
      for (const auto& y : p.amplitudes()) next.push_back(x * y);
    }
    amps = std::move(next);
  }
  return StateVector(std::move(amps));
}

StateVector tensor(std::initializer_list<StateVector> parts) {
  return tensor(std::span<const StateVector>(parts.begin(), parts.size()));
}

StateVector permute_qubits(const StateVector& s, std::span<const std::size_t> perm) {
  const std::size_t n = s.num_qubits();
  if (perm.size() != n) {
    throw Error(ErrorCode::InvalidPermutation, "permutation length does not match register");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) throw Error(ErrorCode::InvalidPermutation, "not a bijection");
    seen[p] = true;
  }
  std::vector<Amplitude> out(s.dimension());
  for (std::size_t x = 0; x < s.dimension(); ++x) {
    std::size_t y = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (bit_of(x, n, i)) y |= std::size_t{1} << (n - 1 - perm[i]);
    }
    out[y] = s[x];
  }
  return StateVector(std::move(out));
}

// ---- gates ----------------------------------------------------------------

bool is_unitary(const Eigen::MatrixXcd& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const auto identity = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return (u * u.adjoint() - identity).cwiseAbs().maxCoeff() <= tol;
}

StateVector apply_1q(const StateVector& s, std::size_t q, const Mat2& u) {
  check_index(q, s.num_qubits());
  if (!is_unitary(u)) throw Error(ErrorCode::NonUnitary, "single-qubit gate is not unitary");
  const std::size_t mask = std::size_t{1} << (s.num_qubits() - 1 - q);
  std::vector<Amplitude> out(s.amplitudes().begin(), s.amplitudes().end());
  for (std::size_t x = 0; x < s.dimension(); ++x) {
    if (x & mask) continue;
    const Amplitude v0 = s[x];
    const Amplitude v1 = s[x | mask];
    out[x] = u(0, 0) * v0 + u(0, 1) * v1;
    out[x | mask] = u(1, 0) * v0 + u(1, 1) * v1;
  }
  return StateVector(std::move(out));
}

StateVector apply_2q(const StateVector& s, std::size_t q1, std::size_t q2, const Mat4& u) {
  const std::size_t n = s.num_qubits();
  check_index(q1, n);
  check_index(q2, n);
  if (q1 == q2) throw Error(ErrorCode::IndexOutOfRange, "two-qubit gate needs distinct qubits");
  if (!is_unitary(u)) throw Error(ErrorCode::NonUnitary, "two-qubit gate is not unitary");
  const std::size_t m1 = std::size_t{1} << (n - 1 - q1);
  const std::size_t m2 = std::size_t{1} << (n - 1 - q2);
  std::vector<Amplitude> out(s.amplitudes().begin(), s.amplitudes().end());
  for (std::size_t x = 0; x < s.dimension(); ++x) {
    if ((x & m1) || (x & m2)) continue;
    const std::array<std::size_t, 4> idx = {x, x | m2, x | m1, x | m1 | m2};
    std::array<Amplitude, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) v[k] = s[idx[k]];
    for (std::size_t r = 0; r < 4; ++r) {
      Amplitude acc = 0.0;
      for (std::size_t c = 0; c < 4; ++c) {
        acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * v[c];
      }
      out[idx[r]] = acc;
    }
  }
  return StateVector(std::move(out));
}

// ---- projection and measurement -------------------------------------------

std::vector<Amplitude> project_onto(const StateVector& s, std::span<const std::size_t> qubits,
                                    const StateVector& ket, double& probability) {
  check_distinct(qubits, s.num_qubits());
  if (ket.num_qubits() != qubits.size()) {
    throw Error(ErrorCode::InvalidParameter, "projector width does not match qubit list");
  }
  const IndexSplitter split(s.num_qubits(), qubits);
  std::vector<Amplitude> out(std::size_t{1} << split.rest.size(), 0.0);
  for (std::size_t x = 0; x < s.dimension(); ++x) {
    out[split.remainder(x)] += std::conj(ket[split.sub(x)]) * s[x];
  }
  probability = 0.0;
  for (const auto& a : out) probability += std::norm(a);
  return out;
}

StateVector embed(const StateVector& remainder, std::span<const std::size_t> qubits,
                  const StateVector& ket) {
  const std::size_t n = remainder.num_qubits() + ket.num_qubits();
  if (n > kMaxQubits) throw Error(ErrorCode::CapacityExceeded, "embedding exceeds capacity");
  check_distinct(qubits, n);
  if (ket.num_qubits() != qubits.size()) {
    throw Error(ErrorCode::InvalidParameter, "ket width does not match qubit list");
  }
  const IndexSplitter split(n, qubits);
  std::vector<Amplitude> out(std::size_t{1} << n);
  for (std::size_t x = 0; x < out.size(); ++x) {
    out[x] = remainder[split.remainder(x)] * ket[split.sub(x)];
  }
  return StateVector(std::move(out));
}

namespace {

template <typename OutcomeT, typename BranchT>
std::vector<BranchT> all_branches(const StateVector& s, std::span<const std::size_t> qubits,
                                  std::span<const OutcomeT> outcomes,
                                  std::span<const StateVector> kets) {
  std::vector<BranchT> branches;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    double p = 0.0;
    auto rest = project_onto(s, qubits, kets[i], p);
    if (p < kDegenerateProbability) continue;
    auto remainder = StateVector::normalized(std::move(rest));
    auto collapsed = embed(remainder, qubits, kets[i]);
    branches.push_back(BranchT{outcomes[i], p, std::move(collapsed), std::move(remainder)});
  }
  return branches;
}

template <typename OutcomeT, typename BranchT>
BranchT sample_branch(const StateVector& s, std::span<const std::size_t> qubits,
                      std::span<const OutcomeT> outcomes, std::span<const StateVector> kets,
                      double random) {
  if (!(random >= 0.0 && random < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "random sample must lie in [0, 1)");
  }
  std::vector<double> probs(outcomes.size());
  std::vector<std::vector<Amplitude>> rests(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    rests[i] = project_onto(s, qubits, kets[i], probs[i]);
  }
  std::size_t chosen = outcomes.size() - 1;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    cumulative += probs[i];
    if (random < cumulative) {
      chosen = i;
      break;
    }
  }
  if (probs[chosen] < kDegenerateProbability) {
    throw Error(ErrorCode::DegenerateBranch, "selected branch has probability " +
                                                 std::to_string(probs[chosen]));
  }
  auto remainder = StateVector::normalized(std::move(rests[chosen]));
  auto collapsed = embed(remainder, qubits, kets[chosen]);
  return BranchT{outcomes[chosen], probs[chosen], std::move(collapsed), std::move(remainder)};
}

constexpr std::array<Outcome, 2> kQubitOutcomes = {Outcome::A, Outcome::B};

std::array<StateVector, 2> basis_kets(const SingleQubitBasis& basis) {
  return {basis.state_a(), basis.state_b()};
}

const std::array<StateVector, 4>& bell_kets() {
  static const std::array<StateVector, 4> kets = {
      bell_state(BellKind::PsiPlus), bell_state(BellKind::PsiMinus),
      bell_state(BellKind::PhiPlus), bell_state(BellKind::PhiMinus)};
  return kets;
}

}  // namespace

std::vector<QubitBranch> measure_qubit_all(const StateVector& s, std::size_t q,
                                           const SingleQubitBasis& basis) {
  const std::array<std::size_t, 1> qubits = {q};
  const auto kets = basis_kets(basis);
  return all_branches<Outcome, QubitBranch>(s, qubits, kQubitOutcomes, kets);
}

QubitBranch measure_qubit(const StateVector& s, std::size_t q, const SingleQubitBasis& basis,
                          double random) {
  const std::array<std::size_t, 1> qubits = {q};
  const auto kets = basis_kets(basis);
  return sample_branch<Outcome, QubitBranch>(s, qubits, kQubitOutcomes, kets, random);
}

QubitBranch measure_qubit(const StateVector& s, std::size_t q, const SingleQubitBasis& basis,
                          RandomStream& rng) {
  return measure_qubit(s, q, basis, rng.next_unit());
}

std::vector<BellBranch> measure_bell_pair_all(const StateVector& s, std::size_t q1,
                                              std::size_t q2) {
  const std::array<std::size_t, 2> qubits = {q1, q2};
  return all_branches<BellKind, BellBranch>(s, qubits, kAllBellKinds, bell_kets());
}

BellBranch measure_bell_pair(const StateVector& s, std::size_t q1, std::size_t q2,
                             double random) {
  const std::array<std::size_t, 2> qubits = {q1, q2};
  return sample_branch<BellKind, BellBranch>(s, qubits, kAllBellKinds, bell_kets(), random);
}

BellBranch measure_bell_pair(const StateVector& s, std::size_t q1, std::size_t q2,
                             RandomStream& rng) {
  return measure_bell_pair(s, q1, q2, rng.next_unit());
}

// ---- analysis -------------------------------------------------------------

DensityMatrix reduced_density(const StateVector& s, std::span<const std::size_t> keep) {
  if (keep.empty()) throw Error(ErrorCode::IndexOutOfRange, "nothing to keep");
  check_distinct(keep, s.num_qubits());
  const IndexSplitter split(s.num_qubits(), keep);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << keep.size());
  const auto rest_dim = static_cast<Eigen::Index>(std::size_t{1} << split.rest.size());
  // psi as a (kept x traced) matrix; rho = M M^dagger.
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, rest_dim);
  for (std::size_t x = 0; x < s.dimension(); ++x) {
    m(static_cast<Eigen::Index>(split.sub(x)), static_cast<Eigen::Index>(split.remainder(x))) =
        s[x];
  }
  return DensityMatrix(m * m.adjoint());
}

DensityMatrix reduced_density(const StateVector& s, std::initializer_list<std::size_t> keep) {
  return reduced_density(s, std::span<const std::size_t>(keep.begin(), keep.size()));
}

double purity(const DensityMatrix& rho) { return rho.entries().cwiseAbs2().sum(); }

double fidelity_pure(const StateVector& s1, const StateVector& s2) {
  if (s1.num_qubits() != s2.num_qubits()) {
    throw Error(ErrorCode::InvalidParameter, "fidelity of states with different widths");
  }
  return std::norm(as_vector(s1).dot(as_vector(s2)));
}

double fidelity_mixed(const DensityMatrix& rho, const StateVector& psi) {
  if (rho.num_qubits() != psi.num_qubits()) {
    throw Error(ErrorCode::InvalidParameter, "fidelity of states with different widths");
  }
  const auto v = as_vector(psi);
  return v.dot(rho.entries() * v).real();
}

bool equal_up_to_global_phase(const StateVector& s1, const StateVector& s2, double tol) {
  return fidelity_pure(s1, s2) >= 1.0 - tol;
}

double max_abs_difference(const StateVector& s1, const StateVector& s2) {
  if (s1.dimension() != s2.dimension()) {
    throw Error(ErrorCode::InvalidParameter, "comparing states with different widths");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < s1.dimension(); ++i) worst = std::max(worst, std::abs(s1[i] - s2[i]));
  return worst;
}

std::size_t index_after_removal(std::size_t q, std::span<const std::size_t> removed) {
  return q - static_cast<std::size_t>(
                 std::count_if(removed.begin(), removed.end(), [q](std::size_t r) { return r < q; }));
}

}  // namespace bcst
