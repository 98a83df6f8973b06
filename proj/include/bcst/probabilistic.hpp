#pragma once

// Probabilistic BCST over non-maximally entangled pairs
//   psi'+- = a|00> +- b|11>,   phi'+- = a|01> +- b|10>,   b < a.
//
// Each generalized pair is written sender qubit first: pair 1 on (A1, B1),
// pair 2 on (B2, A2). After the sender's Bell measurement the receiver
// attaches an ancilla |0>, applies U (psi' family) or U1 (phi' family) to
// (data, ancilla) and measures the ancilla; outcome 0 heralds success.

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "bcst/bell.hpp"
#include "bcst/channel.hpp"
#include "bcst/protocol.hpp"

namespace bcst {

class GenBellParams {
 public:
  /// Requires a, b > 0, a^2 + b^2 = 1, b <= a (InvalidRatio otherwise) and
  /// a away from 1/sqrt2.
  GenBellParams(double a, double b);

  /// Orders the pair so that b is the smaller coefficient.
  static GenBellParams from_unordered(double x, double y);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

 private:
  double a_;
  double b_;
};

struct GenBellPair {
  BellKind kind = BellKind::PsiPlus;
  GenBellParams params{0.8, 0.6};

  bool psi_family() const { return kind == BellKind::PsiPlus || kind == BellKind::PsiMinus; }
  /// Two-qubit state, sender qubit first.
  StateVector state() const;
};

struct ProbChannelSpec {
  /// psi1..psi4; psi1 and psi3 sit on pair 1, psi2 and psi4 on pair 2.
  std::array<GenBellPair, 4> pairs;
  SingleQubitBasis charlie_basis = SingleQubitBasis::hadamard();
  Sign sign = Sign::Plus;

  /// Kinds from `kinds`, pair 1 coefficients on psi1/psi3, pair 2 on psi2/psi4.
  static ProbChannelSpec from(const ChannelSpec& kinds, const GenBellParams& pair1,
                              const GenBellParams& pair2);
  ChannelSpec kinds() const;
};

/// `a1=0.8,b1=0.6,a2=0.8,b2=0.6`
std::pair<GenBellParams, GenBellParams> parse_prob_params(std::string_view text);

bool check_condition(const ProbChannelSpec& spec);
/// Canonical order (A1, B1, A2, B2, C1).
StateVector build_channel_state(const ProbChannelSpec& spec);

/// Printed conversion unitary on (data, ancilla). InvalidRatio if b > a.
Mat4 matrix_U(double a, double b);
/// Printed U1 = U (X (x) I).
Mat4 matrix_U1(double a, double b);
Mat4 conversion_unitary(const GenBellPair& pair);

/// Table 3 as printed, loaded from the embedded data file.
CorrectionTable paper_table_3();
/// Rebuilt by simulating each (pair, outcome) branch through the
/// conversion unitary and the ancilla-0 projection.
CorrectionTable derive_prob_correction_table(const GenBellParams& params = GenBellParams(0.8, 0.6));
/// derive_prob_correction_table() computed once.
const CorrectionTable& prob_correction_table();

/// Receiver's data qubit after the conversion step heralds success.
StateVector convert_success_branch(const StateVector& received, const GenBellPair& pair);

struct DirectionResult {
  bool success = false;
  double fidelity = 0.0;
  int ancilla_outcome = 0;
  Smo smo;
  std::optional<PauliKind> correction;  ///< applied only on success
};

struct ProbResult {
  DirectionResult a_to_b;
  DirectionResult b_to_a;
  Outcome charlie_outcome = Outcome::A;
  Transcript transcript;
};

/// One sampled run. Randomness is consumed Charlie, Alice, Bob, Bob's
/// ancilla, Alice's ancilla. Charlie always discloses.
ProbResult run_pbcst(const ProbChannelSpec& spec, const UnknownQubit& input_a,
                     const UnknownQubit& input_b, RandomStream& rng);

struct ProbBranch {
  Outcome charlie = Outcome::A;
  BellKind alice_outcome = BellKind::PsiPlus;
  BellKind bob_outcome = BellKind::PsiPlus;
  int ancilla_bob = 0;    ///< herald for Alice -> Bob
  int ancilla_alice = 0;  ///< herald for Bob -> Alice
  double probability = 0.0;
  double fidelity_a_to_b = 0.0;
  double fidelity_b_to_a = 0.0;
};

struct ProbExhaustive {
  std::vector<ProbBranch> branches;
  double total_probability = 0.0;
  double success_a_to_b = 0.0;
  double success_b_to_a = 0.0;
  /// Minimum fidelity over branches where that direction succeeded.
  double min_success_fidelity_a_to_b = 1.0;
  double min_success_fidelity_b_to_a = 1.0;
};

ProbExhaustive enumerate_prob_branches(const ProbChannelSpec& spec, const UnknownQubit& input_a,
                                       const UnknownQubit& input_b);

struct SuccessProbability {
  double analytic_a_to_b = 0.0;
  double analytic_b_to_a = 0.0;
  double numeric_a_to_b = 0.0;
  double numeric_b_to_a = 0.0;
};

/// Analytic: 2 b^2 of the pair shared in each Charlie branch, averaged over
/// the two branches. Numeric: exhaustive branch enumeration.
SuccessProbability success_probability(const ProbChannelSpec& spec);

}  // namespace bcst
