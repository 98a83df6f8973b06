#pragma once

// Perfect bidirectional controlled teleportation over a five-qubit channel.
//
// Register: channel qubits in canonical order (A1, B1, A2, B2, C1) followed
// by Alice's input (5) and Bob's input (6). Alice teleports to Bob through
// A1B1, Bob to Alice through A2B2.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcst/bell.hpp"
#include "bcst/channel.hpp"

namespace bcst {

class UnknownQubit {
 public:
  /// Requires |alpha|^2 + |beta|^2 = 1 within 1e-12.
  UnknownQubit(Amplitude alpha, Amplitude beta);
  explicit UnknownQubit(const StateVector& s);

  Amplitude alpha() const noexcept { return alpha_; }
  Amplitude beta() const noexcept { return beta_; }
  StateVector state() const { return StateVector::qubit(alpha_, beta_); }

 private:
  Amplitude alpha_;
  Amplitude beta_;
};

/// (1,0), (0,1), (0.6,0.8)
std::vector<UnknownQubit> fixed_test_inputs();

enum class Action { Measure, SendClassical, ApplyCorrection };
std::string_view to_string(Action a);

struct TranscriptEvent {
  std::size_t step = 0;
  Party party = Party::Alice;
  Action action = Action::Measure;
  std::optional<Party> recipient;  ///< set for SendClassical
  std::string payload;
};

class Transcript {
 public:
  void record(Party party, Action action, std::string payload,
              std::optional<Party> recipient = std::nullopt);
  const std::vector<TranscriptEvent>& events() const noexcept { return events_; }

 private:
  std::vector<TranscriptEvent> events_;
};

/// Every correction follows the message that carries its sender outcome and,
/// when Charlie disclosed, his disclosure to the correcting party. With
/// `disclosed` false there must be no message from Charlie at all.
bool is_causal(const Transcript& t, bool disclosed);

struct BcstResult {
  double fidelity_a_to_b = 0.0;
  double fidelity_b_to_a = 0.0;
  Transcript transcript;
  Outcome charlie_outcome = Outcome::A;
  Smo smo_a;
  Smo smo_b;
  PauliKind correction_at_bob = PauliKind::I;
  PauliKind correction_at_alice = PauliKind::I;
};

/// The derived perfect-teleportation table, computed once.
const CorrectionTable& correction_table();

/// One sampled run. Randomness is consumed Charlie, Alice, Bob. Without
/// disclosure each receiver assumes Charlie found |a>. ConditionViolated for
/// specs outside the class.
BcstResult run_bcst(const ChannelSpec& spec, const UnknownQubit& input_a,
                    const UnknownQubit& input_b, bool disclose, RandomStream& rng);

struct BranchRecord {
  Outcome charlie = Outcome::A;
  BellKind alice_outcome = BellKind::PsiPlus;
  BellKind bob_outcome = BellKind::PsiPlus;
  double probability = 0.0;
  double fidelity_a_to_b = 0.0;
  double fidelity_b_to_a = 0.0;
};

struct ExhaustiveResult {
  std::vector<BranchRecord> branches;
  double total_probability = 0.0;
  double min_fidelity_a_to_b = 1.0;
  double max_fidelity_a_to_b = 0.0;
  double min_fidelity_b_to_a = 1.0;
  double max_fidelity_b_to_a = 0.0;
  /// Probability-weighted mean fidelities.
  double mean_fidelity_a_to_b = 0.0;
  double mean_fidelity_b_to_a = 0.0;
};

/// Every (Charlie, Alice, Bob) outcome with its exact probability. Accepts
/// any spec, including ones that fail the condition.
ExhaustiveResult enumerate_branches(const ChannelSpec& spec, const UnknownQubit& input_a,
                                    const UnknownQubit& input_b, bool disclose);

/// enumerate_branches restricted to valid specs.
ExhaustiveResult run_bcst_exhaustive(const ChannelSpec& spec, const UnknownQubit& input_a,
                                     const UnknownQubit& input_b, bool disclose = true);

struct InfidelityEstimate {
  double a_to_b = 0.0;
  double b_to_a = 0.0;
  std::size_t trials = 0;
};

/// Monte Carlo mean of 1 - fidelity over Haar-random inputs with the
/// controller's outcome withheld. Trial i draws from
/// RandomStream::for_trial(seed, i). Accepts specs outside the class so an
/// uncontrolled direction can be measured. EmptySample for zero trials.
InfidelityEstimate average_infidelity_without_disclosure(const ChannelSpec& spec,
                                                         std::size_t trials,
                                                         std::uint64_t seed = kDefaultSeed);

struct NecessityWitness {
  std::size_t input_index = 0;  ///< into fixed_test_inputs()
  BranchRecord branch;
  bool a_to_b = true;  ///< direction that failed
  double fidelity = 1.0;
};

/// Lowest-fidelity branch over the fixed inputs with disclosure withheld.
NecessityWitness disclosure_necessity_witness(const ChannelSpec& spec);

}  // namespace bcst
