#include "bcst/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "bcst/error.hpp"

namespace bcst {
namespace {

constexpr std::size_t kInputA = 5;
constexpr std::size_t kInputB = 6;
constexpr std::size_t kQubitA1 = 0;
constexpr std::size_t kQubitB1 = 1;
constexpr std::size_t kQubitA2 = 2;
constexpr std::size_t kQubitB2 = 3;
constexpr std::size_t kQubitC1 = 4;

void require_condition(const ChannelSpec& spec) {
  if (!check_condition(spec)) {
    throw Error(ErrorCode::ConditionViolated, to_string(spec) + " repeats a Bell state");
  }
}

StateVector initial_register(const ChannelSpec& spec, const UnknownQubit& a,
                             const UnknownQubit& b) {
  return tensor({build_channel_state(spec), a.state(), b.state()});
}

// Bell pairs the receivers believe they share.
std::array<BellKind, 2> assumed_pairs(const ChannelSpec& spec, Outcome charlie, bool disclose) {
  if (disclose && charlie == Outcome::B) return {spec.psi3(), spec.psi4()};
  return {spec.psi1(), spec.psi2()};
}

struct Corrected {
  double fidelity_a_to_b;
  double fidelity_b_to_a;
  PauliKind at_bob;
  PauliKind at_alice;
};

Corrected correct_and_score(StateVector state, const ChannelSpec& spec, Outcome charlie,
                            Smo smo_a, Smo smo_b, bool disclose, const UnknownQubit& input_a,
                            const UnknownQubit& input_b) {
  const auto pairs = assumed_pairs(spec, charlie, disclose);
  const auto& table = correction_table();
  const PauliKind at_bob = table.at(pairs[0], smo_a);
  const PauliKind at_alice = table.at(pairs[1], smo_b);
  state = apply_1q(state, kQubitB1, pauli_matrix(at_bob));
  state = apply_1q(state, kQubitA2, pauli_matrix(at_alice));
  return {fidelity_mixed(reduced_density(state, {kQubitB1}), input_a.state()),
          fidelity_mixed(reduced_density(state, {kQubitA2}), input_b.state()), at_bob, at_alice};
}

BcstResult run_once(const ChannelSpec& spec, const UnknownQubit& input_a,
                    const UnknownQubit& input_b, bool disclose, RandomStream& rng) {
  BcstResult result;
  auto& log = result.transcript;
  auto state = initial_register(spec, input_a, input_b);

  auto charlie = measure_qubit(state, kQubitC1, spec.charlie_basis, rng);
  result.charlie_outcome = charlie.outcome;
  log.record(Party::Charlie, Action::Measure,
             "qubit=C1 basis=" + describe_basis(spec.charlie_basis) +
                 " outcome=" + std::string(to_string(charlie.outcome)));
  if (disclose) {
    const std::string msg = "charlie_outcome=" + std::string(to_string(charlie.outcome));
    log.record(Party::Charlie, Action::SendClassical, msg, Party::Alice);
    log.record(Party::Charlie, Action::SendClassical, msg, Party::Bob);
  }

  auto alice = measure_bell_pair(charlie.collapsed, kInputA, kQubitA1, rng);
  result.smo_a = smo_of(alice.outcome);
  log.record(Party::Alice, Action::Measure,
             "qubits=(input_a,A1) outcome=" + std::string(to_string(alice.outcome)));

  auto bob = measure_bell_pair(alice.collapsed, kInputB, kQubitB2, rng);
  result.smo_b = smo_of(bob.outcome);
  log.record(Party::Bob, Action::Measure,
             "qubits=(input_b,B2) outcome=" + std::string(to_string(bob.outcome)));

  log.record(Party::Alice, Action::SendClassical, "smo=" + to_string(result.smo_a), Party::Bob);
  log.record(Party::Bob, Action::SendClassical, "smo=" + to_string(result.smo_b), Party::Alice);

  const auto c = correct_and_score(bob.collapsed, spec, charlie.outcome, result.smo_a,
                                   result.smo_b, disclose, input_a, input_b);
  log.record(Party::Bob, Action::ApplyCorrection,
             "qubit=B1 pauli=" + std::string(to_string(c.at_bob)));
  log.record(Party::Alice, Action::ApplyCorrection,
             "qubit=A2 pauli=" + std::string(to_string(c.at_alice)));
  result.fidelity_a_to_b = c.fidelity_a_to_b;
  result.fidelity_b_to_a = c.fidelity_b_to_a;
  result.correction_at_bob = c.at_bob;
  result.correction_at_alice = c.at_alice;
  return result;
}

}  // namespace

UnknownQubit::UnknownQubit(Amplitude alpha, Amplitude beta) : alpha_(alpha), beta_(beta) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kTolerance) {
    throw Error(ErrorCode::InvalidState, "unknown qubit is not normalized");
  }
}

UnknownQubit::UnknownQubit(const StateVector& s) : UnknownQubit(s.num_qubits() == 1 ? s[0] : 0.0,
                                                               s.num_qubits() == 1 ? s[1] : 0.0) {}

std::vector<UnknownQubit> fixed_test_inputs() {
  return {UnknownQubit(1.0, 0.0), UnknownQubit(0.0, 1.0), UnknownQubit(0.6, 0.8)};
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Measure: return "measure";
    case Action::SendClassical: return "send-classical";
    case Action::ApplyCorrection: return "apply-correction";
  }
  return "?";
}

void Transcript::record(Party party, Action action, std::string payload,
                        std::optional<Party> recipient) {
  events_.push_back({events_.size(), party, action, recipient, std::move(payload)});
}

bool is_causal(const Transcript& t, bool disclosed) {
  std::map<Party, bool> has_smo;
  std::map<Party, bool> has_disclosure;
  for (const auto& e : t.events()) {
    if (e.action == Action::SendClassical) {
      if (!e.recipient) return false;
      if (e.party == Party::Charlie) {
        if (!disclosed) return false;
        has_disclosure[*e.recipient] = true;
      } else {
        has_smo[*e.recipient] = true;
      }
    } else if (e.action == Action::ApplyCorrection) {
      if (!has_smo[e.party]) return false;
      if (disclosed && !has_disclosure[e.party]) return false;
    }
  }
  return true;
}

const CorrectionTable& correction_table() {
  static const CorrectionTable table = derive_correction_table();
  return table;
}

BcstResult run_bcst(const ChannelSpec& spec, const UnknownQubit& input_a,
                    const UnknownQubit& input_b, bool disclose, RandomStream& rng) {
  require_condition(spec);
  return run_once(spec, input_a, input_b, disclose, rng);
}

ExhaustiveResult enumerate_branches(const ChannelSpec& spec, const UnknownQubit& input_a,
                                    const UnknownQubit& input_b, bool disclose) {
  ExhaustiveResult out;
  const auto state = initial_register(spec, input_a, input_b);
  double weighted_ab = 0.0;
  double weighted_ba = 0.0;
  for (const auto& charlie : measure_qubit_all(state, kQubitC1, spec.charlie_basis)) {
    for (const auto& alice : measure_bell_pair_all(charlie.collapsed, kInputA, kQubitA1)) {
      for (const auto& bob : measure_bell_pair_all(alice.collapsed, kInputB, kQubitB2)) {
        const auto c = correct_and_score(bob.collapsed, spec, charlie.outcome,
                                         smo_of(alice.outcome), smo_of(bob.outcome), disclose,
                                         input_a, input_b);
        BranchRecord r{charlie.outcome, alice.outcome, bob.outcome,
                       charlie.probability * alice.probability * bob.probability,
                       c.fidelity_a_to_b, c.fidelity_b_to_a};
        out.total_probability += r.probability;
        weighted_ab += r.probability * r.fidelity_a_to_b;
        weighted_ba += r.probability * r.fidelity_b_to_a;
        out.min_fidelity_a_to_b = std::min(out.min_fidelity_a_to_b, r.fidelity_a_to_b);
        out.max_fidelity_a_to_b = std::max(out.max_fidelity_a_to_b, r.fidelity_a_to_b);
        out.min_fidelity_b_to_a = std::min(out.min_fidelity_b_to_a, r.fidelity_b_to_a);
        out.max_fidelity_b_to_a = std::max(out.max_fidelity_b_to_a, r.fidelity_b_to_a);
        out.branches.push_back(r);
      }
    }
  }
  out.mean_fidelity_a_to_b = weighted_ab / out.total_probability;
  out.mean_fidelity_b_to_a = weighted_ba / out.total_probability;
  return out;
}

ExhaustiveResult run_bcst_exhaustive(const ChannelSpec& spec, const UnknownQubit& input_a,
                                     const UnknownQubit& input_b, bool disclose) {
  require_condition(spec);
  return enumerate_branches(spec, input_a, input_b, disclose);
}

InfidelityEstimate average_infidelity_without_disclosure(const ChannelSpec& spec,
                                                         std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw Error(ErrorCode::EmptySample, "at least one trial is required");
  double sum_ab = 0.0;
  double sum_ba = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    auto rng = RandomStream::for_trial(seed, i);
    const UnknownQubit a(haar_random_qubit(rng));
    const UnknownQubit b(haar_random_qubit(rng));
    const auto r = run_once(spec, a, b, false, rng);
    sum_ab += 1.0 - r.fidelity_a_to_b;
    sum_ba += 1.0 - r.fidelity_b_to_a;
  }
  const auto n = static_cast<double>(trials);
  return {sum_ab / n, sum_ba / n, trials};
}

NecessityWitness disclosure_necessity_witness(const ChannelSpec& spec) {
  const auto inputs = fixed_test_inputs();
  NecessityWitness best;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto result = enumerate_branches(spec, inputs[i], inputs[i], false);
    for (const auto& b : result.branches) {
      if (b.fidelity_a_to_b < best.fidelity) best = {i, b, true, b.fidelity_a_to_b};
      if (b.fidelity_b_to_a < best.fidelity) best = {i, b, false, b.fidelity_b_to_a};
    }
  }
  return best;
}

}  // namespace bcst
