#include "bcst/probabilistic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bcst/embedded_tables.hpp"
#include "bcst/error.hpp"
#include "text_util.hpp"

namespace bcst {
namespace {

// Register after both senders' Bell measurements remove their qubits:
// B1, A2, C1, then the two ancillas.
constexpr std::size_t kInputA = 5;
constexpr std::size_t kInputB = 6;
constexpr std::size_t kReceiverBob = 0;    // B1
constexpr std::size_t kReceiverAlice = 1;  // A2
constexpr std::size_t kAncillaBob = 3;
constexpr std::size_t kAncillaAlice = 4;

constexpr std::array<std::size_t, 2> kAliceMeasured = {kInputA, 0};  // (input_a, A1)
// In the register left after Alice's measurement: B1 A2 B2 C1 input_b.
constexpr std::size_t kInputBAfterAlice = 4;
constexpr std::size_t kB2AfterAlice = 2;

void validate_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || std::abs(a * a + b * b - 1.0) > kTolerance) {
    throw Error(ErrorCode::InvalidParameter, "coefficients must be positive with a^2 + b^2 = 1");
  }
  if (b > a) throw Error(ErrorCode::InvalidRatio, "conversion unitary needs b <= a");
}

StateVector swap_pair(const StateVector& s) {
  const std::array<std::size_t, 2> perm = {1, 0};
  return permute_qubits(s, perm);
}

std::array<const GenBellPair*, 2> shared_pairs(const ProbChannelSpec& spec, Outcome charlie) {
  if (charlie == Outcome::A) return {&spec.pairs[0], &spec.pairs[1]};
  return {&spec.pairs[2], &spec.pairs[3]};
}

double receiver_fidelity(const StateVector& state, std::size_t q,
                                const UnknownQubit& input) {
  return fidelity_mixed(reduced_density(state, {q}), input.state());
}

// Applies conversion unitaries for both receivers; returns the 5-qubit
// register B1 A2 C1 anc_bob anc_alice.
StateVector convert_both(const StateVector& after_bell, const ProbChannelSpec& spec,
                         Outcome charlie) {
  const auto pairs = shared_pairs(spec, charlie);
  auto state = tensor({after_bell, StateVector::basis(1, 0), StateVector::basis(1, 0)});
  state = apply_2q(state, kReceiverBob, kAncillaBob, conversion_unitary(*pairs[0]));
  state = apply_2q(state, kReceiverAlice, kAncillaAlice, conversion_unitary(*pairs[1]));
  return state;
}

StateVector correct_if_heralded(StateVector state, std::size_t receiver, int ancilla,
                                const GenBellPair& pair, Smo smo,
                                std::optional<PauliKind>& applied) {
  if (ancilla != 0) return state;
  applied = prob_correction_table().at(pair.kind, smo);
  return apply_1q(state, receiver, pauli_matrix(*applied));
}

int ancilla_bit(Outcome o) { return o == Outcome::A ? 0 : 1; }

}  // namespace

// ---- parameters -----------------------------------------------------------

GenBellParams::GenBellParams(double a, double b) : a_(a), b_(b) {
  validate_ratio(a, b);
  if (std::abs(a - 1.0 / std::numbers::sqrt2) < 1e-9) {
    throw Error(ErrorCode::InvalidParameter,
                "a = 1/sqrt2 is the maximally entangled case; use the perfect protocol");
  }
}

GenBellParams GenBellParams::from_unordered(double x, double y) {
  return x >= y ? GenBellParams(x, y) : GenBellParams(y, x);
}

StateVector GenBellPair::state() const {
  const double a = params.a();
  const double b = params.b();
  switch (kind) {
    case BellKind::PsiPlus: return StateVector({a, 0.0, 0.0, b});
    case BellKind::PsiMinus: return StateVector({a, 0.0, 0.0, -b});
    case BellKind::PhiPlus: return StateVector({0.0, a, b, 0.0});
    case BellKind::PhiMinus: return StateVector({0.0, a, -b, 0.0});
  }
  throw Error(ErrorCode::InvalidParameter, "unknown Bell kind");
}

ProbChannelSpec ProbChannelSpec::from(const ChannelSpec& kinds, const GenBellParams& pair1,
                                      const GenBellParams& pair2) {
  ProbChannelSpec spec;
  spec.pairs = {GenBellPair{kinds.psi1(), pair1}, GenBellPair{kinds.psi2(), pair2},
                GenBellPair{kinds.psi3(), pair1}, GenBellPair{kinds.psi4(), pair2}};
  spec.charlie_basis = kinds.charlie_basis;
  spec.sign = kinds.sign;
  return spec;
}

ChannelSpec ProbChannelSpec::kinds() const {
  return ChannelSpec{{pairs[0].kind, pairs[1].kind, pairs[2].kind, pairs[3].kind},
                     charlie_basis,
                     sign};
}

std::pair<GenBellParams, GenBellParams> parse_prob_params(std::string_view text) {
  std::array<std::optional<double>, 4> values;
  constexpr std::array<std::string_view, 4> keys = {"a1", "b1", "a2", "b2"};
  for (auto part : detail::split(detail::trim(text), ',')) {
    part = detail::trim(part);
    const auto eq = part.find('=');
    bool matched = false;
    if (eq != std::string_view::npos) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (part.substr(0, eq) != keys[i]) continue;
        const std::string value(detail::trim(part.substr(eq + 1)));
        std::size_t used = 0;
        try {
          values[i] = std::stod(value, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != value.size() || value.empty()) {
          throw Error(ErrorCode::ParseError, "invalid number in '" + std::string(part) + "'");
        }
        matched = true;
      }
    }
    if (!matched) throw Error(ErrorCode::ParseError, "unexpected '" + std::string(part) + "'");
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!values[i]) throw Error(ErrorCode::ParseError, "missing " + std::string(keys[i]));
  }
  return {GenBellParams(*values[0], *values[1]), GenBellParams(*values[2], *values[3])};
}

bool check_condition(const ProbChannelSpec& spec) { return check_condition(spec.kinds()); }

StateVector build_channel_state(const ProbChannelSpec& spec) {
  const auto term = [&](std::size_t p1, std::size_t p2, const StateVector& charlie) {
    // Pair 2 is written (B2, A2); the canonical register stores (A2, B2).
    return tensor({spec.pairs[p1].state(), swap_pair(spec.pairs[p2].state()), charlie});
  };
  const auto first = term(0, 1, spec.charlie_basis.state_a());
  const auto second = term(2, 3, spec.charlie_basis.state_b());
  const double sign = spec.sign == Sign::Plus ? 1.0 : -1.0;
  std::vector<Amplitude> amps(first.dimension());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    amps[i] = (first[i] + sign * second[i]) / std::numbers::sqrt2;
  }
  return StateVector(std::move(amps));
}

// ---- conversion unitaries -------------------------------------------------

Mat4 matrix_U(double a, double b) {
  validate_ratio(a, b);
  const double r = b / a;
  const double c = std::sqrt(1.0 - r * r);
  Mat4 u;
  u << r, c, 0, 0,
       0, 0, 0, -1,
       0, 0, 1, 0,
       c, -r, 0, 0;
  return u;
}

Mat4 matrix_U1(double a, double b) {
  validate_ratio(a, b);
  const double r = b / a;
  const double c = std::sqrt(1.0 - r * r);
  Mat4 u;
  u << 0, 0, r, c,
       0, -1, 0, 0,
       1, 0, 0, 0,
       0, 0, c, -r;
  return u;
}

Mat4 conversion_unitary(const GenBellPair& pair) {
  return pair.psi_family() ? matrix_U(pair.params.a(), pair.params.b())
                           : matrix_U1(pair.params.a(), pair.params.b());
}

StateVector convert_success_branch(const StateVector& received, const GenBellPair& pair) {
  auto joint = tensor({received, StateVector::basis(1, 0)});
  joint = apply_2q(joint, 0, 1, conversion_unitary(pair));
  const std::array<std::size_t, 1> ancilla = {1};
  double p = 0.0;
  auto rest = project_onto(joint, ancilla, StateVector::basis(1, 0), p);
  if (p < kDegenerateProbability) {
    throw Error(ErrorCode::DegenerateBranch, "conversion never heralds success here");
  }
  return StateVector::normalized(std::move(rest));
}

// ---- tables ---------------------------------------------------------------

CorrectionTable paper_table_3() {
  static const CorrectionTable table = parse_correction_table(embedded::kTable3);
  return table;
}

CorrectionTable derive_prob_correction_table(const GenBellParams& params) {
  const auto inputs = certification_inputs();
  CorrectionTable table;
  for (BellKind kind : kAllBellKinds) {
    const GenBellPair pair{kind, params};
    const auto shared = pair.state();
    for (Smo smo : kAllSmos) {
      const auto p = unique_correction(
          [&](const StateVector& in) {
            return convert_success_branch(teleport_branch(in, shared, smo), pair);
          },
          inputs);
      table.set(kind, smo, p);
    }
  }
  return table;
}

const CorrectionTable& prob_correction_table() {
  static const CorrectionTable table = derive_prob_correction_table();
  return table;
}

// ---- protocol -------------------------------------------------------------

ProbResult run_pbcst(const ProbChannelSpec& spec, const UnknownQubit& input_a,
                     const UnknownQubit& input_b, RandomStream& rng) {
  if (!check_condition(spec)) {
    throw Error(ErrorCode::ConditionViolated, to_string(spec.kinds()) + " repeats a Bell kind");
  }
  ProbResult result;
  auto& log = result.transcript;
  const auto state = tensor({build_channel_state(spec), input_a.state(), input_b.state()});

  const auto charlie = measure_qubit(state, 4, spec.charlie_basis, rng);
  result.charlie_outcome = charlie.outcome;
  log.record(Party::Charlie, Action::Measure,
             "qubit=C1 basis=" + describe_basis(spec.charlie_basis) +
                 " outcome=" + std::string(to_string(charlie.outcome)));
  const std::string disclosure = "charlie_outcome=" + std::string(to_string(charlie.outcome));
  log.record(Party::Charlie, Action::SendClassical, disclosure, Party::Alice);
  log.record(Party::Charlie, Action::SendClassical, disclosure, Party::Bob);

  const auto alice = measure_bell_pair(charlie.collapsed, kAliceMeasured[0], kAliceMeasured[1], rng);
  result.a_to_b.smo = smo_of(alice.outcome);
  log.record(Party::Alice, Action::Measure,
             "qubits=(input_a,A1) outcome=" + std::string(to_string(alice.outcome)));
  const auto bob = measure_bell_pair(alice.remainder, kInputBAfterAlice, kB2AfterAlice, rng);
  result.b_to_a.smo = smo_of(bob.outcome);
  log.record(Party::Bob, Action::Measure,
             "qubits=(input_b,B2) outcome=" + std::string(to_string(bob.outcome)));
  log.record(Party::Alice, Action::SendClassical, "smo=" + to_string(result.a_to_b.smo),
             Party::Bob);
  log.record(Party::Bob, Action::SendClassical, "smo=" + to_string(result.b_to_a.smo),
             Party::Alice);

  const auto pairs = shared_pairs(spec, charlie.outcome);
  auto converted = convert_both(bob.remainder, spec, charlie.outcome);
  log.record(Party::Bob, Action::Measure,
             std::string("ancilla conversion=") + (pairs[0]->psi_family() ? "U" : "U1"));
  const auto herald_bob = measure_qubit(converted, kAncillaBob, SingleQubitBasis::computational(), rng);
  result.a_to_b.ancilla_outcome = ancilla_bit(herald_bob.outcome);
  log.record(Party::Alice, Action::Measure,
             std::string("ancilla conversion=") + (pairs[1]->psi_family() ? "U" : "U1"));
  const auto herald_alice =
      measure_qubit(herald_bob.collapsed, kAncillaAlice, SingleQubitBasis::computational(), rng);
  result.b_to_a.ancilla_outcome = ancilla_bit(herald_alice.outcome);

  auto final_state = herald_alice.collapsed;
  final_state = correct_if_heralded(final_state, kReceiverBob, result.a_to_b.ancilla_outcome,
                                    *pairs[0], result.a_to_b.smo, result.a_to_b.correction);
  final_state = correct_if_heralded(final_state, kReceiverAlice, result.b_to_a.ancilla_outcome,
                                    *pairs[1], result.b_to_a.smo, result.b_to_a.correction);
  for (auto [dir, party, qubit] :
       {std::tuple{&result.a_to_b, Party::Bob, "B1"}, std::tuple{&result.b_to_a, Party::Alice, "A2"}}) {
    dir->success = dir->ancilla_outcome == 0;
    log.record(party, Action::ApplyCorrection,
               std::string("qubit=") + qubit + " herald=" + std::to_string(dir->ancilla_outcome) +
                   " pauli=" + (dir->correction ? std::string(to_string(*dir->correction)) : "none"));
  }
  result.a_to_b.fidelity = receiver_fidelity(final_state, kReceiverBob, input_a);
  result.b_to_a.fidelity = receiver_fidelity(final_state, kReceiverAlice, input_b);
  return result;
}

ProbExhaustive enumerate_prob_branches(const ProbChannelSpec& spec, const UnknownQubit& input_a,
                                       const UnknownQubit& input_b) {
  if (!check_condition(spec)) {
    throw Error(ErrorCode::ConditionViolated, to_string(spec.kinds()) + " repeats a Bell kind");
  }
  ProbExhaustive out;
  const auto state = tensor({build_channel_state(spec), input_a.state(), input_b.state()});
  const auto z_basis = SingleQubitBasis::computational();
  for (const auto& charlie : measure_qubit_all(state, 4, spec.charlie_basis)) {
    const auto pairs = shared_pairs(spec, charlie.outcome);
    for (const auto& alice :
         measure_bell_pair_all(charlie.collapsed, kAliceMeasured[0], kAliceMeasured[1])) {
      for (const auto& bob :
           measure_bell_pair_all(alice.remainder, kInputBAfterAlice, kB2AfterAlice)) {
        const auto converted = convert_both(bob.remainder, spec, charlie.outcome);
        for (const auto& hb : measure_qubit_all(converted, kAncillaBob, z_basis)) {
          for (const auto& ha : measure_qubit_all(hb.collapsed, kAncillaAlice, z_basis)) {
            ProbBranch r;
            r.charlie = charlie.outcome;
            r.alice_outcome = alice.outcome;
            r.bob_outcome = bob.outcome;
            r.ancilla_bob = ancilla_bit(hb.outcome);
            r.ancilla_alice = ancilla_bit(ha.outcome);
            r.probability = charlie.probability * alice.probability * bob.probability *
                            hb.probability * ha.probability;
            std::optional<PauliKind> unused;
            auto s = correct_if_heralded(ha.collapsed, kReceiverBob, r.ancilla_bob, *pairs[0],
                                         smo_of(alice.outcome), unused);
            s = correct_if_heralded(s, kReceiverAlice, r.ancilla_alice, *pairs[1],
                                    smo_of(bob.outcome), unused);
            r.fidelity_a_to_b = receiver_fidelity(s, kReceiverBob, input_a);
            r.fidelity_b_to_a = receiver_fidelity(s, kReceiverAlice, input_b);
            out.total_probability += r.probability;
            if (r.ancilla_bob == 0) {
              out.success_a_to_b += r.probability;
              out.min_success_fidelity_a_to_b =
                  std::min(out.min_success_fidelity_a_to_b, r.fidelity_a_to_b);
            }
            if (r.ancilla_alice == 0) {
              out.success_b_to_a += r.probability;
              out.min_success_fidelity_b_to_a =
                  std::min(out.min_success_fidelity_b_to_a, r.fidelity_b_to_a);
            }
            out.branches.push_back(r);
          }
        }
      }
    }
  }
  return out;
}

SuccessProbability success_probability(const ProbChannelSpec& spec) {
  SuccessProbability out;
  const auto branch = [](const GenBellPair& p) { return 2.0 * p.params.b() * p.params.b(); };
  out.analytic_a_to_b = 0.5 * (branch(spec.pairs[0]) + branch(spec.pairs[2]));
  out.analytic_b_to_a = 0.5 * (branch(spec.pairs[1]) + branch(spec.pairs[3]));
  const UnknownQubit probe(0.6, 0.8);
  const auto enumerated = enumerate_prob_branches(spec, probe, probe);
  out.numeric_a_to_b = enumerated.success_a_to_b;
  out.numeric_b_to_a = enumerated.success_b_to_a;
  return out;
}

}  // namespace bcst
