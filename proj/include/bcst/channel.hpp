#pragma once

// Five-qubit BCST channels:
//   (|psi1>_{A1B1} |psi2>_{A2B2} |a>_{C1} +- |psi3>_{A1B1} |psi4>_{A2B2} |b>_{C1}) / sqrt2
// built in the canonical register order (A1, B1, A2, B2, C1).

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcst/bell_kind.hpp"
#include "bcst/qcore.hpp"

namespace bcst {

enum class Sign { Plus, Minus };
enum class Party { Alice, Bob, Charlie };

std::string_view to_string(Sign s);
std::string_view to_string(Party p);

struct ChannelSpec {
  /// psi1..psi4
  std::array<BellKind, 4> pairs{};
  SingleQubitBasis charlie_basis = SingleQubitBasis::hadamard();
  Sign sign = Sign::Plus;

  BellKind psi1() const { return pairs[0]; }
  BellKind psi2() const { return pairs[1]; }
  BellKind psi3() const { return pairs[2]; }
  BellKind psi4() const { return pairs[3]; }
};

/// Text form `psi+,psi+,psi-,psi-;basis=+/-;sign=+`. The basis is `+/-`,
/// `0/1` or `theta=<rad>,phi=<rad>`; basis and sign default to `+/-` and `+`.
ChannelSpec parse_channel_spec(std::string_view text);
std::string to_string(const ChannelSpec& spec);
SingleQubitBasis parse_basis(std::string_view text);
std::string describe_basis(const SingleQubitBasis& basis);

/// Where A1, B1, A2, B2 and C1 sit in a five-qubit register.
struct QubitLayout {
  std::size_t a1 = 0;
  std::size_t b1 = 1;
  std::size_t a2 = 2;
  std::size_t b2 = 3;
  std::size_t c1 = 4;

  static QubitLayout canonical() { return {}; }
  /// Throws InvalidPermutation unless the five positions cover 0..4.
  void validate() const;
  /// Element i is the position of canonical qubit i (A1, B1, A2, B2, C1).
  std::array<std::size_t, 5> positions() const { return {a1, b1, a2, b2, c1}; }
  std::vector<std::size_t> owned_by(Party p) const;
};

/// Moves a canonical-order state onto `layout`.
StateVector place_in_layout(const StateVector& canonical, const QubitLayout& layout);
/// Inverse of place_in_layout.
StateVector to_canonical(const StateVector& placed, const QubitLayout& layout);

bool check_condition(const ChannelSpec& spec);
StateVector build_channel_state(const ChannelSpec& spec);

/// All quadruples satisfying the condition, lexicographic in BellKind order.
std::vector<ChannelSpec> enumerate_valid(const SingleQubitBasis& basis, Sign sign);
/// The 256 quadruples regardless of the condition, same order.
std::vector<ChannelSpec> enumerate_all(const SingleQubitBasis& basis, Sign sign);
std::vector<ChannelSpec> enumerate_invalid(const SingleQubitBasis& basis, Sign sign);

/// The nine printed example quadruples.
std::vector<std::array<BellKind, 4>> paper_table_2();

inline constexpr double kControlTolerance = 1e-9;

struct ControlReport {
  bool dir_ab_controlled = false;  ///< pair A1B1 (Alice -> Bob)
  bool dir_ba_controlled = false;  ///< pair A2B2 (Bob -> Alice)
  double purity_ab = 0.0;
  double purity_ba = 0.0;
};

/// Purity 1/2 on a pair means controlled, 1 means uncontrolled; anything
/// else raises IndeterminateControl.
ControlReport control_report(const StateVector& state, const QubitLayout& layout);

struct CollapseFactorization {
  std::array<BellKind, 2> on_a;  ///< (A1B1, A2B2) after Charlie finds |a>
  std::array<BellKind, 2> on_b;
};

/// Verified by measuring C1 on the built state; ConditionViolated if the
/// spec fails the condition.
CollapseFactorization collapse_factorization(const ChannelSpec& spec);

/// States as printed in the literature, kept as raw amplitude vectors.
struct NamedState {
  std::string name;
  StateVector amplitudes;
  QubitLayout layout;
  /// The class member this state is claimed to equal, expressed canonically.
  ChannelSpec equivalent;
};

NamedState zha_state();
NamedState zha_prime_state();
NamedState li_state();
std::optional<NamedState> named_state(std::string_view name);

struct PublishedCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;  ///< 1 - fidelity between the printed and rebuilt states
  std::string detail;
};

/// Zha and Zha' rebuilt from their class members; Li rebuilt from its
/// factorized form, shown to violate the condition and to leave one pair
/// pure.
std::vector<PublishedCheck> verify_published_states();

}  // namespace bcst
