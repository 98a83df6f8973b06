#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bcst/bell_kind.hpp"
#include "bcst/qcore.hpp"

namespace bcst {

/// Receiver corrections. iY is the real matrix [[0,1],[-1,0]] (= Z X).
enum class PauliKind { I, X, Z, iY };

inline constexpr std::array<PauliKind, 4> kAllPaulis = {PauliKind::I, PauliKind::X, PauliKind::Z,
                                                        PauliKind::iY};

std::string_view to_string(PauliKind p);
std::optional<PauliKind> parse_pauli(std::string_view text);
Mat2 pauli_matrix(PauliKind p);

/// Sender's measurement outcome: two classical bits. `phase` is the first
/// printed bit, `parity` the second: 00 psi+, 01 phi+, 10 psi-, 11 phi-.
struct Smo {
  bool phase = false;
  bool parity = false;

  constexpr std::size_t index() const { return (phase ? 2U : 0U) + (parity ? 1U : 0U); }
  static constexpr Smo from_index(std::size_t i) { return Smo{(i & 2U) != 0, (i & 1U) != 0}; }
  friend constexpr bool operator==(Smo, Smo) = default;
};

inline constexpr std::array<Smo, 4> kAllSmos = {Smo::from_index(0), Smo::from_index(1),
                                                Smo::from_index(2), Smo::from_index(3)};

Smo smo_of(BellKind outcome);
BellKind bell_of(Smo smo);
std::string to_string(Smo smo);
std::optional<Smo> parse_smo(std::string_view text);

/// (shared Bell state, sender outcome) -> receiver correction, all 16 cells.
class CorrectionTable {
 public:
  CorrectionTable() = default;
  explicit CorrectionTable(std::array<PauliKind, 16> cells) : cells_(cells) {}

  PauliKind at(BellKind shared, Smo smo) const { return cells_[slot(shared, smo)]; }
  void set(BellKind shared, Smo smo, PauliKind p) { cells_[slot(shared, smo)] = p; }

  /// For each shared state the four outcomes map to four distinct Paulis.
  bool columns_bijective() const;

  friend bool operator==(const CorrectionTable&, const CorrectionTable&) = default;

 private:
  static std::size_t slot(BellKind shared, Smo smo) { return index_of(shared) * 4 + smo.index(); }
  std::array<PauliKind, 16> cells_{};
};

struct CorrectionDiff {
  BellKind shared;
  Smo smo;
  PauliKind left;
  PauliKind right;
  friend bool operator==(const CorrectionDiff&, const CorrectionDiff&) = default;
};

/// Ordered by shared state, then outcome. Empty iff the tables agree.
std::vector<CorrectionDiff> diff_tables(const CorrectionTable& left, const CorrectionTable& right);

/// One line per mismatch, e.g. `shared=psi- smo=01 printed=X derived=iY`.
std::string render_diff(std::span<const CorrectionDiff> diff, std::string_view left_label,
                        std::string_view right_label);
/// Data-file format, one `shared=psi+ smo=00 pauli=I` line per cell.
std::string render_table(const CorrectionTable& table);

/// Parses the data-file format; `#` starts a comment. Every cell must appear
/// exactly once.
CorrectionTable parse_correction_table(std::string_view text);

/// Table 1 as printed, loaded from the embedded data file.
CorrectionTable paper_table_1();

/// Sender-side qubit inputs used to certify a correction: (1,0), (0,1),
/// (0.6,0.8) and `random_count` seeded Haar-random states.
std::vector<StateVector> certification_inputs(std::size_t random_count = 5,
                                              std::uint64_t seed = kDefaultSeed);

StateVector haar_random_qubit(RandomStream& rng);

/// Maps the sender's input qubit to the receiver's (unnormalized-then-
/// normalized) post-measurement qubit for one fixed branch.
using ReceiverChannel = std::function<StateVector(const StateVector& input)>;

/// The unique Pauli that restores every input up to global phase, or
/// NoUniqueCorrection.
PauliKind unique_correction(const ReceiverChannel& channel, std::span<const StateVector> inputs);

/// Receiver's qubit when the sender Bell-measures (input, first qubit of
/// `shared`) and obtains `smo`; the receiver holds the second qubit.
StateVector teleport_branch(const StateVector& input, const StateVector& shared, Smo smo);

/// Table 1 rebuilt by simulating every (shared, outcome) branch.
CorrectionTable derive_correction_table();

}  // namespace bcst
