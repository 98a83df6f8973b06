#include "bcst/bell.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bcst/embedded_tables.hpp"
#include "bcst/error.hpp"
#include "text_util.hpp"

namespace bcst {

// ---- Bell kinds -----------------------------------------------------------

std::string_view to_string(BellKind k) {
  switch (k) {
    case BellKind::PsiPlus: return "psi+";
    case BellKind::PsiMinus: return "psi-";
    case BellKind::PhiPlus: return "phi+";
    case BellKind::PhiMinus: return "phi-";
  }
  return "?";
}

std::optional<BellKind> parse_bell_kind(std::string_view text) {
  for (BellKind k : kAllBellKinds) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

StateVector bell_state(BellKind k) {
  const double h = 1.0 / std::numbers::sqrt2;
  switch (k) {
    case BellKind::PsiPlus: return StateVector({h, 0.0, 0.0, h});
    case BellKind::PsiMinus: return StateVector({h, 0.0, 0.0, -h});
    case BellKind::PhiPlus: return StateVector({0.0, h, h, 0.0});
    case BellKind::PhiMinus: return StateVector({0.0, h, -h, 0.0});
  }
  throw Error(ErrorCode::InvalidParameter, "unknown Bell kind");
}

// ---- Paulis ---------------------------------------------------------------

std::string_view to_string(PauliKind p) {
  switch (p) {
    case PauliKind::I: return "I";
    case PauliKind::X: return "X";
    case PauliKind::Z: return "Z";
    case PauliKind::iY: return "iY";
  }
  return "?";
}

std::optional<PauliKind> parse_pauli(std::string_view text) {
  for (PauliKind p : kAllPaulis) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

Mat2 pauli_matrix(PauliKind p) {
  Mat2 m;
  switch (p) {
    case PauliKind::I: m << 1, 0, 0, 1; break;
    case PauliKind::X: m << 0, 1, 1, 0; break;
    case PauliKind::Z: m << 1, 0, 0, -1; break;
    case PauliKind::iY: m << 0, 1, -1, 0; break;
  }
  return m;
}

// ---- SMO encoding ---------------------------------------------------------

Smo smo_of(BellKind outcome) {
  switch (outcome) {
    case BellKind::PsiPlus: return Smo{false, false};
    case BellKind::PhiPlus: return Smo{false, true};
    case BellKind::PsiMinus: return Smo{true, false};
    case BellKind::PhiMinus: return Smo{true, true};
  }
  throw Error(ErrorCode::InvalidParameter, "unknown Bell kind");
}

BellKind bell_of(Smo smo) {
  if (!smo.phase) return smo.parity ? BellKind::PhiPlus : BellKind::PsiPlus;
  return smo.parity ? BellKind::PhiMinus : BellKind::PsiMinus;
}

std::string to_string(Smo smo) {
  return std::string{smo.phase ? '1' : '0', smo.parity ? '1' : '0'};
}

std::optional<Smo> parse_smo(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  for (char c : text) {
    if (c != '0' && c != '1') return std::nullopt;
  }
  return Smo{text[0] == '1', text[1] == '1'};
}

// ---- tables ---------------------------------------------------------------

bool CorrectionTable::columns_bijective() const {
  for (BellKind shared : kAllBellKinds) {
    std::array<bool, 4> used{};
    for (Smo smo : kAllSmos) {
      auto& slot_used = used[static_cast<std::size_t>(at(shared, smo))];
      if (slot_used) return false;
      slot_used = true;
    }
  }
  return true;
}

std::vector<CorrectionDiff> diff_tables(const CorrectionTable& left, const CorrectionTable& right) {
  std::vector<CorrectionDiff> out;
  for (BellKind shared : kAllBellKinds) {
    for (Smo smo : kAllSmos) {
      if (left.at(shared, smo) != right.at(shared, smo)) {
        out.push_back({shared, smo, left.at(shared, smo), right.at(shared, smo)});
      }
    }
  }
  return out;
}

std::string render_diff(std::span<const CorrectionDiff> diff, std::string_view left_label,
                        std::string_view right_label) {
  std::ostringstream os;
  for (const auto& d : diff) {
    os << "shared=" << to_string(d.shared) << " smo=" << to_string(d.smo) << ' ' << left_label
       << '=' << to_string(d.left) << ' ' << right_label << '=' << to_string(d.right) << '\n';
  }
  return os.str();
}

std::string render_table(const CorrectionTable& table) {
  std::ostringstream os;
  for (BellKind shared : kAllBellKinds) {
    for (Smo smo : kAllSmos) {
      os << "shared=" << to_string(shared) << " smo=" << to_string(smo)
         << " pauli=" << to_string(table.at(shared, smo)) << '\n';
    }
  }
  return os.str();
}

CorrectionTable parse_correction_table(std::string_view text) {
  CorrectionTable table;
  std::array<bool, 16> seen{};
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    line = detail::strip_comment(line);
    if (line.empty()) continue;
    const auto fields = detail::parse_fields(line, line_no);
    const auto shared = parse_bell_kind(detail::require_field(fields, "shared", line_no));
    const auto smo = parse_smo(detail::require_field(fields, "smo", line_no));
    const auto pauli = parse_pauli(detail::require_field(fields, "pauli", line_no));
    if (!shared || !smo || !pauli || fields.size() != 3) {
      throw Error(ErrorCode::ParseError, "malformed table row at line " + std::to_string(line_no));
    }
    const std::size_t slot = index_of(*shared) * 4 + smo->index();
    if (seen[slot]) {
      throw Error(ErrorCode::ParseError, "duplicate cell at line " + std::to_string(line_no));
    }
    seen[slot] = true;
    table.set(*shared, *smo, *pauli);
  }
  for (bool s : seen) {
    if (!s) throw Error(ErrorCode::ParseError, "table is missing cells");
  }
  return table;
}

CorrectionTable paper_table_1() {
  static const CorrectionTable table = parse_correction_table(embedded::kTable1);
  return table;
}

// ---- oracle ---------------------------------------------------------------

StateVector haar_random_qubit(RandomStream& rng) {
  const double u = rng.next_unit();
  const double phi = 2.0 * std::numbers::pi * rng.next_unit();
  return StateVector::normalized({std::sqrt(u), std::polar(std::sqrt(1.0 - u), phi)});
}

std::vector<StateVector> certification_inputs(std::size_t random_count, std::uint64_t seed) {
  std::vector<StateVector> inputs = {StateVector::qubit(1.0, 0.0), StateVector::qubit(0.0, 1.0),
                                     StateVector::qubit(0.6, 0.8)};
  RandomStream rng(seed);
  for (std::size_t i = 0; i < random_count; ++i) inputs.push_back(haar_random_qubit(rng));
  return inputs;
}

PauliKind unique_correction(const ReceiverChannel& channel, std::span<const StateVector> inputs) {
  std::vector<StateVector> received;
  received.reserve(inputs.size());
  for (const auto& in : inputs) received.push_back(channel(in));

  std::optional<PauliKind> found;
  for (PauliKind p : kAllPaulis) {
    bool restores_all = true;
    for (std::size_t i = 0; i < inputs.size() && restores_all; ++i) {
      const auto corrected = apply_1q(received[i], 0, pauli_matrix(p));
      restores_all = equal_up_to_global_phase(corrected, inputs[i]);
    }
    if (!restores_all) continue;
    if (found) throw Error(ErrorCode::NoUniqueCorrection, "more than one Pauli restores the input");
    found = p;
  }
  if (!found) throw Error(ErrorCode::NoUniqueCorrection, "no Pauli restores the input");
  return *found;
}

StateVector teleport_branch(const StateVector& input, const StateVector& shared, Smo smo) {
  const auto joint = tensor({input, shared});
  const std::array<std::size_t, 2> sender = {0, 1};
  double p = 0.0;
  auto rest = project_onto(joint, sender, bell_state(bell_of(smo)), p);
  if (p < kDegenerateProbability) {
    throw Error(ErrorCode::DegenerateBranch, "sender outcome " + to_string(smo) + " impossible");
  }
  return StateVector::normalized(std::move(rest));
}

CorrectionTable derive_correction_table() {
  const auto inputs = certification_inputs();
  CorrectionTable table;
  for (BellKind shared : kAllBellKinds) {
    const auto pair = bell_state(shared);
    for (Smo smo : kAllSmos) {
      const auto p = unique_correction(
          [&](const StateVector& in) { return teleport_branch(in, pair, smo); }, inputs);
      table.set(shared, smo, p);
    }
  }
  return table;
}

}  // namespace bcst
