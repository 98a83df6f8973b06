#include "bcst/keyswap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bcst/embedded_tables.hpp"
#include "bcst/error.hpp"
#include "bcst/qcore.hpp"
#include "text_util.hpp"

namespace bcst {
namespace {

constexpr std::size_t kA1 = 0;
constexpr std::size_t kB1 = 1;
constexpr std::size_t kA2 = 2;
constexpr std::size_t kB2 = 3;
constexpr std::size_t kC1 = 4;

constexpr double kSwapMagnitude = 0.5;

PairProduct product_at(std::size_t index) { return {kAllBellKinds[index / 4], kAllBellKinds[index % 4]}; }

// |m>_{A1A2} |n>_{B1B2} written in the order (A1, B1, A2, B2).
StateVector swapped_basis_state(BellKind m, BellKind n) {
  const std::array<std::size_t, 4> perm = {0, 2, 1, 3};
  return permute_qubits(tensor({bell_state(m), bell_state(n)}), perm);
}

std::vector<SwapTerm> sorted_terms(std::vector<SwapTerm> terms) {
  std::sort(terms.begin(), terms.end(), [](const SwapTerm& l, const SwapTerm& r) {
    return std::tuple(index_of(l.alice), index_of(l.bob), l.sign) <
           std::tuple(index_of(r.alice), index_of(r.bob), r.sign);
  });
  return terms;
}

Sign flipped(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }

std::string render_terms(const std::vector<SwapTerm>& terms) {
  if (terms.empty()) return "(none)";
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += ' ';
    out += to_string(t.sign);
    out += to_string(t.alice);
    out += '|';
    out += to_string(t.bob);
  }
  return out;
}

void require_condition(const ChannelSpec& spec) {
  if (!check_condition(spec)) {
    throw Error(ErrorCode::ConditionViolated, to_string(spec) + " repeats a Bell state");
  }
}

}  // namespace

std::string to_string(const PairProduct& p) {
  return std::string(to_string(p[0])) + "," + std::string(to_string(p[1]));
}

std::size_t index_of(const PairProduct& p) { return 4 * index_of(p[0]) + index_of(p[1]); }

const std::vector<SwapTerm>& SwapTable::terms(const PairProduct& init) const {
  return rows_[index_of(init)];
}

void SwapTable::add(const PairProduct& init, SwapTerm term) { rows_[index_of(init)].push_back(term); }

std::optional<BellKind> SwapTable::bob_for(const PairProduct& init, BellKind alice) const {
  std::optional<BellKind> found;
  for (const auto& t : terms(init)) {
    if (t.alice != alice) continue;
    if (found) return std::nullopt;
    found = t.bob;
  }
  return found;
}

bool SwapTable::is_bijection(const PairProduct& init) const {
  const auto& row = terms(init);
  if (row.size() != 4) return false;
  std::array<bool, 4> alice{};
  std::array<bool, 4> bob{};
  for (const auto& t : row) {
    alice[index_of(t.alice)] = true;
    bob[index_of(t.bob)] = true;
  }
  return std::ranges::all_of(alice, std::identity{}) && std::ranges::all_of(bob, std::identity{});
}

std::array<std::array<double, 4>, 4> swap_coefficients(const PairProduct& init) {
  const auto state = tensor({bell_state(init[0]), bell_state(init[1])});
  std::array<std::array<double, 4>, 4> out{};
  for (BellKind m : kAllBellKinds) {
    for (BellKind n : kAllBellKinds) {
      const auto basis = swapped_basis_state(m, n);
      Amplitude overlap = 0.0;
      for (std::size_t i = 0; i < state.dimension(); ++i) overlap += std::conj(basis[i]) * state[i];
      if (std::abs(overlap.imag()) > kTolerance) {
        throw Error(ErrorCode::InvalidState, "swap coefficient is not real");
      }
      out[index_of(m)][index_of(n)] = overlap.real();
    }
  }
  return out;
}

SwapTable derive_swap_table() {
  SwapTable table;
  for (std::size_t i = 0; i < 16; ++i) {
    const auto init = product_at(i);
    const auto coeffs = swap_coefficients(init);
    for (BellKind m : kAllBellKinds) {
      for (BellKind n : kAllBellKinds) {
        const double c = coeffs[index_of(m)][index_of(n)];
        if (std::abs(std::abs(c) - kSwapMagnitude) < kTolerance) {
          table.add(init, {m, n, c > 0 ? Sign::Plus : Sign::Minus});
        } else if (std::abs(c) > kTolerance) {
          throw Error(ErrorCode::InvalidState, "unexpected swap coefficient for " + to_string(init));
        }
      }
    }
  }
  return table;
}

const SwapTable& swap_table() {
  static const SwapTable table = derive_swap_table();
  return table;
}

SwapTable parse_swap_table(std::string_view text) {
  SwapTable table;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    line = detail::strip_comment(line);
    if (line.empty()) continue;
    const auto fields = detail::parse_fields(line, line_no);
    const auto init_parts = detail::split(detail::require_field(fields, "init", line_no), ',');
    const auto alice = parse_bell_kind(detail::require_field(fields, "alice", line_no));
    const auto bob = parse_bell_kind(detail::require_field(fields, "bob", line_no));
    const auto sign = detail::require_field(fields, "sign", line_no);
    std::optional<BellKind> x;
    std::optional<BellKind> y;
    if (init_parts.size() == 2) {
      x = parse_bell_kind(detail::trim(init_parts[0]));
      y = parse_bell_kind(detail::trim(init_parts[1]));
    }
    if (!x || !y || !alice || !bob || (sign != "+" && sign != "-") || fields.size() != 4) {
      throw Error(ErrorCode::ParseError, "malformed swap row at line " + std::to_string(line_no));
    }
    table.add({*x, *y}, {*alice, *bob, sign == "+" ? Sign::Plus : Sign::Minus});
  }
  return table;
}

SwapTable paper_table_4() {
  static const SwapTable table = parse_swap_table(embedded::kTable4);
  return table;
}

std::string render_swap_table(const SwapTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < 16; ++i) {
    const auto init = product_at(i);
    for (const auto& t : table.terms(init)) {
      out << "init=" << to_string(init) << " alice=" << to_string(t.alice)
          << " bob=" << to_string(t.bob) << " sign=" << to_string(t.sign) << '\n';
    }
  }
  return out.str();
}

std::string_view to_string(SwapDiffKind k) {
  switch (k) {
    case SwapDiffKind::Outcomes: return "outcomes";
    case SwapDiffKind::Signs: return "signs";
    case SwapDiffKind::GlobalSign: return "global-sign";
  }
  return "?";
}

std::vector<SwapDiff> diff_swap_tables(const SwapTable& left, const SwapTable& right) {
  std::vector<SwapDiff> out;
  for (std::size_t i = 0; i < 16; ++i) {
    const auto init = product_at(i);
    const auto l = sorted_terms(left.terms(init));
    const auto r = sorted_terms(right.terms(init));
    if (l == r) continue;
    const auto strip = [](std::vector<SwapTerm> v) {
      for (auto& t : v) t.sign = Sign::Plus;
      return sorted_terms(std::move(v));
    };
    SwapDiff d{init, SwapDiffKind::Outcomes, l, r};
    if (strip(l) == strip(r)) {
      auto negated = l;
      for (auto& t : negated) t.sign = flipped(t.sign);
      d.kind = sorted_terms(negated) == r ? SwapDiffKind::GlobalSign : SwapDiffKind::Signs;
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string render_swap_diff(const std::vector<SwapDiff>& diff, std::string_view left_label,
                             std::string_view right_label) {
  std::ostringstream out;
  for (const auto& d : diff) {
    out << "init=" << to_string(d.init) << " kind=" << to_string(d.kind) << '\n'
        << "  " << left_label << ": " << render_terms(d.left) << '\n'
        << "  " << right_label << ": " << render_terms(d.right) << '\n';
  }
  return out.str();
}

std::string key_bits(BellKind k) {
  switch (k) {
    case BellKind::PsiPlus: return "00";
    case BellKind::PsiMinus: return "01";
    case BellKind::PhiPlus: return "10";
    case BellKind::PhiMinus: return "11";
  }
  return "??";
}

BellKind infer_alice_outcome(const PairProduct& init, BellKind bob_outcome) {
  for (const auto& t : swap_table().terms(init)) {
    if (t.bob == bob_outcome) return t.alice;
  }
  throw Error(ErrorCode::InvalidState, "no swap term for " + to_string(init));
}

std::array<PairProduct, 2> branch_products(const ChannelSpec& spec) {
  return {PairProduct{spec.psi1(), spec.psi2()}, PairProduct{spec.psi3(), spec.psi4()}};
}

namespace {

KeyRound make_round(const ChannelSpec& spec, bool disclose, Outcome charlie, BellKind alice,
                    BellKind bob) {
  const auto products = branch_products(spec);
  KeyRound r;
  r.charlie = charlie;
  r.initial = products[charlie == Outcome::A ? 0 : 1];
  r.assumed = disclose ? r.initial : products[0];
  r.alice_outcome = alice;
  r.bob_outcome = bob;
  r.inferred_alice = infer_alice_outcome(r.assumed, bob);
  r.alice_key = key_bits(alice);
  r.bob_key = key_bits(r.inferred_alice);
  r.disclosed = disclose;
  return r;
}

}  // namespace

KeyRound run_key_round(const ChannelSpec& spec, bool disclose, RandomStream& rng) {
  require_condition(spec);
  const auto state = build_channel_state(spec);
  const auto charlie = measure_qubit(state, kC1, spec.charlie_basis, rng);
  const auto alice = measure_bell_pair(charlie.collapsed, kA1, kA2, rng);
  const auto bob = measure_bell_pair(alice.collapsed, kB1, kB2, rng);
  return make_round(spec, disclose, charlie.outcome, alice.outcome, bob.outcome);
}

KeyAgreement key_agreement_exhaustive(const ChannelSpec& spec, bool disclose) {
  require_condition(spec);
  KeyAgreement out;
  double agreeing = 0.0;
  const auto state = build_channel_state(spec);
  for (const auto& charlie : measure_qubit_all(state, kC1, spec.charlie_basis)) {
    for (const auto& alice : measure_bell_pair_all(charlie.collapsed, kA1, kA2)) {
      for (const auto& bob : measure_bell_pair_all(alice.collapsed, kB1, kB2)) {
        const auto round = make_round(spec, disclose, charlie.outcome, alice.outcome, bob.outcome);
        KeyBranch b{charlie.outcome, alice.outcome, bob.outcome,
                    charlie.probability * alice.probability * bob.probability,
                    round.alice_key == round.bob_key};
        out.total_probability += b.probability;
        if (b.agree) agreeing += b.probability;
        out.branches.push_back(b);
      }
    }
  }
  out.agreement_rate = agreeing / out.total_probability;
  return out;
}

KeySecurity classify_key_security(const ChannelSpec& spec) {
  KeySecurity out;
  out.spec = spec;
  const auto products = branch_products(spec);
  for (BellKind bob : kAllBellKinds) {
    if (infer_alice_outcome(products[0], bob) != infer_alice_outcome(products[1], bob)) {
      out.witness_bob_outcome = bob;
      break;
    }
  }
  out.secure = out.witness_bob_outcome.has_value();
  out.withheld_agreement = key_agreement_exhaustive(spec, false).agreement_rate;
  return out;
}

std::string render_security_split(const std::vector<KeySecurity>& rows) {
  std::ostringstream out;
  std::size_t secure = 0;
  for (const auto& r : rows) {
    if (r.secure) ++secure;
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.6f", r.withheld_agreement);
    out << to_string(r.spec) << ' ' << (r.secure ? "secure" : "insecure") << " agreement=" << rate
        << '\n';
  }
  out << "secure=" << secure << " insecure=" << rows.size() - secure << '\n';
  return out.str();
}

}  // namespace bcst
