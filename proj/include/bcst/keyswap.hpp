#pragma once

// Key agreement by entanglement swapping under a controller.
//
// After Charlie measures, Alice and Bob share |x>_{A1B1} |y>_{A2B2}. Alice
// Bell-measures (A1, A2), Bob Bell-measures (B1, B2); for a known product the
// two outcomes are in one-to-one correspondence, so Bob can read Alice's key
// from his own result.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bcst/bell_kind.hpp"
#include "bcst/channel.hpp"
#include "bcst/random.hpp"

namespace bcst {

/// (x, y): x on (A1, B1), y on (A2, B2).
using PairProduct = std::array<BellKind, 2>;

std::string to_string(const PairProduct& p);  // "psi+,psi-"
std::size_t index_of(const PairProduct& p);    // 4 x + y

struct SwapTerm {
  BellKind alice = BellKind::PsiPlus;  ///< outcome on (A1, A2)
  BellKind bob = BellKind::PsiPlus;    ///< outcome on (B1, B2)
  Sign sign = Sign::Plus;
  bool operator==(const SwapTerm&) const = default;
};

class SwapTable {
 public:
  /// Terms in insertion order.
  const std::vector<SwapTerm>& terms(const PairProduct& init) const;
  void add(const PairProduct& init, SwapTerm term);

  /// Bob's outcome paired with `alice`; nullopt unless exactly one term has it.
  std::optional<BellKind> bob_for(const PairProduct& init, BellKind alice) const;
  /// Four terms whose Alice and Bob outcomes each cover all Bell kinds once.
  bool is_bijection(const PairProduct& init) const;

 private:
  std::array<std::vector<SwapTerm>, 16> rows_;
};

/// Expands every product in the (A1,A2)(B1,B2) Bell basis by inner products
/// and keeps the coefficients of magnitude 1/2.
SwapTable derive_swap_table();
/// derive_swap_table() computed once.
const SwapTable& swap_table();

/// Exact expansion coefficients <m|_{A1A2} <n|_{B1B2} |x>|y>, indexed
/// [index_of(m)][index_of(n)].
std::array<std::array<double, 4>, 4> swap_coefficients(const PairProduct& init);

/// Table 4 as printed, loaded from the embedded data file.
SwapTable paper_table_4();
SwapTable parse_swap_table(std::string_view text);
std::string render_swap_table(const SwapTable& table);

enum class SwapDiffKind {
  Outcomes,    ///< the outcome pairing differs
  Signs,       ///< same pairing, relative signs differ
  GlobalSign,  ///< every sign flipped
};
std::string_view to_string(SwapDiffKind k);

struct SwapDiff {
  PairProduct init;
  SwapDiffKind kind = SwapDiffKind::Outcomes;
  std::vector<SwapTerm> left;
  std::vector<SwapTerm> right;
};

/// Rows whose term sets differ, in index_of order.
std::vector<SwapDiff> diff_swap_tables(const SwapTable& left, const SwapTable& right);
std::string render_swap_diff(const std::vector<SwapDiff>& diff, std::string_view left_label,
                             std::string_view right_label);

/// psi+ -> "00", psi- -> "01", phi+ -> "10", phi- -> "11".
std::string key_bits(BellKind k);

/// Unique Alice outcome paired with `bob_outcome` in the derived table.
BellKind infer_alice_outcome(const PairProduct& init, BellKind bob_outcome);

struct KeyRound {
  Outcome charlie = Outcome::A;
  PairProduct initial{};  ///< product actually shared
  PairProduct assumed{};  ///< product Bob used for inference
  BellKind alice_outcome = BellKind::PsiPlus;
  BellKind bob_outcome = BellKind::PsiPlus;
  BellKind inferred_alice = BellKind::PsiPlus;
  std::string alice_key;
  std::string bob_key;
  bool disclosed = false;
};

/// Products after Charlie finds |a> and |b>.
std::array<PairProduct, 2> branch_products(const ChannelSpec& spec);

/// One sampled round. Randomness is consumed Charlie, Alice, Bob. Without
/// disclosure Bob assumes the |a> branch. ConditionViolated for invalid specs.
KeyRound run_key_round(const ChannelSpec& spec, bool disclose, RandomStream& rng);

struct KeyBranch {
  Outcome charlie = Outcome::A;
  BellKind alice_outcome = BellKind::PsiPlus;
  BellKind bob_outcome = BellKind::PsiPlus;
  double probability = 0.0;
  bool agree = false;
};

struct KeyAgreement {
  std::vector<KeyBranch> branches;
  double total_probability = 0.0;
  double agreement_rate = 0.0;
};

/// Every (Charlie, Alice, Bob) outcome with exact probabilities.
KeyAgreement key_agreement_exhaustive(const ChannelSpec& spec, bool disclose);

struct KeySecurity {
  ChannelSpec spec;
  /// The two Charlie branches induce different correlation maps.
  bool secure = false;
  /// Agreement rate with Charlie's outcome withheld.
  double withheld_agreement = 0.0;
  /// A Bob outcome whose inferred Alice outcome differs between branches.
  std::optional<BellKind> witness_bob_outcome;
};

KeySecurity classify_key_security(const ChannelSpec& spec);

/// One line per valid channel: "<spec> secure|insecure agreement=<rate>".
std::string render_security_split(const std::vector<KeySecurity>& rows);

}  // namespace bcst
