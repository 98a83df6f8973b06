#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace bcst {

class StateVector;

/// psi+- = (|00> +- |11>)/sqrt2, phi+- = (|01> +- |10>)/sqrt2.
enum class BellKind { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::PsiPlus, BellKind::PsiMinus, BellKind::PhiPlus, BellKind::PhiMinus};

constexpr std::size_t index_of(BellKind k) { return static_cast<std::size_t>(k); }

/// "psi+", "psi-", "phi+", "phi-"
std::string_view to_string(BellKind k);
std::optional<BellKind> parse_bell_kind(std::string_view text);

StateVector bell_state(BellKind k);

}  // namespace bcst
