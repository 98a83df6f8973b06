#include "bcst/channel.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bcst/error.hpp"
#include "text_util.hpp"

namespace bcst {
namespace {

double parse_number(std::string_view text, std::string_view what) {
  text = detail::trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::ParseError,
                "invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

bool same_basis(const SingleQubitBasis& x, const SingleQubitBasis& y) {
  for (std::size_t i = 0; i < 2; ++i) {
    if (std::abs(x.ket_a()[i] - y.ket_a()[i]) > kTolerance) return false;
    if (std::abs(x.ket_b()[i] - y.ket_b()[i]) > kTolerance) return false;
  }
  return true;
}

StateVector product(BellKind first, BellKind second, const StateVector& charlie) {
  return tensor({bell_state(first), bell_state(second), charlie});
}

}  // namespace

std::string_view to_string(Sign s) { return s == Sign::Plus ? "+" : "-"; }

std::string_view to_string(Party p) {
  switch (p) {
    case Party::Alice: return "alice";
    case Party::Bob: return "bob";
    case Party::Charlie: return "charlie";
  }
  return "?";
}

// ---- text form ------------------------------------------------------------

SingleQubitBasis parse_basis(std::string_view text) {
  text = detail::trim(text);
  if (text == "+/-") return SingleQubitBasis::hadamard();
  if (text == "0/1") return SingleQubitBasis::computational();
  std::optional<double> theta;
  std::optional<double> phi;
  for (auto part : detail::split(text, ',')) {
    part = detail::trim(part);
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) break;
    const auto key = part.substr(0, eq);
    if (key == "theta") theta = parse_number(part.substr(eq + 1), "theta");
    if (key == "phi") phi = parse_number(part.substr(eq + 1), "phi");
  }
  if (!theta || !phi) {
    throw Error(ErrorCode::ParseError,
                "basis must be '+/-', '0/1' or 'theta=<rad>,phi=<rad>', got '" + std::string(text) +
                    "'");
  }
  return SingleQubitBasis::from_angles(*theta, *phi);
}

std::string describe_basis(const SingleQubitBasis& basis) {
  if (same_basis(basis, SingleQubitBasis::hadamard())) return "+/-";
  if (same_basis(basis, SingleQubitBasis::computational())) return "0/1";
  const auto& a = basis.ket_a();
  const double theta = std::atan2(std::abs(a[1]), std::abs(a[0]));
  const double phi = std::abs(a[1]) > 0.0 ? std::arg(a[1]) - std::arg(a[0]) : 0.0;
  std::ostringstream os;
  os.precision(17);
  os << "theta=" << theta << ",phi=" << phi;
  return os.str();
}

ChannelSpec parse_channel_spec(std::string_view text) {
  const auto sections = detail::split(detail::trim(text), ';');
  ChannelSpec spec;
  const auto kinds = detail::split(sections.front(), ',');
  if (kinds.size() != 4) {
    throw Error(ErrorCode::ParseError, "expected four Bell states, got '" +
                                           std::string(sections.front()) + "'");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const auto k = parse_bell_kind(detail::trim(kinds[i]));
    if (!k) {
      throw Error(ErrorCode::ParseError, "unknown Bell state '" + std::string(kinds[i]) + "'");
    }
    spec.pairs[i] = *k;
  }
  for (std::size_t i = 1; i < sections.size(); ++i) {
    const auto section = detail::trim(sections[i]);
    const auto eq = section.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "expected key=value, got '" + std::string(section) + "'");
    }
    const auto key = section.substr(0, eq);
    const auto value = detail::trim(section.substr(eq + 1));
    if (key == "basis") {
      spec.charlie_basis = parse_basis(value);
    } else if (key == "sign") {
      if (value == "+") {
        spec.sign = Sign::Plus;
      } else if (value == "-") {
        spec.sign = Sign::Minus;
      } else {
        throw Error(ErrorCode::ParseError, "sign must be '+' or '-'");
      }
    } else {
      throw Error(ErrorCode::ParseError, "unknown key '" + std::string(key) + "'");
    }
  }
  return spec;
}

std::string to_string(const ChannelSpec& spec) {
  std::ostringstream os;
  for (std::size_t i = 0; i < 4; ++i) os << (i ? "," : "") << to_string(spec.pairs[i]);
  os << ";basis=" << describe_basis(spec.charlie_basis) << ";sign=" << to_string(spec.sign);
  return os.str();
}

// ---- layouts --------------------------------------------------------------

void QubitLayout::validate() const {
  std::array<bool, 5> seen{};
  for (std::size_t p : positions()) {
    if (p >= 5 || seen[p]) {
      throw Error(ErrorCode::InvalidPermutation, "layout positions must cover 0..4 exactly once");
    }
    seen[p] = true;
  }
}

std::vector<std::size_t> QubitLayout::owned_by(Party p) const {
  switch (p) {
    case Party::Alice: return {a1, a2};
    case Party::Bob: return {b1, b2};
    case Party::Charlie: return {c1};
  }
  return {};
}

StateVector place_in_layout(const StateVector& canonical, const QubitLayout& layout) {
  layout.validate();
  const auto perm = layout.positions();
  return permute_qubits(canonical, perm);
}

StateVector to_canonical(const StateVector& placed, const QubitLayout& layout) {
  layout.validate();
  const auto pos = layout.positions();
  std::array<std::size_t, 5> inverse{};
  for (std::size_t i = 0; i < 5; ++i) inverse[pos[i]] = i;
  return permute_qubits(placed, inverse);
}

// ---- class membership -----------------------------------------------------

bool check_condition(const ChannelSpec& spec) {
  return spec.psi1() != spec.psi3() && spec.psi2() != spec.psi4();
}

StateVector build_channel_state(const ChannelSpec& spec) {
  const auto first = product(spec.psi1(), spec.psi2(), spec.charlie_basis.state_a());
  const auto second = product(spec.psi3(), spec.psi4(), spec.charlie_basis.state_b());
  const double sign = spec.sign == Sign::Plus ? 1.0 : -1.0;
  std::vector<Amplitude> amps(first.dimension());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    amps[i] = (first[i] + sign * second[i]) / std::numbers::sqrt2;
  }
  return StateVector(std::move(amps));
}

std::vector<ChannelSpec> enumerate_all(const SingleQubitBasis& basis, Sign sign) {
  std::vector<ChannelSpec> out;
  out.reserve(256);
  for (BellKind k1 : kAllBellKinds) {
    for (BellKind k2 : kAllBellKinds) {
      for (BellKind k3 : kAllBellKinds) {
        for (BellKind k4 : kAllBellKinds) {
          out.push_back(ChannelSpec{{k1, k2, k3, k4}, basis, sign});
        }
      }
    }
  }
  return out;
}

std::vector<ChannelSpec> enumerate_valid(const SingleQubitBasis& basis, Sign sign) {
  auto all = enumerate_all(basis, sign);
  std::erase_if(all, [](const ChannelSpec& s) { return !check_condition(s); });
  return all;
}

std::vector<ChannelSpec> enumerate_invalid(const SingleQubitBasis& basis, Sign sign) {
  auto all = enumerate_all(basis, sign);
  std::erase_if(all, [](const ChannelSpec& s) { return check_condition(s); });
  return all;
}

std::vector<std::array<BellKind, 4>> paper_table_2() {
  using enum BellKind;
  return {
      {PsiPlus, PsiPlus, PhiPlus, PhiPlus},   {PsiPlus, PsiPlus, PhiPlus, PhiMinus},
      {PsiPlus, PsiPlus, PhiMinus, PhiMinus}, {PsiPlus, PsiPlus, PhiMinus, PhiPlus},
      {PsiPlus, PsiPlus, PsiMinus, PsiMinus}, {PsiPlus, PsiPlus, PsiMinus, PhiMinus},
      {PsiPlus, PsiPlus, PhiMinus, PsiMinus}, {PsiPlus, PsiPlus, PsiMinus, PhiPlus},
      {PsiPlus, PsiPlus, PhiPlus, PsiMinus},
  };
}

// ---- control analysis -----------------------------------------------------

namespace {

bool classify(double purity, std::string_view pair) {
  if (std::abs(purity - 0.5) < kControlTolerance) return true;
  if (std::abs(purity - 1.0) < kControlTolerance) return false;
  std::ostringstream os;
  os.precision(17);
  os << "pair " << pair << " has purity " << purity << ", neither 1/2 nor 1";
  throw Error(ErrorCode::IndeterminateControl, os.str());
}

}  // namespace

ControlReport control_report(const StateVector& state, const QubitLayout& layout) {
  if (state.num_qubits() != 5) {
    throw Error(ErrorCode::InvalidParameter, "control analysis needs a five-qubit state");
  }
  layout.validate();
  ControlReport report;
  report.purity_ab = purity(reduced_density(state, {layout.a1, layout.b1}));
  report.purity_ba = purity(reduced_density(state, {layout.a2, layout.b2}));
  report.dir_ab_controlled = classify(report.purity_ab, "A1B1");
  report.dir_ba_controlled = classify(report.purity_ba, "A2B2");
  return report;
}

CollapseFactorization collapse_factorization(const ChannelSpec& spec) {
  if (!check_condition(spec)) {
    throw Error(ErrorCode::ConditionViolated, to_string(spec) + " repeats a Bell state");
  }
  const auto state = build_channel_state(spec);
  const auto branches = measure_qubit_all(state, 4, spec.charlie_basis);
  CollapseFactorization out{{spec.psi1(), spec.psi2()}, {spec.psi3(), spec.psi4()}};
  for (const auto& branch : branches) {
    const auto& kinds = branch.outcome == Outcome::A ? out.on_a : out.on_b;
    const auto expected = tensor({bell_state(kinds[0]), bell_state(kinds[1])});
    if (!equal_up_to_global_phase(branch.remainder, expected)) {
      throw Error(ErrorCode::InvalidState, "branch " + std::string(to_string(branch.outcome)) +
                                               " does not factor into the expected Bell pairs");
    }
  }
  if (branches.size() != 2) {
    throw Error(ErrorCode::InvalidState, "controller measurement lost a branch");
  }
  return out;
}

// ---- published states -----------------------------------------------------

namespace {

StateVector sparse_state(std::initializer_list<std::pair<std::size_t, double>> terms,
                         double scale) {
  std::vector<Amplitude> amps(32, 0.0);
  for (const auto& [index, coeff] : terms) amps[index] = coeff * scale;
  return StateVector(std::move(amps));
}

}  // namespace

NamedState zha_state() {
  // Qubits 1..5: Alice 1,3; Bob 2,5; Charlie 4.
  auto amps = sparse_state({{0b00000, 1}, {0b00111, 1}, {0b11010, 1}, {0b11101, 1}}, 0.5);
  using enum BellKind;
  return {"zha", std::move(amps), QubitLayout{0, 1, 2, 4, 3},
          ChannelSpec{{PsiPlus, PsiPlus, PsiMinus, PsiMinus}, SingleQubitBasis::hadamard(),
                      Sign::Plus}};
}

NamedState zha_prime_state() {
  // Qubits 1..5: Alice 1,2; Bob 3,4; Charlie 5.
  auto amps = sparse_state({{0b11101, -1},
                            {0b11110, 1},
                            {0b00000, 1},
                            {0b00011, -1},
                            {0b01001, 1},
                            {0b01010, 1},
                            {0b10100, 1},
                            {0b10111, 1}},
                           1.0 / (2.0 * std::numbers::sqrt2));
  using enum BellKind;
  return {"zha-prime", std::move(amps), QubitLayout{0, 2, 1, 3, 4},
          ChannelSpec{{PsiPlus, PsiPlus, PsiMinus, PhiMinus}, SingleQubitBasis::computational(),
                      Sign::Minus}};
}

NamedState li_state() {
  // GHZ on qubits 1,2,3 times a Bell pair on 4,5. Alice 3,5; Bob 1,4;
  // Charlie 2. Pairs are (3,1) and (5,4).
  auto amps = sparse_state({{0b00000, 1}, {0b00011, 1}, {0b11100, 1}, {0b11111, 1}}, 0.5);
  using enum BellKind;
  return {"li", std::move(amps), QubitLayout{2, 0, 4, 3, 1},
          ChannelSpec{{PsiPlus, PsiPlus, PsiMinus, PsiPlus}, SingleQubitBasis::hadamard(),
                      Sign::Plus}};
}

std::optional<NamedState> named_state(std::string_view name) {
  if (name == "zha") return zha_state();
  if (name == "zha-prime") return zha_prime_state();
  if (name == "li") return li_state();
  return std::nullopt;
}

std::vector<PublishedCheck> verify_published_states() {
  std::vector<PublishedCheck> checks;
  for (const auto& named : {zha_state(), zha_prime_state()}) {
    const auto rebuilt = place_in_layout(build_channel_state(named.equivalent), named.layout);
    PublishedCheck c;
    c.name = named.name;
    c.residual = std::abs(1.0 - fidelity_pure(named.amplitudes, rebuilt));
    c.passed = c.residual < kTolerance && check_condition(named.equivalent);
    c.detail = "rebuilt from " + to_string(named.equivalent);
    checks.push_back(std::move(c));
  }

  const auto li = li_state();
  const auto rebuilt = place_in_layout(build_channel_state(li.equivalent), li.layout);
  const auto report = control_report(li.amplitudes, li.layout);
  PublishedCheck c;
  c.name = li.name;
  c.residual = std::abs(1.0 - fidelity_pure(li.amplitudes, rebuilt));
  c.passed = c.residual < kTolerance && !check_condition(li.equivalent) &&
             report.dir_ab_controlled && !report.dir_ba_controlled;
  std::ostringstream os;
  os.precision(17);
  os << "rebuilt from " << to_string(li.equivalent) << "; purity(3,1)=" << report.purity_ab
     << " purity(5,4)=" << report.purity_ba;
  c.detail = os.str();
  checks.push_back(std::move(c));
  return checks;
}

}  // namespace bcst
