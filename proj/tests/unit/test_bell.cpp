#include <algorithm>
#include <set>

#include "bcst/bell.hpp"
#include "support.hpp"

using namespace bcst;

namespace {

// SMO bits -> oracle Bell index (0 psi+, 1 psi-, 2 phi+, 3 phi-).
int oracle_outcome(Smo smo) {
  constexpr std::array<int, 4> by_index = {0, 2, 1, 3};  // 00 psi+, 01 phi+, 10 psi-, 11 phi-
  return by_index[smo.index()];
}

// Every Pauli that restores all inputs, found with the reference routines.
std::vector<int> restoring_paulis(int shared, int outcome, const std::vector<oracle::Vec>& inputs) {
  std::vector<int> found;
  for (int p = 0; p < 4; ++p) {
    bool ok = true;
    for (const auto& in : inputs) {
      const auto received = oracle::teleport(in, oracle::bell(shared), outcome);
      const auto corrected = oracle::apply(oracle::pauli(p), received);
      ok = ok && std::abs(oracle::normalized_fidelity(corrected, in) - 1.0) < 1e-12;
    }
    if (ok) found.push_back(p);
  }
  return found;
}

std::vector<oracle::Vec> oracle_inputs() {
  std::vector<oracle::Vec> out = {{1.0, 0.0}, {0.0, 1.0}, {0.6, 0.8}};
  RandomStream rng(99);
  for (int i = 0; i < 5; ++i) out.push_back(test::to_vec(haar_random_qubit(rng)));
  return out;
}

PauliKind pauli_from_oracle(int p) { return kAllPaulis[static_cast<std::size_t>(p)]; }

}  // namespace

TEST_CASE("Bell states") {
  CHECK(std::abs(bell_state(BellKind::PsiPlus)[0] - Amplitude(1 / std::numbers::sqrt2)) < kTolerance);
  CHECK(std::abs(bell_state(BellKind::PsiPlus)[3] - Amplitude(1 / std::numbers::sqrt2)) < kTolerance);
  CHECK(std::abs(bell_state(BellKind::PhiMinus)[1] - Amplitude(1 / std::numbers::sqrt2)) < kTolerance);
  CHECK(std::abs(bell_state(BellKind::PhiMinus)[2] + Amplitude(1 / std::numbers::sqrt2)) < kTolerance);
  for (BellKind j : kAllBellKinds) {
    for (BellKind k : kAllBellKinds) {
      CHECK(std::abs(fidelity_pure(bell_state(j), bell_state(k)) - (j == k ? 1.0 : 0.0)) < kTolerance);
    }
  }
  for (BellKind k : kAllBellKinds) CHECK(parse_bell_kind(to_string(k)) == k);
  CHECK_FALSE(parse_bell_kind("psi").has_value());
}

TEST_CASE("Pauli conventions") {
  for (int p = 0; p < 4; ++p) {
    const auto got = test::to_mat(pauli_matrix(pauli_from_oracle(p)));
    CHECK(test::max_diff(got, oracle::pauli(p)) == 0.0);
  }
  // iY = ZX
  CHECK(test::max_diff(test::to_mat(pauli_matrix(PauliKind::iY)),
                       oracle::matmul(oracle::pauli(2), oracle::pauli(1))) == 0.0);
  CHECK(parse_pauli("iY") == PauliKind::iY);
  CHECK_FALSE(parse_pauli("Y").has_value());
}

TEST_CASE("SMO encoding") {
  CHECK(to_string(smo_of(BellKind::PsiPlus)) == "00");
  CHECK(to_string(smo_of(BellKind::PhiPlus)) == "01");
  CHECK(to_string(smo_of(BellKind::PsiMinus)) == "10");
  CHECK(to_string(smo_of(BellKind::PhiMinus)) == "11");
  for (Smo s : kAllSmos) {
    CHECK(smo_of(bell_of(s)) == s);
    CHECK(parse_smo(to_string(s)) == s);
  }
  CHECK_FALSE(parse_smo("2").has_value());
}

TEST_CASE("printed correction table") {
  const auto t = paper_table_1();
  CHECK(t.at(BellKind::PsiPlus, *parse_smo("01")) == PauliKind::X);
  CHECK(t.at(BellKind::PhiPlus, *parse_smo("10")) == PauliKind::iY);
  CHECK(t.at(BellKind::PhiMinus, *parse_smo("11")) == PauliKind::I);
  CHECK(parse_correction_table(render_table(t)) == t);
}

TEST_CASE("table parser is strict") {
  const auto good = render_table(paper_table_1());
  CHECK_BCST_ERROR(parse_correction_table(good + "shared=psi+ smo=00 pauli=I\n"), ErrorCode::ParseError);
  CHECK_BCST_ERROR(parse_correction_table("shared=psi+ smo=00 pauli=I\n"), ErrorCode::ParseError);
  CHECK_BCST_ERROR(parse_correction_table("shared=psi+ smo=00 pauli=Q\n"), ErrorCode::ParseError);
  CHECK_BCST_ERROR(parse_correction_table("shared=psi+ smo=00 pauli=I extra=1\n"), ErrorCode::ParseError);
  CHECK_BCST_ERROR(parse_correction_table("shared=psi+ shared=psi- smo=00 pauli=I\n"),
                   ErrorCode::ParseError);
  CHECK(parse_correction_table("# header\n\n" + good + "# trailing\n") == paper_table_1());
}

TEST_CASE("derived correction table agrees with the reference search") {
  const auto derived = derive_correction_table();
  const auto inputs = oracle_inputs();
  for (BellKind shared : kAllBellKinds) {
    for (Smo smo : kAllSmos) {
      const auto found = restoring_paulis(test::oracle_index(shared), oracle_outcome(smo), inputs);
      REQUIRE(found.size() == 1);
      CHECK(derived.at(shared, smo) == pauli_from_oracle(found[0]));
    }
  }
  CHECK(derived.columns_bijective());
}

TEST_CASE("derived correction table cells") {
  const auto d = derive_correction_table();
  const auto at = [&](BellKind k, const char* smo) { return d.at(k, *parse_smo(smo)); };
  CHECK(at(BellKind::PsiPlus, "00") == PauliKind::I);
  CHECK(at(BellKind::PsiPlus, "01") == PauliKind::X);
  CHECK(at(BellKind::PsiPlus, "10") == PauliKind::Z);
  CHECK(at(BellKind::PsiPlus, "11") == PauliKind::iY);
  CHECK(at(BellKind::PhiPlus, "01") == PauliKind::I);
  CHECK(at(BellKind::PsiMinus, "01") == PauliKind::iY);
  CHECK(at(BellKind::PsiMinus, "11") == PauliKind::X);
}

TEST_CASE("diff against the printed table") {
  const auto diff = diff_tables(paper_table_1(), derive_correction_table());
  REQUIRE(diff.size() == 2);
  CHECK(diff[0] == CorrectionDiff{BellKind::PsiMinus, *parse_smo("01"), PauliKind::X, PauliKind::iY});
  CHECK(diff[1] == CorrectionDiff{BellKind::PsiMinus, *parse_smo("11"), PauliKind::iY, PauliKind::X});
  CHECK(render_diff(diff, "printed", "derived") ==
        "shared=psi- smo=01 printed=X derived=iY\nshared=psi- smo=11 printed=iY derived=X\n");
  CHECK(diff_tables(paper_table_1(), paper_table_1()).empty());
}

TEST_CASE("round trip through every table cell") {
  const auto& table = derive_correction_table();
  RandomStream rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto input = haar_random_qubit(rng);
    for (BellKind shared : kAllBellKinds) {
      for (Smo smo : kAllSmos) {
        const auto received = teleport_branch(input, bell_state(shared), smo);
        const auto corrected = apply_1q(received, 0, pauli_matrix(table.at(shared, smo)));
        CHECK(fidelity_pure(corrected, input) > 1 - kTolerance);
      }
    }
  }
}

TEST_CASE("uniqueness oracle rejects ambiguous or impossible channels") {
  const auto inputs = certification_inputs();
  CHECK_BCST_ERROR(unique_correction([](const StateVector&) { return StateVector::basis(1, 0); }, inputs),
                   ErrorCode::NoUniqueCorrection);
  // A single basis input cannot tell I from Z.
  const std::vector<StateVector> weak = {StateVector::basis(1, 0)};
  CHECK_BCST_ERROR(unique_correction([](const StateVector& s) { return s; }, weak),
                   ErrorCode::NoUniqueCorrection);
  CHECK(unique_correction([](const StateVector& s) { return s; }, inputs) == PauliKind::I);
}

TEST_CASE("certification inputs are fixed and seeded") {
  const auto a = certification_inputs(3, 1);
  const auto b = certification_inputs(3, 1);
  REQUIRE(a.size() == 6);
  CHECK(std::abs(a[2][0] - Amplitude(0.6)) < kTolerance);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs_difference(a[i], b[i]) == 0.0);
}
