#include <set>
#include <string>

#include "bcst/keyswap.hpp"
#include "support.hpp"

using namespace bcst;

namespace {

const ChannelSpec kZha = parse_channel_spec("psi+,psi+,psi-,psi-;basis=+/-;sign=+");
const ChannelSpec kZhaPrime = parse_channel_spec("psi+,psi+,psi-,phi-;basis=0/1;sign=-");

constexpr PairProduct pp(BellKind x, BellKind y) { return {x, y}; }

// <m|_13 <n|_24 |x>_12 |y>_34 by explicit reordering and inner product.
double reference_coefficient(int x, int y, int m, int n) {
  const auto state = oracle::kron(oracle::bell(x), oracle::bell(y));
  const auto basis = oracle::reorder(oracle::kron(oracle::bell(m), oracle::bell(n)), 4, {0, 2, 1, 3});
  return std::real(oracle::inner(basis, state));
}

}  // namespace

TEST_CASE("key bits") {
  CHECK(key_bits(BellKind::PsiPlus) == "00");
  CHECK(key_bits(BellKind::PsiMinus) == "01");
  CHECK(key_bits(BellKind::PhiPlus) == "10");
  CHECK(key_bits(BellKind::PhiMinus) == "11");
}

TEST_CASE("swap table from the reference expansion") {
  const auto& table = swap_table();
  for (BellKind x : kAllBellKinds) {
    for (BellKind y : kAllBellKinds) {
      const auto init = pp(x, y);
      CHECK(table.is_bijection(init));
      const auto coeffs = swap_coefficients(init);
      double norm = 0.0;
      std::size_t nonzero = 0;
      for (BellKind m : kAllBellKinds) {
        for (BellKind n : kAllBellKinds) {
          const double c = coeffs[index_of(m)][index_of(n)];
          const double ref = reference_coefficient(test::oracle_index(x), test::oracle_index(y),
                                                   test::oracle_index(m), test::oracle_index(n));
          CHECK(std::abs(c - ref) < kTolerance);
          norm += c * c;
          if (std::abs(c) > kTolerance) {
            ++nonzero;
            CHECK(std::abs(std::abs(c) - 0.5) < kTolerance);
            CHECK(table.bob_for(init, m) == n);
          }
        }
      }
      CHECK(nonzero == 4);
      CHECK(std::abs(norm - 1.0) < kTolerance);
    }
  }
}

TEST_CASE("published rows") {
  const auto& t = swap_table();
  for (BellKind k : kAllBellKinds) CHECK(t.bob_for(pp(BellKind::PsiPlus, BellKind::PsiPlus), k) == k);
  const auto row5 = pp(BellKind::PsiPlus, BellKind::PhiPlus);
  CHECK(t.bob_for(row5, BellKind::PsiPlus) == BellKind::PhiPlus);
  CHECK(t.bob_for(row5, BellKind::PsiMinus) == BellKind::PhiMinus);
  CHECK(t.bob_for(row5, BellKind::PhiPlus) == BellKind::PsiPlus);
  CHECK(t.bob_for(row5, BellKind::PhiMinus) == BellKind::PsiMinus);

  CHECK(infer_alice_outcome(pp(BellKind::PsiPlus, BellKind::PsiPlus), BellKind::PhiMinus) == BellKind::PhiMinus);
  CHECK(infer_alice_outcome(row5, BellKind::PsiMinus) == BellKind::PhiMinus);
}

TEST_CASE("swap branches have probability one quarter") {
  for (BellKind x : kAllBellKinds) {
    for (BellKind y : kAllBellKinds) {
      const auto s = tensor({bell_state(x), bell_state(y)});
      const auto branches = measure_bell_pair_all(s, 0, 2);
      REQUIRE(branches.size() == 4);
      for (const auto& b : branches) {
        CHECK(std::abs(b.probability - 0.25) < kTolerance);
        const auto bob = swap_table().bob_for(pp(x, y), b.outcome);
        REQUIRE(bob.has_value());
        CHECK(equal_up_to_global_phase(b.remainder, bell_state(*bob)));
      }
    }
  }
}

TEST_CASE("diff against the printed table") {
  const auto printed = paper_table_4();
  for (BellKind x : kAllBellKinds)
    for (BellKind y : kAllBellKinds) CHECK(printed.terms(pp(x, y)).size() == 4);
  const auto diff = diff_swap_tables(printed, swap_table());
  std::set<std::string> rows;
  for (const auto& d : diff) rows.insert(to_string(d.init));
  CHECK(rows.count("phi-,phi+") == 1);
  CHECK(render_swap_diff(diff, "printed", "derived") ==
        render_swap_diff(diff_swap_tables(printed, derive_swap_table()), "printed", "derived"));
  CHECK(diff_swap_tables(swap_table(), swap_table()).empty());
  CHECK(render_swap_table(parse_swap_table(render_swap_table(printed))) == render_swap_table(printed));
}

TEST_CASE("diff classification") {
  SwapTable left;
  SwapTable right;
  const auto init = pp(BellKind::PsiPlus, BellKind::PsiPlus);
  left.add(init, {BellKind::PsiPlus, BellKind::PsiPlus, Sign::Plus});
  left.add(init, {BellKind::PsiMinus, BellKind::PsiMinus, Sign::Minus});
  right.add(init, {BellKind::PsiPlus, BellKind::PsiPlus, Sign::Minus});
  right.add(init, {BellKind::PsiMinus, BellKind::PsiMinus, Sign::Plus});
  auto diff = diff_swap_tables(left, right);
  REQUIRE(diff.size() == 1);
  CHECK(diff[0].kind == SwapDiffKind::GlobalSign);

  SwapTable partial;
  partial.add(init, {BellKind::PsiPlus, BellKind::PsiPlus, Sign::Minus});
  partial.add(init, {BellKind::PsiMinus, BellKind::PsiMinus, Sign::Minus});
  diff = diff_swap_tables(left, partial);
  REQUIRE(diff.size() == 1);
  CHECK(diff[0].kind == SwapDiffKind::Signs);
}

TEST_CASE("swap table parser") {
  CHECK_BCST_ERROR(parse_swap_table("init=psi+ alice=psi+ bob=psi+ sign=+"), ErrorCode::ParseError);
  CHECK_BCST_ERROR(parse_swap_table("init=psi+,psi+ alice=psi+ bob=psi+ sign=0"), ErrorCode::ParseError);
  CHECK_BCST_ERROR(parse_swap_table("init=psi+,psi+ alice=psi+ sign=+"), ErrorCode::ParseError);
}

TEST_CASE("key agreement") {
  SUBCASE("disclosed rounds always agree") {
    for (const auto& spec : enumerate_valid(SingleQubitBasis::hadamard(), Sign::Plus)) {
      const auto k = key_agreement_exhaustive(spec, true);
      CHECK(k.agreement_rate == 1.0);
      CHECK(std::abs(k.total_probability - 1.0) < kTolerance);
    }
  }

  SUBCASE("withheld agreement matches a direct count") {
    for (const auto& spec : enumerate_valid(SingleQubitBasis::hadamard(), Sign::Minus)) {
      const auto products = branch_products(spec);
      int same = 0;
      for (BellKind m : kAllBellKinds) {
        same += swap_table().bob_for(products[0], m) == swap_table().bob_for(products[1], m);
      }
      const auto k = classify_key_security(spec);
      CHECK(std::abs(k.withheld_agreement - (0.5 + 0.5 * same / 4.0)) < kTolerance);
      CHECK(k.secure == (same < 4));
      if (k.secure) CHECK(k.withheld_agreement < 1.0);
    }
  }

  SUBCASE("Zha is insecure, Zha-prime is not") {
    CHECK_FALSE(classify_key_security(kZha).secure);
    const auto zp = classify_key_security(kZhaPrime);
    CHECK(zp.secure);
    REQUIRE(zp.witness_bob_outcome.has_value());
    const auto products = branch_products(kZhaPrime);
    CHECK(infer_alice_outcome(products[0], *zp.witness_bob_outcome) !=
          infer_alice_outcome(products[1], *zp.witness_bob_outcome));
  }

  SUBCASE("sampled rounds") {
    int agree_disclosed = 0;
    int agree_withheld = 0;
    constexpr int kRounds = 10000;
    for (int i = 0; i < kRounds; ++i) {
      auto r1 = RandomStream::for_trial(1, static_cast<std::uint64_t>(i));
      const auto a = run_key_round(kZha, true, r1);
      CHECK(a.disclosed);
      agree_disclosed += a.alice_key == a.bob_key;
      auto r2 = RandomStream::for_trial(2, static_cast<std::uint64_t>(i));
      const auto b = run_key_round(kZhaPrime, false, r2);
      agree_withheld += b.alice_key == b.bob_key;
    }
    CHECK(agree_disclosed == kRounds);
    CHECK(agree_withheld < kRounds);
    CHECK(std::abs(agree_withheld / double(kRounds) - key_agreement_exhaustive(kZhaPrime, false).agreement_rate) < 0.03);
  }

  RandomStream rng(3);
  CHECK_BCST_ERROR(run_key_round(parse_channel_spec("psi+,psi+,psi+,psi-"), true, rng),
                   ErrorCode::ConditionViolated);
}
