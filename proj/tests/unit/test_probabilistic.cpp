#include <numbers>

#include "bcst/probabilistic.hpp"
#include "support.hpp"

using namespace bcst;

namespace {

const ChannelSpec kZha = parse_channel_spec("psi+,psi+,psi-,psi-;basis=+/-;sign=+");

// U written entry by entry from the printed matrix.
oracle::Mat printed_u(double a, double b) {
  const double r = b / a;
  const double c = std::sqrt(1 - r * r);
  return {{r, c, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}, {c, -r, 0, 0}};
}

oracle::Mat printed_u1(double a, double b) {
  const double r = b / a;
  const double c = std::sqrt(1 - r * r);
  return {{0, 0, r, c}, {0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, c, -r}};
}

// Generalized pair, sender qubit first.
oracle::Vec gen_pair(int kind, double a, double b) {
  switch (kind) {
    case 0: return {a, 0, 0, b};
    case 1: return {a, 0, 0, -b};
    case 2: return {0, a, b, 0};
    default: return {0, a, -b, 0};
  }
}

// Ancilla-0 component after the conversion step; unnormalized.
oracle::Vec herald(const oracle::Vec& received, const oracle::Mat& u) {
  const auto joint = oracle::apply(u, oracle::kron(received, oracle::Vec{1, 0}));
  return {joint[0], joint[2]};
}

GenBellParams random_params(RandomStream& rng) {
  // a^2 in (0.5, 1), away from the excluded midpoint.
  const double a2 = 0.5 + 0.0005 + 0.499 * rng.next_unit();
  return GenBellParams(std::sqrt(a2), std::sqrt(1 - a2));
}

}  // namespace

TEST_CASE("coefficient validation") {
  CHECK_BCST_ERROR(GenBellParams(0.6, 0.8), ErrorCode::InvalidRatio);
  CHECK_BCST_ERROR(GenBellParams(0.5, 0.5), ErrorCode::InvalidParameter);
  CHECK_BCST_ERROR(GenBellParams(1 / std::numbers::sqrt2, 1 / std::numbers::sqrt2),
                   ErrorCode::InvalidParameter);
  CHECK_BCST_ERROR(GenBellParams(-0.8, 0.6), ErrorCode::InvalidParameter);
  const auto p = GenBellParams::from_unordered(0.6, 0.8);
  CHECK(p.a() == 0.8);
  CHECK(p.b() == 0.6);
  CHECK_BCST_ERROR(matrix_U(0.6, 0.8), ErrorCode::InvalidRatio);

  const auto [p1, p2] = parse_prob_params("a1=0.8,b1=0.6,a2=0.9,b2=0.43588989435406733");
  CHECK(p1.b() == 0.6);
  CHECK(p2.a() == 0.9);
  CHECK_BCST_ERROR(parse_prob_params("a1=0.8,b1=0.6,a2=0.6,b2=0.8"), ErrorCode::InvalidRatio);
  CHECK_BCST_ERROR(parse_prob_params("a1=0.8,b1=0.6,a2=0.8"), ErrorCode::ParseError);
  CHECK_BCST_ERROR(parse_prob_params("a1=0.8,b1=0.6,a2=0.8,b2=x"), ErrorCode::ParseError);
  CHECK_BCST_ERROR(parse_prob_params("a1=0.8,b1=0.6,a2=0.8,b2=0.6,c=1"), ErrorCode::ParseError);
}

TEST_CASE("conversion unitaries") {
  const auto u = matrix_U(0.8, 0.6);
  CHECK(std::abs(u(0, 0) - 0.75) < kTolerance);
  CHECK(std::abs(u(0, 1) - std::sqrt(1 - 0.5625)) < kTolerance);
  const auto u1 = matrix_U1(0.8, 0.6);
  CHECK(std::abs(u1(0, 2) - 0.75) < kTolerance);
  CHECK(std::abs(u1(3, 2) - std::sqrt(1 - 0.5625)) < kTolerance);
  CHECK(std::abs(u1(1, 2)) < kTolerance);

  Mat4 x_i = Mat4::Zero();
  x_i(0, 2) = x_i(1, 3) = x_i(2, 0) = x_i(3, 1) = 1;
  RandomStream rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_params(rng);
    const auto mu = matrix_U(p.a(), p.b());
    const auto mu1 = matrix_U1(p.a(), p.b());
    CHECK((mu * mu.adjoint() - Mat4::Identity()).cwiseAbs().maxCoeff() < kTolerance);
    CHECK((mu1 * mu1.adjoint() - Mat4::Identity()).cwiseAbs().maxCoeff() < kTolerance);
    CHECK((mu1 - mu * x_i).cwiseAbs().maxCoeff() < kTolerance);
    CHECK(test::max_diff(test::to_mat(mu), printed_u(p.a(), p.b())) < kTolerance);
    CHECK(test::max_diff(test::to_mat(mu1), printed_u1(p.a(), p.b())) < kTolerance);
  }
}

TEST_CASE("pairs and channels") {
  const GenBellPair pair{BellKind::PhiMinus, GenBellParams(0.8, 0.6)};
  CHECK_FALSE(pair.psi_family());
  CHECK(std::abs(pair.state()[2] + 0.6) < kTolerance);

  const auto spec = ProbChannelSpec::from(kZha, GenBellParams(0.8, 0.6), GenBellParams(0.9, std::sqrt(0.19)));
  CHECK(check_condition(spec));
  CHECK(to_string(spec.kinds()) == to_string(kZha));
  const auto state = build_channel_state(spec);
  const auto branches = measure_qubit_all(state, 4, spec.charlie_basis);
  REQUIRE(branches.size() == 2);
  // Pair 2 is stored (A2, B2) with B2 as sender: a on |00> of (B2, A2).
  const auto expected = tensor({StateVector({0.8, 0, 0, 0.6}), StateVector({0.9, 0, 0, std::sqrt(0.19)})});
  CHECK(equal_up_to_global_phase(branches[0].remainder, expected));
}

TEST_CASE("correction table after conversion") {
  const auto derived = derive_prob_correction_table();
  CHECK(derived == paper_table_3());
  CHECK(derived.columns_bijective());
  const auto printed = paper_table_3();
  CHECK(printed.at(BellKind::PsiPlus, *parse_smo("00")) == PauliKind::I);
  CHECK(printed.at(BellKind::PhiPlus, *parse_smo("01")) == PauliKind::X);
  CHECK(printed.at(BellKind::PsiMinus, *parse_smo("01")) == PauliKind::iY);

  SUBCASE("reference computation agrees for other coefficients") {
    RandomStream rng(31);
    const auto params = random_params(rng);
    const auto table = derive_prob_correction_table(params);
    const std::vector<oracle::Vec> inputs = {{1, 0}, {0, 1}, {0.6, 0.8}, {0.28, oracle::C(0.6, 0.75)}};
    constexpr std::array<int, 4> smo_to_oracle = {0, 2, 1, 3};
    for (BellKind kind : kAllBellKinds) {
      const int k = test::oracle_index(kind);
      const auto u = (k < 2) ? printed_u(params.a(), params.b()) : printed_u1(params.a(), params.b());
      for (Smo smo : kAllSmos) {
        const auto p = oracle::pauli(static_cast<int>(table.at(kind, smo)));
        for (const auto& in0 : inputs) {
          const double n = std::sqrt(std::real(oracle::inner(in0, in0)));
          const oracle::Vec in = {in0[0] / n, in0[1] / n};
          const auto received = oracle::teleport(in, gen_pair(k, params.a(), params.b()), smo_to_oracle[smo.index()]);
          const auto corrected = oracle::apply(p, herald(received, u));
          CHECK(oracle::normalized_fidelity(corrected, in) > 1 - kTolerance);
        }
      }
    }
  }
}

TEST_CASE("success probability") {
  const auto spec = ProbChannelSpec::from(kZha, GenBellParams(0.8, 0.6), GenBellParams(0.8, 0.6));
  const auto sp = success_probability(spec);
  CHECK(std::abs(sp.numeric_a_to_b - 0.72) < kTolerance);
  CHECK(std::abs(sp.numeric_b_to_a - 0.72) < kTolerance);
  CHECK(std::abs(sp.analytic_a_to_b - 0.72) < kTolerance);

  SUBCASE("reference sum over outcomes equals 2 b^2") {
    RandomStream rng(4);
    for (int i = 0; i < 20; ++i) {
      const auto p = random_params(rng);
      for (int k = 0; k < 4; ++k) {
        const auto u = k < 2 ? printed_u(p.a(), p.b()) : printed_u1(p.a(), p.b());
        const oracle::Vec in = {0.6, 0.8};
        double total = 0.0;
        for (int outcome = 0; outcome < 4; ++outcome) {
          const auto h = herald(oracle::teleport(in, gen_pair(k, p.a(), p.b()), outcome), u);
          total += std::real(oracle::inner(h, h));
        }
        CHECK(std::abs(total - 2 * p.b() * p.b()) < kTolerance);
      }
    }
  }

  SUBCASE("each direction uses its own pair") {
    const auto mixed = ProbChannelSpec::from(kZha, GenBellParams(0.8, 0.6), GenBellParams(0.9, std::sqrt(0.19)));
    const auto m = success_probability(mixed);
    CHECK(std::abs(m.numeric_a_to_b - 0.72) < kTolerance);
    CHECK(std::abs(m.numeric_b_to_a - 0.38) < kTolerance);
    CHECK(std::abs(m.analytic_b_to_a - m.numeric_b_to_a) < kTolerance);
  }

  SUBCASE("reordered coefficients give the same probability") {
    const auto re = ProbChannelSpec::from(kZha, GenBellParams::from_unordered(0.6, 0.8),
                                          GenBellParams(0.8, 0.6));
    CHECK(std::abs(success_probability(re).numeric_a_to_b - 0.72) < kTolerance);
  }

  SUBCASE("approaches one near the maximally entangled limit") {
    const double a2 = 0.5 + 1e-3;
    const auto near = ProbChannelSpec::from(kZha, GenBellParams(std::sqrt(a2), std::sqrt(1 - a2)),
                                            GenBellParams(std::sqrt(a2), std::sqrt(1 - a2)));
    CHECK(std::abs(success_probability(near).numeric_a_to_b - 2 * (0.5 - 1e-3)) < kTolerance);

    double previous = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double x = 0.95 - 0.045 * i;  // a^2 from 0.95 down to 0.545
      const auto s = ProbChannelSpec::from(kZha, GenBellParams(std::sqrt(x), std::sqrt(1 - x)),
                                           GenBellParams(std::sqrt(x), std::sqrt(1 - x)));
      const double p = success_probability(s).numeric_a_to_b;
      CHECK(p > previous);
      previous = p;
    }
  }
}

TEST_CASE("heralded branches") {
  RandomStream rng(55);
  for (int i = 0; i < 20; ++i) {
    const auto params = random_params(rng);
    const auto spec = ProbChannelSpec::from(
        enumerate_valid(SingleQubitBasis::hadamard(), Sign::Plus)[static_cast<std::size_t>(i * 7)], params,
        random_params(rng));
    for (int j = 0; j < 5; ++j) {
      const UnknownQubit a(haar_random_qubit(rng));
      const UnknownQubit b(haar_random_qubit(rng));
      const auto ex = enumerate_prob_branches(spec, a, b);
      CHECK(std::abs(ex.total_probability - 1.0) < kTolerance);
      CHECK(ex.min_success_fidelity_a_to_b > 1 - kTolerance);
      CHECK(ex.min_success_fidelity_b_to_a > 1 - kTolerance);
      for (const auto& br : ex.branches) {
        // A failed receiver is left in |1>.
        if (br.ancilla_bob == 1) CHECK(std::abs(br.fidelity_a_to_b - std::norm(a.beta())) < 1e-10);
        if (br.ancilla_alice == 1) CHECK(std::abs(br.fidelity_b_to_a - std::norm(b.beta())) < 1e-10);
      }
    }
  }
}

TEST_CASE("sampled runs") {
  const auto spec = ProbChannelSpec::from(kZha, GenBellParams(0.8, 0.6), GenBellParams(0.8, 0.6));
  const UnknownQubit a(0.6, 0.8);
  const UnknownQubit b(std::sqrt(0.5), std::polar(std::sqrt(0.5), 1.0));
  constexpr int kTrials = 20000;
  int successes = 0;
  for (int i = 0; i < kTrials; ++i) {
    auto rng = RandomStream::for_trial(kDefaultSeed, static_cast<std::uint64_t>(i));
    const auto r = run_pbcst(spec, a, b, rng);
    for (const auto* d : {&r.a_to_b, &r.b_to_a}) {
      CHECK(d->success == (d->ancilla_outcome == 0));
      CHECK(d->correction.has_value() == d->success);
      if (d->success) CHECK(d->fidelity > 1 - kTolerance);
    }
    if (r.a_to_b.success) ++successes;
  }
  const double rate = static_cast<double>(successes) / kTrials;
  const double sigma = std::sqrt(0.72 * 0.28 / kTrials);
  CHECK(std::abs(rate - 0.72) < 3 * sigma);

  RandomStream rng(1);
  CHECK_BCST_ERROR(run_pbcst(ProbChannelSpec::from(parse_channel_spec("psi+,psi+,psi+,psi-"),
                                                   GenBellParams(0.8, 0.6), GenBellParams(0.8, 0.6)),
                             a, b, rng),
                   ErrorCode::ConditionViolated);
}
