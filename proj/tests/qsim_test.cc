#include "qucoin/qsim.h"

#include <cmath>
#include <map>

#include "gtest/gtest.h"

#include "brute_force.h"
#include "qucoin/errors.h"

using namespace qucoin;

namespace {

BitVec bv(const char *s) {
    return BitVec::from_string(s);
}

Subspace span_of(std::initializer_list<std::string_view> rows) {
    return Subspace::span(F2Matrix::from_strings(rows));
}

CosetState random_coset_state(size_t lambda, Rng &rng) {
    size_t dim = rng.below(lambda + 1);
    return CosetState(random_subspace(lambda, dim, rng), random_bitvec(lambda, rng), random_bitvec(lambda, rng));
}

}  // namespace

TEST(expand, eq1_structure_at_zero_shift) {
    StateVector s = expand(CosetState(span_of({"1100", "0011"}), bv("0000"), bv("0000")));
    for (uint32_t i = 0; i < 16; i++) {
        double expected = (i == 0b0000 || i == 0b1100 || i == 0b0011 || i == 0b1111) ? 0.5 : 0.0;
        EXPECT_NEAR(s.amplitude(brute::vec(i, 4)).real(), expected, 1e-12) << i;
        EXPECT_EQ(s.amplitude(brute::vec(i, 4)).imag(), 0.0);
    }
}

TEST(expand, zero_space_is_a_basis_state) {
    StateVector s = expand(CosetState(Subspace(4), bv("0101"), bv("1111")));
    EXPECT_NEAR(fidelity(s, StateVector::basis(bv("0101"))), 1.0, 1e-12);
}

TEST(expand, phase_vector_sets_signs) {
    // s in {0000, 1000}: <1000, 1000> = 1 gives the minus sign.
    StateVector s = expand(CosetState(span_of({"1000"}), bv("0000"), bv("1000")));
    double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(s.amplitude(bv("0000")).real(), r, 1e-12);
    EXPECT_NEAR(s.amplitude(bv("1000")).real(), -r, 1e-12);
    EXPECT_EQ(s.support().size(), 2u);
}

TEST(expand, capacity_limit) {
    CosetState big(Subspace(17), BitVec(17), BitVec(17));
    EXPECT_THROW(expand(big), Error);
}

TEST(expand, norm_one_and_exact_zeros_outside_coset) {
    Rng rng(4);
    for (int t = 0; t < 200; t++) {
        size_t lambda = 1 + rng.below(8);
        CosetState c = random_coset_state(lambda, rng);
        StateVector s = expand(c);
        EXPECT_NEAR(s.norm(), 1.0, 1e-9);
        auto points = brute::shifted(brute::span_of(c.space()), brute::to_int(c.shift()));
        for (uint32_t v = 0; v < (1u << lambda); v++) {
            if (points.count(v) == 0) {
                ASSERT_EQ(s.amplitude(brute::vec(v, lambda)), Amplitude(0));
            }
        }
    }
}

TEST(expand, round_trip_through_recognition) {
    Rng rng(8);
    for (int t = 0; t < 200; t++) {
        size_t lambda = 1 + rng.below(8);
        CosetState c = random_coset_state(lambda, rng);
        auto back = recognize_coset_state(expand(c));
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(back->space(), c.space());
        EXPECT_TRUE(c.space().contains(back->shift() ^ c.shift()));
        EXPECT_TRUE(dual(c.space()).contains(back->phase() ^ c.phase()));
        EXPECT_NEAR(fidelity(expand(*back), expand(c)), 1.0, 1e-9);
    }
    std::vector<Amplitude> amps(8, 0.0);
    amps[0] = amps[1] = amps[2] = 1.0 / std::sqrt(3.0);
    EXPECT_FALSE(recognize_coset_state(StateVector::from_amplitudes(3, amps)).has_value());
}

TEST(hadamard, zero_state_goes_to_uniform) {
    StateVector s = hadamard_all(StateVector::basis(bv("0000")));
    for (const auto &a : s.amplitudes()) {
        EXPECT_NEAR(a.real(), 0.25, 1e-12);
        EXPECT_NEAR(a.imag(), 0.0, 1e-12);
    }
}

TEST(hadamard, is_an_involution) {
    Rng rng(12);
    for (int t = 0; t < 50; t++) {
        size_t lambda = 1 + rng.below(8);
        std::vector<Amplitude> amps(size_t{1} << lambda);
        double n = 0;
        for (auto &a : amps) {
            a = Amplitude(rng.unit() - 0.5, rng.unit() - 0.5);
            n += std::norm(a);
        }
        for (auto &a : amps) {
            a /= std::sqrt(n);
        }
        StateVector psi = StateVector::from_amplitudes(lambda, amps);
        StateVector back = hadamard_all(hadamard_all(psi));
        for (size_t i = 0; i < amps.size(); i++) {
            EXPECT_NEAR(std::abs(back.amplitudes()[i] - psi.amplitudes()[i]), 0.0, 1e-9);
        }
    }
}

// Exhaustive at lambda <= 8: support of H(expand(S, x, z)) is the point set S^perp + z.
TEST(hadamard, coset_state_support_is_dual_coset) {
    Rng rng(21);
    for (size_t lambda = 1; lambda <= 8; lambda++) {
        for (int rep = 0; rep < 12; rep++) {
            CosetState c = random_coset_state(lambda, rng);
            StateVector h = hadamard_all(expand(c));
            auto perp = brute::orthogonal_complement(brute::span_of(c.space()), lambda);
            auto expected = brute::shifted(perp, brute::to_int(c.phase()));
            std::set<uint32_t> got;
            for (const auto &v : h.support(1e-18)) {
                got.insert(brute::to_int(v));
            }
            ASSERT_EQ(got, expected);
            // The symbolic transform agrees with the dense one up to global phase.
            EXPECT_NEAR(fidelity(expand(hadamard_all(c)), h), 1.0, 1e-9);
        }
    }
}

TEST(measure_predicate, always_true_keeps_state) {
    Rng rng(1);
    StateVector s = expand(CosetState(span_of({"1100", "0011"}), bv("0000"), bv("0000")));
    auto m = measure_predicate(s, [](const BitVec &) { return true; }, rng);
    EXPECT_TRUE(m.bit);
    EXPECT_NEAR(fidelity(m.post_state, s), 1.0, 1e-12);
}

TEST(measure_predicate, half_projection_on_eq1_state) {
    // Born rule on the 4-point support {0000, 1100, 0011, 1111}: two of the
    // points lie in span{1100}, each with |amp|^2 = 1/4, so P(1) = 1/2.
    StateVector s = expand(CosetState(span_of({"1100", "0011"}), bv("0000"), bv("0000")));
    Coset target(span_of({"1100"}), bv("0000"));
    auto pred = [&](const BitVec &v) { return target.contains(v); };
    Rng rng(99);
    int ones = 0;
    const int trials = 4000;
    for (int i = 0; i < trials; i++) {
        auto m = measure_predicate(s, pred, rng);
        if (m.bit) {
            ones++;
            double r = 1.0 / std::sqrt(2.0);
            EXPECT_NEAR(m.post_state.amplitude(bv("0000")).real(), r, 1e-12);
            EXPECT_NEAR(m.post_state.amplitude(bv("1100")).real(), r, 1e-12);
            EXPECT_EQ(m.post_state.support().size(), 2u);
        }
    }
    // 4 sigma band around 2000.
    EXPECT_NEAR(ones, trials / 2, 4 * std::sqrt(trials * 0.25));
}

TEST(measure_predicate, eigenstate_is_deterministic) {
    Rng rng(3);
    StateVector s = StateVector::basis(bv("0101"));
    for (int i = 0; i < 100; i++) {
        auto m = measure_predicate(s, [](const BitVec &v) { return v.str() == "0101"; }, rng);
        EXPECT_TRUE(m.bit);
        EXPECT_NEAR(fidelity(m.post_state, s), 1.0, 1e-12);
    }
}

TEST(measure_predicate, preserves_normalization_and_support) {
    Rng rng(77);
    for (int t = 0; t < 1000; t++) {
        size_t lambda = 1 + rng.below(8);
        StateVector s = expand(random_coset_state(lambda, rng));
        Coset pred_set(random_subspace(lambda, rng.below(lambda + 1), rng), random_bitvec(lambda, rng));
        auto pred = [&](const BitVec &v) { return pred_set.contains(v); };
        auto m = measure_predicate(s, pred, rng);
        ASSERT_NEAR(m.post_state.norm(), 1.0, 1e-9);
        for (const auto &v : m.post_state.support()) {
            ASSERT_EQ(pred_set.contains(v), m.bit);
            ASSERT_NE(s.amplitude(v), Amplitude(0));
        }
    }
}

TEST(measure_all, basis_state_is_deterministic) {
    Rng rng(5);
    for (int i = 0; i < 50; i++) {
        EXPECT_EQ(measure_all(StateVector::basis(bv("1010")), rng), bv("1010"));
    }
}

TEST(measure_all, uniform_over_coset_support) {
    StateVector s = expand(CosetState(span_of({"1100", "0011"}), bv("0000"), bv("0000")));
    Rng rng(2024);
    std::map<std::string, int> counts;
    const int n = 4000;
    for (int i = 0; i < n; i++) {
        counts[measure_all(s, rng).str()]++;
    }
    ASSERT_EQ(counts.size(), 4u);
    double chi2 = 0;
    for (const auto &[k, c] : counts) {
        double e = n / 4.0;
        chi2 += (c - e) * (c - e) / e;
    }
    // 3 degrees of freedom; 16.27 is the 0.001 critical value.
    EXPECT_LT(chi2, 16.27);
}

TEST(measure_all, symbolic_backend_samples_the_coset) {
    Rng rng(6);
    CosetState c(span_of({"1100", "0011"}), bv("1000"), bv("0000"));
    std::map<std::string, int> counts;
    for (int i = 0; i < 400; i++) {
        counts[measure_all(c, rng).str()]++;
    }
    EXPECT_EQ(counts.size(), 4u);
    EXPECT_TRUE(counts.count("1000"));
    EXPECT_TRUE(counts.count("0100"));
    EXPECT_TRUE(counts.count("1011"));
    EXPECT_TRUE(counts.count("0111"));
}

TEST(fidelity, examples) {
    Rng rng(1);
    StateVector psi = expand(random_coset_state(4, rng));
    EXPECT_NEAR(fidelity(psi, psi), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(StateVector::basis(bv("0000")), StateVector::basis(bv("1111"))), 0.0, 1e-12);
    double r = 1.0 / std::sqrt(2.0);
    StateVector plus = StateVector::from_amplitudes(1, {r, r});
    EXPECT_NEAR(fidelity(StateVector::basis(bv("0")), plus), 0.5, 1e-12);
    EXPECT_THROW(fidelity(StateVector::basis(bv("0")), StateVector::basis(bv("00"))), Error);
}

TEST(determinism, identical_seeds_identical_outcomes) {
    StateVector s = expand(CosetState(span_of({"1100", "0011"}), bv("0000"), bv("0000")));
    Rng a(555);
    Rng b(555);
    for (int i = 0; i < 200; i++) {
        EXPECT_EQ(measure_all(s, a), measure_all(s, b));
    }
}

TEST(symbolic, measurement_matches_dense_distribution) {
    // The symbolic backend must reproduce the dense Born statistics for coset
    // predicates, including the post-measurement state.
    Rng rng(31);
    for (int t = 0; t < 300; t++) {
        size_t lambda = 2 + rng.below(7);
        CosetState c = random_coset_state(lambda, rng);
        Coset pred_set(random_subspace(lambda, rng.below(lambda + 1), rng), random_bitvec(lambda, rng));
        auto pred = [&](const BitVec &v) { return pred_set.contains(v); };
        Rng r1(t);
        Rng r2(t);
        auto dense = measure_predicate(UnitState(expand(c)), pred, r1);
        auto symbolic = measure_predicate(UnitState(c), pred, r2);
        ASSERT_EQ(dense.bit, symbolic.bit);
        ASSERT_NEAR(fidelity(to_statevector(dense.post_state), to_statevector(symbolic.post_state)), 1.0, 1e-9);
    }
}

TEST(symbolic, hadamard_then_measure_stays_symbolic_for_aligned_predicates) {
    Rng rng(13);
    CosetState c(random_subspace(40, 20, rng), random_bitvec(40, rng), random_bitvec(40, rng));
    UnitState s = c;
    Coset dual_coset(dual(c.space()), c.phase());
    auto m = measure_predicate(hadamard_all(s), [&](const BitVec &v) { return dual_coset.contains(v); }, rng);
    EXPECT_TRUE(m.bit);
    EXPECT_TRUE(std::holds_alternative<CosetState>(m.post_state));
}

TEST(dump, json_lists_support_only) {
    StateVector s = expand(CosetState(span_of({"1000"}), bv("0000"), bv("1000")));
    auto j = dump_json(s);
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["basis"], "0000");
    EXPECT_EQ(j[1]["basis"], "1000");
    EXPECT_LT(j[1]["re"].get<double>(), 0);
}
