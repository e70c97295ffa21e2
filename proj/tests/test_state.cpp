#include <cmath>
#include <complex>
#include <map>

#include "doctest.h"
#include "qfp/state.hpp"

using namespace qfp;

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

SparseState random_state(uint32_t num_qubits, RngStream& rng, size_t terms = 6) {
    SparseState s(num_qubits);
    s.entries().clear();
    for (size_t i = 0; i < terms; ++i) {
        Basis b = Basis::from_bits(rng.next_u64() & ((uint64_t{1} << num_qubits) - 1));
        s.entries()[b] += Amplitude{rng.next_double() - 0.5, rng.next_double() - 0.5};
    }
    s.renormalize();
    return s;
}

GateOp random_gate(uint32_t num_qubits, RngStream& rng) {
    for (;;) {
        int kind = static_cast<int>(rng.next_u64() % 6);
        uint32_t t0 = static_cast<uint32_t>(rng.next_u64() % num_qubits);
        uint32_t t1 = static_cast<uint32_t>(rng.next_u64() % num_qubits);
        uint32_t c0 = static_cast<uint32_t>(rng.next_u64() % num_qubits);
        uint32_t c1 = static_cast<uint32_t>(rng.next_u64() % num_qubits);
        bool p0 = rng.next_u64() & 1, p1 = rng.next_u64() & 1;
        int nc = static_cast<int>(rng.next_u64() % 3);
        double angle = (rng.next_double() - 0.5) * 8.0;
        try {
            GateOp g;
            switch (kind) {
                case 0: g = make_gate(GateKind::X, {t0}); break;
                case 1: g = make_gate(GateKind::Y, {t0}); break;
                case 2: g = make_gate(GateKind::Z, {t0}); break;
                case 3: g = make_gate(GateKind::H, {t0}); break;
                case 4: g = make_gate(GateKind::Phase, {t0}, {}, angle); break;
                default: g = make_gate(GateKind::Swap, {t0, t1}); break;
            }
            if (g.kind == GateKind::Swap) nc = std::min(nc, 1);
            for (int i = 0; i < nc; ++i) {
                g.controls[g.num_controls++] = Control{i == 0 ? c0 : c1, i == 0 ? p0 : p1};
            }
            g.validate(num_qubits);
            return g;
        } catch (const std::invalid_argument&) {
            continue;  // duplicate qubits drawn; retry
        }
    }
}

}  // namespace

TEST_CASE("X flips |0> to |1>") {
    SparseState s(1);
    apply_gate(s, g_x(0));
    CHECK(s.amplitude(Basis::from_bits(1)) == Amplitude{1.0, 0.0});
    CHECK(s.amplitude(Basis::from_bits(0)) == Amplitude{0.0, 0.0});
}

TEST_CASE("H creates uniform superposition from |0>") {
    SparseState s(1);
    apply_gate(s, g_h(0));
    CHECK(std::abs(s.amplitude(Basis::from_bits(0)) - Amplitude{kInvSqrt2, 0}) < 1e-12);
    CHECK(std::abs(s.amplitude(Basis::from_bits(1)) - Amplitude{kInvSqrt2, 0}) < 1e-12);
}

TEST_CASE("control-on-zero CCX fires when the inverted control is 0") {
    // |a=1, b=0, c=0> with controls (a on 1, b on 0): c flips.
    SparseState s = SparseState::basis_state(3, Basis::from_bits(0b001));
    apply_gate(s, g_ccx(ctrl(0), ctrl0(1), 2));
    CHECK(s.amplitude(Basis::from_bits(0b101)) == Amplitude{1.0, 0.0});

    // With b=1 the inverted control blocks the flip.
    SparseState t = SparseState::basis_state(3, Basis::from_bits(0b011));
    apply_gate(t, g_ccx(ctrl(0), ctrl0(1), 2));
    CHECK(t.amplitude(Basis::from_bits(0b011)) == Amplitude{1.0, 0.0});
}

TEST_CASE("gate validation rejects bad indices and duplicates") {
    SparseState s(2);
    CHECK_THROWS_AS(apply_gate(s, g_x(5)), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(s, g_cx(ctrl(1), 1)), std::invalid_argument);
}

TEST_CASE("measuring |0> gives 0 with certainty and leaves the state") {
    SparseState s(1);
    RngStream rng(7);
    CHECK(measure_qubit(s, 0, rng) == 0);
    CHECK(s.amplitude(Basis::from_bits(0)) == Amplitude{1.0, 0.0});
}

TEST_CASE("measurement projects a superposition") {
    // rng forced low -> outcome 0 -> state collapses to |0>.
    uint64_t low_seed = 0;
    for (uint64_t seed = 0; seed < 64; ++seed) {
        RngStream probe(seed);
        if (probe.next_double() < 0.25) {
            low_seed = seed;
            break;
        }
    }
    SparseState s(1);
    apply_gate(s, g_h(0));
    RngStream rng(low_seed);
    CHECK(measure_qubit(s, 0, rng) == 0);
    CHECK(std::abs(s.amplitude(Basis::from_bits(0)) - Amplitude{1.0, 0.0}) < 1e-12);
    CHECK(s.size() == 1);
}

TEST_CASE("entangled ancilla measures 0 or 1 with p=1/2") {
    // (|001> + |110>)/sqrt(2) after H on the ancilla (qubit 0): both outcomes
    // appear with probability 1/2 across seeds.
    int seen[2] = {0, 0};
    for (uint64_t seed = 0; seed < 40; ++seed) {
        SparseState s(3);
        s.entries().clear();
        s.entries()[Basis::from_bits(0b001)] = kInvSqrt2;
        s.entries()[Basis::from_bits(0b110)] = kInvSqrt2;
        apply_gate(s, g_h(0));
        RngStream rng(seed);
        seen[measure_qubit(s, 0, rng)]++;
    }
    CHECK(seen[0] > 5);
    CHECK(seen[1] > 5);
}

TEST_CASE("reset_ancilla reproduces the worked two-branch example") {
    // (|001> + |110>)/sqrt(2), reset qubit 0. Outcome 0 keeps both signs;
    // outcome 1 flips the sign of the branch whose ancilla held 1.
    bool saw[2] = {false, false};
    for (uint64_t seed = 0; seed < 64 && !(saw[0] && saw[1]); ++seed) {
        SparseState s(3);
        s.entries().clear();
        s.entries()[Basis::from_bits(0b001)] = kInvSqrt2;
        s.entries()[Basis::from_bits(0b110)] = kInvSqrt2;
        RngStream rng(seed);
        int outcome = reset_ancilla(s, 0, rng);
        saw[outcome] = true;
        REQUIRE(s.size() == 2);
        Amplitude a000 = s.amplitude(Basis::from_bits(0b000));
        Amplitude a110 = s.amplitude(Basis::from_bits(0b110));
        CHECK(std::abs(a110 - Amplitude{kInvSqrt2, 0}) < 1e-12);
        if (outcome == 0) {
            CHECK(std::abs(a000 - Amplitude{kInvSqrt2, 0}) < 1e-12);
        } else {
            CHECK(std::abs(a000 - Amplitude{-kInvSqrt2, 0}) < 1e-12);
        }
    }
    CHECK(saw[0]);
    CHECK(saw[1]);
}

TEST_CASE("reset_ancilla on ground state is a no-op") {
    for (uint64_t seed = 0; seed < 8; ++seed) {
        SparseState s(2);
        RngStream rng(seed);
        reset_ancilla(s, 0, rng);
        CHECK(s.size() == 1);
        CHECK(std::abs(s.amplitude(Basis::from_bits(0)) - Amplitude{1.0, 0.0}) < 1e-12);
    }
}

TEST_CASE("reset of a function-valued ancilla flips signs as (-1)^(f(x)*outcome)") {
    // sum_x c_x |x>|f(x)> with f(x) = parity of x; ancilla = qubit 0.
    auto build = [] {
        SparseState s(3);
        s.entries().clear();
        double c[4] = {0.5, 0.5, 0.5, 0.5};
        for (uint64_t x = 0; x < 4; ++x) {
            uint64_t f = (x ^ (x >> 1)) & 1;
            s.entries()[Basis::from_bits((x << 1) | f)] = c[x];
        }
        return s;
    };
    bool saw[2] = {false, false};
    for (uint64_t seed = 0; seed < 64 && !(saw[0] && saw[1]); ++seed) {
        SparseState s = build();
        RngStream rng(seed);
        int outcome = reset_ancilla(s, 0, rng);
        saw[outcome] = true;
        for (uint64_t x = 0; x < 4; ++x) {
            uint64_t f = (x ^ (x >> 1)) & 1;
            double expected_sign = (outcome == 1 && f == 1) ? -1.0 : 1.0;
            Amplitude a = s.amplitude(Basis::from_bits(x << 1));
            CHECK(std::abs(a - Amplitude{expected_sign * 0.5, 0.0}) < 1e-12);
        }
    }
    CHECK(saw[0]);
    CHECK(saw[1]);
}

TEST_CASE("reset invariant: marginal distribution of the other qubits is preserved") {
    // The ancilla in every arithmetic fragment holds a value computed from
    // the surviving qubits, so generate exactly that shape: random amplitudes
    // on |x>|f(x)> for a random f.
    RngStream seeds(99);
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rng = seeds.derive(trial);
        SparseState s(5);
        s.entries().clear();
        for (uint64_t x = 0; x < 16; ++x) {
            uint64_t f = RngStream::mix(x * 31 + trial) & 1;
            s.entries()[Basis::from_bits((x << 1) | f)] =
                Amplitude{rng.next_double() - 0.5, rng.next_double() - 0.5};
        }
        s.renormalize();
        std::map<uint64_t, double> before;
        for (const auto& [b, a] : s.entries()) before[b.low_bits() & ~uint64_t{1}] += std::norm(a);
        RngStream mrng = seeds.derive(1000 + trial);
        reset_ancilla(s, 0, mrng);
        std::map<uint64_t, double> after;
        for (const auto& [b, a] : s.entries()) {
            CHECK(!b.test(0));
            after[b.low_bits()] += std::norm(a);
        }
        for (const auto& [pattern, p] : before) {
            CHECK(after[pattern] == doctest::Approx(p).epsilon(1e-9));
        }
    }
}

TEST_CASE("to_dense and to_sparse round-trip exactly") {
    SparseState s = SparseState::basis_state(3, Basis::from_bits(0b101));
    DenseState d = to_dense(s);
    REQUIRE(d.amps().size() == 8);
    for (uint64_t i = 0; i < 8; ++i) {
        CHECK(d.amps()[i] == (i == 5 ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0}));
    }

    RngStream rng(3);
    SparseState r = random_state(3, rng);
    SparseState back = to_sparse(to_dense(r));
    for (const auto& [b, a] : r.entries()) CHECK(back.amplitude(b) == a);
}

TEST_CASE("dense cap is enforced") {
    CHECK_THROWS_AS(DenseState(27), std::invalid_argument);
    SparseState s(30);
    CHECK_THROWS_AS(to_dense(s), std::invalid_argument);
}

TEST_CASE("a 2^20-entry sparse state converts to a dense array of length 2^20") {
    const uint32_t n = 20;
    const double amp = std::pow(0.5, n / 2.0);
    SparseState s(n);
    s.entries().clear();
    s.entries().reserve(size_t{1} << n);
    for (uint64_t i = 0; i < (uint64_t{1} << n); ++i) {
        s.entries().emplace(Basis::from_bits(i), Amplitude{amp, 0.0});
    }
    DenseState d = to_dense(s);
    REQUIRE(d.amps().size() == (size_t{1} << 20));
    CHECK(d.amps()[0] == Amplitude{amp, 0.0});
    CHECK(d.amps()[(1 << 20) - 1] == Amplitude{amp, 0.0});
    SparseState back = to_sparse(d);
    CHECK(back.size() == s.size());
    CHECK(back.amplitude(Basis::from_bits(777777)) == Amplitude{amp, 0.0});
}

TEST_CASE("norm preservation and unitarity for random gates") {
    RngStream seeds(12);
    for (int trial = 0; trial < 60; ++trial) {
        RngStream rng = seeds.derive(trial);
        SparseState s = random_state(5, rng);
        SparseState orig = s;
        GateOp g = random_gate(5, rng);
        apply_gate(s, g);
        CHECK(std::abs(s.norm_sq() - 1.0) < 1e-10);
        apply_gate(s, g.adjoint());
        CHECK(approx_equal(s, orig, 1e-10));
    }
}

TEST_CASE("sparse and dense backends agree on random circuits") {
    RngStream seeds(77);
    for (int trial = 0; trial < 4; ++trial) {
        RngStream rng = seeds.derive(trial);
        const uint32_t n = 8;
        SparseState s(n);
        DenseState d(n);
        for (int i = 0; i < 200; ++i) {
            GateOp g = random_gate(n, rng);
            apply_gate(s, g);
            apply_gate(d, g);
        }
        SparseState from_dense = to_sparse(d);
        for (const auto& [b, a] : s.entries()) {
            CHECK(std::abs(a - from_dense.amplitude(b)) < 1e-10);
        }
        CHECK(std::abs(s.norm_sq() - d.norm_sq()) < 1e-10);
    }
}

TEST_CASE("measurement determinism: same seed, same outcomes and state") {
    auto execute = [](uint64_t seed) {
        RngStream rng(seed);
        SparseState s(4);
        for (uint32_t q = 0; q < 4; ++q) apply_gate(s, g_h(q));
        std::vector<int> outcomes;
        for (uint32_t q = 0; q < 4; ++q) outcomes.push_back(measure_qubit(s, q, rng));
        return std::make_pair(outcomes, s);
    };
    auto [o1, s1] = execute(42);
    auto [o2, s2] = execute(42);
    CHECK(o1 == o2);
    CHECK(s1.entries().size() == s2.entries().size());
    for (const auto& [b, a] : s1.entries()) CHECK(s2.amplitude(b) == a);
}

TEST_CASE("rng streams are reproducible and substreams differ") {
    RngStream a(5), b(5);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    RngStream d0 = a.derive(0), d1 = a.derive(1);
    CHECK(d0.next_u64() != d1.next_u64());
}
