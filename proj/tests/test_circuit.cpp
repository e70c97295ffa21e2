#include <cmath>

#include "doctest.h"
#include "qfp/circuit.hpp"
#include "qfp/fixed.hpp"
#include "qfp/float_ops.hpp"

using namespace qfp;

TEST_CASE("emit: single gate, counts and depth") {
    CircuitBuilder b;
    b.alloc_register("r", 1);
    b.emit(g_x(0));
    const Circuit& c = b.circuit();
    CHECK(c.stats.total_gates() == 1);
    CHECK(c.stats.depth == 1);
}

TEST_CASE("emit: CCX counts as a 3-qubit X") {
    CircuitBuilder b;
    b.alloc_register("r", 3);
    b.emit(g_ccx(ctrl(0), ctrl(1), 2));
    CHECK(b.circuit().stats.count_of(GateKind::X, 3) == 1);
}

TEST_CASE("emit: disjoint gates share a layer") {
    CircuitBuilder b;
    b.alloc_register("r", 2);
    b.emit(g_x(0));
    b.emit(g_x(1));
    CHECK(b.circuit().stats.depth == 1);
}

TEST_CASE("depth: serial chain X, CX, X") {
    CircuitBuilder b;
    b.alloc_register("r", 2);
    b.emit(g_x(0));
    b.emit(g_cx(ctrl(0), 1));
    b.emit(g_x(1));
    CHECK(b.circuit().stats.depth == 3);
    CHECK(depth_of(b.circuit()) == 3);
}

TEST_CASE("depth: negate's X block is one layer above the adder") {
    // n X gates on distinct qubits form one layer; the in-place +1 follows.
    CircuitBuilder b;
    FixedReg r;
    r.layout = b.alloc_register("r", 4);
    r.format = FixedFormat{4, 0, true};

    CircuitBuilder only_add;
    FixedReg r2;
    r2.layout = only_add.alloc_register("r", 4);
    r2.format = r.format;
    add_const_code(only_add, r2, 1);

    negate(b, r);
    CHECK(b.circuit().stats.depth == 1 + only_add.circuit().stats.depth);
}

TEST_CASE("depth lower bound: at least the busiest qubit's gate count") {
    CircuitBuilder b;
    b.alloc_register("r", 3);
    RngStream rng(5);
    std::vector<uint32_t> touches(3, 0);
    for (int i = 0; i < 40; ++i) {
        uint32_t t = static_cast<uint32_t>(rng.next_u64() % 3);
        uint32_t c = static_cast<uint32_t>(rng.next_u64() % 3);
        if (t == c) {
            b.emit(g_x(t));
            touches[t]++;
        } else {
            b.emit(g_cx(ctrl(c), t));
            touches[t]++;
            touches[c]++;
        }
    }
    uint64_t busiest = std::max({touches[0], touches[1], touches[2]});
    CHECK(b.circuit().stats.depth >= busiest);
}

TEST_CASE("stats: three CCX") {
    CircuitBuilder b;
    b.alloc_register("r", 3);
    for (int i = 0; i < 3; ++i) b.emit(g_ccx(ctrl(0), ctrl(1), 2));
    CHECK(b.circuit().stats.count_of(GateKind::X, 3) == 3);
    CHECK(b.circuit().stats.total_gates() == 3);
}

TEST_CASE("stats: QFT emits n(n-1)/2 controlled phases") {
    for (uint32_t n : {3u, 5u, 8u}) {
        CircuitBuilder b;
        auto layout = b.alloc_register("r", n);
        qft(b, layout);
        CHECK(b.circuit().stats.count_of(GateKind::Phase, 2) == n * (n - 1) / 2);
        CHECK(b.circuit().stats.count_of(GateKind::H, 1) == n);
    }
}

TEST_CASE("stats determinism: identical parameters give identical stats") {
    auto build = [] {
        CircuitBuilder b;
        FixedReg r;
        r.layout = b.alloc_register("r", 5);
        r.format = FixedFormat{5, 0, true};
        add_const_code(b, r, 11);
        negate(b, r);
        return std::move(b).take();
    };
    Circuit c1 = build(), c2 = build();
    CHECK(c1.stats.counts == c2.stats.counts);
    CHECK(c1.stats.depth == c2.stats.depth);
    CHECK(c1.dump() == c2.dump());
}

TEST_CASE("circuit dump format is stable") {
    CircuitBuilder b;
    b.alloc_register("r", 3);
    b.emit(g_ccphase(ctrl(1), ctrl0(2), 0, 0.78539816339744831));
    b.emit(g_swap(0, 1));
    b.emit(g_reset(2));
    CHECK(b.circuit().dump() ==
          "Phase targets=[0] controls=[(1,+),(2,-)] angle=0.78539816339744828\n"
          "Swap targets=[0,1] controls=[] angle=0\n"
          "ResetProtocol targets=[2] controls=[] angle=0\n");
}

TEST_CASE("run: X on |0> gives |1> on both backends") {
    CircuitBuilder b;
    b.alloc_register("r", 1);
    b.emit(g_x(0));
    Circuit c = std::move(b).take();
    for (Backend backend : {Backend::GateFaithful, Backend::Semantic}) {
        RngStream rng(1);
        RunResult r = run(c, SparseState(1), backend, rng);
        CHECK(std::abs(r.state.amplitude(Basis::from_bits(1)) - Amplitude{1.0, 0.0}) < 1e-12);
    }
}

TEST_CASE("run: semantic rejects a raw gate with no registered semantics") {
    CircuitBuilder b;
    b.alloc_register("r", 1);
    b.emit(g_h(0));
    Circuit c = std::move(b).take();
    RngStream rng(1);
    CHECK_THROWS_AS(run(c, SparseState(1), Backend::Semantic, rng), std::runtime_error);
}

TEST_CASE("run: fixed add agrees across backends, exhaustive n=5") {
    CircuitBuilder b;
    FixedReg dst, src;
    dst.layout = b.alloc_register("a", 5);
    dst.format = FixedFormat{5, 0, false};
    src.layout = b.alloc_register("b", 5);
    src.format = FixedFormat{5, 0, false};
    add_reg(b, dst, src);
    Circuit c = std::move(b).take();

    for (uint64_t a = 0; a < 32; ++a) {
        for (uint64_t s = 0; s < 32; s += 7) {
            Basis in = Basis::from_bits(a | (s << 5));
            RngStream r1(1), r2(1);
            RunResult gate = run(c, SparseState::basis_state(10, in), Backend::GateFaithful, r1);
            RunResult sem = run(c, SparseState::basis_state(10, in), Backend::Semantic, r2);
            Basis expect = Basis::from_bits(((a + s) % 32) | (s << 5));
            CHECK(std::abs(std::abs(gate.state.amplitude(expect)) - 1.0) < 1e-9);
            CHECK(std::abs(sem.state.amplitude(expect) - Amplitude{1.0, 0.0}) < 1e-12);
        }
    }
}

TEST_CASE("ancilla pool: high-water tracks simultaneous liveness") {
    CircuitBuilder b;
    b.alloc_register("r", 1);
    uint32_t a = b.alloc_ancilla();
    uint32_t c = b.alloc_ancilla();
    CHECK(b.ancillas_live() == 2);
    b.release_ancilla_reset(a);
    uint32_t d = b.alloc_ancilla();
    CHECK(d == a);  // reset qubit is reused
    b.release_ancilla_reset(c);
    b.release_ancilla_reset(d);
    CHECK(b.ancillas_live() == 0);
    CHECK(b.ancilla_high_water() == 2);
}

TEST_CASE("stats monotonicity: wider reciprocal uses more of every arity") {
    auto build = [](FloatFormat fmt) {
        CircuitBuilder b;
        FloatReg q = alloc_float_reg(b, "q", fmt);
        RecipWorkspace ws = alloc_recip_workspace(b, fmt);
        recip(b, q, 3, ws);
        return std::move(b).take();
    };
    Circuit narrow = build(FloatFormat{4, 6});
    Circuit wide = build(FloatFormat{5, 7});
    for (uint32_t arity : {1u, 2u, 3u}) {
        CHECK(wide.stats.count_by_arity(arity) > narrow.stats.count_by_arity(arity));
    }
}

TEST_CASE("run aggregator: chained depth equals concatenated depth") {
    auto build = [](int variant) {
        CircuitBuilder b;
        b.alloc_register("r", 3);
        if (variant == 0) {
            b.emit(g_x(0));
            b.emit(g_cx(ctrl(0), 1));
        } else {
            b.emit(g_cx(ctrl(1), 2));
            b.emit(g_x(1));
        }
        return std::move(b).take();
    };
    Circuit c0 = build(0), c1 = build(1);

    CircuitBuilder whole;
    whole.alloc_register("r", 3);
    whole.emit(g_x(0));
    whole.emit(g_cx(ctrl(0), 1));
    whole.emit(g_cx(ctrl(1), 2));
    whole.emit(g_x(1));
    whole.emit(g_x(0));
    whole.emit(g_cx(ctrl(0), 1));

    RunAggregator agg;
    agg.feed(c0);
    agg.feed(c1);
    agg.feed(c0);
    CHECK(agg.stats().depth == whole.circuit().stats.depth);
    CHECK(agg.stats().total_gates() == 6);
}
