#include <cmath>
#include <set>

#include "doctest.h"
#include "qfp/oracle.hpp"
#include "qfp/rng.hpp"

using namespace qfp;

namespace {
const FloatFormat kF16{5, 11};   // 16-bit split with 5 exponent qubits
const FloatFormat kF16b{4, 12};  // 16-bit split whose mantissa matches half precision
const FloatFormat kF10{4, 6};
}  // namespace

TEST_CASE("encode: pi at (5,11) decodes to 3.140625") {
    auto r = o_encode(3.14159265358979, kF16);
    REQUIRE(flow_ok(r.status));
    CHECK(r.value.value() == 3.140625);
    CHECK(r.value.exp_code == 2);
    CHECK(r.value.mant_code == 804);
}

TEST_CASE("encode: zero and exact code of 3.140625") {
    CHECK(o_encode(0.0, kF16).value == soft_zero(kF16));
    auto r = o_encode(3.140625, kF16);
    CHECK(r.value.exp_code == 2);
    CHECK(r.value.mant_code == 804);  // 0.78515625 * 2^2
}

TEST_CASE("encode: overflow and underflow are reported distinctly") {
    FloatFormat small{4, 6};
    CHECK(o_encode(std::ldexp(1.0, 20), small).status == FlowStatus::Overflow);
    CHECK(o_encode(std::ldexp(1.0, -20), small).status == FlowStatus::Underflow);
    CHECK(o_encode(1.5, small).status == FlowStatus::Ok);
}

TEST_CASE("encode: truncate mode never rounds the magnitude up") {
    for (double x : {0.3183, 2.71828, -0.777, 123.456}) {
        auto n = o_encode(x, kF10, RoundMode::NearestEven);
        auto t = o_encode(x, kF10, RoundMode::Truncate);
        REQUIRE(flow_ok(t.status));
        CHECK(std::abs(t.value.value()) <= std::abs(x));
        CHECK(std::abs(n.value.value() - x) <= std::abs(t.value.value() - x) + 1e-15);
    }
}

TEST_CASE("o_mul: the 16-bit multiplication example") {
    // At (4,12) the encoded inputs match half precision and the product lands
    // on the published value; (5,11) has one fewer magnitude bit and lands a
    // shade outside 2^-10, so its exact codes are frozen instead.
    {
        auto x = o_encode(3.140625, kF16b);
        auto y = o_encode(0.010002, kF16b);
        auto p = o_mul(x.value, y.value);
        REQUIRE(flow_ok(p.status));
        CHECK(std::abs(p.value.value() - 0.031403) / 0.031403 < std::ldexp(1.0, -10));
    }
    {
        auto p = o_mul(o_encode(3.140625, kF16).value, o_encode(0.010002, kF16).value);
        CHECK(p.value.exp_code == -4);
        CHECK(p.value.mant_code == 514);
        CHECK(std::abs(p.value.value() - 0.031403) / 0.031403 < std::ldexp(1.0, -9));
    }
}

TEST_CASE("o_add: the 16-bit subtraction example reproduces 0.879 * 2^-7") {
    auto x = o_encode(0.03140, kF16b);
    auto y = o_encode(-0.02454, kF16b);
    auto s = o_add(x.value, y.value);
    REQUIRE(flow_ok(s.status));
    CHECK(s.value.value() == 0.006866455078125);  // 0.87890625 * 2^-7, exact
    CHECK(std::abs(s.value.value() - 0.006866) / 0.006866 < std::ldexp(1.0, -9));

    auto s11 = o_add(o_encode(0.03140, kF16).value, o_encode(-0.02454, kF16).value);
    CHECK(s11.value.exp_code == -7);
    CHECK(s11.value.mant_code == 896);
}

TEST_CASE("o_mul: zero is absorbing") {
    auto x = o_encode(1.75, kF10).value;
    CHECK(o_mul(x, soft_zero(kF10)).value == soft_zero(kF10));
    CHECK(o_mul(soft_zero(kF10), x).value == soft_zero(kF10));
}

TEST_CASE("o_recip: powers of two are exact") {
    auto r = o_recip(o_encode(-2.0, kF16).value, 10);
    REQUIRE(flow_ok(r.status));
    CHECK(r.value.value() == -0.5);
    auto r4 = o_recip(o_encode(4.0, kF16).value, 10);
    CHECK(r4.value.value() == 0.25);
}

TEST_CASE("o_recip: zero input is unrepresentable") {
    CHECK(o_recip(soft_zero(kF16), 10).status == FlowStatus::Unrepresentable);
}

TEST_CASE("o_recip: frozen fixed point for 1/3.140625 at (5,11)") {
    auto r = o_recip(o_encode(3.140625, kF16).value, 10);
    REQUIRE(flow_ok(r.status));
    CHECK(r.value.exp_code == -1);
    CHECK(r.value.mant_code == 653);
    CHECK(std::abs(r.value.value() - 0.3183) / 0.3183 < std::ldexp(1.0, -9));
}

TEST_CASE("o_recip: residual within 2^-(m-2) at width 10, exhaustive") {
    const double floor_bound = std::ldexp(1.0, -(static_cast<int>(kF10.m) - 2));
    for (const SoftFloat& v : enumerate_canonical(kF10)) {
        if (v.is_zero()) continue;
        auto r = o_recip(v, 10);
        if (!flow_ok(r.status)) continue;
        CHECK(std::abs(v.value() * r.value.value() - 1.0) <= floor_bound);
    }
}

TEST_CASE("o_recip: quadratic convergence down to the precision floor") {
    const double floor_bound = std::ldexp(1.0, -(static_cast<int>(kF16.m) - 2));
    for (double x : {3.140625, 0.7, -11.3, 123.0, -0.013}) {
        auto q = o_encode(x, kF16);
        REQUIRE(flow_ok(q.status));
        double prev = -1;
        for (int it = 1; it <= 8; ++it) {
            auto r = o_recip(q.value, it);
            REQUIRE(flow_ok(r.status));
            double resid = std::abs(q.value.value() * r.value.value() - 1.0);
            if (prev >= 0) CHECK(resid <= prev * prev + floor_bound);
            prev = resid;
        }
    }
}

TEST_CASE("o_exp: values frozen against the Horner model") {
    bool in_range = true;
    auto e0 = o_exp(soft_zero(kF16), 12, &in_range);
    CHECK(e0.value.value() == 1.0);
    CHECK(in_range);

    auto e1 = o_exp(o_encode(1.0, kF16).value, 12, &in_range);
    CHECK(std::abs(e1.value.value() - 2.71828) / 2.71828 < std::ldexp(1.0, -9));

    auto em = o_exp(o_encode(-0.5, kF16).value, 12, &in_range);
    CHECK(std::abs(em.value.value() - 0.60653) / 0.60653 < std::ldexp(1.0, -9));

    o_exp(o_encode(1.5, kF16).value, 12, &in_range);
    CHECK(!in_range);
}

TEST_CASE("o_shift: forced bit patterns") {
    CHECK(o_shift(0b0110, 4, 1, false) == 0b0011);
    CHECK(o_shift(-6, 4, 1, true) == -3);  // 1010 -> 1101, sign-filled
    CHECK(o_shift(-6, 4, 0, true) == -6);
    CHECK(o_shift(0b0110, 4, -1, false) == 0b1100);
    CHECK(o_shift(5, 4, 10, false) == 0);
    // Signed right shifts truncate toward zero (absolute-value route).
    CHECK(o_shift(-3, 4, 1, true) == -1);
}

TEST_CASE("o_zeroexp and o_neg basics") {
    SoftFloat z{5, 0, kF10};
    CHECK(o_zeroexp(z).exp_code == 0);
    SoftFloat nz{5, 16, kF10};
    CHECK(o_zeroexp(nz).exp_code == 5);

    auto one = o_encode(1.0, kF10).value;
    auto m = o_neg(one);
    CHECK(m.value() == -1.0);
    CHECK(o_neg(m) == one);
    CHECK(o_neg(soft_zero(kF10)) == soft_zero(kF10));
}

TEST_CASE("enumerate_canonical: count, zero once, all values distinct") {
    auto small = enumerate_canonical(FloatFormat{2, 2});
    // 2^e exponents times 2^(m-1) canonical mantissas, plus zero.
    CHECK(small.size() == 4 * 2 + 1);

    auto all = enumerate_canonical(kF10);
    CHECK(all.size() == 16 * 32 + 1);
    std::set<double> values;
    int zeros = 0;
    for (const auto& v : all) {
        CHECK(v.canonical());
        values.insert(v.value());
        if (v.is_zero()) ++zeros;
    }
    CHECK(zeros == 1);
    CHECK(values.size() == all.size());
    CHECK_THROWS_AS(enumerate_canonical(FloatFormat{8, 8}), std::invalid_argument);
}

TEST_CASE("round-trip: nearest-even encode of a decoded canonical value is exact") {
    for (FloatFormat fmt : {FloatFormat{4, 6}, FloatFormat{5, 9}, FloatFormat{2, 2}}) {
        for (const auto& v : enumerate_canonical(fmt)) {
            auto back = o_encode(v.value(), fmt, RoundMode::NearestEven);
            REQUIRE(flow_ok(back.status));
            CHECK(back.value == v);
        }
    }
}

TEST_CASE("oracle is total: canonical outputs on all canonical width-10 inputs") {
    auto all = enumerate_canonical(kF10);
    for (const auto& a : all) {
        CHECK(o_neg(a).canonical());
        CHECK(o_zeroexp(a).canonical());
        for (const auto& b : all) {
            auto p = o_mul(a, b);
            if (flow_ok(p.status)) CHECK(p.value.canonical());
            auto s = o_add(a, b);
            if (flow_ok(s.status)) CHECK(s.value.canonical());
        }
    }
}

TEST_CASE("o_mul within 1 ulp and o_add within 2 ulp of real arithmetic (width 10)") {
    // The exhaustive run is acceptance criterion territory; sample here.
    auto all = enumerate_canonical(kF10);
    RngStream rng(3);
    for (int trial = 0; trial < 4000; ++trial) {
        const auto& a = all[rng.next_u64() % all.size()];
        const auto& b = all[rng.next_u64() % all.size()];
        auto p = o_mul(a, b);
        if (flow_ok(p.status) && !p.value.is_zero()) {
            CHECK(std::abs(p.value.value() - a.value() * b.value()) <= soft_ulp(p.value));
        }
        auto s = o_add(a, b);
        if (flow_ok(s.status) && !s.value.is_zero()) {
            CHECK(std::abs(s.value.value() - (a.value() + b.value())) <= 2 * soft_ulp(s.value));
        }
    }
}

TEST_CASE("o_add: x + 0 = x for every canonical x (width 10)") {
    for (const auto& x : enumerate_canonical(kF10)) {
        auto s = o_add(x, soft_zero(kF10));
        REQUIRE(flow_ok(s.status));
        CHECK(s.value == x);
        auto s2 = o_add(soft_zero(kF10), x);
        CHECK(s2.value == x);
    }
}

TEST_CASE("o_ode_reference: initial condition, one-step value, periodicity") {
    auto traj = o_ode_reference(0.25, 26);
    CHECK(traj[0].u1 == 0.0);
    CHECK(traj[0].u2 == -1.0);

    // One explicit trapezoidal step at dt = 2^-2.
    const double dt = 0.25;
    const double denom = 1.0 + dt * dt / 4.0;
    CHECK(traj[1].u1 == doctest::Approx(dt * -1.0 / denom).epsilon(1e-15));
    CHECK(traj[1].u2 == doctest::Approx((1.0 - dt * dt / 4.0) * -1.0 / denom).epsilon(1e-15));

    // The analytic solution returns to the start after one period.
    auto fine = o_ode_reference(std::ldexp(1.0, -8), 1608);  // ~2*pi
    const auto& last = fine.back();
    CHECK(std::abs(last.u1_exact - 0.0) < 1e-2);
    CHECK(std::abs(last.u2_exact - (-1.0)) < 1e-2);
}
