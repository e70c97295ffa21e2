#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qfp {

enum class GateKind : uint8_t { X, Y, Z, H, Phase, Swap, Measure, ResetProtocol };

const char* gate_kind_name(GateKind k);

// Control qubit with polarity: on_one controls on |1>, otherwise on |0>
// (the inverted-control convention drawn as an X-conjugated control).
struct Control {
    uint32_t qubit = 0;
    bool on_one = true;
};

inline Control ctrl(uint32_t q) { return Control{q, true}; }
inline Control ctrl0(uint32_t q) { return Control{q, false}; }

struct GateOp {
    GateKind kind = GateKind::X;
    uint8_t num_targets = 0;
    uint8_t num_controls = 0;
    std::array<uint32_t, 2> targets{};
    std::array<Control, 2> controls{};
    double angle = 0.0;

    uint32_t arity() const { return num_targets + num_controls; }

    // Validates target/control multiplicity, disjointness, and angle finiteness.
    // Throws std::invalid_argument on violation.
    void validate(uint32_t num_qubits) const;

    GateOp adjoint() const;

    std::string dump_line() const;
};

GateOp make_gate(GateKind kind, std::initializer_list<uint32_t> targets,
                 std::initializer_list<Control> controls = {}, double angle = 0.0);

inline GateOp g_x(uint32_t t) { return make_gate(GateKind::X, {t}); }
inline GateOp g_cx(Control c, uint32_t t) { return make_gate(GateKind::X, {t}, {c}); }
inline GateOp g_ccx(Control c1, Control c2, uint32_t t) { return make_gate(GateKind::X, {t}, {c1, c2}); }
inline GateOp g_y(uint32_t t) { return make_gate(GateKind::Y, {t}); }
inline GateOp g_z(uint32_t t) { return make_gate(GateKind::Z, {t}); }
inline GateOp g_h(uint32_t t) { return make_gate(GateKind::H, {t}); }
inline GateOp g_phase(uint32_t t, double angle) { return make_gate(GateKind::Phase, {t}, {}, angle); }
inline GateOp g_cphase(Control c, uint32_t t, double angle) {
    return make_gate(GateKind::Phase, {t}, {c}, angle);
}
inline GateOp g_ccphase(Control c1, Control c2, uint32_t t, double angle) {
    return make_gate(GateKind::Phase, {t}, {c1, c2}, angle);
}
inline GateOp g_swap(uint32_t a, uint32_t b) { return make_gate(GateKind::Swap, {a, b}); }
inline GateOp g_cswap(Control c, uint32_t a, uint32_t b) { return make_gate(GateKind::Swap, {a, b}, {c}); }
inline GateOp g_measure(uint32_t q) { return make_gate(GateKind::Measure, {q}); }
inline GateOp g_reset(uint32_t q) { return make_gate(GateKind::ResetProtocol, {q}); }

}  // namespace qfp
