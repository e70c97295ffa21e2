#include "qfp/gate.hpp"

#include <cmath>
#include <sstream>

namespace qfp {

const char* gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::Phase: return "Phase";
        case GateKind::Swap: return "Swap";
        case GateKind::Measure: return "Measure";
        case GateKind::ResetProtocol: return "ResetProtocol";
    }
    return "?";
}

GateOp make_gate(GateKind kind, std::initializer_list<uint32_t> targets,
                 std::initializer_list<Control> controls, double angle) {
    GateOp g;
    g.kind = kind;
    g.angle = angle;
    if (targets.size() > 2 || controls.size() > 2) {
        throw std::invalid_argument("gate supports at most 2 targets and 2 controls");
    }
    for (uint32_t t : targets) g.targets[g.num_targets++] = t;
    for (const Control& c : controls) g.controls[g.num_controls++] = c;
    return g;
}

void GateOp::validate(uint32_t num_qubits) const {
    const uint32_t want_targets = (kind == GateKind::Swap) ? 2 : 1;
    if (num_targets != want_targets) {
        throw std::invalid_argument(std::string(gate_kind_name(kind)) + ": wrong target count");
    }
    uint32_t max_controls = 2;
    if (kind == GateKind::Swap) max_controls = 1;
    if (kind == GateKind::Measure || kind == GateKind::ResetProtocol) max_controls = 0;
    if (num_controls > max_controls) {
        throw std::invalid_argument(std::string(gate_kind_name(kind)) + ": too many controls");
    }
    if (kind == GateKind::Phase && !std::isfinite(angle)) {
        throw std::invalid_argument("Phase: angle must be finite");
    }
    uint32_t seen[4];
    uint32_t n = 0;
    for (uint32_t i = 0; i < num_targets; ++i) seen[n++] = targets[i];
    for (uint32_t i = 0; i < num_controls; ++i) seen[n++] = controls[i].qubit;
    for (uint32_t i = 0; i < n; ++i) {
        if (seen[i] >= num_qubits) throw std::invalid_argument("gate qubit index out of range");
        for (uint32_t j = i + 1; j < n; ++j) {
            if (seen[i] == seen[j]) throw std::invalid_argument("duplicate qubit in gate");
        }
    }
}

GateOp GateOp::adjoint() const {
    if (kind == GateKind::Measure || kind == GateKind::ResetProtocol) {
        throw std::invalid_argument("non-unitary gate has no adjoint");
    }
    GateOp g = *this;
    if (kind == GateKind::Phase) g.angle = -angle;
    return g;
}

std::string GateOp::dump_line() const {
    std::ostringstream os;
    os << gate_kind_name(kind) << " targets=[";
    for (uint32_t i = 0; i < num_targets; ++i) {
        if (i) os << ",";
        os << targets[i];
    }
    os << "] controls=[";
    for (uint32_t i = 0; i < num_controls; ++i) {
        if (i) os << ",";
        os << "(" << controls[i].qubit << "," << (controls[i].on_one ? "+" : "-") << ")";
    }
    os << "] angle=";
    os.precision(17);
    os << angle;
    return os.str();
}

}  // namespace qfp
