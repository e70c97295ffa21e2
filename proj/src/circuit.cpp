#include "qfp/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qfp {

namespace {

uint64_t extract_bits(const Basis& b, const std::vector<uint32_t>& layout) {
    uint64_t v = 0;
    for (size_t i = 0; i < layout.size(); ++i) {
        if (b.test(layout[i])) v |= uint64_t{1} << i;
    }
    return v;
}

void deposit_bits(Basis& b, const std::vector<uint32_t>& layout, uint64_t v) {
    for (size_t i = 0; i < layout.size(); ++i) {
        b.set(layout[i], (v >> i) & 1u);
    }
}

int64_t as_signed(uint64_t v, uint32_t n) {
    if (n >= 64) return static_cast<int64_t>(v);
    if (v & (uint64_t{1} << (n - 1))) return static_cast<int64_t>(v) - (int64_t{1} << n);
    return static_cast<int64_t>(v);
}

bool controls_ok(const std::vector<Control>& ctrls, const Basis& b) {
    for (const Control& c : ctrls) {
        if (b.test(c.qubit) != c.on_one) return false;
    }
    return true;
}

bool gate_controls_ok(const GateOp& g, const Basis& b) {
    for (uint32_t i = 0; i < g.num_controls; ++i) {
        if (b.test(g.controls[i].qubit) != g.controls[i].on_one) return false;
    }
    return true;
}

// Basis-permutation action of X/Swap/ResetProtocol on a single label.
void apply_basis_gate(Basis& b, const GateOp& g) {
    switch (g.kind) {
        case GateKind::X:
            if (gate_controls_ok(g, b)) b.flip(g.targets[0]);
            return;
        case GateKind::Swap:
            if (gate_controls_ok(g, b) && b.test(g.targets[0]) != b.test(g.targets[1])) {
                b.flip(g.targets[0]);
                b.flip(g.targets[1]);
            }
            return;
        case GateKind::ResetProtocol:
            b.set(g.targets[0], false);
            return;
        default:
            throw std::runtime_error(std::string("semantic backend: no registered semantics for raw ") +
                                     gate_kind_name(g.kind));
    }
}

uint64_t apply_add_step(uint64_t v, const AddStep& s, const Basis& b) {
    if (!controls_ok(s.ctrls, b)) return v;
    int64_t u = 0;
    switch (s.op) {
        case AddStep::Op::AddConst:
            u = s.constant;
            break;
        case AddStep::Op::AddReg: {
            uint64_t raw = extract_bits(b, s.src1);
            int64_t val = s.src1_signed ? as_signed(raw, static_cast<uint32_t>(s.src1.size()))
                                        : static_cast<int64_t>(raw);
            u = val;
            break;
        }
        case AddStep::Op::Fma: {
            uint64_t r1 = extract_bits(b, s.src1);
            uint64_t r2 = extract_bits(b, s.src2);
            int64_t v1 = s.src1_signed ? as_signed(r1, static_cast<uint32_t>(s.src1.size()))
                                       : static_cast<int64_t>(r1);
            int64_t v2 = s.src2_signed ? as_signed(r2, static_cast<uint32_t>(s.src2.size()))
                                       : static_cast<int64_t>(r2);
            u = v1 * v2;
            break;
        }
    }
    u *= s.sign;
    if (s.op != AddStep::Op::AddConst && s.scale_log2 > 0) u <<= s.scale_log2;
    return v + static_cast<uint64_t>(u);
}

}  // namespace

uint64_t CircuitStats::total_gates() const {
    uint64_t t = 0;
    for (const auto& [k, v] : counts) t += v;
    return t;
}

uint64_t CircuitStats::count_by_arity(uint32_t arity) const {
    uint64_t t = 0;
    for (const auto& [k, v] : counts) {
        if (k.second == arity) t += v;
    }
    return t;
}

uint64_t CircuitStats::count_of(GateKind kind, uint32_t arity) const {
    auto it = counts.find({kind, arity});
    return it == counts.end() ? 0 : it->second;
}

uint32_t AncillaPool::acquire(std::vector<uint32_t>& free_list) {
    uint32_t q;
    if (!free_list.empty()) {
        q = free_list.back();
        free_list.pop_back();
    } else {
        q = UINT32_MAX;  // caller allocates a fresh qubit
    }
    ++live_;
    high_water_ = std::max(high_water_, live_);
    return q;
}

void AncillaPool::release(uint32_t q, std::vector<uint32_t>& free_list) {
    if (live_ == 0) throw std::logic_error("ancilla release without acquire");
    --live_;
    free_list.push_back(q);
}

std::string Circuit::dump() const {
    std::ostringstream os;
    for (const GateOp& g : gates) os << g.dump_line() << "\n";
    return os.str();
}

Circuit CircuitBuilder::take() && {
    if (open_) throw std::logic_error("take() with open fourier segment");
    c_.stats.ancilla_high_water = pool_.high_water();
    c_.stats.total_qubits = c_.num_qubits;
    return std::move(c_);
}

std::vector<uint32_t> CircuitBuilder::alloc_register(const std::string& name, uint32_t n) {
    std::vector<uint32_t> layout(n);
    for (uint32_t i = 0; i < n; ++i) layout[i] = c_.num_qubits++;
    last_layer_.resize(c_.num_qubits, 0);
    c_.labels[name] = layout;
    c_.stats.total_qubits = c_.num_qubits;
    return layout;
}

uint32_t CircuitBuilder::alloc_ancilla() {
    uint32_t q = pool_.acquire(free_ancillas_);
    if (q == UINT32_MAX) {
        q = c_.num_qubits++;
        last_layer_.resize(c_.num_qubits, 0);
        c_.stats.total_qubits = c_.num_qubits;
    }
    c_.stats.ancilla_high_water = pool_.high_water();
    return q;
}

std::vector<uint32_t> CircuitBuilder::alloc_ancillas(uint32_t n) {
    std::vector<uint32_t> v(n);
    for (uint32_t i = 0; i < n; ++i) v[i] = alloc_ancilla();
    return v;
}

void CircuitBuilder::release_ancilla_reset(uint32_t q) {
    emit_reset(q);
    pool_.release(q, free_ancillas_);
}

void CircuitBuilder::release_ancilla_clean(uint32_t q) {
    pool_.release(q, free_ancillas_);
}

void CircuitBuilder::record_layer(const GateOp& gate) {
    uint64_t layer = 0;
    for (uint32_t i = 0; i < gate.num_targets; ++i) layer = std::max(layer, last_layer_[gate.targets[i]]);
    for (uint32_t i = 0; i < gate.num_controls; ++i) {
        layer = std::max(layer, last_layer_[gate.controls[i].qubit]);
    }
    ++layer;
    for (uint32_t i = 0; i < gate.num_targets; ++i) last_layer_[gate.targets[i]] = layer;
    for (uint32_t i = 0; i < gate.num_controls; ++i) last_layer_[gate.controls[i].qubit] = layer;
    c_.stats.depth = std::max(c_.stats.depth, layer);
}

void CircuitBuilder::emit(const GateOp& gate) {
    gate.validate(c_.num_qubits);
    if (open_) {
        // Inside a Fourier segment only non-destination qubits may be touched.
        const auto& dst = open_->seg.dst;
        auto in_dst = [&](uint32_t q) { return std::find(dst.begin(), dst.end(), q) != dst.end(); };
        for (uint32_t i = 0; i < gate.num_targets; ++i) {
            if (in_dst(gate.targets[i])) {
                throw std::logic_error("emit: gate targets Fourier-segment destination");
            }
        }
        for (uint32_t i = 0; i < gate.num_controls; ++i) {
            if (in_dst(gate.controls[i].qubit)) {
                throw std::logic_error("emit: gate controls on Fourier-segment destination");
            }
        }
        uint32_t idx = static_cast<uint32_t>(c_.gates.size());
        c_.gates.push_back(gate);
        c_.stats.counts[{gate.kind, gate.arity()}]++;
        record_layer(gate);
        open_->seg.steps.push_back({FourierSegment::Step::Kind::Gate, idx});
        return;
    }
    uint32_t idx = static_cast<uint32_t>(c_.gates.size());
    c_.gates.push_back(gate);
    c_.stats.counts[{gate.kind, gate.arity()}]++;
    record_layer(gate);
    SemInstr instr;
    instr.index = idx;
    switch (gate.kind) {
        case GateKind::X:
        case GateKind::Swap:
            instr.kind = SemInstr::Kind::BasisGate;
            break;
        case GateKind::ResetProtocol:
            instr.kind = SemInstr::Kind::Reset;
            break;
        default:
            instr.kind = SemInstr::Kind::NoSemantics;
            break;
    }
    c_.sem.push_back(instr);
}

void CircuitBuilder::emit_reset(uint32_t q) { emit(g_reset(q)); }

void CircuitBuilder::emit_qft(const std::vector<uint32_t>& layout, bool inverse) {
    const uint32_t n = static_cast<uint32_t>(layout.size());
    std::vector<GateOp> seq;
    for (uint32_t jj = n; jj-- > 0;) {
        seq.push_back(g_h(layout[jj]));
        for (uint32_t kk = jj; kk-- > 0;) {
            double angle = std::numbers::pi * std::exp2(-static_cast<double>(jj - kk));
            seq.push_back(g_cphase(ctrl(layout[kk]), layout[jj], angle));
        }
    }
    if (inverse) {
        std::reverse(seq.begin(), seq.end());
        for (GateOp& g : seq) g = g.adjoint();
    }
    for (const GateOp& g : seq) {
        g.validate(c_.num_qubits);
        c_.gates.push_back(g);
        c_.stats.counts[{g.kind, g.arity()}]++;
        record_layer(g);
    }
}

void CircuitBuilder::begin_fourier(const std::vector<uint32_t>& dst_layout) {
    if (open_) throw std::logic_error("nested Fourier segments are not supported");
    if (dst_layout.empty() || dst_layout.size() > 63) {
        throw std::invalid_argument("Fourier destination must have 1..63 qubits");
    }
    OpenSegment seg;
    seg.seg.dst = dst_layout;
    seg.seg.gate_begin = static_cast<uint32_t>(c_.gates.size());
    open_ = std::move(seg);
    emit_qft(dst_layout, false);
}

void CircuitBuilder::add_step(AddStep step) {
    if (!open_) throw std::logic_error("add_step without open Fourier segment");
    if (step.ctrls.size() > 2) throw std::invalid_argument("too many controls on add step");
    FourierSegment& seg = open_->seg;
    const auto& dst = seg.dst;
    const uint32_t n = static_cast<uint32_t>(dst.size());
    {
        auto in_dst = [&](uint32_t q) { return std::find(dst.begin(), dst.end(), q) != dst.end(); };
        for (uint32_t q : step.src1) {
            if (in_dst(q)) throw std::logic_error("add_step: operand overlaps destination");
        }
        for (uint32_t q : step.src2) {
            if (in_dst(q)) throw std::logic_error("add_step: operand overlaps destination");
        }
        for (const Control& c : step.ctrls) {
            if (in_dst(c.qubit)) throw std::logic_error("add_step: control on destination");
        }
    }

    auto emit_phase = [&](uint32_t dst_j, double angle, std::vector<Control> phase_ctrls) {
        GateOp g;
        g.kind = GateKind::Phase;
        g.num_targets = 1;
        g.targets[0] = dst[dst_j];
        if (phase_ctrls.size() > 2) throw std::invalid_argument("phase would need >2 controls");
        for (const Control& c : phase_ctrls) g.controls[g.num_controls++] = c;
        g.angle = angle;
        g.validate(c_.num_qubits);
        c_.gates.push_back(g);
        c_.stats.counts[{g.kind, g.arity()}]++;
        record_layer(g);
    };

    switch (step.op) {
        case AddStep::Op::AddConst: {
            int64_t c = step.constant * step.sign;
            for (uint32_t j = 0; j < n; ++j) {
                uint64_t mod = uint64_t{1} << (j + 1);
                uint64_t r = static_cast<uint64_t>(c) & (mod - 1);
                if (r == 0) continue;
                double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(mod);
                emit_phase(j, angle, step.ctrls);
            }
            break;
        }
        case AddStep::Op::AddReg: {
            if (step.ctrls.size() > 1) {
                throw std::invalid_argument("add_reg: at most 1 extra control");
            }
            const uint32_t srcn = static_cast<uint32_t>(step.src1.size());
            for (uint32_t i = 0; i < srcn; ++i) {
                bool neg_weight = step.src1_signed && i == srcn - 1;
                for (uint32_t j = 0; j < n; ++j) {
                    int p = static_cast<int>(i) + step.scale_log2 - static_cast<int>(j) - 1;
                    if (p >= 0) continue;  // multiple of 2*pi
                    double mag = 2.0 * std::numbers::pi * std::exp2(static_cast<double>(p));
                    double angle = (neg_weight ? -1.0 : 1.0) * step.sign * mag;
                    std::vector<Control> pc{ctrl(step.src1[i])};
                    for (const Control& c : step.ctrls) pc.push_back(c);
                    emit_phase(j, angle, pc);
                }
            }
            break;
        }
        case AddStep::Op::Fma: {
            if (!step.ctrls.empty()) throw std::invalid_argument("fma: controls not supported");
            const uint32_t n1 = static_cast<uint32_t>(step.src1.size());
            const uint32_t n2 = static_cast<uint32_t>(step.src2.size());
            for (uint32_t i = 0; i < n1; ++i) {
                for (uint32_t k = 0; k < n2; ++k) {
                    int s = step.sign;
                    if (step.src1_signed && i == n1 - 1) s = -s;
                    if (step.src2_signed && k == n2 - 1) s = -s;
                    for (uint32_t j = 0; j < n; ++j) {
                        int p = static_cast<int>(i + k) + step.scale_log2 - static_cast<int>(j) - 1;
                        if (p >= 0) continue;
                        double angle = s * 2.0 * std::numbers::pi * std::exp2(static_cast<double>(p));
                        emit_phase(j, angle, {ctrl(step.src1[i]), ctrl(step.src2[k])});
                    }
                }
            }
            break;
        }
    }

    uint32_t add_idx = static_cast<uint32_t>(seg.adds.size());
    seg.adds.push_back(std::move(step));
    seg.steps.push_back({FourierSegment::Step::Kind::Add, add_idx});
}

void CircuitBuilder::end_fourier() {
    if (!open_) throw std::logic_error("end_fourier without open segment");
    emit_qft(open_->seg.dst, true);
    open_->seg.gate_end = static_cast<uint32_t>(c_.gates.size());
    uint32_t seg_idx = static_cast<uint32_t>(c_.fourier_segments.size());
    c_.fourier_segments.push_back(std::move(open_->seg));
    open_.reset();
    SemInstr instr;
    instr.kind = SemInstr::Kind::Fourier;
    instr.index = seg_idx;
    c_.sem.push_back(instr);
}

uint64_t depth_of(const Circuit& circuit) {
    std::vector<uint64_t> last(circuit.num_qubits, 0);
    uint64_t depth = 0;
    for (const GateOp& g : circuit.gates) {
        uint64_t layer = 0;
        for (uint32_t i = 0; i < g.num_targets; ++i) layer = std::max(layer, last[g.targets[i]]);
        for (uint32_t i = 0; i < g.num_controls; ++i) layer = std::max(layer, last[g.controls[i].qubit]);
        ++layer;
        for (uint32_t i = 0; i < g.num_targets; ++i) last[g.targets[i]] = layer;
        for (uint32_t i = 0; i < g.num_controls; ++i) last[g.controls[i].qubit] = layer;
        depth = std::max(depth, layer);
    }
    return depth;
}

void RunAggregator::feed(const Circuit& circuit, uint64_t repetitions) {
    if (last_layer_.size() < circuit.num_qubits) last_layer_.resize(circuit.num_qubits, 0);
    for (uint64_t r = 0; r < repetitions; ++r) {
        for (const GateOp& g : circuit.gates) {
            uint64_t layer = 0;
            for (uint32_t i = 0; i < g.num_targets; ++i) layer = std::max(layer, last_layer_[g.targets[i]]);
            for (uint32_t i = 0; i < g.num_controls; ++i) {
                layer = std::max(layer, last_layer_[g.controls[i].qubit]);
            }
            ++layer;
            for (uint32_t i = 0; i < g.num_targets; ++i) last_layer_[g.targets[i]] = layer;
            for (uint32_t i = 0; i < g.num_controls; ++i) last_layer_[g.controls[i].qubit] = layer;
            stats_.depth = std::max(stats_.depth, layer);
        }
    }
    for (const auto& [key, v] : circuit.stats.counts) stats_.counts[key] += v * repetitions;
    stats_.ancilla_high_water = std::max(stats_.ancilla_high_water, circuit.stats.ancilla_high_water);
    stats_.total_qubits = std::max(stats_.total_qubits, circuit.stats.total_qubits);
}

namespace {

RunResult run_gate_faithful(const Circuit& circuit, SparseState state, RngStream& rng) {
    MeasurementRecord record;
    for (const GateOp& g : circuit.gates) {
        if (g.kind == GateKind::Measure) {
            int outcome = measure_qubit(state, g.targets[0], rng);
            record.events.push_back({g.targets[0], outcome, false});
        } else if (g.kind == GateKind::ResetProtocol) {
            int outcome = reset_ancilla(state, g.targets[0], rng);
            record.events.push_back({g.targets[0], outcome, true});
        } else {
            apply_gate(state, g);
        }
    }
    return {std::move(state), std::move(record)};
}

// Classical-input states stay on a single basis label through the whole
// semantic program, so walk it in place instead of rebuilding maps.
RunResult run_semantic_single(const Circuit& circuit, SparseState state, MeasurementRecord record) {
    auto it = state.entries().begin();
    Basis b = it->first;
    const Amplitude amp = it->second;
    for (const SemInstr& instr : circuit.sem) {
        switch (instr.kind) {
            case SemInstr::Kind::BasisGate:
                apply_basis_gate(b, circuit.gates[instr.index]);
                break;
            case SemInstr::Kind::Reset:
                b.set(circuit.gates[instr.index].targets[0], false);
                ++record.semantic_resets;
                record.events.push_back({circuit.gates[instr.index].targets[0], -1, true});
                break;
            case SemInstr::Kind::NoSemantics:
                throw std::runtime_error(
                    std::string("semantic backend: raw gate with no registered semantics: ") +
                    gate_kind_name(circuit.gates[instr.index].kind));
            case SemInstr::Kind::Fourier: {
                const FourierSegment& seg = circuit.fourier_segments[instr.index];
                const uint64_t mask = (seg.dst.size() >= 64)
                                          ? ~uint64_t{0}
                                          : ((uint64_t{1} << seg.dst.size()) - 1);
                uint64_t v = extract_bits(b, seg.dst);
                for (const auto& step : seg.steps) {
                    if (step.kind == FourierSegment::Step::Kind::Add) {
                        v = apply_add_step(v, seg.adds[step.index], b) & mask;
                    } else {
                        const GateOp& g = circuit.gates[step.index];
                        if (g.kind == GateKind::ResetProtocol) {
                            ++record.semantic_resets;
                            record.events.push_back({g.targets[0], -1, true});
                        }
                        apply_basis_gate(b, g);
                    }
                }
                deposit_bits(b, seg.dst, v);
                break;
            }
        }
    }
    state.entries().clear();
    state.entries().emplace(b, amp);
    return {std::move(state), std::move(record)};
}

RunResult run_semantic(const Circuit& circuit, SparseState state, RngStream&) {
    MeasurementRecord record;
    if (state.entries().size() == 1) {
        return run_semantic_single(circuit, std::move(state), std::move(record));
    }

    auto reset_with_collision_check = [&](uint32_t qubit) {
        SparseState::Map out;
        out.reserve(state.entries().size());
        for (const auto& [b, a] : state.entries()) {
            Basis nb = b;
            nb.set(qubit, false);
            auto [it, inserted] = out.emplace(nb, a);
            if (!inserted) {
                throw std::runtime_error("semantic reset collision: ancilla not a function of "
                                         "the surviving qubits");
            }
        }
        state.entries() = std::move(out);
        ++record.semantic_resets;
        record.events.push_back({qubit, -1, true});
    };

    for (const SemInstr& instr : circuit.sem) {
        switch (instr.kind) {
            case SemInstr::Kind::BasisGate:
                apply_gate(state, circuit.gates[instr.index]);
                break;
            case SemInstr::Kind::Reset:
                reset_with_collision_check(circuit.gates[instr.index].targets[0]);
                break;
            case SemInstr::Kind::NoSemantics:
                throw std::runtime_error(
                    std::string("semantic backend: raw gate with no registered semantics: ") +
                    gate_kind_name(circuit.gates[instr.index].kind));
            case SemInstr::Kind::Fourier: {
                const FourierSegment& seg = circuit.fourier_segments[instr.index];
                const uint64_t mask = (seg.dst.size() >= 64)
                                          ? ~uint64_t{0}
                                          : ((uint64_t{1} << seg.dst.size()) - 1);
                SparseState::Map out;
                out.reserve(state.entries().size());
                bool has_reset = false;
                for (const auto& step : seg.steps) {
                    if (step.kind == FourierSegment::Step::Kind::Gate &&
                        circuit.gates[step.index].kind == GateKind::ResetProtocol) {
                        has_reset = true;
                        record.events.push_back({circuit.gates[step.index].targets[0], -1, true});
                        ++record.semantic_resets;
                    }
                }
                for (const auto& [b, a] : state.entries()) {
                    Basis nb = b;
                    uint64_t v = extract_bits(nb, seg.dst);
                    for (const auto& step : seg.steps) {
                        if (step.kind == FourierSegment::Step::Kind::Add) {
                            v = apply_add_step(v, seg.adds[step.index], nb) & mask;
                        } else {
                            apply_basis_gate(nb, circuit.gates[step.index]);
                        }
                    }
                    deposit_bits(nb, seg.dst, v);
                    auto [it, inserted] = out.emplace(nb, a);
                    if (!inserted) {
                        throw std::runtime_error(has_reset
                                                     ? "semantic reset collision inside segment"
                                                     : "semantic segment is not injective");
                    }
                }
                state.entries() = std::move(out);
                break;
            }
        }
    }
    return {std::move(state), std::move(record)};
}

}  // namespace

RunResult run(const Circuit& circuit, SparseState initial, Backend backend, RngStream& rng) {
    if (backend == Backend::GateFaithful) return run_gate_faithful(circuit, std::move(initial), rng);
    return run_semantic(circuit, std::move(initial), rng);
}

RunResult run_dense(const Circuit& circuit, DenseState initial, Backend backend, RngStream& rng,
                    DenseState* final_dense) {
    if (backend == Backend::GateFaithful) {
        MeasurementRecord record;
        for (const GateOp& g : circuit.gates) {
            if (g.kind == GateKind::Measure) {
                int outcome = measure_qubit(initial, g.targets[0], rng);
                record.events.push_back({g.targets[0], outcome, false});
            } else if (g.kind == GateKind::ResetProtocol) {
                int outcome = reset_ancilla(initial, g.targets[0], rng);
                record.events.push_back({g.targets[0], outcome, true});
            } else {
                apply_gate(initial, g);
            }
        }
        if (final_dense) *final_dense = initial;
        return {to_sparse(initial), std::move(record)};
    }
    RunResult r = run(circuit, to_sparse(initial), backend, rng);
    if (final_dense) *final_dense = to_dense(r.state);
    return r;
}

}  // namespace qfp
