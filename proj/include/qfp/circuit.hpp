#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qfp/gate.hpp"
#include "qfp/state.hpp"

namespace qfp {

struct CircuitStats {
    std::map<std::pair<GateKind, uint32_t>, uint64_t> counts;  // (kind, arity) -> count
    uint64_t depth = 0;
    uint32_t ancilla_high_water = 0;
    uint32_t total_qubits = 0;

    uint64_t total_gates() const;
    uint64_t count_by_arity(uint32_t arity) const;
    uint64_t count_of(GateKind kind, uint32_t arity) const;
};

// Tracks scratch-qubit reuse: allocation pops the free list (or grows the
// circuit) and the high-water mark records the most ancillae ever live at once.
class AncillaPool {
  public:
    uint32_t live() const { return live_; }
    uint32_t high_water() const { return high_water_; }

    uint32_t acquire(std::vector<uint32_t>& free_list);
    void release(uint32_t q, std::vector<uint32_t>& free_list);

  private:
    uint32_t live_ = 0;
    uint32_t high_water_ = 0;
};

// One semantic step inside a Fourier segment: a modular add into the segment's
// destination register, diagonal in the computational basis of everything else.
struct AddStep {
    enum class Op : uint8_t { AddConst, AddReg, Fma };
    Op op = Op::AddConst;
    int64_t constant = 0;              // AddConst: value in code units (sign included)
    std::vector<uint32_t> src1;        // AddReg / Fma operand layouts, LSB first
    std::vector<uint32_t> src2;        // Fma second operand
    bool src1_signed = false;
    bool src2_signed = false;
    int sign = 1;                      // +1 add, -1 subtract
    int scale_log2 = 0;                // operand scaled by 2^scale_log2
    std::vector<Control> ctrls;
};

// A QFT-conjugated run of phase rotations on `dst`, possibly interleaved with
// basis gates on other qubits. Ordered steps reference either an AddStep or a
// gate index in the circuit.
struct FourierSegment {
    std::vector<uint32_t> dst;  // layout, LSB first
    struct Step {
        enum class Kind : uint8_t { Add, Gate } kind;
        uint32_t index;  // AddStep index (segment-local) or gate index (circuit-global)
    };
    std::vector<AddStep> adds;
    std::vector<Step> steps;
    uint32_t gate_begin = 0;
    uint32_t gate_end = 0;
};

// Program item for the semantic backend. Raw basis-permutation gates carry
// their own meaning; H/Phase/Y/Z/Measure outside a Fourier segment have none.
struct SemInstr {
    enum class Kind : uint8_t { BasisGate, NoSemantics, Reset, Fourier };
    Kind kind = Kind::NoSemantics;
    uint32_t index = 0;  // gate index, or FourierSegment index for Kind::Fourier
};

struct Circuit {
    uint32_t num_qubits = 0;
    std::vector<GateOp> gates;
    std::map<std::string, std::vector<uint32_t>> labels;
    std::vector<SemInstr> sem;
    std::vector<FourierSegment> fourier_segments;
    CircuitStats stats;

    std::string dump() const;
};

struct MeasurementRecord {
    struct Event {
        uint32_t qubit;
        int outcome;       // -1 for deterministic semantic resets
        bool from_reset;
    };
    std::vector<Event> events;
    uint64_t semantic_resets = 0;  // sign metadata dropped by the semantic backend
};

enum class Backend { GateFaithful, Semantic };

struct RunResult {
    SparseState state;
    MeasurementRecord record;
};

RunResult run(const Circuit& circuit, SparseState initial, Backend backend, RngStream& rng);
// Dense entry point; the semantic backend round-trips through sparse form.
RunResult run_dense(const Circuit& circuit, DenseState initial, Backend backend, RngStream& rng,
                    DenseState* final_dense = nullptr);

// ASAP layering: each gate occupies the earliest layer after the last layer
// touching any of its qubits (controls included); Measure/ResetProtocol count
// like gates.
uint64_t depth_of(const Circuit& circuit);

// Replays layering across several sequentially executed circuits so aggregate
// depth is exact without concatenating the gate lists.
class RunAggregator {
  public:
    void feed(const Circuit& circuit, uint64_t repetitions = 1);
    CircuitStats stats() const { return stats_; }

  private:
    CircuitStats stats_;
    std::vector<uint64_t> last_layer_;
};

class CircuitBuilder {
  public:
    Circuit& circuit() { return c_; }
    const Circuit& circuit() const { return c_; }
    Circuit take() &&;

    uint32_t num_qubits() const { return c_.num_qubits; }
    uint32_t ancilla_high_water() const { return pool_.high_water(); }
    uint32_t ancillas_live() const { return pool_.live(); }

    // Named data registers (not ancillae).
    std::vector<uint32_t> alloc_register(const std::string& name, uint32_t n);

    uint32_t alloc_ancilla();
    std::vector<uint32_t> alloc_ancillas(uint32_t n);
    // Emits the reset protocol, then returns the qubit to the pool.
    void release_ancilla_reset(uint32_t q);
    // Returns a provably-|0> qubit (uncomputed by construction) to the pool.
    void release_ancilla_clean(uint32_t q);

    void emit(const GateOp& gate);

    // Emits the reset protocol on q (pool bookkeeping unchanged).
    void emit_reset(uint32_t q);

    void begin_fourier(const std::vector<uint32_t>& dst_layout);
    void add_step(AddStep step);  // requires an open segment
    void end_fourier();
    bool fourier_open() const { return open_.has_value(); }

  private:
    void emit_qft(const std::vector<uint32_t>& layout, bool inverse);
    void record_layer(const GateOp& gate);

    struct OpenSegment {
        FourierSegment seg;
    };

    Circuit c_;
    AncillaPool pool_;
    std::vector<uint32_t> free_ancillas_;
    std::vector<uint64_t> last_layer_;
    std::optional<OpenSegment> open_;
};

}  // namespace qfp
