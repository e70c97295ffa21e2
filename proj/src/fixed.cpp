#include "qfp/fixed.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfp {

namespace {

void check_disjoint(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    for (uint32_t qa : a) {
        for (uint32_t qb : b) {
            if (qa == qb) throw std::invalid_argument("registers overlap");
        }
    }
}

}  // namespace

namespace {

std::vector<GateOp> qft_ladder(const std::vector<uint32_t>& layout) {
    std::vector<GateOp> seq;
    const uint32_t n = static_cast<uint32_t>(layout.size());
    for (uint32_t j = n; j-- > 0;) {
        seq.push_back(g_h(layout[j]));
        for (uint32_t k = j; k-- > 0;) {
            double angle = std::numbers::pi * std::exp2(-static_cast<double>(j - k));
            seq.push_back(g_cphase(ctrl(layout[k]), layout[j], angle));
        }
    }
    return seq;
}

}  // namespace

void qft(CircuitBuilder& b, const std::vector<uint32_t>& layout) {
    for (const GateOp& g : qft_ladder(layout)) b.emit(g);
}

void iqft(CircuitBuilder& b, const std::vector<uint32_t>& layout) {
    std::vector<GateOp> seq = qft_ladder(layout);
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) b.emit(it->adjoint());
}

void add_const_code(CircuitBuilder& b, const FixedReg& reg, int64_t code,
                    const std::vector<Control>& ctrls) {
    const bool standalone = !b.fourier_open();
    if (standalone) b.begin_fourier(reg.layout);
    AddStep step;
    step.op = AddStep::Op::AddConst;
    step.constant = code;
    step.ctrls = ctrls;
    b.add_step(std::move(step));
    if (standalone) b.end_fourier();
}

void add_const(CircuitBuilder& b, const FixedReg& reg, double value,
               const std::vector<Control>& ctrls) {
    add_const_code(b, reg, fixed_encode(value, reg.format), ctrls);
}

void add_reg(CircuitBuilder& b, const FixedReg& dst, const FixedReg& src, int sign,
             int scale_log2, const std::vector<Control>& ctrls) {
    check_disjoint(dst.layout, src.layout);
    const bool standalone = !b.fourier_open();
    if (standalone) b.begin_fourier(dst.layout);
    AddStep step;
    step.op = AddStep::Op::AddReg;
    step.src1 = src.layout;
    step.src1_signed = src.format.is_signed;
    step.sign = sign;
    step.scale_log2 = scale_log2;
    step.ctrls = ctrls;
    b.add_step(std::move(step));
    if (standalone) b.end_fourier();
}

void fma(CircuitBuilder& b, const FixedReg& acc, const FixedReg& x, const FixedReg& y, int sign) {
    check_disjoint(acc.layout, x.layout);
    check_disjoint(acc.layout, y.layout);
    check_disjoint(x.layout, y.layout);
    const bool standalone = !b.fourier_open();
    if (standalone) b.begin_fourier(acc.layout);
    AddStep step;
    step.op = AddStep::Op::Fma;
    step.src1 = x.layout;
    step.src2 = y.layout;
    step.src1_signed = x.format.is_signed;
    step.src2_signed = y.format.is_signed;
    step.sign = sign;
    b.add_step(std::move(step));
    if (standalone) b.end_fourier();
}

uint64_t fma_phase_count(uint32_t acc_n, uint32_t x_n, uint32_t y_n) {
    uint64_t count = 0;
    for (uint32_t i = 0; i < x_n; ++i) {
        for (uint32_t k = 0; k < y_n; ++k) {
            for (uint32_t j = 0; j < acc_n; ++j) {
                if (i + k <= j) ++count;
            }
        }
    }
    return count;
}

void negate(CircuitBuilder& b, const FixedReg& reg, std::optional<Control> ctrl) {
    for (uint32_t q : reg.layout) {
        if (ctrl) {
            b.emit(g_cx(*ctrl, q));
        } else {
            b.emit(g_x(q));
        }
    }
    std::vector<Control> ctrls;
    if (ctrl) ctrls.push_back(*ctrl);
    add_const_code(b, reg, 1, ctrls);
}

void copy_bit(CircuitBuilder& b, uint32_t src, uint32_t dst) { b.emit(g_cx(ctrl(src), dst)); }

void copy_reg(CircuitBuilder& b, const FixedReg& src, const FixedReg& dst) {
    if (src.n() != dst.n()) throw std::invalid_argument("copy_reg: width mismatch");
    for (uint32_t i = 0; i < src.n(); ++i) copy_bit(b, src.layout[i], dst.layout[i]);
}

int64_t fixed_encode(double value, const FixedFormat& fmt) {
    fmt.validate();
    double scaled = std::ldexp(value, static_cast<int>(fmt.f));
    double rounded = std::nearbyint(scaled);
    return static_cast<int64_t>(rounded);
}

double fixed_decode(int64_t code, const FixedFormat& fmt) {
    fmt.validate();
    int64_t v = fixed_code_mask_signed(static_cast<uint64_t>(code), fmt.n);
    if (!fmt.is_signed && v < 0) v += int64_t{1} << fmt.n;
    return std::ldexp(static_cast<double>(v), -static_cast<int>(fmt.f));
}

}  // namespace qfp
