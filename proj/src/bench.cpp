#include "qfp/bench.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qfp/fixed.hpp"
#include "qfp/float_ops.hpp"

namespace qfp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_width_split(const std::vector<uint32_t>& widths, const std::vector<uint32_t>& mantissas,
                       const std::vector<uint32_t>& exponents) {
    if (widths.size() != mantissas.size() || widths.size() != exponents.size()) {
        throw std::invalid_argument("widths, mantissas and exponents must have equal length");
    }
    for (size_t i = 0; i < widths.size(); ++i) {
        if (exponents[i] + mantissas[i] != widths[i]) {
            throw std::invalid_argument("width " + std::to_string(widths[i]) +
                                        ": e + m does not match");
        }
        FloatFormat{exponents[i], mantissas[i]}.validate();
    }
}

ordered_json stats_json(const CircuitStats& stats) {
    ordered_json j;
    j["total_gates"] = stats.total_gates();
    j["gates_1q"] = stats.count_by_arity(1);
    j["gates_2q"] = stats.count_by_arity(2);
    j["gates_3q"] = stats.count_by_arity(3);
    j["depth"] = stats.depth;
    j["total_qubits"] = stats.total_qubits;
    j["ancilla_peak"] = stats.ancilla_high_water;
    ordered_json counts = ordered_json::object();
    for (const auto& [key, v] : stats.counts) {
        counts[std::string(gate_kind_name(key.first)) + "_" + std::to_string(key.second)] = v;
    }
    j["counts"] = counts;
    return j;
}

struct RecipHarness {
    Circuit circuit;
    FloatReg input;
    FloatReg result;
    uint32_t width;
};

RecipHarness build_recip_harness(FloatFormat fmt, int iterations) {
    CircuitBuilder b;
    RecipHarness h;
    h.input = alloc_float_reg(b, "q", fmt);
    RecipWorkspace ws = alloc_recip_workspace(b, fmt);
    h.result = recip(b, h.input, iterations, ws);
    h.width = b.num_qubits();
    h.circuit = std::move(b).take();
    return h;
}

}  // namespace

double gaussian_sample(RngStream& rng, double mean, double stddev) {
    double u1 = 1.0 - rng.next_double();  // (0, 1]
    double u2 = rng.next_double();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
}

void RecipBenchConfig::validate() const {
    check_width_split(widths, mantissas, exponents);
    if (samples == 0) throw std::invalid_argument("samples must be positive");
    if (iterations == 0) throw std::invalid_argument("iterations must be positive");
}

RecipBenchResult run_recip_bench(const RecipBenchConfig& config) {
    config.validate();
    RecipBenchResult result;
    result.config = config;
    const RngStream master(config.seed);

    auto run_width = [&](size_t wi) {
        const FloatFormat fmt{config.exponents[wi], config.mantissas[wi]};
        RecipHarness h = build_recip_harness(fmt, static_cast<int>(config.iterations));

        std::pair<std::vector<RecipSampleRow>, RecipWidthSummary> out;
        auto& [rows, summary] = out;
        summary.width = config.widths[wi];
        summary.e = fmt.e;
        summary.m = fmt.m;
        summary.stats = h.circuit.stats;

        double sum_abs = 0, sum = 0, sum_sq = 0;
        double min_err = 0, max_err = 0;
        bool first = true;

        for (uint32_t si = 0; si < config.samples; ++si) {
            RecipSampleRow row{};
            row.width = config.widths[wi];
            row.e = fmt.e;
            row.m = fmt.m;
            row.sample = si;
            // Draw streams keyed by sample index only, so every width sees
            // the same inputs; measurement streams are keyed by both.
            RngStream draw = master.derive(si);
            row.input = gaussian_sample(draw, config.gauss_mean, config.gauss_stddev);

            SoftResult enc = o_encode(row.input, fmt);
            SoftResult rec = flow_ok(enc.status) ? o_recip(enc.value, config.iterations)
                                                 : SoftResult{soft_zero(fmt), enc.status};
            if (!flow_ok(enc.status) || !flow_ok(rec.status)) {
                row.discarded = true;
                summary.discarded++;
                rows.push_back(row);
                continue;
            }

            Basis in;
            set_float_bits(in, h.input, enc.value);
            RngStream run_rng = master.derive((wi + 1) * 1000003ull + si);
            RunResult res = run(h.circuit, SparseState::basis_state(h.width, in), config.backend,
                                run_rng);
            SoftFloat got = read_float_bits(res.state.dominant_basis(), h.result);

            row.expected = 1.0 / enc.value.value();
            row.output = got.value();
            row.signed_rel_err = (row.output - row.expected) / row.expected;
            rows.push_back(row);

            summary.kept++;
            sum_abs += std::abs(row.signed_rel_err);
            sum += row.signed_rel_err;
            sum_sq += row.signed_rel_err * row.signed_rel_err;
            if (first || row.signed_rel_err < min_err) min_err = row.signed_rel_err;
            if (first || row.signed_rel_err > max_err) max_err = row.signed_rel_err;
            first = false;
        }
        if (summary.kept > 0) {
            summary.mean_abs_err = sum_abs / summary.kept;
            double mean = sum / summary.kept;
            summary.stddev_err = std::sqrt(std::max(0.0, sum_sq / summary.kept - mean * mean));
            summary.min_err = min_err;
            summary.max_err = max_err;
        }
        return out;
    };

    std::vector<std::future<std::pair<std::vector<RecipSampleRow>, RecipWidthSummary>>> futures;
    for (size_t wi = 0; wi < config.widths.size(); ++wi) {
        futures.push_back(std::async(std::launch::async, run_width, wi));
    }
    for (auto& f : futures) {
        auto [rows, summary] = f.get();
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
        result.summaries.push_back(summary);
    }
    return result;
}

std::string RecipBenchResult::csv() const {
    std::ostringstream os;
    os << "width,e,m,sample,input,expected,output,signed_rel_err,discarded\n";
    for (const auto& r : rows) {
        os << r.width << "," << r.e << "," << r.m << "," << r.sample << "," << fmt_double(r.input)
           << "," << fmt_double(r.expected) << "," << fmt_double(r.output) << ","
           << fmt_double(r.signed_rel_err) << "," << (r.discarded ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string RecipBenchResult::summary_json() const {
    ordered_json j;
    j["command"] = "recip-bench";
    j["version"] = kArtifactVersion;
    j["config"] = {{"widths", config.widths},
                   {"mantissas", config.mantissas},
                   {"exponents", config.exponents},
                   {"samples", config.samples},
                   {"iterations", config.iterations},
                   {"gauss_mean", config.gauss_mean},
                   {"gauss_stddev", config.gauss_stddev},
                   {"seed", config.seed},
                   {"backend", config.backend == Backend::Semantic ? "semantic" : "gate"}};
    ordered_json per_width = ordered_json::array();
    for (const auto& s : summaries) {
        ordered_json w;
        w["width"] = s.width;
        w["e"] = s.e;
        w["m"] = s.m;
        w["kept"] = s.kept;
        w["discarded"] = s.discarded;
        w["mean_abs_signed_rel_err"] = s.mean_abs_err;
        w["stddev_signed_rel_err"] = s.stddev_err;
        w["min_signed_rel_err"] = s.min_err;
        w["max_signed_rel_err"] = s.max_err;
        w["resources"] = stats_json(s.stats);
        per_width.push_back(w);
    }
    j["per_width"] = per_width;
    return j.dump(2) + "\n";
}

void OdeConfig::validate() const {
    check_width_split(widths, mantissas, exponents);
    if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
    for (double dt : dts) {
        if (dt <= 0) throw std::invalid_argument("dt must be positive");
        int exp = 0;
        double frac = std::frexp(dt, &exp);
        if (frac != 0.5) {
            throw std::invalid_argument("dt must be a power of two, got " + std::to_string(dt));
        }
    }
}

namespace {

struct OdeMachine {
    FloatReg alpha, beta;
    FloatReg u1[2], u2[2];  // ping-pong pairs
    FloatReg t1, t2, t3, t4;
    uint32_t width = 0;
};

// Register layouts must be identical across the init and both step circuits,
// so every builder allocates them in this exact order.
OdeMachine alloc_ode_machine(CircuitBuilder& b, FloatFormat fmt) {
    OdeMachine m;
    m.alpha = alloc_float_reg(b, "alpha", fmt);
    m.beta = alloc_float_reg(b, "beta", fmt);
    m.u1[0] = alloc_float_reg(b, "u1a", fmt);
    m.u2[0] = alloc_float_reg(b, "u2a", fmt);
    m.u1[1] = alloc_float_reg(b, "u1b", fmt);
    m.u2[1] = alloc_float_reg(b, "u2b", fmt);
    m.t1 = alloc_float_reg(b, "t1", fmt);
    m.t2 = alloc_float_reg(b, "t2", fmt);
    m.t3 = alloc_float_reg(b, "t3", fmt);
    m.t4 = alloc_float_reg(b, "t4", fmt);
    return m;
}

// One trapezoidal step: u1' = a*u1 + b*u2, u2' = a*u2 - b*u1, reading the
// `from` pair and writing the other, then resetting sources and temporaries.
Circuit build_ode_step(FloatFormat fmt, int from, OdeMachine* out_machine) {
    CircuitBuilder b;
    OdeMachine m = alloc_ode_machine(b, fmt);
    const int to = 1 - from;
    fmul(b, m.alpha, m.u1[from], m.t1);
    fmul(b, m.beta, m.u2[from], m.t2);
    fadd(b, m.t1, m.t2, m.u1[to]);
    fmul(b, m.beta, m.u1[from], m.t3);
    fneg(b, m.t3);
    fmul(b, m.alpha, m.u2[from], m.t4);
    fadd(b, m.t4, m.t3, m.u2[to]);
    reset_float_reg(b, m.t1);
    reset_float_reg(b, m.t2);
    reset_float_reg(b, m.t3);
    reset_float_reg(b, m.t4);
    reset_float_reg(b, m.u1[from]);
    reset_float_reg(b, m.u2[from]);
    m.width = b.num_qubits();
    if (out_machine) *out_machine = m;
    return std::move(b).take();
}

Circuit build_ode_init(FloatFormat fmt, const SoftFloat& alpha, const SoftFloat& beta,
                       const SoftFloat& u1_0, const SoftFloat& u2_0) {
    CircuitBuilder b;
    OdeMachine m = alloc_ode_machine(b, fmt);
    load_soft_constant(b, m.alpha, alpha);
    load_soft_constant(b, m.beta, beta);
    load_soft_constant(b, m.u1[0], u1_0);
    load_soft_constant(b, m.u2[0], u2_0);
    return std::move(b).take();
}

}  // namespace

OdeResult run_ode(const OdeConfig& config) {
    config.validate();
    OdeResult result;
    result.config = config;
    const RngStream master(config.seed);

    struct CaseOut {
        std::vector<OdeStepRow> rows;
        OdeCaseSummary summary;
    };

    auto run_case = [&](size_t wi, double dt) {
        const FloatFormat fmt{config.exponents[wi], config.mantissas[wi]};
        const uint32_t steps = static_cast<uint32_t>(std::llround(config.horizon / dt));
        const double denom = 1.0 + dt * dt / 4.0;
        const double alpha = (1.0 - dt * dt / 4.0) / denom;
        const double beta = dt / denom;

        SoftResult a_enc = o_encode(alpha, fmt);
        SoftResult b_enc = o_encode(beta, fmt);
        SoftResult u1_enc = o_encode(0.0, fmt);
        SoftResult u2_enc = o_encode(-1.0, fmt);
        if (!flow_ok(a_enc.status) || !flow_ok(b_enc.status) || !flow_ok(u2_enc.status)) {
            throw std::runtime_error("ode: step constants not representable at this width");
        }

        Circuit init = build_ode_init(fmt, a_enc.value, b_enc.value, u1_enc.value, u2_enc.value);
        OdeMachine machines[2];
        Circuit step_from0 = build_ode_step(fmt, 0, &machines[0]);
        Circuit step_from1 = build_ode_step(fmt, 1, &machines[1]);
        const uint32_t width = std::max(step_from0.num_qubits, step_from1.num_qubits);

        CaseOut out;
        out.summary.width = config.widths[wi];
        out.summary.e = fmt.e;
        out.summary.m = fmt.m;
        out.summary.dt = dt;
        out.summary.steps = steps;

        RunAggregator agg;
        agg.feed(init);

        RngStream rng = master.derive(wi * 131 + static_cast<uint64_t>(1.0 / dt));
        RunResult state = run(init, SparseState(width), config.backend, rng);

        double err_num = 0, err_den = 0;
        auto record = [&](uint32_t k, double u1, double u2) {
            double t = k * dt;
            double s1 = -std::sin(t), s2 = -std::cos(t);
            err_num += (u1 - s1) * (u1 - s1) + (u2 - s2) * (u2 - s2);
            err_den += s1 * s1 + s2 * s2;
            OdeStepRow row{config.widths[wi], dt,       k, t, u1, u2, s1, s2,
                           std::sqrt(err_num / err_den)};
            out.rows.push_back(row);
        };

        {
            Basis b0 = state.state.dominant_basis();
            record(0, read_float_bits(b0, machines[0].u1[0]).value(),
                   read_float_bits(b0, machines[0].u2[0]).value());
        }
        for (uint32_t k = 1; k <= steps; ++k) {
            int from = (k - 1) % 2;
            const Circuit& step = from == 0 ? step_from0 : step_from1;
            agg.feed(step);
            state = run(step, std::move(state.state), config.backend, rng);
            Basis bk = state.state.dominant_basis();
            record(k, read_float_bits(bk, machines[from].u1[1 - from]).value(),
                   read_float_bits(bk, machines[from].u2[1 - from]).value());
        }
        out.summary.final_l2_rel_err = out.rows.back().l2_rel_err;
        out.summary.stats = agg.stats();
        return out;
    };

    std::vector<std::future<CaseOut>> futures;
    for (size_t wi = 0; wi < config.widths.size(); ++wi) {
        for (double dt : config.dts) {
            futures.push_back(std::async(std::launch::async, run_case, wi, dt));
        }
    }
    for (auto& f : futures) {
        CaseOut out = f.get();
        result.rows.insert(result.rows.end(), out.rows.begin(), out.rows.end());
        result.summaries.push_back(out.summary);
    }
    return result;
}

std::string OdeResult::csv() const {
    std::ostringstream os;
    os << "width,dt,step,t,u1,u2,u1_exact,u2_exact,l2_rel_err\n";
    for (const auto& r : rows) {
        os << r.width << "," << fmt_double(r.dt) << "," << r.step << "," << fmt_double(r.t) << ","
           << fmt_double(r.u1) << "," << fmt_double(r.u2) << "," << fmt_double(r.u1_exact) << ","
           << fmt_double(r.u2_exact) << "," << fmt_double(r.l2_rel_err) << "\n";
    }
    return os.str();
}

std::string OdeResult::summary_json() const {
    ordered_json j;
    j["command"] = "ode";
    j["version"] = kArtifactVersion;
    j["config"] = {{"widths", config.widths},
                   {"mantissas", config.mantissas},
                   {"exponents", config.exponents},
                   {"dts", config.dts},
                   {"horizon", config.horizon},
                   {"seed", config.seed},
                   {"backend", config.backend == Backend::Semantic ? "semantic" : "gate"}};
    ordered_json cases = ordered_json::array();
    for (const auto& s : summaries) {
        ordered_json c;
        c["width"] = s.width;
        c["e"] = s.e;
        c["m"] = s.m;
        c["dt"] = s.dt;
        c["steps"] = s.steps;
        c["final_l2_rel_err"] = s.final_l2_rel_err;
        c["resources"] = stats_json(s.stats);
        cases.push_back(c);
    }
    j["cases"] = cases;
    return j.dump(2) + "\n";
}

void ResourcesConfig::validate() const {
    check_width_split(widths, mantissas, exponents);
    if (op != "add" && op != "mul" && op != "recip" && op != "shift" && op != "zeroexp") {
        throw std::invalid_argument("unknown op: " + op + " (add|mul|recip|shift|zeroexp)");
    }
}

ResourcesResult run_resources(const ResourcesConfig& config) {
    config.validate();
    ResourcesResult result;
    result.config = config;
    for (size_t wi = 0; wi < config.widths.size(); ++wi) {
        const FloatFormat fmt{config.exponents[wi], config.mantissas[wi]};
        CircuitBuilder b;
        if (config.op == "add" || config.op == "mul") {
            FloatReg q = alloc_float_reg(b, "q", fmt);
            FloatReg r = alloc_float_reg(b, "r", fmt);
            FloatReg out = alloc_float_reg(b, "out", fmt);
            if (config.op == "add") {
                fadd(b, q, r, out);
            } else {
                fmul(b, q, r, out);
            }
        } else if (config.op == "recip") {
            FloatReg q = alloc_float_reg(b, "q", fmt);
            RecipWorkspace ws = alloc_recip_workspace(b, fmt);
            recip(b, q, static_cast<int>(config.recip_iterations), ws);
        } else if (config.op == "shift") {
            const uint32_t n = config.widths[wi];
            FixedReg q;
            q.layout = b.alloc_register("q", n);
            q.format = FixedFormat{n, 0, true};
            uint32_t sbits = 2;
            while ((uint64_t{1} << (sbits - 1)) < n) ++sbits;
            ++sbits;  // sign bit
            FixedReg s;
            s.layout = b.alloc_register("s", sbits);
            s.format = FixedFormat{sbits, 0, true};
            auto anc = b.alloc_ancillas(4);
            shift_inplace(b, q, s, {anc[0], anc[1], anc[2], anc[3]});
            for (uint32_t a : anc) b.release_ancilla_reset(a);
        } else {  // zeroexp
            FloatReg q = alloc_float_reg(b, "q", fmt);
            auto anc = b.alloc_ancillas(2);
            zero_exp(b, q, {anc[0], anc[1]});
            b.release_ancilla_reset(anc[0]);
            b.release_ancilla_reset(anc[1]);
        }
        Circuit c = std::move(b).take();
        result.cases.push_back({config.widths[wi], c.stats});
    }
    return result;
}

std::string ResourcesResult::csv() const {
    std::ostringstream os;
    os << "op,width,kind,arity,count,depth,total_qubits,ancilla_peak\n";
    for (const auto& c : cases) {
        for (const auto& [key, count] : c.stats.counts) {
            os << config.op << "," << c.width << "," << gate_kind_name(key.first) << ","
               << key.second << "," << count << "," << c.stats.depth << ","
               << c.stats.total_qubits << "," << c.stats.ancilla_high_water << "\n";
        }
    }
    return os.str();
}

std::string ResourcesResult::summary_json() const {
    ordered_json j;
    j["command"] = "resources";
    j["version"] = kArtifactVersion;
    j["config"] = {{"op", config.op},
                   {"widths", config.widths},
                   {"mantissas", config.mantissas},
                   {"exponents", config.exponents},
                   {"recip_iterations", config.recip_iterations}};
    ordered_json case_list = ordered_json::array();
    for (const auto& c : cases) {
        ordered_json cj;
        cj["width"] = c.width;
        cj["resources"] = stats_json(c.stats);
        case_list.push_back(cj);
    }
    j["cases"] = case_list;
    return j.dump(2) + "\n";
}

std::string describe_encoding(double x, FloatFormat fmt) {
    std::ostringstream os;
    fmt.validate();
    os << "input " << fmt_double(x) << " at (e=" << fmt.e << ", m=" << fmt.m << ")\n";
    for (RoundMode mode : {RoundMode::NearestEven, RoundMode::Truncate}) {
        const char* name = mode == RoundMode::NearestEven ? "nearest-even" : "truncate";
        SoftResult r = o_encode(x, fmt, mode);
        os << "  " << name << ": ";
        switch (r.status) {
            case FlowStatus::Ok:
                os << "exp_code=" << r.value.exp_code << " mant_code=" << r.value.mant_code
                   << " decoded=" << fmt_double(r.value.value())
                   << " rel_err=" << fmt_double(x == 0 ? 0.0 : (r.value.value() - x) / x);
                break;
            case FlowStatus::Overflow:
                os << "overflow: |x| above the exponent range";
                break;
            case FlowStatus::Underflow:
                os << "underflow: rounds to zero";
                break;
            case FlowStatus::Unrepresentable:
                os << "unrepresentable";
                break;
        }
        os << "\n";
    }
    return os.str();
}

double r_squared_linear(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("need >= 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    double b = (n * sxy - sx * sy) / denom;
    double a = (sy - b * sx) / n;
    double ss_res = 0, ss_tot = 0, mean = sy / n;
    for (size_t i = 0; i < n; ++i) {
        double fit = a + b * x[i];
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
}

double r_squared_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 4 || y.size() != n) throw std::invalid_argument("need >= 4 points");
    // Normal equations for y = c0 + c1 x + c2 x^2.
    double s[5] = {0, 0, 0, 0, 0};
    double t[3] = {0, 0, 0};
    for (size_t i = 0; i < n; ++i) {
        double xp = 1;
        for (int p = 0; p <= 4; ++p) {
            s[p] += xp;
            xp *= x[i];
        }
        t[0] += y[i];
        t[1] += y[i] * x[i];
        t[2] += y[i] * x[i] * x[i];
    }
    double m[3][4] = {{s[0], s[1], s[2], t[0]}, {s[1], s[2], s[3], t[1]}, {s[2], s[3], s[4], t[2]}};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        std::swap(m[col], m[pivot]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            for (int cc = col; cc < 4; ++cc) m[r][cc] -= f * m[col][cc];
        }
    }
    double c0 = m[0][3] / m[0][0], c1 = m[1][3] / m[1][1], c2 = m[2][3] / m[2][2];
    double ss_res = 0, ss_tot = 0, mean = t[0] / n;
    for (size_t i = 0; i < n; ++i) {
        double fit = c0 + c1 * x[i] + c2 * x[i] * x[i];
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
}

}  // namespace qfp
