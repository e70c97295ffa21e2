#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qfp/bench.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << contents;
    std::cout << "wrote " << path.string() << "\n";
}

qfp::Backend parse_backend(const std::string& name) {
    if (name == "semantic") return qfp::Backend::Semantic;
    if (name == "gate") return qfp::Backend::GateFaithful;
    throw CLI::ValidationError("--backend", "expected 'gate' or 'semantic'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum floating-point arithmetic simulator and benchmarks"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    app.add_option("--out", out_dir, "Output directory for CSV/JSON files")->capture_default_str();

    // recip-bench
    auto* recip_cmd = app.add_subcommand("recip-bench", "Newton reciprocal error benchmark");
    qfp::RecipBenchConfig rcfg;
    std::string rbackend = "semantic";
    recip_cmd->add_option("--widths", rcfg.widths, "Register widths")->delimiter(',');
    recip_cmd->add_option("--mantissas", rcfg.mantissas, "Mantissa widths per register width")
        ->delimiter(',');
    recip_cmd->add_option("--exponents", rcfg.exponents, "Exponent widths per register width")
        ->delimiter(',');
    recip_cmd->add_option("--samples", rcfg.samples, "Samples per width")->capture_default_str();
    recip_cmd->add_option("--iters", rcfg.iterations, "Newton iterations")->capture_default_str();
    recip_cmd->add_option("--mean", rcfg.gauss_mean, "Gaussian mean")->capture_default_str();
    recip_cmd->add_option("--stddev", rcfg.gauss_stddev, "Gaussian stddev")->capture_default_str();
    recip_cmd->add_option("--seed", rcfg.seed, "Master seed")->capture_default_str();
    recip_cmd->add_option("--backend", rbackend, "gate | semantic")->capture_default_str();

    // ode
    auto* ode_cmd = app.add_subcommand("ode", "Trapezoidal integration of the rotation system");
    qfp::OdeConfig ocfg;
    std::string obackend = "semantic";
    ode_cmd->add_option("--widths", ocfg.widths, "Register widths")->delimiter(',');
    ode_cmd->add_option("--mantissas", ocfg.mantissas, "Mantissa widths")->delimiter(',');
    ode_cmd->add_option("--exponents", ocfg.exponents, "Exponent widths")->delimiter(',');
    ode_cmd->add_option("--dt", ocfg.dts, "Time steps in seconds (powers of two)")->delimiter(',');
    ode_cmd->add_option("--horizon", ocfg.horizon, "Integration horizon in seconds")
        ->capture_default_str();
    ode_cmd->add_option("--seed", ocfg.seed, "Master seed")->capture_default_str();
    ode_cmd->add_option("--backend", obackend, "gate | semantic")->capture_default_str();

    // resources
    auto* res_cmd = app.add_subcommand("resources", "Gate/depth/ancilla report for one operation");
    qfp::ResourcesConfig scfg;
    res_cmd->add_option("--op", scfg.op, "add | mul | recip | shift | zeroexp")
        ->capture_default_str();
    res_cmd->add_option("--widths", scfg.widths, "Register widths")->delimiter(',');
    res_cmd->add_option("--mantissas", scfg.mantissas, "Mantissa widths")->delimiter(',');
    res_cmd->add_option("--exponents", scfg.exponents, "Exponent widths")->delimiter(',');
    res_cmd->add_option("--iters", scfg.recip_iterations, "Newton iterations for recip")
        ->capture_default_str();

    // encode
    auto* enc_cmd = app.add_subcommand("encode", "Show the float encoding of a value");
    double enc_x = 0.0;
    uint32_t enc_e = 5, enc_m = 11;
    enc_cmd->add_option("value", enc_x, "Value to encode")->required();
    enc_cmd->add_option("-e,--exponent-bits", enc_e, "Exponent qubits")->capture_default_str();
    enc_cmd->add_option("-m,--mantissa-bits", enc_m, "Mantissa qubits")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*enc_cmd) {
            std::cout << qfp::describe_encoding(enc_x, qfp::FloatFormat{enc_e, enc_m});
            return 0;
        }
        fs::create_directories(out_dir);
        if (*recip_cmd) {
            rcfg.backend = parse_backend(rbackend);
            qfp::RecipBenchResult result = qfp::run_recip_bench(rcfg);
            write_file(fs::path(out_dir) / "recip.csv", result.csv());
            write_file(fs::path(out_dir) / "recip_summary.json", result.summary_json());
            for (const auto& s : result.summaries) {
                std::cout << "width " << s.width << ": kept " << s.kept << ", discarded "
                          << s.discarded << ", mean |rel err| " << s.mean_abs_err << "\n";
            }
        } else if (*ode_cmd) {
            ocfg.backend = parse_backend(obackend);
            qfp::OdeResult result = qfp::run_ode(ocfg);
            write_file(fs::path(out_dir) / "ode.csv", result.csv());
            write_file(fs::path(out_dir) / "ode_summary.json", result.summary_json());
            for (const auto& s : result.summaries) {
                std::cout << "width " << s.width << " dt " << s.dt << ": final l2 rel err "
                          << s.final_l2_rel_err << "\n";
            }
        } else if (*res_cmd) {
            qfp::ResourcesResult result = qfp::run_resources(scfg);
            write_file(fs::path(out_dir) / "resources.csv", result.csv());
            write_file(fs::path(out_dir) / "resources_summary.json", result.summary_json());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
