// qfikit command-line front end: single-point QFI computation, lambda
// sweeps, the 2x2 QFI matrix, finite-difference cross-checks and n-probe
// scaling reports. stdout carries machine-readable data only; all
// diagnostics go to stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfikit/qfikit.hpp"

namespace {

using namespace qfikit;

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitSchema = 2;
constexpr int kExitValidation = 3;
constexpr int kExitUnwritable = 4;
constexpr int kExitOracleDisagreement = 5;

constexpr double kOracleGate = 1e-5;

// JSON scalar: g17 for finite values, null for infinities (the CRLB of an
// unidentifiable parameter).
std::string json_number(double x) {
    return std::isfinite(x) ? format_g17(x) : std::string("null");
}

std::string json_vec3(const std::optional<Vec3>& v) {
    if (!v) return "null";
    return "[" + format_g17((*v)[0]) + "," + format_g17((*v)[1]) + "," +
           format_g17((*v)[2]) + "]";
}

void emit(const std::string& line) { std::fputs((line + "\n").c_str(), stdout); }

std::vector<double> parse_eta_list(const std::string& text) {
    std::vector<double> etas;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? std::string::npos
                                                          : comma - start);
        if (item.empty())
            throw SchemaError("--eta list has an empty entry");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw SchemaError("--eta entry is not a decimal number: " + item);
        }
        if (used != item.size() || !std::isfinite(v))
            throw SchemaError("--eta entry is not a decimal number: " + item);
        if (!seen.insert(format_g17(v)).second)
            throw SchemaError("--eta list repeats the value " +
                              format_g17(v) +
                              " (file names would collide)");
        etas.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (etas.empty()) throw SchemaError("--eta list is empty");
    return etas;
}

int cmd_compute(const std::string& model_file,
                const std::string& rho_file, std::int64_t nu) {
    const DisturbedModel model = load_model_file(model_file);
    if (!rho_file.empty()) {
        const DensityMatrix rho = load_density_file(rho_file);
        const double q = qfi_mixed(rho, average_hamiltonian(model));
        emit("{\"qfi\":" + format_g17(q) +
             ",\"crlb\":" + json_number(cramer_rao_bound(q, nu)) +
             ",\"method\":\"closed_form\"}");
        return kExitOk;
    }
    const QfiReport r = qfi_max(model).with_repetitions(nu);
    emit("{\"qfi\":" + format_g17(r.qfi) +
         ",\"qfi_max\":" + format_g17(*r.qfi_max) +
         ",\"spectral_width\":" + format_g17(*r.spectral_width) +
         ",\"crlb\":" + json_number(r.crlb) +
         ",\"method\":\"closed_form\"}");
    return kExitOk;
}

// One sweep curve, through the qubit closed form when both operators are
// traceless unit-Bloch 2x2, otherwise through the optimal-probe QFI per
// grid point.
SweepResult sweep_curve(const DisturbedModel& model, double eta,
                        const std::vector<double>& grid, unsigned jobs,
                        std::optional<Vec3>& a_out,
                        std::optional<Vec3>& b_out) {
    const std::optional<Vec3> a = unit_bloch_of(model.generator.matrix());
    const std::optional<Vec3> b = unit_bloch_of(model.disturbance.matrix());
    if (a && b) {
        a_out = a;
        b_out = b;
        return sweep(*a, *b, eta, grid, jobs);
    }
    a_out.reset();
    b_out.reset();

    SweepResult r;
    r.grid = grid;
    r.q_over_4.resize(grid.size());
    auto q4_at = [&](double l) {
        const DisturbedModel point(model.generator, model.disturbance, l,
                                   eta);
        return 0.25 * qfi_max(point).qfi;
    };
    parallel_for_index(grid.size(), jobs,
                       [&](std::size_t i) { r.q_over_4[i] = q4_at(grid[i]); });

    double lo = r.q_over_4[0], hi = r.q_over_4[0];
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        lo = std::min(lo, r.q_over_4[i]);
        hi = std::max(hi, r.q_over_4[i]);
        if (r.q_over_4[i] < r.q_over_4[best]) best = i;
    }
    if (hi - lo <= 1e-12 * (1.0 + hi)) {
        r.flat = true;
        r.lambda_min_located = grid.front();
        r.q_at_min = 4.0 * r.q_over_4.front();
        return r;
    }
    const std::size_t left = best > 0 ? best - 1 : best;
    const std::size_t right = best + 1 < grid.size() ? best + 1 : best;
    const auto [x, fx] = golden_section_min(q4_at, grid[left], grid[right]);
    r.lambda_min_located = x;
    r.q_at_min = 4.0 * fx;
    return r;
}

int cmd_sweep(const std::string& model_file, double from, double to,
              std::int64_t points, const std::string& eta_list,
              const std::string& out_dir, unsigned jobs) {
    if (points < 2)
        throw SchemaError("--points must be >= 2, got " +
                          std::to_string(points));
    if (!(from < to))
        throw SchemaError("--lambda-from must be strictly below --lambda-to");
    const DisturbedModel model = load_model_file(model_file);
    const std::vector<double> etas = eta_list.empty()
                                         ? std::vector<double>{model.eta}
                                         : parse_eta_list(eta_list);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << out_dir
                  << ": " << ec.message() << "\n";
        return kExitUnwritable;
    }

    std::vector<double> grid(static_cast<std::size_t>(points));
    for (std::int64_t i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] =
            from + (to - from) * static_cast<double>(i) /
                       static_cast<double>(points - 1);

    std::string files = "[";
    for (std::size_t e = 0; e < etas.size(); ++e) {
        std::optional<Vec3> a, b;
        const SweepResult r =
            sweep_curve(model, etas[e], grid, jobs, a, b);

        const std::string stem = "sweep_eta=" + format_g17(etas[e]);
        const std::filesystem::path csv_path =
            std::filesystem::path(out_dir) / (stem + ".csv");
        const std::filesystem::path meta_path =
            std::filesystem::path(out_dir) / (stem + ".json");

        std::ofstream csv(csv_path);
        if (!csv) {
            std::cerr << "error: cannot write " << csv_path.string() << "\n";
            return kExitUnwritable;
        }
        csv << "lambda,q_over_4\n";
        for (std::size_t i = 0; i < r.grid.size(); ++i)
            csv << format_g17(r.grid[i]) << ","
                << format_g17(r.q_over_4[i]) << "\n";
        csv.flush();
        if (!csv.good()) {
            std::cerr << "error: short write to " << csv_path.string()
                      << "\n";
            return kExitUnwritable;
        }

        std::ofstream meta(meta_path);
        if (!meta) {
            std::cerr << "error: cannot write " << meta_path.string() << "\n";
            return kExitUnwritable;
        }
        meta << "{\"a\":" << json_vec3(a) << ",\"b\":" << json_vec3(b)
             << ",\"eta\":" << format_g17(etas[e])
             << ",\"lambda_min_located\":" << format_g17(r.lambda_min_located)
             << ",\"q_at_min\":" << format_g17(r.q_at_min)
             << ",\"flat\":" << (r.flat ? "true" : "false") << "}\n";
        meta.flush();
        if (!meta.good()) {
            std::cerr << "error: short write to " << meta_path.string()
                      << "\n";
            return kExitUnwritable;
        }

        if (e > 0) files += ",";
        files += "\"" + csv_path.string() + "\"";
    }
    emit("{\"files\":" + files + "]}");
    return kExitOk;
}

int cmd_matrix(const std::string& model_file, const std::string& rho_file) {
    const DisturbedModel model = load_model_file(model_file);
    const DensityMatrix rho = load_density_file(rho_file);
    const QfiMatrix2 q = qfi_matrix(rho, model);
    emit("{\"q_ll\":" + format_g17(q.q_ll) + ",\"q_ee\":" +
         format_g17(q.q_ee) + ",\"q_le\":" + format_g17(q.q_le) +
         ",\"det\":" + format_g17(q.det()) +
         ",\"singular\":" + (q.singular() ? "true" : "false") + "}");
    return kExitOk;
}

int cmd_oracle(const std::string& model_file, const std::string& rho_file,
               double dl) {
    const DisturbedModel model = load_model_file(model_file);
    const DensityMatrix rho = load_density_file(rho_file);
    if (dl > kFdRecommendedMaxStep)
        std::cerr << "warning: --dl " << format_g17(dl)
                  << " is above the recommended maximum "
                  << format_g17(kFdRecommendedMaxStep)
                  << "; the extrapolated estimate may be inaccurate\n";
    const double closed = qfi_mixed(rho, average_hamiltonian(model));
    const double probe = qfi_fd(rho, model, dl);
    const double rel = std::abs(closed - probe) / (1.0 + closed);
    emit("{\"closed_form\":" + format_g17(closed) +
         ",\"oracle\":" + format_g17(probe) +
         ",\"rel_diff\":" + format_g17(rel) + "}");
    if (rel > kOracleGate) {
        std::cerr << "error: finite-difference probe disagrees with the "
                     "closed form (rel_diff "
                  << format_g17(rel) << " > " << format_g17(kOracleGate)
                  << ")\n";
        return kExitOracleDisagreement;
    }
    return kExitOk;
}

int cmd_nprobe(const std::string& model_file, int n,
               const std::string& coupled_file) {
    const DisturbedModel model = load_model_file(model_file);
    const ProbeEnsemble pe(n, model.generator, model.disturbance);
    ScalingReport r;
    bool asserted = true;
    if (!coupled_file.empty()) {
        const HermitianOperator coupled = validate_hermitian(
            parse_matrix(load_json_file(coupled_file), coupled_file));
        r = coupled_scaling_check(pe, coupled, model.lambda, model.eta);
        asserted = false;  // no scaling law is claimed for coupled noise
    } else {
        r = heisenberg_scaling_check(pe, model.lambda, model.eta);
    }
    emit("{\"q_n\":" + format_g17(r.q_n) + ",\"q_1\":" + format_g17(r.q_1) +
         ",\"ratio\":" + format_g17(r.ratio) +
         ",\"expected\":" + format_g17(r.expected) +
         ",\"asserted\":" + (asserted ? "true" : "false") + "}");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "QFI toolkit for unitary dynamics under a unitary disturbance"};
    app.require_subcommand(1);

    std::string model_file, rho_file, eta_list, out_dir, coupled_file;
    std::int64_t nu = 1, points = 2;
    double lambda_from = 0.0, lambda_to = 0.0, dl = 1e-3;
    int n_probes = 1;
    unsigned jobs = 0;  // 0 = resolve from QFI_JOBS / hardware

    CLI::App* compute = app.add_subcommand(
        "compute", "QFI at one operating point (optimal probe by default)");
    compute->add_option("model", model_file, "model JSON file")->required();
    compute->add_option("--rho", rho_file, "density-matrix JSON file");
    compute->add_option("--nu", nu, "number of repetitions for the CRLB")
        ->check(CLI::PositiveNumber);

    CLI::App* sweep = app.add_subcommand(
        "sweep", "peak QFI over a lambda grid, one CSV per eta");
    sweep->add_option("model", model_file, "model JSON file")->required();
    sweep->add_option("--lambda-from", lambda_from, "grid start")->required();
    sweep->add_option("--lambda-to", lambda_to, "grid end")->required();
    sweep->add_option("--points", points, "grid size (>= 2)")->required();
    sweep->add_option("--eta", eta_list,
                      "comma-separated disturbance strengths "
                      "(default: the model's eta)");
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--jobs", jobs, "worker threads (default: QFI_JOBS or cores)")
        ->check(CLI::PositiveNumber);

    CLI::App* matrix = app.add_subcommand(
        "matrix", "2x2 QFI matrix for joint (lambda, eta) estimation");
    matrix->add_option("model", model_file, "model JSON file")->required();
    matrix->add_option("rho", rho_file, "density-matrix JSON file")
        ->required();

    CLI::App* oracle = app.add_subcommand(
        "oracle", "cross-check the closed form against a finite-difference "
                  "fidelity probe");
    oracle->add_option("model", model_file, "model JSON file")->required();
    oracle->add_option("rho", rho_file, "density-matrix JSON file")
        ->required();
    oracle->add_option("--dl", dl, "finite-difference step (default 1e-3)")
        ->check(CLI::PositiveNumber);

    CLI::App* nprobe = app.add_subcommand(
        "nprobe", "peak-QFI scaling of n identical probes");
    nprobe->add_option("model", model_file, "model JSON file (local pair)")
        ->required();
    nprobe->add_option("--n", n_probes, "number of probes")
        ->required()
        ->check(CLI::PositiveNumber);
    nprobe->add_option("--experimental", coupled_file,
                       "coupled collective disturbance JSON (reported "
                       "without any scaling assertion)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    }

    try {
        const unsigned workers =
            worker_count(jobs >= 1 ? std::optional<unsigned>(jobs)
                                   : std::nullopt);
        if (compute->parsed()) return cmd_compute(model_file, rho_file, nu);
        if (sweep->parsed())
            return cmd_sweep(model_file, lambda_from, lambda_to, points,
                             eta_list, out_dir, workers);
        if (matrix->parsed()) return cmd_matrix(model_file, rho_file);
        if (oracle->parsed()) return cmd_oracle(model_file, rho_file, dl);
        if (nprobe->parsed())
            return cmd_nprobe(model_file, n_probes, coupled_file);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitUnexpected;
    }
    return kExitUnexpected;  // unreachable: a subcommand is required
}
