// Command-line front end: matrix generation/ingestion, preconditioned solves,
// spectral analysis, and benchmark sweeps with CSV reports.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "slr/analysis.hpp"
#include "slr/krylov.hpp"
#include "slr/matrix_market.hpp"
#include "slr/model_problems.hpp"
#include "slr/rng.hpp"
#include "slr/slr_preconditioner.hpp"

namespace {

using namespace slr;

struct MatrixSpec {
    std::string text;
    enum class Kind { Lap2D, Lap3D, File } kind = Kind::Lap2D;
    index_t nx = 0, ny = 0, nz = 0;
    double shift = 0.0;
    std::string path;

    bool indefinite_declared() const { return kind != Kind::File && shift > 0.0; }
    bool is_grid() const { return kind != Kind::File; }
};

MatrixSpec parse_matrix_spec(const std::string& text) {
    MatrixSpec m;
    m.text = text;
    auto colon = text.find(':');
    if (colon == std::string::npos) throw std::runtime_error("matrix spec needs 'kind:args': " + text);
    const std::string kind = text.substr(0, colon);
    const std::string args = text.substr(colon + 1);
    if (kind == "mm") {
        m.kind = MatrixSpec::Kind::File;
        m.path = args;
        return m;
    }
    std::vector<double> nums;
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) nums.push_back(std::stod(tok));
    if (kind == "lap2d") {
        m.kind = MatrixSpec::Kind::Lap2D;
        if (nums.size() < 2 || nums.size() > 3) throw std::runtime_error("lap2d:nx,ny[,c]");
        m.nx = static_cast<index_t>(nums[0]);
        m.ny = static_cast<index_t>(nums[1]);
        m.shift = nums.size() == 3 ? nums[2] : 0.0;
    } else if (kind == "lap3d") {
        m.kind = MatrixSpec::Kind::Lap3D;
        if (nums.size() < 3 || nums.size() > 4) throw std::runtime_error("lap3d:nx,ny,nz[,c]");
        m.nx = static_cast<index_t>(nums[0]);
        m.ny = static_cast<index_t>(nums[1]);
        m.nz = static_cast<index_t>(nums[2]);
        m.shift = nums.size() == 4 ? nums[3] : 0.0;
    } else {
        throw std::runtime_error("unknown matrix kind '" + kind + "'");
    }
    return m;
}

SymSparseMatrix load_matrix(const MatrixSpec& m) {
    switch (m.kind) {
        case MatrixSpec::Kind::Lap2D: return gen_laplacian_2d(m.nx, m.ny, m.shift);
        case MatrixSpec::Kind::Lap3D: return gen_laplacian_3d(m.nx, m.ny, m.nz, m.shift);
        case MatrixSpec::Kind::File: return read_matrix_market(m.path);
    }
    throw std::logic_error("unreachable");
}

struct RunConfig {
    std::string matrix = "lap2d:16,16,0";
    std::string solver = "pcg";
    std::string precond = "slr";
    index_t nd = 32;
    index_t rank = 16;
    std::string theta = "lambda_k_plus_1";
    double droptol_b = 1e-3;
    double droptol_c = 1e-3;
    index_t max_fill_b = -1;
    index_t max_fill_c = -1;
    double tol = 1e-8;
    index_t maxit = 300;
    index_t restart = 40;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string partitioner = "auto";   // auto | geometric | general
    bool indefinite = false;
    std::string timing = "wall";        // wall | none
    std::string history_path;
};

ThetaPolicy parse_theta(const std::string& t) {
    if (t == "lambda_k_plus_1") return ThetaPolicy::lambda_k_plus_1();
    if (t == "lambda_s") return ThetaPolicy::lambda_s();
    if (t == "zero") return ThetaPolicy::zero();
    if (t.rfind("fixed:", 0) == 0) return ThetaPolicy::fixed(std::stod(t.substr(6)));
    if (t.rfind("grigori:", 0) == 0) return ThetaPolicy::grigori(std::stod(t.substr(8)));
    throw std::runtime_error("unknown theta policy '" + t + "'");
}

PartitionLabels choose_partition(const SymSparseMatrix& A, const MatrixSpec& m, const RunConfig& cfg) {
    const bool pow2 = cfg.nd >= 1 && (cfg.nd & (cfg.nd - 1)) == 0;
    const bool want_geometric =
        cfg.partitioner == "geometric" || (cfg.partitioner == "auto" && m.is_grid() && pow2);
    if (want_geometric) {
        if (!m.is_grid()) throw std::runtime_error("geometric partitioner requires a grid matrix");
        if (!pow2) throw std::runtime_error("geometric partitioner requires nd to be a power of two");
        return m.kind == MatrixSpec::Kind::Lap2D ? geometric_bisection_grid(m.nx, m.ny, cfg.nd)
                                                 : geometric_bisection_grid(m.nx, m.ny, m.nz, cfg.nd);
    }
    return partition_graph(A, cfg.nd);
}

std::string fmt_time(double sec, const RunConfig& cfg) {
    if (cfg.timing == "none") return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", sec);
    return buf;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
    return file;
}

// Runs one solve; returns (csv row, exit code).
std::pair<std::string, int> run_solve(const RunConfig& cfg) {
    set_thread_count(cfg.threads);
    const MatrixSpec mspec = parse_matrix_spec(cfg.matrix);
    const bool indefinite = cfg.indefinite || mspec.indefinite_declared();
    if (cfg.solver == "pcg" && indefinite) {
        throw std::runtime_error("pcg requires an SPD-declared run; use gmres");
    }
    if (cfg.solver == "pcg" && cfg.precond == "ildlt") {
        throw std::runtime_error("pcg requires an SPD preconditioner; ildlt is not");
    }
    if (cfg.precond == "slr" && cfg.nd < 1) {
        throw std::runtime_error("slr requires nd >= 1");
    }
    SymSparseMatrix A = load_matrix(mspec);

    // b = A e with a deterministic unit-norm e (reproducible right-hand side)
    DenseVector e(A.n);
    SplitMix64 rng(cfg.seed);
    rng.fill_uniform(e);
    scal(1.0 / norm2(e), e);
    DenseVector b = sym_matvec(A, e);

    PrecondFn M;
    double fill = 0.0;
    double build_sec = 0.0;
    SlrPreconditioner P;
    IncompleteFactor F;
    if (cfg.precond == "slr") {
        SlrOptions opts;
        opts.p = cfg.nd;
        opts.k = cfg.rank;
        opts.theta = parse_theta(cfg.theta);
        opts.droptol_b = cfg.droptol_b;
        opts.droptol_c = cfg.droptol_c;
        opts.max_fill_b = cfg.max_fill_b;
        opts.max_fill_c = cfg.max_fill_c;
        opts.indefinite = indefinite;
        opts.lanczos.seed = cfg.seed;
        PartitionLabels labels = choose_partition(A, mspec, cfg);
        P = build_slr(A, labels, opts);
        fill = P.stats.fill_ratio;
        build_sec = P.stats.build_seconds;
        M = [&P](std::span<const double> r, std::span<double> z) { P.apply(r, z); };
    } else if (cfg.precond == "ict" || cfg.precond == "ildlt") {
        FactorOptions fopts;
        fopts.droptol = cfg.droptol_b;
        fopts.max_fill = cfg.max_fill_b;
        const auto t0 = std::chrono::steady_clock::now();
        F = cfg.precond == "ict" ? ict_factor(A, fopts) : ildlt_factor(A, fopts);
        build_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        fill = double(F.nnz()) / double(A.nnz_full());
        M = [&F](std::span<const double> r, std::span<double> z) { F.solve(r, z); };
    } else if (cfg.precond != "none") {
        throw std::runtime_error("unknown preconditioner '" + cfg.precond + "'");
    }

    DenseVector x;
    SolveReport rep;
    if (cfg.solver == "pcg") {
        rep = pcg(A, b, x, M, cfg.tol, cfg.maxit);
    } else if (cfg.solver == "gmres") {
        rep = gmres(A, b, x, M, cfg.restart, cfg.tol, cfg.maxit);
    } else {
        throw std::runtime_error("unknown solver '" + cfg.solver + "'");
    }
    rep.build_seconds = build_sec;
    if (!cfg.history_path.empty()) {
        std::ofstream hist(cfg.history_path);
        if (!hist) throw std::runtime_error("cannot open history file");
        rep.write_history(hist);
    }

    char fillbuf[32];
    std::snprintf(fillbuf, sizeof fillbuf, "%.3f", fill);
    std::ostringstream row;
    row << cfg.matrix << ',' << A.n << ',' << A.nnz_full() << ',' << cfg.precond << ',' << fillbuf
        << ',' << fmt_time(build_sec, cfg) << ',';
    if (rep.converged) {
        row << rep.iterations;
    } else {
        row << 'F';
    }
    row << ',' << fmt_time(rep.iter_seconds, cfg) << ',' << (rep.converged ? 1 : 0);
    return {row.str(), rep.converged ? 0 : 2};
}

constexpr const char* kSolveHeader = "matrix,n,nnz,precond,fill,p-t,its,i-t,converged";

void add_common(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--matrix", cfg.matrix, "mm:<path> | lap2d:nx,ny[,c] | lap3d:nx,ny,nz[,c]");
    cmd->add_option("--solver", cfg.solver, "pcg | gmres");
    cmd->add_option("--precond", cfg.precond, "slr | ict | ildlt | none");
    cmd->add_option("--nd", cfg.nd, "number of subdomains");
    cmd->add_option("--rank", cfg.rank, "low-rank correction size");
    cmd->add_option("--theta", cfg.theta, "lambda_k_plus_1 | lambda_s | zero | fixed:<v> | grigori:<eps>");
    cmd->add_option("--droptol-b", cfg.droptol_b, "drop tolerance for the B factors");
    cmd->add_option("--droptol-c", cfg.droptol_c, "drop tolerance for the C factor");
    cmd->add_option("--max-fill-b", cfg.max_fill_b, "kept entries per pivot column (B)");
    cmd->add_option("--max-fill-c", cfg.max_fill_c, "kept entries per pivot column (C)");
    cmd->add_option("--tol", cfg.tol, "relative residual tolerance");
    cmd->add_option("--maxit", cfg.maxit, "iteration cap");
    cmd->add_option("--restart", cfg.restart, "GMRES restart dimension");
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--threads", cfg.threads, "worker threads for subdomain solves")
        ->envname("SLR_THREADS");
    cmd->add_option("--partitioner", cfg.partitioner, "auto | geometric | general");
    cmd->add_flag("--indefinite", cfg.indefinite, "declare the matrix symmetric indefinite");
    cmd->add_option("--timing", cfg.timing, "wall | none (none prints '-' for reproducible bytes)");
    cmd->set_config("--config");
}

int cmd_gen(const RunConfig& cfg, const std::string& out_path) {
    const MatrixSpec m = parse_matrix_spec(cfg.matrix);
    SymSparseMatrix A = load_matrix(m);
    if (out_path.empty()) {
        write_matrix_market(A, std::cout);
    } else {
        write_matrix_market(A, out_path);
    }
    return 0;
}

int cmd_analyze(const RunConfig& cfg, const std::string& mode, double K, const std::string& out_path) {
    set_thread_count(cfg.threads);
    std::ofstream file;
    std::ostream& out = open_out(file, out_path);
    const MatrixSpec mspec = parse_matrix_spec(cfg.matrix);
    char buf[160];

    if (mode == "model") {
        if (mspec.kind != MatrixSpec::Kind::Lap2D || mspec.ny % 2 == 0) {
            throw std::runtime_error("model mode needs --matrix lap2d:nx,(2*ny+1)");
        }
        const index_t ny = (mspec.ny - 1) / 2;
        ModelSpectrum ms = model_gamma(mspec.nx, ny);
        out << "k,lambda,theta,gamma,zeta,gamma_approx\n";
        for (index_t k = 0; k < mspec.nx; ++k) {
            std::snprintf(buf, sizeof buf, "%lld,%.12e,%.12e,%.12e,%.12e,%.12e\n",
                          static_cast<long long>(k + 1), ms.lambda[k], ms.theta[k], ms.gamma[k],
                          ms.zeta[k], ms.gamma_approx[k]);
            out << buf;
        }
        return 0;
    }

    SymSparseMatrix A = load_matrix(mspec);
    PartitionLabels labels = choose_partition(A, mspec, cfg);

    if (mode == "rank") {
        DomainDecomposition dd = build_dd(A, labels);
        FactorOptions exact;   // rank certification uses exact solves
        std::vector<IncompleteFactor> bf(dd.p);
        parallel_for_domains(dd.p, [&](index_t d) { bf[d] = ict_factor(dd.B[d], exact); });
        IncompleteFactor cf = ict_factor(dd.C, exact);
        InterfaceOperator op{&dd, &bf, &cf};
        LanczosOptions lopts;
        lopts.seed = cfg.seed;
        const index_t r = certify_rank(op, K, std::min<index_t>(dd.s - 1, 512), lopts);
        out << "matrix,nd,K,rank\n";
        out << cfg.matrix << ',' << cfg.nd << ',' << K << ',' << r << '\n';
        return 0;
    }

    DomainDecomposition dd = build_dd(A, labels);
    if (mode == "decay") {
        std::vector<index_t> ranks;
        for (index_t m = 1; m <= std::min<index_t>(dd.s, 30); ++m) ranks.push_back(m);
        SpectralReport rep = spectral_report(dd, ranks, {}, -1);
        out << "kind,i,value_X,value_SinvCinv\n";
        for (index_t i = 0; i < dd.s; ++i) {
            std::snprintf(buf, sizeof buf, "eig,%lld,%.12e,%.12e\n", static_cast<long long>(i + 1),
                          rep.eig_X[i], rep.eig_SinvCinv[i]);
            out << buf;
        }
        for (std::size_t i = 0; i < rep.capture_X.size(); ++i) {
            std::snprintf(buf, sizeof buf, "capture,%lld,%.6f,%.6f\n",
                          static_cast<long long>(rep.capture_X[i].first), rep.capture_X[i].second,
                          rep.capture_SinvCinv[i].second);
            out << buf;
        }
        return 0;
    }
    if (mode == "kappa") {
        std::vector<double> thetas;
        for (int i = 0; i < 1000; ++i) thetas.push_back(i / 1000.0);
        SpectralReport rep = spectral_report(dd, {}, thetas, cfg.rank);
        out << "theta,kappa\n";
        for (auto [th, kp] : rep.kappa_samples) {
            std::snprintf(buf, sizeof buf, "%.6f,%.10f\n", th, kp);
            out << buf;
        }
        return 0;
    }
    throw std::runtime_error("unknown analyze mode '" + mode + "'");
}

int cmd_bench(RunConfig base, const std::string& suite_path, const std::string& out_path) {
    std::ifstream suite(suite_path);
    if (!suite) throw std::runtime_error("cannot open suite file '" + suite_path + "'");
    std::ofstream file;
    std::ostream& out = open_out(file, out_path);
    out << kSolveHeader << '\n';
    std::string line;
    int worst = 0;
    while (std::getline(suite, line)) {
        if (line.empty() || line[0] == '#') continue;
        RunConfig cfg = base;
        std::stringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw std::runtime_error("bench: expected key=value, got " + tok);
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "matrix") cfg.matrix = val;
            else if (key == "solver") cfg.solver = val;
            else if (key == "precond") cfg.precond = val;
            else if (key == "nd") cfg.nd = std::stoll(val);
            else if (key == "rank") cfg.rank = std::stoll(val);
            else if (key == "theta") cfg.theta = val;
            else if (key == "droptol-b") cfg.droptol_b = std::stod(val);
            else if (key == "droptol-c") cfg.droptol_c = std::stod(val);
            else if (key == "max-fill-b") cfg.max_fill_b = std::stoll(val);
            else if (key == "max-fill-c") cfg.max_fill_c = std::stoll(val);
            else if (key == "tol") cfg.tol = std::stod(val);
            else if (key == "maxit") cfg.maxit = std::stoll(val);
            else if (key == "restart") cfg.restart = std::stoll(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "partitioner") cfg.partitioner = val;
            else if (key == "indefinite") cfg.indefinite = val == "1" || val == "true";
            else throw std::runtime_error("bench: unknown key '" + key + "'");
        }
        try {
            auto [row, code] = run_solve(cfg);
            out << row << '\n';
            worst = std::max(worst, code);
        } catch (const std::exception& ex) {
            out << cfg.matrix << ",-,-," << cfg.precond << ",-,-,F,-,0\n";
            std::cerr << "bench row failed: " << ex.what() << '\n';
            worst = std::max(worst, 2);
        }
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse symmetric solver toolkit: Schur-complement preconditioning "
                 "with low-rank corrections"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string out_path, mode = "decay", suite_path;
    double K = 33.0;

    CLI::App* gen = app.add_subcommand("gen", "generate a model matrix and write Matrix Market");
    add_common(gen, cfg);
    gen->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* solve = app.add_subcommand("solve", "run one preconditioned solve, print a CSV row");
    add_common(solve, cfg);
    solve->add_option("--out", out_path, "output CSV path (default stdout)");
    solve->add_option("--history", cfg.history_path, "write iteration,relres CSV here");

    CLI::App* analyze = app.add_subcommand("analyze", "spectral diagnostics as CSV");
    add_common(analyze, cfg);
    analyze->add_option("--mode", mode, "decay | kappa | model | rank");
    analyze->add_option("--K", K, "condition-number target for mode=rank");
    analyze->add_option("--out", out_path, "output CSV path (default stdout)");

    CLI::App* bench = app.add_subcommand("bench", "run a suite file of solves into one CSV table");
    add_common(bench, cfg);
    bench->add_option("--suite", suite_path, "suite file (key=value rows)")->required();
    bench->add_option("--out", out_path, "output CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(cfg, out_path);
        if (solve->parsed()) {
            auto [row, code] = run_solve(cfg);
            std::ofstream file;
            std::ostream& out = open_out(file, out_path);
            out << kSolveHeader << '\n' << row << '\n';
            return code;
        }
        if (analyze->parsed()) return cmd_analyze(cfg, mode, K, out_path);
        if (bench->parsed()) return cmd_bench(cfg, suite_path, out_path);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 1;
}
