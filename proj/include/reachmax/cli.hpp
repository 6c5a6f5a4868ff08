#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reachmax/benchgen.hpp"
#include "reachmax/io.hpp"
#include "reachmax/seqlab.hpp"
#include "reachmax/solver.hpp"

// reachmax solve <file> [--json|--pretty] [--n N] [--tol-qp T]
// reachmax bench --dim D --kind linear|affine --objective cxh|cxnh|cah|canh
//                --set box|vertices:COUNT [--count C] [--seed S] [--n N] [--out FILE] [--no-timing]
// reachmax analyze-seq <file>
//
// Exit codes: 0 success, 1 invalid input or unmet assumption, 2 solve status Failed.

namespace reachmax {
namespace cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_failed = 2;

namespace detail {

inline void print_error(std::ostream& err, const Error& e) {
    nlohmann::json j{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    err << j.dump() << '\n';
}

inline void print_pretty(std::ostream& out, const SolveReport& r) {
    out << "status      " << to_string(r.status) << '\n';
    if (r.status == SolveStatus::Failed) {
        out << "no positive term among nu_0..nu_" << r.N << '\n';
        return;
    }
    out << "nu_opt      " << bench::format_double(r.nu_opt) << '\n';
    out << "k_opt       " << r.k_opt << '\n';
    out << "x_opt       [";
    for (Eigen::Index i = 0; i < r.x_opt.size(); ++i) out << (i ? ", " : "") << bench::format_double(r.x_opt(i));
    out << "]\n";
    if (r.k_pos) out << "k_pos       " << *r.k_pos << '\n';
    if (!r.K_trace.empty()) {
        out << "K trace    ";
        for (const auto& [k, K] : r.K_trace) out << " (" << k << ", " << K << ")";
        out << '\n';
    }
    out << "evaluations " << r.iterations << '\n';
    if (r.degenerate) out << "degenerate instance: value known without iterating\n";
}

inline bench::ObjectiveKind parse_objective(const std::string& s) {
    if (s == "cxh") return bench::ObjectiveKind::CXH;
    if (s == "cxnh") return bench::ObjectiveKind::CXnH;
    if (s == "cah") return bench::ObjectiveKind::CAH;
    if (s == "canh") return bench::ObjectiveKind::CAnH;
    throw Error(Errc::InvalidInput, "unknown objective kind " + s);
}

inline bench::SetKind parse_set(const std::string& s) {
    if (s == "box") return bench::SetKind::make_box();
    const std::string prefix = "vertices:";
    if (s.rfind(prefix, 0) == 0) {
        try {
            const auto n = std::stoul(s.substr(prefix.size()));
            if (n > 0) return bench::SetKind::make_vertices(n);
        } catch (const std::exception&) {
        }
    }
    throw Error(Errc::InvalidInput, "--set must be box or vertices:<count>");
}

inline std::string instances_path(const std::string& out) {
    std::filesystem::path p(out);
    return (p.parent_path() / (p.stem().string() + ".instances" + p.extension().string())).string();
}

} // namespace detail

inline int cmd_solve(const std::string& path, bool pretty, std::optional<std::size_t> n,
                     std::optional<double> tol_qp, std::ostream& out, std::ostream& err) {
    try {
        auto inst = io::instance_from_json(io::read_json_file(path));
        if (n) {
            if (*n == 0) throw Error(Errc::InvalidInput, "--n must be positive");
            inst.N = *n;
        }
        SolveOptions opt;
        if (tol_qp) {
            if (!(*tol_qp > 0.0)) throw Error(Errc::InvalidInput, "--tol-qp must be positive");
            opt.qp.gap_tol = *tol_qp;
        }
        const auto report = solve(inst, opt);
        if (pretty) detail::print_pretty(out, report);
        else out << io::report_to_json(report).dump() << '\n';
        return report.status == SolveStatus::Failed ? exit_failed : exit_ok;
    } catch (const Error& e) {
        detail::print_error(err, e);
        return exit_error;
    }
}

struct BenchArgs {
    std::size_t dim = 2;
    std::string kind = "linear";
    std::string objective = "cxh";
    std::string set = "box";
    std::size_t count = 100;
    std::uint64_t seed = 1;
    std::size_t N = default_positivity_cap;
    std::string out;
    bool timing = true;
};

inline int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
    try {
        bench::BenchSpec spec;
        spec.dim = args.dim;
        if (args.kind == "linear") spec.system = bench::SystemKind::Linear;
        else if (args.kind == "affine") spec.system = bench::SystemKind::Affine;
        else throw Error(Errc::InvalidInput, "--kind must be linear or affine");
        spec.objective = detail::parse_objective(args.objective);
        spec.set = detail::parse_set(args.set);
        spec.instance_count = args.count;
        spec.seed = args.seed;
        spec.N = args.N;
        bench::validate(spec);
        if (spec.set.box && spec.dim > 22) {
            throw Error(Errc::DimensionTooLarge, "box benchmarks enumerate 2^dim vertices; dim must be <= 22");
        }

        const auto result = bench::run_bench(spec);
        const bench::CsvOptions csv{true, args.timing};
        if (!args.out.empty()) {
            std::ofstream agg(args.out);
            std::ofstream rows(detail::instances_path(args.out));
            if (!agg || !rows) throw Error(Errc::InvalidInput, "cannot write " + args.out);
            bench::write_aggregate_csv(agg, result, csv);
            bench::write_instances_csv(rows, result, csv);
        }
        bench::write_aggregate_csv(out, result, csv);
        return exit_ok;
    } catch (const Error& e) {
        detail::print_error(err, e);
        return exit_error;
    }
}

inline int cmd_analyze_seq(const std::string& path, std::ostream& out, std::ostream& err) {
    try {
        const auto seq = io::sequence_from_json(io::read_json_file(path));
        out << io::profile_to_json(seqlab::rank_profile(seq)).dump() << '\n';
        return exit_ok;
    } catch (const Error& e) {
        detail::print_error(err, e);
        return exit_error;
    }
}

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Quadratic maximization over the reachable values of a convergent affine system"};
    app.require_subcommand(1);

    auto* solve_cmd = app.add_subcommand("solve", "Solve one instance file");
    std::string solve_path;
    bool as_json = false, pretty = false;
    std::optional<std::size_t> n_cap;
    std::optional<double> tol_qp;
    solve_cmd->add_option("file", solve_path, "Instance JSON")->required();
    auto* json_flag = solve_cmd->add_flag("--json", as_json, "JSON report (default)");
    solve_cmd->add_flag("--pretty", pretty, "Human-readable report")->excludes(json_flag);
    solve_cmd->add_option("--n", n_cap, "Positivity search cap N");
    solve_cmd->add_option("--tol-qp", tol_qp, "Interior-point duality-gap target");

    auto* bench_cmd = app.add_subcommand("bench", "Run a seeded random benchmark");
    BenchArgs bargs;
    bool no_timing = false;
    bench_cmd->add_option("--dim", bargs.dim, "System dimension")->required();
    bench_cmd->add_option("--kind", bargs.kind, "linear or affine");
    bench_cmd->add_option("--objective", bargs.objective, "cxh, cxnh, cah or canh");
    bench_cmd->add_option("--set", bargs.set, "box or vertices:<count>");
    bench_cmd->add_option("--count", bargs.count, "Number of instances");
    bench_cmd->add_option("--seed", bargs.seed, "Generator seed");
    bench_cmd->add_option("--n", bargs.N, "Positivity search cap N");
    bench_cmd->add_option("--out", bargs.out, "Aggregate CSV path (per-instance rows go to <stem>.instances.csv)");
    bench_cmd->add_flag("--no-timing", no_timing, "Leave time and memory cells empty");

    auto* seq_cmd = app.add_subcommand("analyze-seq", "Rank profile of a sequence prefix");
    std::string seq_path;
    seq_cmd->add_option("file", seq_path, "JSON array of reals")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_error;
    }

    if (*solve_cmd) return cmd_solve(solve_path, pretty, n_cap, tol_qp, out, err);
    if (*bench_cmd) {
        bargs.timing = !no_timing;
        return cmd_bench(bargs, out, err);
    }
    return cmd_analyze_seq(seq_path, out, err);
}

} // namespace cli
} // namespace reachmax
