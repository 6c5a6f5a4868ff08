#pragma once

#include <sys/resource.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "reachmax/error.hpp"
#include "reachmax/solver.hpp"

namespace reachmax {
namespace bench {

enum class SystemKind { Linear, Affine };
enum class ObjectiveKind { CXH, CXnH, CAH, CAnH };

inline constexpr const char* to_string(ObjectiveKind k) noexcept {
    switch (k) {
    case ObjectiveKind::CXH: return "CXH";
    case ObjectiveKind::CXnH: return "CXnH";
    case ObjectiveKind::CAH: return "CAH";
    case ObjectiveKind::CAnH: return "CAnH";
    }
    return "?";
}

inline constexpr bool is_concave(ObjectiveKind k) noexcept {
    return k == ObjectiveKind::CAH || k == ObjectiveKind::CAnH;
}

inline constexpr bool is_homogeneous(ObjectiveKind k) noexcept {
    return k == ObjectiveKind::CXH || k == ObjectiveKind::CAH;
}

struct SetKind {
    bool box = true;
    std::size_t vertex_count = 0; // used when box == false

    static SetKind make_box() { return {true, 0}; }
    static SetKind make_vertices(std::size_t count) { return {false, count}; }
};

struct BenchSpec {
    std::size_t dim = 2;
    SystemKind system = SystemKind::Linear;
    ObjectiveKind objective = ObjectiveKind::CXH;
    SetKind set = SetKind::make_box();
    std::size_t instance_count = 100;
    std::uint64_t seed = 1;
    std::size_t N = default_positivity_cap;
};

inline void validate(const BenchSpec& spec) {
    if (spec.dim == 0) throw Error(Errc::InvalidInput, "dimension must be positive");
    if (spec.instance_count == 0) throw Error(Errc::InvalidInput, "instance count must be positive");
    if (spec.N == 0) throw Error(Errc::InvalidInput, "N must be positive");
    if (is_concave(spec.objective) && !spec.set.box) {
        throw Error(Errc::InvalidInput, "concave objectives require box initial sets");
    }
    if (!spec.set.box && spec.set.vertex_count == 0) {
        throw Error(Errc::InvalidInput, "vertex initial sets need at least one point");
    }
}

inline std::mt19937_64 instance_rng(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(std::uint64_t(index) >> 32)};
    return std::mt19937_64(seq);
}

inline constexpr std::size_t max_rejections = 1000;

/// Deterministic in (spec.seed, index).
inline ProblemInstance random_instance(const BenchSpec& spec, std::size_t index) {
    validate(spec);
    auto rng = instance_rng(spec.seed, index);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::uniform_real_distribution<double> target(0.3, 0.97);
    std::uniform_real_distribution<double> radius(0.1, 1.0);
    const auto d = static_cast<Eigen::Index>(spec.dim);
    auto draw = [&](Eigen::Index rows, Eigen::Index cols, auto& dist) {
        Matrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
        return m;
    };

    for (std::size_t attempt = 0; attempt < max_rejections; ++attempt) {
        ProblemInstance inst;
        inst.N = spec.N;
        inst.A = draw(d, d, sym);
        try {
            const double measured = linalg::eig_decompose(inst.A).rho;
            if (!(measured > 0.0)) continue;
            inst.A *= target(rng) / measured;
            if (!linalg::spectral_radius_check(linalg::eig_decompose(inst.A))) continue;
        } catch (const Error&) {
            continue;
        }

        inst.b = spec.system == SystemKind::Affine ? Vector(draw(d, 1, sym)) : Vector::Zero(d);
        const Matrix M = draw(d, d, sym);
        if (is_concave(spec.objective)) {
            inst.Q = -M.transpose() * M - 1e-3 * Matrix::Identity(d, d);
        } else {
            inst.Q = M.transpose() * M;
        }
        inst.Q = 0.5 * (inst.Q + inst.Q.transpose());
        inst.q = is_homogeneous(spec.objective) ? Vector::Zero(d) : Vector(draw(d, 1, sym));

        if (spec.set.box) {
            const Vector center = draw(d, 1, sym);
            const Vector r = draw(d, 1, radius);
            inst.Xin = geometry::Polytope::box(center - r, center + r);
        } else {
            std::uniform_real_distribution<double> wide(-2.0, 2.0);
            inst.Xin = geometry::Polytope::from_vertices(draw(d, static_cast<Eigen::Index>(spec.set.vertex_count), wide));
        }
        const auto cls = qp::classify(qp::QuadraticObjective(inst.Q, inst.q));
        if (cls == qp::ObjectiveClass::Unsupported) continue;
        return inst;
    }
    throw Error(Errc::GenerationExhausted, "no admissible instance after " + std::to_string(max_rejections) + " draws");
}

struct InstanceRecord {
    std::size_t index = 0;
    std::optional<SolveStatus> status; // empty when solve threw
    std::string error;
    double nu_opt = 0.0;
    std::size_t k_opt = 0;
    std::optional<std::size_t> k_pos;
    std::optional<std::size_t> K_init;
    std::optional<std::size_t> K_final;
    std::size_t iterations = 0;
    double time_s = 0.0;

    friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

struct BenchStats {
    std::size_t corollary = 0, kdiag = 0, failed = 0, errors = 0;
    double avg_time_s = 0.0;
    std::optional<double> peak_rss_mib;
    double avg_kpos = 0.0;
    std::size_t max_kpos = 0;
    double avg_iter = 0.0; // final stopping rank
    std::size_t max_iter = 0;
    double avg_gap = 0.0;  // final stopping rank minus k_opt
    std::size_t max_gap = 0;
};

struct BenchResult {
    BenchSpec spec;
    BenchStats stats;
    std::vector<InstanceRecord> records;
};

inline InstanceRecord solve_record(const BenchSpec& spec, std::size_t index) {
    InstanceRecord rec;
    rec.index = index;
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto inst = random_instance(spec, index);
        const auto report = solve(inst);
        rec.status = report.status;
        rec.nu_opt = report.nu_opt;
        rec.k_opt = report.k_opt;
        rec.k_pos = report.k_pos;
        if (!report.K_trace.empty()) {
            rec.K_init = report.K_trace.front().second;
            rec.K_final = report.K_trace.back().second;
        }
        rec.iterations = report.iterations;
    } catch (const Error& e) {
        rec.error = std::string(to_string(e.code()));
    }
    rec.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

inline std::size_t worker_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("REACHMAX_THREADS")) {
        try {
            const auto v = std::stoul(env);
            if (v > 0) n = std::min<std::size_t>(n, v);
        } catch (const std::exception&) {
        }
    }
    return n;
}

inline std::optional<double> peak_rss_mib() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
    return static_cast<double>(usage.ru_maxrss) / 1024.0; // ru_maxrss is in KiB on Linux
}

inline BenchStats aggregate(const std::vector<InstanceRecord>& records) {
    BenchStats s;
    std::size_t n_pos = 0, n_k = 0;
    for (const auto& r : records) {
        s.avg_time_s += r.time_s;
        if (!r.status) { ++s.errors; continue; }
        switch (*r.status) {
        case SolveStatus::CorollaryOne: ++s.corollary; break;
        case SolveStatus::KDiag: ++s.kdiag; break;
        case SolveStatus::Failed: ++s.failed; break;
        }
        if (r.k_pos) {
            s.avg_kpos += static_cast<double>(*r.k_pos);
            s.max_kpos = std::max(s.max_kpos, *r.k_pos);
            ++n_pos;
        }
        if (*r.status == SolveStatus::KDiag && r.K_final) {
            const auto gap = *r.K_final >= r.k_opt ? *r.K_final - r.k_opt : 0;
            s.avg_iter += static_cast<double>(*r.K_final);
            s.max_iter = std::max(s.max_iter, *r.K_final);
            s.avg_gap += static_cast<double>(gap);
            s.max_gap = std::max(s.max_gap, gap);
            ++n_k;
        }
    }
    if (!records.empty()) s.avg_time_s /= static_cast<double>(records.size());
    if (n_pos) s.avg_kpos /= static_cast<double>(n_pos);
    if (n_k) {
        s.avg_iter /= static_cast<double>(n_k);
        s.avg_gap /= static_cast<double>(n_k);
    }
    return s;
}

/// Solves every instance on a worker pool; records come back in index order.
inline BenchResult run_bench(const BenchSpec& spec, std::size_t workers = worker_count()) {
    validate(spec);
    std::vector<InstanceRecord> records(spec.instance_count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < spec.instance_count; i = next++) records[i] = solve_record(spec, i);
    };
    workers = std::clamp<std::size_t>(workers, 1, spec.instance_count);
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    pool.clear();

    BenchResult result{spec, aggregate(records), std::move(records)};
    result.stats.peak_rss_mib = peak_rss_mib();
    return result;
}

inline std::size_t vertex_count(const BenchSpec& spec) {
    return spec.set.box ? (std::size_t{1} << spec.dim) : spec.set.vertex_count;
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

struct CsvOptions {
    bool header = true;
    bool timing = true; // false leaves time and memory cells empty, for byte-stable output
};

inline void write_aggregate_csv(std::ostream& os, const BenchResult& r, const CsvOptions& opt = {}) {
    if (opt.header) {
        os << "obj_type,system,dim,ver_nb,status_c,status_k,status_f,errors,avg_time_s,peak_rss_mib,"
              "avg_kpos,max_kpos,avg_it_nb,max_it_nb,avg_it_opt,max_it_opt\n";
    }
    const auto& s = r.stats;
    os << to_string(r.spec.objective) << ',' << (r.spec.system == SystemKind::Linear ? "linear" : "affine") << ','
       << r.spec.dim << ',' << vertex_count(r.spec) << ',' << s.corollary << ',' << s.kdiag << ',' << s.failed
       << ',' << s.errors << ',';
    if (opt.timing) os << format_double(s.avg_time_s);
    os << ',';
    if (opt.timing && s.peak_rss_mib) os << format_double(*s.peak_rss_mib);
    os << ',' << format_double(s.avg_kpos) << ',' << s.max_kpos << ',' << format_double(s.avg_iter) << ','
       << s.max_iter << ',' << format_double(s.avg_gap) << ',' << s.max_gap << '\n';
}

inline void write_instances_csv(std::ostream& os, const BenchResult& r, const CsvOptions& opt = {}) {
    if (opt.header) os << "index,status,nu_opt,k_opt,k_pos,K_init,K_final,iterations,time_s\n";
    auto cell = [&](const std::optional<std::size_t>& v) {
        if (v) os << *v;
    };
    for (const auto& rec : r.records) {
        os << rec.index << ',' << (rec.status ? std::string(to_string(*rec.status)) : "Error:" + rec.error) << ',';
        if (rec.status && *rec.status != SolveStatus::Failed) os << format_double(rec.nu_opt);
        os << ',';
        if (rec.status && *rec.status != SolveStatus::Failed) os << rec.k_opt;
        os << ',';
        cell(rec.k_pos);
        os << ',';
        cell(rec.K_init);
        os << ',';
        cell(rec.K_final);
        os << ',' << rec.iterations << ',';
        if (opt.timing) os << format_double(rec.time_s);
        os << '\n';
    }
}

} // namespace bench
} // namespace reachmax
