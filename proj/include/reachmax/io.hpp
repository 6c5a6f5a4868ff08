#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reachmax/error.hpp"
#include "reachmax/seqlab.hpp"
#include "reachmax/solver.hpp"

// JSON forms of instances, solve reports and rank profiles.
//
// Instance document:
//   { "A": [[...],...], "b": [...]?, "Q": [[...],...], "q": [...]?,
//     "initial_set": {"type":"box","lower":[...],"upper":[...]}
//                  | {"type":"vertices","points":[[...],...]},
//     "N": 100? }

namespace reachmax {
namespace io {

using nlohmann::json;

namespace detail {

inline double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw Error(Errc::InvalidInput, where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw Error(Errc::InvalidInput, where + ": number is not finite");
    return v;
}

inline Vector vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw Error(Errc::InvalidInput, where + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
    }
    return v;
}

inline Matrix matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw Error(Errc::InvalidInput, where + ": expected a non-empty array of rows");
    const auto rows = j.size();
    std::size_t cols = 0;
    Matrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = vector(j[r], where + "[" + std::to_string(r) + "]");
        if (r == 0) {
            cols = static_cast<std::size_t>(row.size());
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (static_cast<std::size_t>(row.size()) != cols) {
            throw Error(Errc::InvalidInput, where + ": rows have different lengths");
        }
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

inline json to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline json to_json(const Matrix& m) {
    json a = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
    return a;
}

} // namespace detail

inline ProblemInstance instance_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(Errc::InvalidInput, "instance must be a JSON object");
    for (const char* key : {"A", "Q", "initial_set"}) {
        if (!doc.contains(key)) throw Error(Errc::InvalidInput, std::string("missing key \"") + key + "\"");
    }
    ProblemInstance inst;
    inst.A = detail::matrix(doc.at("A"), "A");
    inst.Q = detail::matrix(doc.at("Q"), "Q");
    const auto d = inst.A.rows();
    inst.b = doc.contains("b") ? detail::vector(doc.at("b"), "b") : Vector::Zero(d);
    inst.q = doc.contains("q") ? detail::vector(doc.at("q"), "q") : Vector::Zero(d);

    const auto& set = doc.at("initial_set");
    if (!set.is_object() || !set.contains("type") || !set.at("type").is_string()) {
        throw Error(Errc::InvalidInput, "initial_set needs a string \"type\"");
    }
    const auto type = set.at("type").get<std::string>();
    if (type == "box") {
        if (!set.contains("lower") || !set.contains("upper")) {
            throw Error(Errc::InvalidInput, "box initial_set needs \"lower\" and \"upper\"");
        }
        inst.Xin = geometry::Polytope::box(detail::vector(set.at("lower"), "initial_set.lower"),
                                           detail::vector(set.at("upper"), "initial_set.upper"));
    } else if (type == "vertices") {
        if (!set.contains("points")) throw Error(Errc::InvalidInput, "vertices initial_set needs \"points\"");
        inst.Xin = geometry::Polytope::from_vertices(
            Matrix(detail::matrix(set.at("points"), "initial_set.points").transpose()));
    } else {
        throw Error(Errc::InvalidInput, "unknown initial_set type \"" + type + "\"");
    }

    if (doc.contains("N")) {
        const auto& n = doc.at("N");
        if (!n.is_number_integer() || n.get<long long>() <= 0) {
            throw Error(Errc::InvalidInput, "N must be a positive integer");
        }
        inst.N = n.get<std::size_t>();
    }
    validate(inst);
    return inst;
}

inline json instance_to_json(const ProblemInstance& inst) {
    json doc;
    doc["A"] = detail::to_json(inst.A);
    doc["b"] = detail::to_json(inst.b);
    doc["Q"] = detail::to_json(inst.Q);
    doc["q"] = detail::to_json(inst.q);
    if (inst.Xin.is_box()) {
        doc["initial_set"] = {{"type", "box"},
                              {"lower", detail::to_json(inst.Xin.as_box().lower)},
                              {"upper", detail::to_json(inst.Xin.as_box().upper)}};
    } else {
        doc["initial_set"] = {{"type", "vertices"},
                              {"points", detail::to_json(Matrix(inst.Xin.as_vertices().points.transpose()))}};
    }
    doc["N"] = inst.N;
    return doc;
}

inline json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::InvalidInput, std::string("malformed JSON: ") + e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidInput, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

inline json report_to_json(const SolveReport& r) {
    json j;
    j["status"] = std::string(to_string(r.status));
    j["N"] = r.N;
    if (r.status != SolveStatus::Failed) {
        j["nu_opt"] = r.nu_opt;
        j["x_opt"] = detail::to_json(r.x_opt);
        j["k_opt"] = r.k_opt;
    }
    j["k_pos"] = r.k_pos ? json(*r.k_pos) : json(nullptr);
    json trace = json::array();
    for (const auto& [k, K] : r.K_trace) trace.push_back({k, K});
    j["K_trace"] = trace;
    j["iterations"] = r.iterations;
    j["nu_values"] = r.nu_values;
    if (r.spectral) {
        j["spectral"] = {{"rho", r.spectral->rho},
                         {"lmax_abs", r.spectral->lmax_abs},
                         {"mu_gram", r.spectral->mu_gram},
                         {"v_diag", r.spectral->v_diag},
                         {"envelope", r.spectral->envelope}};
    }
    j["degenerate"] = r.degenerate;
    return j;
}

inline SolveReport report_from_json(const json& j) {
    SolveReport r;
    const auto status = j.at("status").get<std::string>();
    if (status == "Failed") r.status = SolveStatus::Failed;
    else if (status == "CorollaryOne") r.status = SolveStatus::CorollaryOne;
    else if (status == "KDiag") r.status = SolveStatus::KDiag;
    else throw Error(Errc::InvalidInput, "unknown status " + status);
    r.N = j.at("N").get<std::size_t>();
    if (r.status != SolveStatus::Failed) {
        r.nu_opt = j.at("nu_opt").get<double>();
        r.x_opt = detail::vector(j.at("x_opt"), "x_opt");
        r.k_opt = j.at("k_opt").get<std::size_t>();
    }
    if (!j.at("k_pos").is_null()) r.k_pos = j.at("k_pos").get<std::size_t>();
    for (const auto& e : j.at("K_trace")) r.K_trace.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    r.iterations = j.at("iterations").get<std::size_t>();
    r.nu_values = j.at("nu_values").get<std::vector<double>>();
    if (j.contains("spectral")) {
        const auto& s = j.at("spectral");
        r.spectral = SpectralSummary{s.at("rho").get<double>(), s.at("lmax_abs").get<double>(),
                                     s.at("mu_gram").get<double>(), s.at("v_diag").get<double>(),
                                     s.at("envelope").get<double>()};
    }
    r.degenerate = j.at("degenerate").get<bool>();
    return r;
}

inline json rank_to_json(const seqlab::Rank& r) {
    if (r.is_finite()) return r.value;
    return seqlab::to_string(r);
}

inline json profile_to_json(const seqlab::RankProfile& p) {
    return {{"k_geq", rank_to_json(p.k_geq)},
            {"k_gt", rank_to_json(p.k_gt)},
            {"K_geq", rank_to_json(p.K_geq)},
            {"K_gt", rank_to_json(p.K_gt)},
            {"sup_value", p.sup_value},
            {"argmax_set", p.argmax_set}};
}

inline seqlab::FiniteC0Sequence sequence_from_json(const json& j) {
    if (!j.is_array()) throw Error(Errc::InvalidInput, "sequence must be a JSON array of numbers");
    if (j.empty()) throw Error(Errc::InvalidInput, "sequence is empty");
    std::vector<double> terms;
    terms.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) terms.push_back(detail::number(j[i], "sequence[" + std::to_string(i) + "]"));
    return seqlab::FiniteC0Sequence(std::move(terms));
}

} // namespace io
} // namespace reachmax
