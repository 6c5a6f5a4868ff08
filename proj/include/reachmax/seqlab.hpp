#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reachmax/error.hpp"

// Exact ranks of a real sequence tending to zero, represented by a finite
// prefix extended with zeros. Every quantity below is computed from its
// definition under that zero extension:
//
//   S(n, m)  = sup of u_k for n <= k <= m
//   Pos>=    = { k : u_k >= 0 }            Pos> = { k : u_k > 0 }
//   Delta>=  = { k : S(0,k) >= S(k+1,inf) } Delta> likewise with '>'
//   k>=, k>, K>=, K> = least elements of those sets (+inf if empty)
//
// A least element that exists only in the zero tail is reported as
// BeyondPrefix (its zero-extended value is the prefix length) so that it is
// never mistaken for a rank found among the stored terms.

namespace reachmax {
namespace seqlab {

class FiniteC0Sequence {
public:
    explicit FiniteC0Sequence(std::vector<double> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) throw Error(Errc::InvalidInput, "sequence prefix must hold at least one term");
        for (double t : terms_) {
            if (!std::isfinite(t)) throw Error(Errc::InvalidInput, "sequence terms must be finite");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const noexcept { return k < terms_.size() ? terms_[k] : 0.0; }
    [[nodiscard]] const std::vector<double>& terms() const noexcept { return terms_; }

private:
    std::vector<double> terms_;
};

struct Rank {
    enum class Kind { Finite, BeyondPrefix, Infinite };

    Kind kind = Kind::Infinite;
    std::size_t value = 0; // the zero-extended rank for Finite and BeyondPrefix

    static constexpr Rank finite(std::size_t k) noexcept { return {Kind::Finite, k}; }
    static constexpr Rank beyond(std::size_t n) noexcept { return {Kind::BeyondPrefix, n}; }
    static constexpr Rank infinite() noexcept { return {Kind::Infinite, 0}; }

    [[nodiscard]] constexpr bool is_finite() const noexcept { return kind == Kind::Finite; }
    /// Membership set nonempty under the zero extension.
    [[nodiscard]] constexpr bool exists() const noexcept { return kind != Kind::Infinite; }

    friend constexpr bool operator==(const Rank&, const Rank&) = default;

    friend constexpr std::strong_ordering operator<=>(const Rank& a, const Rank& b) noexcept {
        const bool ai = a.kind == Kind::Infinite, bi = b.kind == Kind::Infinite;
        if (ai || bi) return ai == bi ? std::strong_ordering::equal
                                      : (ai ? std::strong_ordering::greater : std::strong_ordering::less);
        return a.value <=> b.value;
    }
};

inline std::string to_string(const Rank& r) {
    switch (r.kind) {
    case Rank::Kind::Finite: return std::to_string(r.value);
    case Rank::Kind::BeyondPrefix: return "beyond-prefix";
    case Rank::Kind::Infinite: return "infinite";
    }
    return "?";
}

struct RankProfile {
    Rank k_geq;
    Rank k_gt;
    Rank K_geq;
    Rank K_gt;
    double sup_value = 0.0;
    std::vector<std::size_t> argmax_set;
};

/// S(n, m); pass std::nullopt for m = infinity.
inline double partial_sup(const FiniteC0Sequence& u, std::size_t n, std::optional<std::size_t> m) {
    if (m && *m < n) throw Error(Errc::InvalidInput, "partial_sup requires n <= m");
    const auto& t = u.terms();
    const std::size_t last_stored = t.size() - 1;
    double best = -std::numeric_limits<double>::infinity();
    const std::size_t stop = m ? std::min(*m, last_stored) : last_stored;
    for (std::size_t k = n; k <= stop && k < t.size(); ++k) best = std::max(best, t[k]);
    const bool reaches_tail = !m || *m > last_stored;
    if (reaches_tail) best = std::max(best, 0.0);
    return best;
}

inline RankProfile rank_profile(const FiniteC0Sequence& u) {
    const auto& t = u.terms();
    const std::size_t n = t.size();

    // prefix[k] = S(0,k); tail[k] = S(k,inf) including the zero tail.
    std::vector<double> prefix(n), tail(n + 1);
    prefix[0] = t[0];
    for (std::size_t k = 1; k < n; ++k) prefix[k] = std::max(prefix[k - 1], t[k]);
    tail[n] = 0.0;
    for (std::size_t k = n; k-- > 0;) tail[k] = std::max(tail[k + 1], t[k]);

    RankProfile p;
    p.sup_value = tail[0];

    p.k_geq = Rank::beyond(n); // every tail index is a zero
    for (std::size_t k = 0; k < n; ++k) {
        if (t[k] >= 0.0) { p.k_geq = Rank::finite(k); break; }
    }
    p.k_gt = Rank::infinite();
    for (std::size_t k = 0; k < n; ++k) {
        if (t[k] > 0.0) { p.k_gt = Rank::finite(k); break; }
    }
    // k = n always satisfies S(0,n) = max(prefix, 0) >= 0 = S(n+1, inf).
    p.K_geq = Rank::beyond(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (prefix[k] >= tail[k + 1]) { p.K_geq = Rank::finite(k); break; }
    }
    // For k >= n both sides reduce to max(prefix, 0) > 0, already decided at k = n-1.
    p.K_gt = Rank::infinite();
    for (std::size_t k = 0; k < n; ++k) {
        if (prefix[k] > tail[k + 1]) { p.K_gt = Rank::finite(k); break; }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (t[k] == p.sup_value) p.argmax_set.push_back(k);
    }
    return p;
}

} // namespace seqlab
} // namespace reachmax
