#pragma once

// Two-level Cretan matrices from SBIBDs: exact characteristic-equation
// roots, matrix construction, weight/determinant, exact orthogonality
// verification and design/complement classification.
//
// Throughout, the level x is fixed to 1 and the second level y solves
//     lambda x^2 + 2(k - lambda) x y + (v - 2k + lambda) y^2 = 0
// exactly in Q(sqrt(k - lambda)).

#include "cretan/designs.hpp"
#include "cretan/qfield.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cretan {

class cretan_error : public std::runtime_error {
public:
    explicit cretan_error(const std::string& msg) : std::runtime_error(msg) {}
};

class degenerate_params_error : public cretan_error {
public:
    explicit degenerate_params_error(const DesignParams& p)
        : cretan_error("characteristic equation collapses for " + p.str() + " (k = lambda)") {}
};

class inadmissible_root_error : public cretan_error {
public:
    explicit inadmissible_root_error(const std::string& y)
        : cretan_error("root " + y + " has modulus > 1") {}
};

class not_verified_design_error : public cretan_error {
public:
    explicit not_verified_design_error(const std::string& msg) : cretan_error(msg) {}
};

class no_design_available_error : public cretan_error {
public:
    explicit no_design_available_error(const DesignParams& p)
        : cretan_error("no construction available for " + p.str()) {}
};

enum class Source { original, complement };
enum class Branch { plus, minus };

inline const char* to_string(Source s) { return s == Source::original ? "original" : "complement"; }
inline const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

/// One exact root y of the characteristic equation, with x fixed to 1.
struct CharacteristicSolution {
    QuadExt y;
    DesignParams params;      // the parameters y solves (complement's when source says so)
    Source source = Source::original;
    Branch branch = Branch::plus;
    bool admissible = false;  // |y| <= 1, decided exactly
};

/// lambda + 2(k-lambda) y + (v-2k+lambda) y^2, exactly; zero iff y is a root.
inline QuadExt characteristic_residual(const DesignParams& p, const QuadExt& y) {
    return QuadExt(Rational(p.lambda)) + QuadExt(Rational(2 * (p.k - p.lambda))) * y +
           QuadExt(Rational(p.v - 2 * p.k + p.lambda)) * y * y;
}

/// Exact roots of the characteristic equation for the given parameters.
/// Quadratic case yields the minus branch (-(k-l) - sqrt(k-l))/(v-2k+l)
/// first, then the plus branch; the degenerate leading coefficient
/// v-2k+lambda = 0 falls back to the single linear root -lambda/(2(k-lambda)).
inline std::vector<CharacteristicSolution> solve_characteristic(const DesignParams& p,
                                                                Source source = Source::original) {
    const long long lead = p.v - 2 * p.k + p.lambda;
    const long long half = p.k - p.lambda;
    if (half == 0) throw degenerate_params_error(p);

    auto make = [&](QuadExt y, Branch branch) {
        const bool admissible = compare(y.abs(), QuadExt(1)) <= 0;
        return CharacteristicSolution{std::move(y), p, source, branch, admissible};
    };

    if (lead == 0) {
        QuadExt y{Rational(-p.lambda, 2 * half)};
        return {make(std::move(y), Branch::plus)};
    }

    // Discriminant/4 of the quadratic; equals k-lambda whenever the design
    // identity lambda(v-1) = k(k-1) holds, so roots live in Q(sqrt(k-lambda)).
    const long long disc = half * half - p.lambda * lead;
    if (disc < 0)
        throw params_invalid_error("characteristic equation of " + p.str() + " has no real roots");
    QuadExt minus{Rational(-half, lead), Rational(-1, lead), Int(disc)};
    QuadExt plus{Rational(-half, lead), Rational(1, lead), Int(disc)};
    return {make(std::move(minus), Branch::minus), make(std::move(plus), Branch::plus)};
}

/// Construction record carried by every built matrix.
struct Provenance {
    DesignParams params;        // parameters of the design actually used
    Source source = Source::original;
    Branch branch = Branch::plus;
    std::string family;         // optional: "qr", "twin-prime", "menon", ...
};

/// Entry value of a Cretan matrix with its whole-matrix occurrence count.
struct LevelEntry {
    QuadExt value;
    long long occurrences = 0;
};

/// v x v matrix over Q(sqrt(d)) stored as a level table plus an index grid,
/// so exact values serialize without rounding.
class CretanMatrix {
public:
    static CretanMatrix from_grid(long long order, std::vector<QuadExt> level_values,
                                  std::vector<std::uint8_t> grid, QuadExt omega,
                                  std::optional<Provenance> prov = std::nullopt,
                                  bool enforce_feasibility = true) {
        if (static_cast<long long>(grid.size()) != order * order)
            throw cretan_error("grid size does not match order");
        CretanMatrix cm;
        cm.order_ = order;
        cm.grid_ = std::move(grid);
        cm.levels_.reserve(level_values.size());
        for (auto& v : level_values) cm.levels_.push_back({std::move(v), 0});
        for (std::uint8_t idx : cm.grid_) {
            if (idx >= cm.levels_.size()) throw cretan_error("level index out of range");
            ++cm.levels_[idx].occurrences;
        }
        cm.omega_ = std::move(omega);
        cm.prov_ = std::move(prov);
        cm.det_float_ = std::pow(cm.omega_.to_double(), static_cast<double>(order) / 2.0);
        if (enforce_feasibility) cm.check_invariants();
        return cm;
    }

    long long order() const { return order_; }
    const std::vector<LevelEntry>& levels() const { return levels_; }
    std::uint8_t level_index(long long i, long long j) const { return grid_[idx(i, j)]; }
    const QuadExt& entry(long long i, long long j) const { return levels_[grid_[idx(i, j)]].value; }
    const QuadExt& omega() const { return omega_; }
    double det_float() const { return det_float_; }
    const std::optional<Provenance>& provenance() const { return prov_; }

    void set_family(std::string family) {
        if (prov_) prov_->family = std::move(family);
    }

    /// Copy with one entry replaced (the replacement gets its own level slot
    /// if the value is new). Orthogonality is deliberately not re-checked.
    CretanMatrix with_entry(long long i, long long j, const QuadExt& value) const {
        std::vector<QuadExt> vals;
        vals.reserve(levels_.size() + 1);
        for (const auto& l : levels_) vals.push_back(l.value);
        std::uint8_t target = 0;
        bool found = false;
        for (size_t t = 0; t < vals.size(); ++t)
            if (vals[t] == value) { target = static_cast<std::uint8_t>(t); found = true; break; }
        if (!found) {
            vals.push_back(value);
            target = static_cast<std::uint8_t>(vals.size() - 1);
        }
        std::vector<std::uint8_t> grid = grid_;
        grid[idx(i, j)] = target;
        return from_grid(order_, std::move(vals), std::move(grid), omega_, prov_);
    }

private:
    void check_invariants() const {
        for (const auto& l : levels_)
            if (compare(l.value.abs(), QuadExt(1)) > 0)
                throw cretan_error("level " + l.value.str() + " has modulus > 1");
        const QuadExt one(1);
        for (long long i = 0; i < order_; ++i) {
            bool row_has_one = false, col_has_one = false;
            for (long long j = 0; j < order_; ++j) {
                row_has_one = row_has_one || entry(i, j) == one;
                col_has_one = col_has_one || entry(j, i) == one;
            }
            if (!row_has_one || !col_has_one)
                throw cretan_error("row/column " + std::to_string(i) + " has no entry equal to 1");
        }
    }

    size_t idx(long long i, long long j) const { return static_cast<size_t>(i) * order_ + j; }

    long long order_ = 0;
    std::vector<LevelEntry> levels_;
    std::vector<std::uint8_t> grid_;
    QuadExt omega_;
    double det_float_ = 0.0;
    std::optional<Provenance> prov_;
};

/// Replace the ones of a verified SBIBD with 1 and the zeros with the root y;
/// the weight is k + (v-k) y^2, exactly.
inline CretanMatrix build_cretan(const IncidenceMatrix& B, const CharacteristicSolution& sol) {
    if (B.params() != sol.params)
        throw not_verified_design_error("design parameters " + B.params().str() +
                                        " do not match the solved parameters " + sol.params.str());
    auto rep = verify_sbibd(B);
    if (!rep.pass())
        throw not_verified_design_error("design fails verification: " + rep.detail);
    if (!sol.admissible) throw inadmissible_root_error(sol.y.str());

    const long long v = B.order(), k = B.params().k;
    QuadExt omega = QuadExt(Rational(k)) + QuadExt(Rational(v - k)) * sol.y * sol.y;

    std::vector<std::uint8_t> grid(static_cast<size_t>(v) * v);
    for (long long i = 0; i < v; ++i)
        for (long long j = 0; j < v; ++j)
            grid[static_cast<size_t>(i) * v + j] = B.at(i, j) ? 0 : 1;

    Provenance prov{B.params(), sol.source, sol.branch, {}};
    return CretanMatrix::from_grid(v, {QuadExt(1), sol.y}, std::move(grid), std::move(omega), prov);
}

/// Weight and determinant: det_float is omega^(v/2) in doubles; for even v
/// the exact power is also available.
struct DeterminantResult {
    QuadExt omega;
    double det_float = 0.0;
    std::optional<QuadExt> exact_even_power;  // omega^(v/2) when v is even
};

inline DeterminantResult determinant(const CretanMatrix& cm) {
    DeterminantResult r{cm.omega(), cm.det_float(), std::nullopt};
    if (cm.order() % 2 == 0) {
        QuadExt acc(1);
        for (long long t = 0; t < cm.order() / 2; ++t) acc *= cm.omega();
        r.exact_even_power = std::move(acc);
    }
    return r;
}

/// One wrong entry of S S^T: position plus the exact value found there.
struct ExactDefect {
    long long i = 0;
    long long j = 0;
    QuadExt value;
};

/// Outcome of the exact orthogonality check S S^T = omega I; no tolerances.
struct ExactReport {
    std::vector<ExactDefect> offdiag_defects;  // entries that should be 0
    std::vector<ExactDefect> diag_defects;     // entries that should be omega

    bool pass() const { return offdiag_defects.empty() && diag_defects.empty(); }
};

/// Compute S S^T entrywise in Q(sqrt(d)) and report every deviation from
/// omega I. Pass is exact equality, never a tolerance.
inline ExactReport verify_exact(const CretanMatrix& cm) {
    ExactReport rep;
    const long long v = cm.order();
    for (long long i = 0; i < v; ++i) {
        for (long long j = 0; j < v; ++j) {
            QuadExt acc(0);
            for (long long t = 0; t < v; ++t) acc += cm.entry(i, t) * cm.entry(j, t);
            if (i == j) {
                if (!(acc == cm.omega())) rep.diag_defects.push_back({i, j, std::move(acc)});
            } else if (!acc.is_zero()) {
                rep.offdiag_defects.push_back({i, j, std::move(acc)});
            }
        }
    }
    return rep;
}

/// Which side of the design/complement pair produced the admissible matrices.
enum class SolutionClassification { none, both_original, both_complement, one_each };

inline const char* to_string(SolutionClassification c) {
    switch (c) {
        case SolutionClassification::both_original: return "both-original";
        case SolutionClassification::both_complement: return "both-complement";
        case SolutionClassification::one_each: return "one-each";
        default: return "none";
    }
}

/// A branch that produced no matrix, and why.
struct RejectedBranch {
    Source source = Source::original;
    Branch branch = Branch::plus;
    QuadExt y;
    std::string reason;
};

struct AllSolutions {
    std::vector<CretanMatrix> matrices;
    std::vector<RejectedBranch> rejected;
    SolutionClassification classification = SolutionClassification::none;
};

/// Evaluate both branches on B and on its complement; build every admissible
/// combination and classify where the solutions came from.
inline AllSolutions all_solutions(const DesignParams& params, const IncidenceMatrix& B) {
    if (B.params() != params)
        throw not_verified_design_error("matrix parameters " + B.params().str() +
                                        " do not match requested " + params.str());
    auto rep = verify_sbibd(B);
    if (!rep.pass()) throw not_verified_design_error("design fails verification: " + rep.detail);

    AllSolutions out;
    bool any_original = false, any_complement = false;
    const IncidenceMatrix comp = complement(B);

    for (Source source : {Source::original, Source::complement}) {
        const IncidenceMatrix& design = source == Source::original ? B : comp;
        for (auto& sol : solve_characteristic(design.params(), source)) {
            if (!sol.admissible) {
                out.rejected.push_back({source, sol.branch, sol.y, "|y| = " + sol.y.abs().str() + " > 1"});
                continue;
            }
            out.matrices.push_back(build_cretan(design, sol));
            (source == Source::original ? any_original : any_complement) = true;
        }
    }

    if (any_original && any_complement) out.classification = SolutionClassification::one_each;
    else if (any_original) out.classification = SolutionClassification::both_original;
    else if (any_complement) out.classification = SolutionClassification::both_complement;
    return out;
}

/// SBIBD(4t-1, 2t-1, t-1) built from the most specific available family;
/// also returns the family name used.
inline std::pair<IncidenceMatrix, std::string> hadamard_family_design(long long t) {
    const long long v = 4 * t - 1;
    const DesignParams params{v, 2 * t - 1, t - 1};
    if (detail::is_prime(v)) return {develop(qr_family(v)), "qr"};
    for (long long p = 3; p * (p + 2) <= v; ++p) {
        if (p * (p + 2) == v && detail::is_prime(p) && detail::is_prime(p + 2))
            return {develop(twin_prime_family(p)), "twin-prime"};
    }
    if (v <= 40) {
        if (auto ds = find_difference_set(params)) return {develop(*ds), "brute-force"};
    }
    throw no_design_available_error(params);
}

/// All two-level matrices of order 4t-1 from the Hadamard-related family,
/// after checking the closed-form roots (-t +- sqrt(t))/t exactly.
inline AllSolutions hadamard_family_cretan(long long t) {
    if (t < 1) throw no_design_available_error({4 * t - 1, 2 * t - 1, t - 1});
    auto [design, family] = hadamard_family_design(t);

    // Closed forms for these parameters: y = (-t +- sqrt(t))/t = -1 +- sqrt(t)/t.
    const auto roots = solve_characteristic(design.params());
    const QuadExt expected_minus{Rational(-1), Rational(-1, t), Int(t)};
    const QuadExt expected_plus{Rational(-1), Rational(1, t), Int(t)};
    if (roots.size() != 2 || !(roots[0].y == expected_minus) || !(roots[1].y == expected_plus))
        throw cretan_error("closed-form roots disagree with the characteristic solver for t = " +
                           std::to_string(t));

    AllSolutions out = all_solutions(design.params(), design);
    for (auto& m : out.matrices) m.set_family(family);
    return out;
}

} // namespace cretan
