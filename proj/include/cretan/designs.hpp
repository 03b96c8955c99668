#pragma once

// SBIBD incidence matrices: difference-set families, circulant development,
// complementation, verification, brute-force search and file ingestion.

#include "cretan/qfield.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cretan {

class design_error : public std::runtime_error {
public:
    explicit design_error(const std::string& msg) : std::runtime_error(msg) {}
};

class params_invalid_error : public design_error {
public:
    explicit params_invalid_error(const std::string& msg) : design_error(msg) {}
};

class invalid_difference_set_error : public design_error {
public:
    explicit invalid_difference_set_error(const std::string& msg) : design_error(msg) {}
};

class not_prime_error : public design_error {
public:
    explicit not_prime_error(long long p) : design_error(std::to_string(p) + " is not prime") {}
};

class wrong_residue_class_error : public design_error {
public:
    explicit wrong_residue_class_error(long long p)
        : design_error(std::to_string(p) + " is not congruent to 3 mod 4") {}
};

class not_twin_primes_error : public design_error {
public:
    explicit not_twin_primes_error(long long p)
        : design_error("(" + std::to_string(p) + ", " + std::to_string(p + 2) + ") is not a twin prime pair") {}
};

class unsupported_order_error : public design_error {
public:
    explicit unsupported_order_error(const std::string& msg) : design_error(msg) {}
};

class budget_exceeded_error : public design_error {
public:
    explicit budget_exceeded_error(std::uint64_t budget)
        : design_error("search budget of " + std::to_string(budget) + " nodes exceeded") {}
};

class file_parse_error : public design_error {
public:
    file_parse_error(int line, const std::string& msg)
        : design_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// (v, k, lambda) with the symmetric-design identity lambda(v-1) = k(k-1).
struct DesignParams {
    long long v = 0;
    long long k = 0;
    long long lambda = 0;

    bool valid() const {
        return v > k && k >= 1 && lambda >= 0 && lambda * (v - 1) == k * (k - 1);
    }

    DesignParams complement() const { return {v, v - k, v - 2 * k + lambda}; }

    friend bool operator==(const DesignParams&, const DesignParams&) = default;

    std::string str() const {
        return "(" + std::to_string(v) + "," + std::to_string(k) + "," + std::to_string(lambda) + ")";
    }
};

/// k residues modulo v whose pairwise differences hit every nonzero residue
/// exactly lambda times.
struct DifferenceSet {
    DesignParams params;
    std::vector<long long> residues;  // sorted, distinct, in [0, v)

    /// Throws invalid_difference_set_error / params_invalid_error on violation.
    void validate() const {
        if (!params.valid())
            throw params_invalid_error("invalid design parameters " + params.str());
        if (static_cast<long long>(residues.size()) != params.k)
            throw invalid_difference_set_error("expected " + std::to_string(params.k) +
                                               " residues, got " + std::to_string(residues.size()));
        std::vector<long long> counts(params.v, 0);
        for (size_t i = 0; i < residues.size(); ++i) {
            long long r = residues[i];
            if (r < 0 || r >= params.v)
                throw invalid_difference_set_error("residue " + std::to_string(r) + " outside [0," +
                                                   std::to_string(params.v) + ")");
            if (i > 0 && residues[i - 1] >= r)
                throw invalid_difference_set_error("residues must be sorted and distinct");
            for (size_t j = 0; j < residues.size(); ++j) {
                if (i == j) continue;
                ++counts[((residues[i] - residues[j]) % params.v + params.v) % params.v];
            }
        }
        for (long long d = 1; d < params.v; ++d) {
            if (counts[d] != params.lambda)
                throw invalid_difference_set_error(
                    "difference " + std::to_string(d) + " occurs " + std::to_string(counts[d]) +
                    " times, expected " + std::to_string(params.lambda) + " for " + params.str());
        }
    }

    DifferenceSet translated(long long c) const {
        DifferenceSet out{params, residues};
        for (auto& r : out.residues) r = ((r + c) % params.v + params.v) % params.v;
        std::sort(out.residues.begin(), out.residues.end());
        return out;
    }
};

enum class StructureTag { circulant, block, general };

inline const char* to_string(StructureTag t) {
    switch (t) {
        case StructureTag::circulant: return "circulant";
        case StructureTag::block: return "block";
        default: return "general";
    }
}

inline StructureTag structure_tag_from_string(const std::string& s) {
    if (s == "circulant") return StructureTag::circulant;
    if (s == "block") return StructureTag::block;
    return StructureTag::general;
}

/// v x v binary incidence matrix together with its claimed parameters.
class IncidenceMatrix {
public:
    IncidenceMatrix(DesignParams params, StructureTag tag)
        : params_(params), tag_(tag), bits_(static_cast<size_t>(params.v) * params.v, 0) {}

    static IncidenceMatrix from_rows(DesignParams params, const std::vector<std::vector<int>>& rows,
                                     StructureTag tag = StructureTag::general) {
        IncidenceMatrix m(params, tag);
        if (static_cast<long long>(rows.size()) != params.v)
            throw design_error("row count does not match order");
        for (long long i = 0; i < params.v; ++i) {
            if (static_cast<long long>(rows[i].size()) != params.v)
                throw design_error("column count does not match order");
            for (long long j = 0; j < params.v; ++j) m.set(i, j, rows[i][j] != 0);
        }
        return m;
    }

    const DesignParams& params() const { return params_; }
    long long order() const { return params_.v; }
    StructureTag structure() const { return tag_; }

    bool at(long long i, long long j) const { return bits_[idx(i, j)] != 0; }
    void set(long long i, long long j, bool value) { bits_[idx(i, j)] = value ? 1 : 0; }

    long long row_sum(long long i) const {
        long long s = 0;
        for (long long j = 0; j < params_.v; ++j) s += at(i, j);
        return s;
    }
    long long col_sum(long long j) const {
        long long s = 0;
        for (long long i = 0; i < params_.v; ++i) s += at(i, j);
        return s;
    }

private:
    size_t idx(long long i, long long j) const { return static_cast<size_t>(i) * params_.v + j; }

    DesignParams params_;
    StructureTag tag_;
    std::vector<std::uint8_t> bits_;
};

/// Per-condition outcome of the SBIBD axioms for an incidence matrix.
struct SbibdReport {
    bool params_ok = false;      // lambda(v-1) = k(k-1), v > k >= 1, lambda >= 0
    bool row_sums_ok = false;    // every row sums to k
    bool col_sums_ok = false;    // every column sums to k
    bool row_inner_ok = false;   // distinct row inner products all lambda
    bool col_inner_ok = false;   // distinct column inner products all lambda
    std::string detail;          // first violation, empty when pass

    bool pass() const { return params_ok && row_sums_ok && col_sums_ok && row_inner_ok && col_inner_ok; }
};

/// Check all SBIBD conditions; failures are report content, never thrown.
inline SbibdReport verify_sbibd(const IncidenceMatrix& B) {
    SbibdReport rep;
    const auto& p = B.params();
    const long long v = p.v;
    rep.params_ok = p.valid();
    if (!rep.params_ok) rep.detail = "parameter identity fails for " + p.str();

    rep.row_sums_ok = rep.col_sums_ok = true;
    for (long long i = 0; i < v; ++i) {
        if (B.row_sum(i) != p.k) {
            rep.row_sums_ok = false;
            if (rep.detail.empty())
                rep.detail = "row " + std::to_string(i) + " sums to " + std::to_string(B.row_sum(i));
        }
        if (B.col_sum(i) != p.k) {
            rep.col_sums_ok = false;
            if (rep.detail.empty())
                rep.detail = "column " + std::to_string(i) + " sums to " + std::to_string(B.col_sum(i));
        }
    }

    rep.row_inner_ok = rep.col_inner_ok = true;
    for (long long i = 0; i < v; ++i) {
        for (long long j = i + 1; j < v; ++j) {
            long long rr = 0, cc = 0;
            for (long long t = 0; t < v; ++t) {
                rr += B.at(i, t) && B.at(j, t);
                cc += B.at(t, i) && B.at(t, j);
            }
            if (rr != p.lambda) {
                rep.row_inner_ok = false;
                if (rep.detail.empty())
                    rep.detail = "rows (" + std::to_string(i) + "," + std::to_string(j) + ") inner product " +
                                 std::to_string(rr);
            }
            if (cc != p.lambda) {
                rep.col_inner_ok = false;
                if (rep.detail.empty())
                    rep.detail = "columns (" + std::to_string(i) + "," + std::to_string(j) + ") inner product " +
                                 std::to_string(cc);
            }
        }
    }
    return rep;
}

/// Cyclic development: cell(i,j) = 1 iff (j - i) mod v is a residue of ds.
inline IncidenceMatrix develop(const DifferenceSet& ds) {
    ds.validate();
    const long long v = ds.params.v;
    std::vector<std::uint8_t> member(v, 0);
    for (long long r : ds.residues) member[r] = 1;
    IncidenceMatrix m(ds.params, StructureTag::circulant);
    for (long long i = 0; i < v; ++i)
        for (long long j = 0; j < v; ++j)
            m.set(i, j, member[((j - i) % v + v) % v] != 0);
    return m;
}

/// Complementary design: bits flipped, parameters (v, v-k, v-2k+lambda).
inline IncidenceMatrix complement(const IncidenceMatrix& B) {
    IncidenceMatrix m(B.params().complement(), B.structure());
    const long long v = B.order();
    for (long long i = 0; i < v; ++i)
        for (long long j = 0; j < v; ++j) m.set(i, j, !B.at(i, j));
    return m;
}

namespace detail {

inline bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long f = 2; f * f <= n; ++f)
        if (n % f == 0) return false;
    return true;
}

inline long long mod_pow(long long base, long long exp, long long mod) {
    long long acc = 1 % mod;
    base %= mod;
    while (exp > 0) {
        if (exp & 1) acc = acc * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return acc;
}

/// Legendre symbol for prime p: 0 for x ≡ 0, else ±1.
inline int legendre(long long x, long long p) {
    x = (x % p + p) % p;
    if (x == 0) return 0;
    return mod_pow(x, (p - 1) / 2, p) == 1 ? 1 : -1;
}

} // namespace detail

/// Quadratic residues mod p as a (p, (p-1)/2, (p-3)/4) difference set; p ≡ 3 (mod 4).
inline DifferenceSet qr_family(long long p) {
    if (!detail::is_prime(p)) throw not_prime_error(p);
    if (p % 4 != 3) throw wrong_residue_class_error(p);
    std::set<long long> squares;
    for (long long x = 1; x < p; ++x) squares.insert(x * x % p);
    DifferenceSet ds{{p, (p - 1) / 2, (p - 3) / 4}, {squares.begin(), squares.end()}};
    ds.validate();
    return ds;
}

/// Twin-prime construction over Z_{p(p+2)}: pairs with equal quadratic
/// character plus the (x, 0) fiber; parameters (pq, (pq-1)/2, (pq-3)/4).
inline DifferenceSet twin_prime_family(long long p) {
    const long long q = p + 2;
    if (!detail::is_prime(p) || !detail::is_prime(q)) throw not_twin_primes_error(p);
    const long long n = p * q;
    std::vector<long long> members;
    for (long long z = 0; z < n; ++z) {
        const long long a = z % p, b = z % q;
        const int ca = detail::legendre(a, p), cb = detail::legendre(b, q);
        if (b == 0 || (ca != 0 && ca == cb)) members.push_back(z);
    }
    std::sort(members.begin(), members.end());
    DifferenceSet ds{{n, (n - 1) / 2, (n - 3) / 4}, std::move(members)};
    ds.validate();
    return ds;
}

/// Regular Hadamard matrix (entries ±1, constant row sum 2m) of order 4m^2.
/// Built-in seeds: m = 1 and its Kronecker square m = 2.
inline std::vector<std::vector<int>> regular_hadamard(int m) {
    static const std::vector<std::vector<int>> h4 = {
        {1, 1, 1, -1}, {1, 1, -1, 1}, {1, -1, 1, 1}, {-1, 1, 1, 1}};
    if (m == 1) return h4;
    if (m == 2) {
        std::vector<std::vector<int>> h(16, std::vector<int>(16));
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) h[i][j] = h4[i / 4][j / 4] * h4[i % 4][j % 4];
        return h;
    }
    throw unsupported_order_error("no built-in regular Hadamard matrix of order " + std::to_string(4 * m * m) +
                                  "; provide one from a catalog file");
}

/// Map a regular Hadamard matrix of order 4m^2 to the SBIBD(4m^2, 2m^2-m, m^2-m)
/// whose ones sit at the -1 entries.
inline IncidenceMatrix menon_from_hadamard(const std::vector<std::vector<int>>& h) {
    const long long n = static_cast<long long>(h.size());
    long long m = 0;
    while (4 * m * m < n) ++m;
    if (4 * m * m != n) throw unsupported_order_error("order " + std::to_string(n) + " is not 4m^2");
    DesignParams params{n, 2 * m * m - m, m * m - m};
    IncidenceMatrix B(params, StructureTag::block);
    for (long long i = 0; i < n; ++i) {
        if (static_cast<long long>(h[i].size()) != n)
            throw design_error("Hadamard matrix is not square");
        for (long long j = 0; j < n; ++j) {
            if (h[i][j] != 1 && h[i][j] != -1) throw design_error("Hadamard entries must be +-1");
            B.set(i, j, h[i][j] == -1);
        }
    }
    auto rep = verify_sbibd(B);
    if (!rep.pass())
        throw unsupported_order_error("matrix is not a regular Hadamard matrix: " + rep.detail);
    return B;
}

/// Menon design SBIBD(4m^2, 2m^2-m, m^2-m) from the catalog of regular
/// Hadamard matrices. m = 3 (order 36) needs an externally supplied matrix.
inline IncidenceMatrix menon_family(int m, const std::vector<std::vector<int>>* catalog_matrix = nullptr) {
    if (m < 1 || m > 3) throw unsupported_order_error("Menon family supports m in {1,2,3}");
    if (catalog_matrix != nullptr) {
        if (static_cast<long long>(catalog_matrix->size()) != 4LL * m * m)
            throw unsupported_order_error("catalog matrix order does not match 4m^2");
        return menon_from_hadamard(*catalog_matrix);
    }
    return menon_from_hadamard(regular_hadamard(m));
}

/// Backtracking search for the lexicographically least difference set with
/// the given parameters; fixes 0 as the first element and prunes on partial
/// difference counts. Returns nullopt when the space is exhausted.
inline std::optional<DifferenceSet> find_difference_set(DesignParams params,
                                                        std::uint64_t node_budget = 10'000'000) {
    if (!params.valid())
        throw params_invalid_error("invalid design parameters " + params.str());
    if (params.v > 40)
        throw params_invalid_error("brute-force search is capped at v <= 40, got v = " + std::to_string(params.v));

    const long long v = params.v, k = params.k, lambda = params.lambda;
    std::vector<long long> chosen{0};
    std::vector<long long> counts(v, 0);
    std::uint64_t nodes = 0;
    std::optional<DifferenceSet> found;

    auto add = [&](long long x) -> bool {
        bool ok = true;
        for (long long y : chosen) {
            long long d1 = ((x - y) % v + v) % v, d2 = (v - d1) % v;
            if (++counts[d1] > lambda) ok = false;
            if (++counts[d2] > lambda) ok = false;
        }
        chosen.push_back(x);
        return ok;
    };
    auto remove = [&](long long x) {
        chosen.pop_back();
        for (long long y : chosen) {
            long long d1 = ((x - y) % v + v) % v, d2 = (v - d1) % v;
            --counts[d1];
            --counts[d2];
        }
    };

    auto dfs = [&](auto&& self, long long next_min) -> bool {
        if (static_cast<long long>(chosen.size()) == k) {
            DifferenceSet ds{params, chosen};
            ds.validate();  // counts argument guarantees this; cheap at leaf
            found = std::move(ds);
            return true;
        }
        const long long remaining = k - static_cast<long long>(chosen.size());
        for (long long x = next_min; x <= v - remaining; ++x) {
            if (++nodes > node_budget) throw budget_exceeded_error(node_budget);
            const bool feasible = add(x);
            if (feasible && self(self, x + 1)) return true;
            remove(x);
        }
        return false;
    };

    if (k == 1) {
        DifferenceSet ds{params, {0}};
        ds.validate();
        return ds;
    }
    dfs(dfs, 1);
    return found;
}

/// Parse a catalog of difference sets, one per line: "v k lambda : d1 d2 ... dk".
/// '#' starts a comment; blank lines are skipped. Every set is validated.
inline std::vector<DifferenceSet> load_difference_sets(std::istream& in) {
    std::vector<DifferenceSet> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long long v, k, lambda;
        if (!(ls >> v)) continue;  // blank or comment-only line
        if (!(ls >> k >> lambda))
            throw file_parse_error(lineno, "expected 'v k lambda : residues'");
        char colon;
        if (!(ls >> colon) || colon != ':')
            throw file_parse_error(lineno, "expected ':' after parameters");
        std::vector<long long> residues;
        long long r;
        while (ls >> r) residues.push_back(r);
        if (!ls.eof())
            throw file_parse_error(lineno, "malformed residue list");
        std::sort(residues.begin(), residues.end());
        DifferenceSet ds{{v, k, lambda}, std::move(residues)};
        try {
            ds.validate();
        } catch (const design_error& e) {
            throw invalid_difference_set_error("line " + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(std::move(ds));
    }
    return out;
}

} // namespace cretan
