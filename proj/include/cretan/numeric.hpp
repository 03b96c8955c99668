#pragma once

// Floating-point side of the workbench: residual reports against omega*I,
// LU determinants, exact-vs-float comparison and a derivative-free penalty
// search for bounded-entry orthogonal matrices over structural templates.

#include "cretan/cretan_matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace cretan {

class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

class no_feasible_point_error : public numeric_error {
public:
    explicit no_feasible_point_error(double best_residual, double tol)
        : numeric_error("no restart reached residual <= " + std::to_string(10 * tol) +
                        " (best " + std::to_string(best_residual) + ")") {}
};

/// Dense square matrix of doubles, row major.
struct FloatMatrix {
    long long order = 0;
    std::vector<double> a;

    FloatMatrix() = default;
    explicit FloatMatrix(long long n) : order(n), a(static_cast<size_t>(n) * n, 0.0) {}

    double& at(long long i, long long j) { return a[static_cast<size_t>(i) * order + j]; }
    double at(long long i, long long j) const { return a[static_cast<size_t>(i) * order + j]; }

    static FloatMatrix identity(long long n) {
        FloatMatrix m(n);
        for (long long i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

/// Double evaluation of an exactly-constructed matrix.
inline FloatMatrix evaluate(const CretanMatrix& cm) {
    const long long v = cm.order();
    std::vector<double> level_values;
    level_values.reserve(cm.levels().size());
    for (const auto& l : cm.levels()) level_values.push_back(l.value.to_double());
    FloatMatrix m(v);
    for (long long i = 0; i < v; ++i)
        for (long long j = 0; j < v; ++j) m.at(i, j) = level_values[cm.level_index(i, j)];
    return m;
}

inline FloatMatrix evaluate(const IncidenceMatrix& B) {
    FloatMatrix m(B.order());
    for (long long i = 0; i < B.order(); ++i)
        for (long long j = 0; j < B.order(); ++j) m.at(i, j) = B.at(i, j) ? 1.0 : 0.0;
    return m;
}

/// Deviation of M M^T from omega*I, with omega fitted as the mean diagonal.
struct ResidualReport {
    double max_offdiag = 0.0;
    double max_diag_dev = 0.0;
    double fitted_omega = 0.0;
    int decimal_places = 0;  // largest p with max residual < 0.5 * 10^-p

    double max_residual() const { return std::max(max_offdiag, max_diag_dev); }
};

namespace detail {

inline int decimal_places_for(double r) {
    int p = -1;
    while (p < 17 && r < 0.5 * std::pow(10.0, -(p + 1))) ++p;
    return p;
}

} // namespace detail

inline ResidualReport residual(const FloatMatrix& M) {
    const long long n = M.order;
    FloatMatrix g(n);
    for (long long i = 0; i < n; ++i)
        for (long long j = i; j < n; ++j) {
            double s = 0.0;
            for (long long t = 0; t < n; ++t) s += M.at(i, t) * M.at(j, t);
            g.at(i, j) = g.at(j, i) = s;
        }
    ResidualReport rep;
    for (long long i = 0; i < n; ++i) rep.fitted_omega += g.at(i, i);
    rep.fitted_omega /= static_cast<double>(n);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j) {
            if (i == j) rep.max_diag_dev = std::max(rep.max_diag_dev, std::fabs(g.at(i, i) - rep.fitted_omega));
            else rep.max_offdiag = std::max(rep.max_offdiag, std::fabs(g.at(i, j)));
        }
    rep.decimal_places = detail::decimal_places_for(rep.max_residual());
    return rep;
}

/// Signed determinant via LU with partial pivoting. `singular` is set when a
/// pivot underflows 1e-300; the value is then 0.
struct FloatDet {
    double value = 0.0;
    bool singular = false;
};

inline FloatDet float_det(const FloatMatrix& M) {
    const long long n = M.order;
    std::vector<double> a = M.a;
    auto at = [&](long long i, long long j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
    double det = 1.0;
    for (long long c = 0; c < n; ++c) {
        long long pivot = c;
        for (long long r = c + 1; r < n; ++r)
            if (std::fabs(at(r, c)) > std::fabs(at(pivot, c))) pivot = r;
        if (std::fabs(at(pivot, c)) < 1e-300) return {0.0, true};
        if (pivot != c) {
            for (long long j = 0; j < n; ++j) std::swap(at(pivot, j), at(c, j));
            det = -det;
        }
        det *= at(c, c);
        for (long long r = c + 1; r < n; ++r) {
            const double f = at(r, c) / at(c, c);
            for (long long j = c; j < n; ++j) at(r, j) -= f * at(c, j);
        }
    }
    return {det, false};
}

/// Exact quantity next to its double evaluation.
struct LevelComparison {
    std::string exact;
    double value = 0.0;
};

/// Side-by-side view of an exact matrix and its float shadow.
struct ExactFloatComparison {
    std::string omega_exact;
    double omega_float = 0.0;
    double det_float = 0.0;
    std::vector<LevelComparison> levels;
    ResidualReport residual;
    bool float_faithful = false;  // float shadow orthogonal to >= 10 decimal places
};

inline ExactFloatComparison compare_exact_float(const CretanMatrix& cm) {
    ExactFloatComparison out;
    out.omega_exact = cm.omega().str();
    out.omega_float = cm.omega().to_double();
    out.det_float = cm.det_float();
    for (const auto& l : cm.levels()) out.levels.push_back({l.value.str(), l.value.to_double()});
    out.residual = residual(evaluate(cm));
    out.float_faithful = out.residual.decimal_places >= 10;
    return out;
}

// ---------------------------------------------------------------------------
// Structured search

enum class TemplateTag { full_pattern, circulant, bordered_circulant, diagonal_plus_offdiagonal };

inline const char* to_string(TemplateTag t) {
    switch (t) {
        case TemplateTag::full_pattern: return "full-pattern";
        case TemplateTag::circulant: return "circulant";
        case TemplateTag::bordered_circulant: return "bordered-circulant";
        default: return "diagonal-plus-offdiagonal";
    }
}

inline std::optional<TemplateTag> template_tag_from_string(const std::string& s) {
    if (s == "full-pattern") return TemplateTag::full_pattern;
    if (s == "circulant") return TemplateTag::circulant;
    if (s == "bordered-circulant") return TemplateTag::bordered_circulant;
    if (s == "diagonal-plus-offdiagonal") return TemplateTag::diagonal_plus_offdiagonal;
    return std::nullopt;
}

/// One cell of a template: which level variable fills it and with what sign.
struct Slot {
    int var = 0;
    int sign = 1;  // +1 or -1

    friend bool operator==(const Slot&, const Slot&) = default;
};

/// Structural pattern with free level variables; variable 0 is the anchor
/// level pinned to 1 during search.
struct SearchTemplate {
    long long order = 0;
    int variable_count = 0;
    TemplateTag tag = TemplateTag::full_pattern;
    std::vector<Slot> slots;  // order x order, row major

    const Slot& at(long long i, long long j) const { return slots[static_cast<size_t>(i) * order + j]; }
    Slot& at(long long i, long long j) { return slots[static_cast<size_t>(i) * order + j]; }

    /// Enforce shape invariants: slot table size, contiguous variable range,
    /// and that the declared structure is actually realized.
    void validate() const {
        if (order < 1) throw numeric_error("template order must be positive");
        if (static_cast<long long>(slots.size()) != order * order)
            throw numeric_error("slot table does not match order");
        std::vector<bool> used(static_cast<size_t>(variable_count), false);
        for (const auto& s : slots) {
            if (s.var < 0 || s.var >= variable_count) throw numeric_error("variable index out of range");
            if (s.sign != 1 && s.sign != -1) throw numeric_error("slot sign must be +-1");
            used[static_cast<size_t>(s.var)] = true;
        }
        for (int v = 0; v < variable_count; ++v)
            if (!used[static_cast<size_t>(v)])
                throw numeric_error("variable " + std::to_string(v) + " never used");
        if (tag == TemplateTag::circulant) {
            for (long long i = 1; i < order; ++i)
                for (long long j = 0; j < order; ++j)
                    if (!(at(i, j) == at(0, ((j - i) % order + order) % order)))
                        throw numeric_error("circulant template is not constant on diagonals");
        }
        if (tag == TemplateTag::diagonal_plus_offdiagonal) {
            for (long long i = 0; i < order; ++i)
                for (long long j = 0; j < order; ++j) {
                    if (i == j && !(at(i, j) == at(0, 0)))
                        throw numeric_error("diagonal slots must agree");
                    if (i != j && order > 1 && !(at(i, j) == at(0, 1)))
                        throw numeric_error("off-diagonal slots must agree");
                }
        }
        if (tag == TemplateTag::bordered_circulant) {
            const long long m = order - 1;
            for (long long i = 2; i <= m; ++i) {
                if (!(at(0, i) == at(0, 1)) || !(at(i, 0) == at(1, 0)))
                    throw numeric_error("border slots must agree");
            }
            for (long long i = 1; i <= m; ++i)
                for (long long j = 1; j <= m; ++j)
                    if (!(at(i, j) == at(1, 1 + ((j - i) % m + m) % m)))
                        throw numeric_error("core is not circulant");
        }
    }

    /// Fill the pattern with concrete level values (levels.size() == variable_count).
    FloatMatrix instantiate(const std::vector<double>& levels) const {
        if (static_cast<int>(levels.size()) != variable_count)
            throw numeric_error("expected " + std::to_string(variable_count) + " levels");
        FloatMatrix m(order);
        for (long long i = 0; i < order; ++i)
            for (long long j = 0; j < order; ++j) {
                const Slot& s = at(i, j);
                m.at(i, j) = s.sign * levels[static_cast<size_t>(s.var)];
            }
        return m;
    }
};

/// Order-5 symmetric circulant circ(c, b, -a, -a, b); variables (a, b, c).
inline SearchTemplate circ5_template() {
    SearchTemplate t;
    t.order = 5;
    t.variable_count = 3;
    t.tag = TemplateTag::circulant;
    const std::vector<Slot> first = {{2, 1}, {1, 1}, {0, -1}, {0, -1}, {1, 1}};
    t.slots.resize(25);
    for (long long i = 0; i < 5; ++i)
        for (long long j = 0; j < 5; ++j) t.at(i, j) = first[static_cast<size_t>(((j - i) % 5 + 5) % 5)];
    t.validate();
    return t;
}

/// Order-5 full sign pattern with three levels (a, b, c).
inline SearchTemplate s5d_template() {
    SearchTemplate t;
    t.order = 5;
    t.variable_count = 3;
    t.tag = TemplateTag::full_pattern;
    const int a = 0, b = 1, c = 2;
    const std::vector<std::vector<Slot>> rows = {
        {{a, 1}, {a, -1}, {b, -1}, {a, -1}, {c, -1}},
        {{b, 1}, {a, 1}, {a, -1}, {c, 1}, {a, -1}},
        {{a, 1}, {a, 1}, {c, 1}, {b, -1}, {a, 1}},
        {{a, 1}, {c, -1}, {a, 1}, {a, 1}, {b, -1}},
        {{c, 1}, {b, -1}, {a, -1}, {a, 1}, {a, 1}},
    };
    for (const auto& r : rows) t.slots.insert(t.slots.end(), r.begin(), r.end());
    t.validate();
    return t;
}

/// Order-5 pattern with x on the diagonal and y elsewhere; variables (x, y).
inline SearchTemplate diag5_template() {
    SearchTemplate t;
    t.order = 5;
    t.variable_count = 2;
    t.tag = TemplateTag::diagonal_plus_offdiagonal;
    t.slots.resize(25);
    for (long long i = 0; i < 5; ++i)
        for (long long j = 0; j < 5; ++j) t.at(i, j) = Slot{i == j ? 0 : 1, 1};
    t.validate();
    return t;
}

/// Order-9 bordered circulant: first row and column {-d b b b b b b b b}
/// around the core circ(a -a c c a c -a -a); variables (a, b, c, d).
inline SearchTemplate a9_template() {
    SearchTemplate t;
    t.order = 9;
    t.variable_count = 4;
    t.tag = TemplateTag::bordered_circulant;
    t.slots.resize(81);
    const int a = 0, b = 1, c = 2, d = 3;
    const std::vector<Slot> core = {{a, 1}, {a, -1}, {c, 1}, {c, 1}, {a, 1}, {c, 1}, {a, -1}, {a, -1}};
    t.at(0, 0) = Slot{d, -1};
    for (long long i = 1; i < 9; ++i) {
        t.at(0, i) = Slot{b, 1};
        t.at(i, 0) = Slot{b, 1};
        for (long long j = 1; j < 9; ++j) t.at(i, j) = core[static_cast<size_t>(((j - i) % 8 + 8) % 8)];
    }
    t.validate();
    return t;
}

inline std::optional<SearchTemplate> builtin_template(const std::string& name) {
    if (name == "circ5") return circ5_template();
    if (name == "s5d") return s5d_template();
    if (name == "diag5") return diag5_template();
    if (name == "a9") return a9_template();
    return std::nullopt;
}

/// Search knobs. `workers` only controls execution; results are identical
/// for any worker count and it is never serialized.
struct SearchConfig {
    int restarts = 32;
    int max_iters = 2000;       // simplex iterations per penalty sweep
    std::uint64_t seed = 1;
    double tol = 1e-5;          // residual target on max |MM^T - omega I| entry
    double mu0 = 10.0;          // starting penalty weight of restart 0
    double mu_growth = 1.35;    // starting-weight escalation across restarts
    double mu_boost = 100.0;    // weight escalation across sweeps within a restart
    int sweeps = 4;
    int workers = 1;
};

/// One improvement event of the penalized objective.
struct TraceEntry {
    int restart = 0;
    int iter = 0;        // iteration within the restart, across sweeps
    double mu = 0.0;
    double penalty = 0.0;
    double abs_det = 0.0;
    double objective = 0.0;  // log|det| - mu * penalty
};

struct SearchResult {
    SearchTemplate tmpl;
    std::vector<double> levels;  // full level vector, levels[0] == 1
    FloatMatrix matrix;
    ResidualReport residual;
    double abs_det = 0.0;
    bool meets_tolerance = false;
    int best_restart = 0;
    std::vector<TraceEntry> trace;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// xorshift-free deterministic uniform in [-1, 1): same bits on every
/// platform for a given seed.
class UnitRng {
public:
    explicit UnitRng(std::uint64_t seed) : state_(seed) {}
    double next() {
        state_ = splitmix64(state_);
        return 2.0 * (static_cast<double>(state_ >> 11) * 0x1.0p-53) - 1.0;
    }

private:
    std::uint64_t state_;
};

struct PenaltyEval {
    double f = 0.0;        // minimized: -log|det| + mu * penalty
    double penalty = 0.0;  // sum of offdiag^2 and diag-deviation^2 of MM^T
    double abs_det = 0.0;
};

struct RestartOutcome {
    std::vector<double> free_levels;
    double residual_max = 0.0;
    double abs_det = 0.0;
    std::vector<TraceEntry> trace;
};

class PenaltyObjective {
public:
    PenaltyObjective(const SearchTemplate& tmpl, double mu) : tmpl_(&tmpl), mu_(mu) {}

    void set_mu(double mu) { mu_ = mu; }
    double mu() const { return mu_; }

    PenaltyEval operator()(const std::vector<double>& free_levels) const {
        std::vector<double> levels(static_cast<size_t>(tmpl_->variable_count));
        levels[0] = 1.0;
        for (size_t i = 0; i < free_levels.size(); ++i)
            levels[i + 1] = std::clamp(free_levels[i], -1.0, 1.0);
        FloatMatrix m = tmpl_->instantiate(levels);
        const long long n = m.order;

        double diag_sum = 0.0;
        std::vector<double> gram(static_cast<size_t>(n) * n, 0.0);
        for (long long i = 0; i < n; ++i)
            for (long long j = i; j < n; ++j) {
                double s = 0.0;
                for (long long t = 0; t < n; ++t) s += m.at(i, t) * m.at(j, t);
                gram[static_cast<size_t>(i) * n + j] = gram[static_cast<size_t>(j) * n + i] = s;
                if (i == j) diag_sum += s;
            }
        const double mean = diag_sum / static_cast<double>(n);
        double penalty = 0.0;
        for (long long i = 0; i < n; ++i)
            for (long long j = 0; j < n; ++j) {
                const double dev = (i == j) ? gram[static_cast<size_t>(i) * n + j] - mean
                                            : gram[static_cast<size_t>(i) * n + j];
                penalty += dev * dev;
            }

        const double det = float_det(m).value;
        const double abs_det = std::fabs(det);
        return {-std::log(abs_det + 1e-300) + mu_ * penalty, penalty, abs_det};
    }

private:
    const SearchTemplate* tmpl_;
    double mu_;
};

/// Nelder-Mead descent with box projection, recording improvement events.
inline std::vector<double> nelder_mead(const PenaltyObjective& obj, std::vector<double> start,
                                       double step, int max_iters, int restart, int& iter_base,
                                       std::vector<TraceEntry>& trace) {
    const size_t n = start.size();
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> x(n + 1, start);
    for (size_t i = 0; i < n; ++i) {
        x[i + 1][i] += (start[i] > 0.5 ? -step : step);  // step toward the interior
    }
    std::vector<PenaltyEval> fx(n + 1);
    for (size_t i = 0; i <= n; ++i) fx[i] = obj(x[i]);

    auto record_best = [&](int iter) {
        size_t b = 0;
        for (size_t i = 1; i <= n; ++i)
            if (fx[i].f < fx[b].f) b = i;
        trace.push_back({restart, iter_base + iter, obj.mu(), fx[b].penalty, fx[b].abs_det, -fx[b].f});
    };

    double last_best = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        std::vector<size_t> idx(n + 1);
        for (size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            return fx[a].f != fx[b].f ? fx[a].f < fx[b].f : a < b;
        });
        {
            std::vector<std::vector<double>> x2(n + 1);
            std::vector<PenaltyEval> f2(n + 1);
            for (size_t i = 0; i <= n; ++i) { x2[i] = x[idx[i]]; f2[i] = fx[idx[i]]; }
            x.swap(x2);
            fx.swap(f2);
        }
        if (fx[0].f < last_best - 1e-12) {
            last_best = fx[0].f;
            record_best(iter);
        }

        double spread = 0.0;
        for (size_t i = 0; i < n; ++i) spread = std::max(spread, std::fabs(x[n][i] - x[0][i]));
        if (std::fabs(fx[n].f - fx[0].f) <= 1e-14 * (1.0 + std::fabs(fx[0].f)) && spread <= 1e-12) break;

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t v = 0; v < n; ++v) centroid[v] += x[i][v];
        }
        for (size_t v = 0; v < n; ++v) centroid[v] /= static_cast<double>(n);

        auto blend = [&](const std::vector<double>& from, double coeff) {
            std::vector<double> p(n);
            for (size_t v = 0; v < n; ++v) p[v] = centroid[v] + coeff * (from[v] - centroid[v]);
            return p;
        };

        std::vector<double> reflected = blend(x[n], -alpha);
        PenaltyEval fr = obj(reflected);
        if (fr.f < fx[0].f) {
            std::vector<double> expanded = blend(x[n], -alpha * gamma);
            PenaltyEval fe = obj(expanded);
            if (fe.f < fr.f) { x[n] = std::move(expanded); fx[n] = fe; }
            else { x[n] = std::move(reflected); fx[n] = fr; }
            continue;
        }
        if (fr.f < fx[n - 1].f) { x[n] = std::move(reflected); fx[n] = fr; continue; }
        std::vector<double> contracted = blend(x[n], rho);
        PenaltyEval fc = obj(contracted);
        if (fc.f < fx[n].f) { x[n] = std::move(contracted); fx[n] = fc; continue; }
        for (size_t i = 1; i <= n; ++i) {
            for (size_t v = 0; v < n; ++v) x[i][v] = x[0][v] + sigma * (x[i][v] - x[0][v]);
            fx[i] = obj(x[i]);
        }
    }
    iter_base += iter;

    size_t b = 0;
    for (size_t i = 1; i <= n; ++i)
        if (fx[i].f < fx[b].f) b = i;
    return x[b];
}

inline RestartOutcome run_restart(const SearchTemplate& tmpl, const SearchConfig& cfg, int restart) {
    const int free_count = tmpl.variable_count - 1;
    RestartOutcome out;

    UnitRng rng(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(restart) + 1));
    std::vector<double> point(static_cast<size_t>(free_count));
    for (auto& p : point) p = rng.next();

    double mu = cfg.mu0 * std::pow(cfg.mu_growth, restart);
    PenaltyObjective obj(tmpl, mu);
    int iter_base = 0;
    for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
        obj.set_mu(mu);
        point = nelder_mead(obj, std::move(point), sweep == 0 ? 0.35 : 0.03, cfg.max_iters, restart,
                            iter_base, out.trace);
        for (auto& p : point) p = std::clamp(p, -1.0, 1.0);

        std::vector<double> levels(static_cast<size_t>(tmpl.variable_count));
        levels[0] = 1.0;
        for (size_t i = 0; i < point.size(); ++i) levels[i + 1] = point[i];
        ResidualReport rep = residual(tmpl.instantiate(levels));
        out.residual_max = rep.max_residual();
        out.abs_det = std::fabs(float_det(tmpl.instantiate(levels)).value);
        if (out.residual_max < cfg.tol * 1e-3) break;
        mu *= cfg.mu_boost;
    }
    out.free_levels = std::move(point);
    return out;
}

} // namespace detail

/// Maximize |det| subject to orthogonality via an escalating penalty and
/// multi-start Nelder-Mead. Deterministic for a given (template, config,
/// seed) regardless of worker count: restarts are independent and merged by
/// a fixed ranking (feasible restarts by |det|, then by residual, then by
/// restart index).
inline SearchResult search(const SearchTemplate& tmpl, const SearchConfig& cfg = {}) {
    tmpl.validate();
    if (cfg.restarts < 1) throw numeric_error("need at least one restart");

    std::vector<detail::RestartOutcome> outcomes(static_cast<size_t>(cfg.restarts));
    if (tmpl.variable_count <= 1) {
        // Nothing free to search; evaluate the anchored pattern directly.
        for (auto& o : outcomes) o = detail::RestartOutcome{};
        std::vector<double> levels{1.0};
        FloatMatrix m = tmpl.instantiate(levels);
        ResidualReport rep = residual(m);
        for (auto& o : outcomes) {
            o.residual_max = rep.max_residual();
            o.abs_det = std::fabs(float_det(m).value);
        }
    } else {
        const int workers = std::max(1, cfg.workers);
        if (workers == 1) {
            for (int r = 0; r < cfg.restarts; ++r)
                outcomes[static_cast<size_t>(r)] = detail::run_restart(tmpl, cfg, r);
        } else {
            std::atomic<int> next{0};
            auto worker = [&] {
                for (int r = next.fetch_add(1); r < cfg.restarts; r = next.fetch_add(1))
                    outcomes[static_cast<size_t>(r)] = detail::run_restart(tmpl, cfg, r);
            };
            std::vector<std::thread> pool;
            pool.reserve(static_cast<size_t>(workers));
            for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
    }

    int best = 0;
    auto better = [&](int lhs, int rhs) {
        const auto& a = outcomes[static_cast<size_t>(lhs)];
        const auto& b = outcomes[static_cast<size_t>(rhs)];
        const bool fa = a.residual_max <= cfg.tol, fb = b.residual_max <= cfg.tol;
        if (fa != fb) return fa;
        if (fa) {
            if (a.abs_det != b.abs_det) return a.abs_det > b.abs_det;
        } else if (a.residual_max != b.residual_max) {
            return a.residual_max < b.residual_max;
        }
        return lhs < rhs;
    };
    for (int r = 1; r < cfg.restarts; ++r)
        if (better(r, best)) best = r;

    const auto& chosen = outcomes[static_cast<size_t>(best)];
    if (chosen.residual_max > 10.0 * cfg.tol)
        throw no_feasible_point_error(chosen.residual_max, cfg.tol);

    SearchResult result;
    result.tmpl = tmpl;
    result.levels.assign(static_cast<size_t>(tmpl.variable_count), 1.0);
    for (size_t i = 0; i < chosen.free_levels.size(); ++i)
        result.levels[i + 1] = chosen.free_levels[i];
    result.matrix = tmpl.instantiate(result.levels);
    result.residual = residual(result.matrix);
    result.abs_det = std::fabs(float_det(result.matrix).value);
    result.meets_tolerance = result.residual.max_residual() <= cfg.tol;
    result.best_restart = best;
    for (const auto& o : outcomes)
        result.trace.insert(result.trace.end(), o.trace.begin(), o.trace.end());
    return result;
}

} // namespace cretan
