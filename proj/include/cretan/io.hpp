#pragma once

// Serialization: matrix JSON (exact level strings plus an index grid, so
// exactness survives round trips), CSV, template and search-result JSON,
// and binary graymap rendering.

#include "cretan/cretan_matrix.hpp"
#include "cretan/numeric.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace cretan {

using nlohmann::json;

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Cretan matrix JSON
// {order, params|null, levels:[{exact,float}], entries:[[level_index]],
//  omega:{exact,float}, det_float, provenance|null}

inline json params_to_json(const DesignParams& p) {
    return json{{"v", p.v}, {"k", p.k}, {"lambda", p.lambda}};
}

inline DesignParams params_from_json(const json& j) {
    return DesignParams{j.at("v").get<long long>(), j.at("k").get<long long>(),
                        j.at("lambda").get<long long>()};
}

inline json cretan_to_json(const CretanMatrix& cm) {
    json levels = json::array();
    for (const auto& l : cm.levels())
        levels.push_back(json{{"exact", l.value.str()},
                              {"float", l.value.to_double()},
                              {"occurrences", l.occurrences}});
    json entries = json::array();
    for (long long i = 0; i < cm.order(); ++i) {
        json row = json::array();
        for (long long j = 0; j < cm.order(); ++j) row.push_back(cm.level_index(i, j));
        entries.push_back(std::move(row));
    }
    json prov = nullptr;
    json params = nullptr;
    if (cm.provenance()) {
        const auto& p = *cm.provenance();
        prov = json{{"params", params_to_json(p.params)},
                    {"source", to_string(p.source)},
                    {"branch", to_string(p.branch)},
                    {"family", p.family}};
        params = params_to_json(p.params);
    }
    return json{{"order", cm.order()},
                {"params", params},
                {"levels", std::move(levels)},
                {"entries", std::move(entries)},
                {"omega", json{{"exact", cm.omega().str()}, {"float", cm.omega().to_double()}}},
                {"det_float", cm.det_float()},
                {"provenance", std::move(prov)}};
}

/// Rebuild a matrix from its JSON form. With enforce_feasibility = false the
/// level-modulus and one-per-row checks are skipped so that damaged files can
/// still be loaded for verification.
inline CretanMatrix cretan_from_json(const json& j, bool enforce_feasibility = true) {
    try {
        const long long order = j.at("order").get<long long>();
        std::vector<QuadExt> level_values;
        for (const auto& l : j.at("levels")) level_values.push_back(QuadExt::parse(l.at("exact").get<std::string>()));
        std::vector<std::uint8_t> grid;
        grid.reserve(static_cast<size_t>(order) * order);
        for (const auto& row : j.at("entries"))
            for (const auto& cell : row) grid.push_back(cell.get<std::uint8_t>());
        QuadExt omega = QuadExt::parse(j.at("omega").at("exact").get<std::string>());
        std::optional<Provenance> prov;
        if (j.contains("provenance") && !j.at("provenance").is_null()) {
            const auto& p = j.at("provenance");
            Provenance pv;
            pv.params = params_from_json(p.at("params"));
            pv.source = p.at("source").get<std::string>() == "complement" ? Source::complement : Source::original;
            pv.branch = p.at("branch").get<std::string>() == "minus" ? Branch::minus : Branch::plus;
            pv.family = p.value("family", std::string{});
            prov = std::move(pv);
        }
        return CretanMatrix::from_grid(order, std::move(level_values), std::move(grid), std::move(omega),
                                       std::move(prov), enforce_feasibility);
    } catch (const json::exception& e) {
        throw io_error(std::string("bad matrix JSON: ") + e.what());
    } catch (const qfield_error& e) {
        throw io_error(std::string("bad matrix JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Incidence matrix JSON: {params, structure, rows:[[bit,...],...]}

inline json design_to_json(const IncidenceMatrix& B) {
    json rows = json::array();
    for (long long i = 0; i < B.order(); ++i) {
        json row = json::array();
        for (long long j = 0; j < B.order(); ++j) row.push_back(B.at(i, j) ? 1 : 0);
        rows.push_back(std::move(row));
    }
    return json{{"params", params_to_json(B.params())},
                {"structure", to_string(B.structure())},
                {"rows", std::move(rows)}};
}

inline IncidenceMatrix design_from_json(const json& j) {
    try {
        DesignParams params = params_from_json(j.at("params"));
        std::vector<std::vector<int>> rows;
        for (const auto& row : j.at("rows")) rows.push_back(row.get<std::vector<int>>());
        return IncidenceMatrix::from_rows(params, rows,
                                          structure_tag_from_string(j.value("structure", "general")));
    } catch (const json::exception& e) {
        throw io_error(std::string("bad design JSON: ") + e.what());
    }
}

inline bool looks_like_design_json(const json& j) { return j.is_object() && j.contains("rows"); }
inline bool looks_like_cretan_json(const json& j) { return j.is_object() && j.contains("levels"); }

// ---------------------------------------------------------------------------
// Search template JSON: slots encoded as sign * (variable index + 1)

inline json template_to_json(const SearchTemplate& t) {
    json slots = json::array();
    for (long long i = 0; i < t.order; ++i) {
        json row = json::array();
        for (long long j = 0; j < t.order; ++j) {
            const Slot& s = t.at(i, j);
            row.push_back(s.sign * (s.var + 1));
        }
        slots.push_back(std::move(row));
    }
    return json{{"order", t.order},
                {"structure", to_string(t.tag)},
                {"variables", t.variable_count},
                {"slots", std::move(slots)}};
}

inline SearchTemplate template_from_json(const json& j) {
    try {
        SearchTemplate t;
        t.order = j.at("order").get<long long>();
        t.variable_count = j.at("variables").get<int>();
        auto tag = template_tag_from_string(j.at("structure").get<std::string>());
        if (!tag) throw io_error("unknown template structure '" + j.at("structure").get<std::string>() + "'");
        t.tag = *tag;
        for (const auto& row : j.at("slots"))
            for (const auto& cell : row) {
                const int code = cell.get<int>();
                if (code == 0) throw io_error("slot code 0 is invalid");
                t.slots.push_back(Slot{std::abs(code) - 1, code > 0 ? 1 : -1});
            }
        t.validate();
        return t;
    } catch (const json::exception& e) {
        throw io_error(std::string("bad template JSON: ") + e.what());
    } catch (const numeric_error& e) {
        throw io_error(std::string("bad template JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Search result JSON. The worker count is an execution detail and is
// deliberately absent: output bytes are identical for any worker count.

inline json search_result_to_json(const SearchResult& r, const SearchConfig& cfg) {
    json trace = json::array();
    for (const auto& e : r.trace)
        trace.push_back(json{{"restart", e.restart},
                             {"iter", e.iter},
                             {"mu", e.mu},
                             {"penalty", e.penalty},
                             {"abs_det", e.abs_det},
                             {"objective", e.objective}});
    json levels = json::array();
    for (double l : r.levels) levels.push_back(l);
    return json{{"template", template_to_json(r.tmpl)},
                {"config", json{{"restarts", cfg.restarts},
                                {"max_iters", cfg.max_iters},
                                {"seed", cfg.seed},
                                {"tol", cfg.tol},
                                {"mu0", cfg.mu0},
                                {"mu_growth", cfg.mu_growth},
                                {"mu_boost", cfg.mu_boost},
                                {"sweeps", cfg.sweeps}}},
                {"levels", std::move(levels)},
                {"abs_det", r.abs_det},
                {"residual", json{{"max_offdiag", r.residual.max_offdiag},
                                  {"max_diag_dev", r.residual.max_diag_dev},
                                  {"fitted_omega", r.residual.fitted_omega},
                                  {"decimal_places", r.residual.decimal_places}}},
                {"meets_tolerance", r.meets_tolerance},
                {"best_restart", r.best_restart},
                {"trace", std::move(trace)}};
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

inline void write_csv(std::ostream& os, const FloatMatrix& m) {
    for (long long i = 0; i < m.order; ++i) {
        for (long long j = 0; j < m.order; ++j) {
            if (j) os << ',';
            os << detail::format_double(m.at(i, j));
        }
        os << '\n';
    }
}

inline void write_csv(std::ostream& os, const IncidenceMatrix& B) {
    for (long long i = 0; i < B.order(); ++i) {
        for (long long j = 0; j < B.order(); ++j) {
            if (j) os << ',';
            os << (B.at(i, j) ? 1 : 0);
        }
        os << '\n';
    }
}

/// Parse a square CSV of doubles.
inline FloatMatrix csv_to_float_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                size_t used = 0;
                row.push_back(std::stod(cell, &used));
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
                if (used != cell.size()) throw io_error("");
            } catch (...) {
                throw io_error("line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw io_error("empty CSV matrix");
    FloatMatrix m(static_cast<long long>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
            throw io_error("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                           " cells, expected " + std::to_string(rows.size()));
        for (size_t j = 0; j < rows[i].size(); ++j) m.at(static_cast<long long>(i), static_cast<long long>(j)) = rows[i][j];
    }
    return m;
}

// ---------------------------------------------------------------------------
// Graymap portraits (binary PGM, magic P5)

/// Rendering parameters. The gray map is the affine map pinned by
/// value_map(-1) = 0 and value_map(1) = 255, with ties rounded to even.
struct PortraitSpec {
    int cell_size = 8;
};

inline int gray_value(double level) {
    const double g = 255.0 * (std::clamp(level, -1.0, 1.0) + 1.0) / 2.0;
    return static_cast<int>(std::nearbyint(g));
}

/// Write a v*cell x v*cell binary graymap; bytes are a pure function of the
/// input values.
inline void write_pgm(std::ostream& os, const FloatMatrix& m, const PortraitSpec& spec) {
    if (spec.cell_size < 1) throw io_error("cell size must be >= 1");
    const long long side = m.order * spec.cell_size;
    os << "P5\n" << side << " " << side << "\n255\n";
    std::string row_bytes(static_cast<size_t>(side), '\0');
    for (long long i = 0; i < m.order; ++i) {
        for (long long j = 0; j < m.order; ++j) {
            const char g = static_cast<char>(gray_value(m.at(i, j)));
            for (int c = 0; c < spec.cell_size; ++c)
                row_bytes[static_cast<size_t>(j) * spec.cell_size + c] = g;
        }
        for (int c = 0; c < spec.cell_size; ++c) os.write(row_bytes.data(), side);
    }
}

// ---------------------------------------------------------------------------
// Small file helpers

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw io_error(path + ": " + e.what());
    }
}

inline void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << text;
}

} // namespace cretan
