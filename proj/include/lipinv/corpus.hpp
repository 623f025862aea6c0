/**
 * The function corpus: entries pair a map with optional known inverse,
 * known derivative hulls, expected certificate outcomes, norm patches, and
 * an evaluation region. Entries are defined in a text-based key-value
 * format so fixtures are shared across implementations; a registry supplies
 * the black-box closures that the format cannot express.
 *
 * Format sketch (sections in any order, `#` comments, numbers are decimal
 * literals, matrix rows separated by `;`):
 *
 *   [map]
 *   name = shear_abs
 *   kind = pwa                  # or: builtin (+ builtin = <registry name>)
 *   domain = all                # or: box <lo row> ; <hi row>
 *   center = 0 0                # profile center (optional)
 *   region = -5 -5 ; 5 5        # sampling region (optional)
 *
 *   [piece.1]
 *   A = 1 1 ; 0 1
 *   b = 0 0
 *   ineq = 0 -1 ; 0             # <(0,-1), x> <= 0; one line per inequality
 *
 *   [inverse]                   # optional, same shape ([inverse.piece.N])
 *   [expect]                    # criterion = expected label
 *   [patch.source]              # norm = euclidean | weighted-lp p w... |
 *   [patch.target]              #        conformal <expression>
 */

#ifndef LIPINV_CORPUS_HPP
#define LIPINV_CORPUS_HPP

#include <filesystem>
#include <fstream>
#include <map>

#include "clarke.hpp"
#include "expr.hpp"
#include "finsler.hpp"

namespace lipinv {

struct ExpectedVerdict {
    std::string criterion;
    std::string label;
};

/** Raw patch declaration kept for serialization round-trips. */
struct PatchDecl {
    std::string norm_text = "euclidean";
    std::string domain_text = "all";
    std::string modulus_text = "";
};

struct CorpusEntry {
    std::string name;
    AnyMap map;
    std::optional<AnyMap> known_inverse;
    std::function<MatrixPolytope(const Vec&)> known_clarke;  // may be empty
    std::vector<ExpectedVerdict> expected_verdicts;
    Region eval_region = Region::ball(Vec::Zero(1), 1.0);
    Vec profile_center;
    std::optional<FinslerPatch> source_patch;
    std::optional<FinslerPatch> target_patch;
    std::optional<PatchDecl> source_patch_decl;
    std::optional<PatchDecl> target_patch_decl;
    std::string builtin_name;          // nonempty when map comes from the registry
    std::string inverse_builtin_name;  // likewise for the inverse
};

// ---------------------------------------------------------------------------
// Registry of black-box closures referenced by `kind = builtin` entries.
// ---------------------------------------------------------------------------

struct BuiltinDef {
    LipschitzMap map;
    std::function<MatrixPolytope(const Vec&)> known_clarke;
};

namespace detail {

inline LipschitzMap make_lipschitz(int dim, Domain domain, std::function<Vec(const Vec&)> eval,
                                   std::function<Mat(const Vec&)> jac, bool smooth, double lip_hint)
{
    LipschitzMap m;
    m.dim_in = dim;
    m.dim_out = dim;
    m.domain = std::move(domain);
    m.eval_fn = std::move(eval);
    m.jac_fn = std::move(jac);
    m.smooth = smooth;
    m.lipschitz_hint = lip_hint;
    return m;
}

inline double bisect_monotone(const std::function<double(double)>& f, double lo, double hi, double target)
{
    // f strictly increasing with f(lo) <= target <= f(hi)
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline const std::map<std::string, BuiltinDef>& builtin_registry()
{
    static const std::map<std::string, BuiltinDef> registry = [] {
        std::map<std::string, BuiltinDef> r;

        auto scalar_vec = [](double v) {
            Vec out(1);
            out[0] = v;
            return out;
        };
        auto scalar_mat = [](double v) {
            Mat out(1, 1);
            out(0, 0) = v;
            return out;
        };

        r["exp1d"] = {detail::make_lipschitz(
                          1, Domain::all_space(1), [scalar_vec](const Vec& x) { return scalar_vec(std::exp(x[0])); },
                          [scalar_mat](const Vec& x) { return scalar_mat(std::exp(x[0])); }, true, 0.0),
                      [scalar_mat](const Vec& x) {
                          MatrixPolytope p;
                          p.generators.push_back(scalar_mat(std::exp(x[0])));
                          p.base_point = x;
                          return p;
                      }};

        {
            Vec lo = make_vec({1e-300});
            Vec hi = make_vec({1e300});
            r["exp1d_inverse"] = {detail::make_lipschitz(
                                      1, Domain::box(lo, hi),
                                      [scalar_vec](const Vec& y) { return scalar_vec(std::log(y[0])); },
                                      [scalar_mat](const Vec& y) { return scalar_mat(1.0 / y[0]); }, true, 0.0),
                                  nullptr};
        }

        r["twoxsin"] = {detail::make_lipschitz(
                            1, Domain::all_space(1),
                            [scalar_vec](const Vec& x) { return scalar_vec(2.0 * x[0] + std::sin(x[0])); },
                            [scalar_mat](const Vec& x) { return scalar_mat(2.0 + std::cos(x[0])); }, true, 3.0),
                        [scalar_mat](const Vec& x) {
                            MatrixPolytope p;
                            p.generators.push_back(scalar_mat(2.0 + std::cos(x[0])));
                            p.base_point = x;
                            return p;
                        }};

        r["twoxsin_inverse"] = {detail::make_lipschitz(
                                    1, Domain::all_space(1),
                                    [scalar_vec](const Vec& y) {
                                        // 2x + sin x = y has its root in [(y-1)/2, (y+1)/2]
                                        const double x = detail::bisect_monotone(
                                            [](double t) { return 2.0 * t + std::sin(t); }, (y[0] - 1.0) / 2.0,
                                            (y[0] + 1.0) / 2.0, y[0]);
                                        return scalar_vec(x);
                                    },
                                    nullptr, true, 1.0),
                                nullptr};

        r["neg_cross_inverse"] = {detail::make_lipschitz(
                                      2, Domain::all_space(2),
                                      [](const Vec& y) {
                                          for (double sx : {1.0, -1.0}) {
                                              for (double sy : {1.0, -1.0}) {
                                                  Mat A(2, 2);
                                                  A << -1.0, 0.3 * sy, 0.3 * sx, -1.0;
                                                  const Vec x = A.inverse() * y;
                                                  if (x[0] * sx >= -1e-12 && x[1] * sy >= -1e-12) return x;
                                              }
                                          }
                                          fail(ErrorKind::SamplingFailed, "quadrant solve failed");
                                      },
                                      nullptr, false, 1.0 / 0.7),
                                  nullptr};

        r["abs1d"] = {detail::make_lipschitz(
                          1, Domain::all_space(1), [scalar_vec](const Vec& x) { return scalar_vec(std::abs(x[0])); },
                          [scalar_mat](const Vec& x) { return scalar_mat(x[0] >= 0.0 ? 1.0 : -1.0); }, false, 1.0),
                      nullptr};

        r["square1d"] = {detail::make_lipschitz(
                             1, Domain::all_space(1), [scalar_vec](const Vec& x) { return scalar_vec(x[0] * x[0]); },
                             [scalar_mat](const Vec& x) { return scalar_mat(2.0 * x[0]); }, true, 0.0),
                         nullptr};

        r["neg1d"] = {detail::make_lipschitz(
                          1, Domain::all_space(1), [scalar_vec](const Vec& x) { return scalar_vec(-x[0]); },
                          [scalar_mat](const Vec&) { return scalar_mat(-1.0); }, true, 1.0),
                      nullptr};

        return r;
    }();
    return registry;
}

// ---------------------------------------------------------------------------
// Parser.
// ---------------------------------------------------------------------------

namespace detail {

struct SpecLine {
    int line_no = 0;
    std::string key;
    std::string value;
};

struct SpecSection {
    std::string name;
    int line_no = 0;
    std::vector<SpecLine> lines;

    const SpecLine* find(const std::string& key) const
    {
        for (const auto& l : lines)
            if (l.key == key) return &l;
        return nullptr;
    }
};

struct SpecDoc {
    std::vector<SpecSection> sections;

    const SpecSection* find(const std::string& name) const
    {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
};

[[noreturn]] inline void parse_fail(int line, const std::string& msg)
{
    fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + msg);
}

inline std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline SpecDoc parse_spec_text(const std::string& text)
{
    SpecDoc doc;
    SpecSection* current = nullptr;
    int line_no = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(line_no, "malformed section header '" + line + "'");
            doc.sections.push_back({trim(line.substr(1, line.size() - 2)), line_no, {}});
            current = &doc.sections.back();
            continue;
        }
        if (current == nullptr)
            parse_fail(line_no, "content before any section header; the document starts with [map]");
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) parse_fail(line_no, "expected 'key = value', got '" + line + "'");
        current->lines.push_back({line_no, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
    }
    if (doc.sections.empty()) fail(ErrorKind::ParseError, "document contains no sections");
    return doc;
}

inline double parse_number(const std::string& text, int line)
{
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || trim(std::string(end)) != "") parse_fail(line, "malformed number '" + text + "'");
    return v;
}

inline Vec parse_vector(const std::string& text, int line)
{
    std::istringstream in(text);
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) vals.push_back(parse_number(tok, line));
    if (vals.empty()) parse_fail(line, "empty vector");
    Vec v(static_cast<int>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    return v;
}

inline std::vector<std::string> split_rows(const std::string& text)
{
    std::vector<std::string> rows;
    std::string current;
    for (char c : text) {
        if (c == ';') {
            rows.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    rows.push_back(current);
    return rows;
}

inline Mat parse_matrix(const std::string& text, int line)
{
    const auto rows = split_rows(text);
    std::vector<Vec> parsed;
    for (const auto& r : rows) parsed.push_back(parse_vector(r, line));
    const int cols = static_cast<int>(parsed.front().size());
    Mat m(static_cast<int>(parsed.size()), cols);
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (static_cast<int>(parsed[i].size()) != cols) parse_fail(line, "matrix rows have unequal lengths");
        m.row(static_cast<int>(i)) = parsed[i].transpose();
    }
    return m;
}

inline Domain parse_domain(const std::string& text, int line, int dim)
{
    if (trim(text) == "all") return Domain::all_space(dim);
    std::istringstream in(text);
    std::string word;
    in >> word;
    if (word == "box") {
        std::string rest;
        std::getline(in, rest);
        const Mat box = parse_matrix(rest, line);
        if (box.rows() != 2) parse_fail(line, "box needs two rows (lo ; hi)");
        if (static_cast<int>(box.cols()) != dim) parse_fail(line, "box dimension mismatch");
        return Domain::box(box.row(0).transpose(), box.row(1).transpose());
    }
    parse_fail(line, "unknown domain '" + text + "'");
}

inline FinslerPatch parse_patch(const SpecSection& section, int dim)
{
    PatchDecl decl;
    Domain domain = Domain::all_space(dim);
    if (const auto* d = section.find("domain")) {
        decl.domain_text = d->value;
        domain = parse_domain(d->value, d->line_no, dim);
    }
    double modulus = 0.0;
    if (const auto* m = section.find("modulus")) {
        decl.modulus_text = m->value;
        modulus = parse_number(m->value, m->line_no);
    }
    const auto* n = section.find("norm");
    std::string norm_text = n != nullptr ? n->value : "euclidean";
    decl.norm_text = norm_text;
    const int norm_line = n != nullptr ? n->line_no : section.line_no;

    std::istringstream in(norm_text);
    std::string word;
    in >> word;
    FinslerPatch patch;
    if (word == "euclidean") {
        double scale = 1.0;
        std::string rest;
        if (std::getline(in, rest) && !trim(rest).empty()) scale = parse_number(trim(rest), norm_line);
        patch = FinslerPatch::constant(domain, NormAtPoint::euclidean(dim, scale), "euclidean");
    } else if (word == "weighted-lp") {
        std::string rest;
        std::getline(in, rest);
        const Vec pw = parse_vector(rest, norm_line);
        if (static_cast<int>(pw.size()) != dim + 1) parse_fail(norm_line, "weighted-lp needs p followed by one weight per coordinate");
        const double p = pw[0];
        Vec w = pw.tail(dim);
        NormAtPoint norm = p == 1.0   ? NormAtPoint::diag_l1(w)
                           : p == 2.0 ? NormAtPoint::diag_l2(w)
                                      : NormAtPoint::diag_linf(w);
        if (p != 1.0 && p != 2.0 && !std::isinf(p)) parse_fail(norm_line, "weighted-lp supports p in {1, 2, inf}");
        patch = FinslerPatch::constant(domain, norm, "weighted-lp");
    } else if (word == "conformal") {
        std::string rest;
        std::getline(in, rest);
        rest = trim(rest);
        if (rest.empty()) parse_fail(norm_line, "conformal norm needs a scale expression");
        ScalarField scale = compile_expression(rest, dim);
        patch = FinslerPatch::varying(
            domain,
            [scale, dim, norm_line](const Vec& x) {
                const double s = scale(x);
                require(s > 0.0, ErrorKind::ValidationError,
                        "conformal scale is nonpositive at a sampled point (declared at line " +
                            std::to_string(norm_line) + ")");
                return NormAtPoint::euclidean(dim, s);
            },
            modulus, "conformal");
    } else {
        parse_fail(norm_line, "unknown norm field '" + word + "'");
    }
    patch.modulus_coeff = modulus;
    // stash the declaration for serialization
    patch.label += ":" + norm_text;
    return patch;
}

inline Polyhedron parse_cell(const SpecSection& section, int dim)
{
    Polyhedron cell = Polyhedron::all_space(dim);
    for (const auto& l : section.lines) {
        if (l.key != "ineq") continue;
        const auto parts = split_rows(l.value);
        if (parts.size() != 2) parse_fail(l.line_no, "ineq needs '<a> ; <c>'");
        const Vec a = parse_vector(parts[0], l.line_no);
        if (static_cast<int>(a.size()) != dim) parse_fail(l.line_no, "inequality normal has wrong dimension");
        cell.add(a, parse_number(trim(parts[1]), l.line_no));
    }
    return cell;
}

inline std::vector<const SpecSection*> pieces_of(const SpecDoc& doc, const std::string& prefix)
{
    std::vector<std::pair<int, const SpecSection*>> found;
    for (const auto& s : doc.sections) {
        if (s.name.rfind(prefix, 0) != 0) continue;
        const std::string tail = s.name.substr(prefix.size());
        try {
            found.push_back({std::stoi(tail), &s});
        } catch (...) {
            parse_fail(s.line_no, "piece section needs a numeric suffix: '" + s.name + "'");
        }
    }
    std::sort(found.begin(), found.end());
    std::vector<const SpecSection*> out;
    for (auto& [i, s] : found) out.push_back(s);
    return out;
}

inline AnyMap parse_map_sections(const SpecDoc& doc, const SpecSection& head, const std::string& piece_prefix,
                                 std::string& builtin_name_out)
{
    const auto* kind_line = head.find("kind");
    if (kind_line == nullptr) parse_fail(head.line_no, "section [" + head.name + "] needs a 'kind'");
    const std::string kind = kind_line->value;

    if (kind == "builtin") {
        const auto* b = head.find("builtin");
        if (b == nullptr) parse_fail(head.line_no, "kind=builtin needs a 'builtin = <name>' line");
        const auto& registry = builtin_registry();
        const auto it = registry.find(b->value);
        if (it == registry.end()) parse_fail(b->line_no, "unknown builtin map '" + b->value + "'");
        builtin_name_out = b->value;
        LipschitzMap m = it->second.map;
        if (const auto* d = head.find("domain")) m.domain = parse_domain(d->value, d->line_no, m.dim_in);
        return m;
    }
    if (kind == "pwa") {
        const auto piece_sections = pieces_of(doc, piece_prefix);
        if (piece_sections.empty()) parse_fail(head.line_no, "kind=pwa needs [" + piece_prefix + "N] sections");
        std::vector<AffinePiece> pieces;
        int dim_in = -1;
        for (const auto* s : piece_sections) {
            const auto* a_line = s->find("A");
            const auto* b_line = s->find("b");
            if (a_line == nullptr || b_line == nullptr) parse_fail(s->line_no, "piece needs 'A' and 'b'");
            AffinePiece p;
            p.A = parse_matrix(a_line->value, a_line->line_no);
            p.b = parse_vector(b_line->value, b_line->line_no);
            if (dim_in < 0) dim_in = static_cast<int>(p.A.cols());
            p.cell = parse_cell(*s, dim_in);
            pieces.push_back(std::move(p));
        }
        Domain domain = Domain::all_space(dim_in);
        if (const auto* d = head.find("domain")) domain = parse_domain(d->value, d->line_no, dim_in);
        try {
            return PwaMap(std::move(pieces), domain);
        } catch (const Error& e) {
            parse_fail(head.line_no, std::string("invalid piecewise map: ") + e.what());
        }
    }
    parse_fail(kind_line->line_no, "unknown map kind '" + kind + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entry construction and validation.
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& known_criteria()
{
    static const std::vector<std::string> names = {"maximal_rank", "hadamard",  "spectral",
                                                   "eps_disc",     "disc_sequence", "half_plane"};
    return names;
}

inline const std::vector<std::string>& known_labels()
{
    static const std::vector<std::string> names = {"positive",        "negative",           "heuristic",
                                                   "inconclusive",    "positive_to_horizon", "negative_signal",
                                                   "heuristic_positive"};
    return names;
}

/** Parse one function-spec document into a validated corpus entry. */
inline CorpusEntry parse_entry(const std::string& text)
{
    using namespace detail;
    const SpecDoc doc = parse_spec_text(text);
    const auto* map_section = doc.find("map");
    if (map_section == nullptr) fail(ErrorKind::ParseError, "document has no [map] section");

    CorpusEntry entry;
    if (const auto* n = map_section->find("name")) entry.name = n->value;
    if (entry.name.empty()) parse_fail(map_section->line_no, "[map] needs a 'name'");

    entry.map = parse_map_sections(doc, *map_section, "piece.", entry.builtin_name);
    const int dim = map_dim_in(entry.map);

    if (!entry.builtin_name.empty()) {
        const auto& def = builtin_registry().at(entry.builtin_name);
        entry.known_clarke = def.known_clarke;
    }

    entry.profile_center = Vec::Zero(dim);
    if (const auto* c = map_section->find("center")) {
        entry.profile_center = parse_vector(c->value, c->line_no);
        if (static_cast<int>(entry.profile_center.size()) != dim)
            parse_fail(c->line_no, "center has wrong dimension");
    }

    {
        Vec lo = Vec::Constant(dim, -3.0), hi = Vec::Constant(dim, 3.0);
        if (const auto* r = map_section->find("region")) {
            const Mat box = parse_matrix(r->value, r->line_no);
            if (box.rows() != 2 || static_cast<int>(box.cols()) != dim)
                parse_fail(r->line_no, "region needs rows '<lo> ; <hi>' of the map dimension");
            lo = box.row(0).transpose();
            hi = box.row(1).transpose();
        }
        entry.eval_region = Region::box(lo, hi);
    }

    if (const auto* inv = doc.find("inverse")) {
        std::string inv_builtin;
        entry.known_inverse = parse_map_sections(doc, *inv, "inverse.piece.", inv_builtin);
        entry.inverse_builtin_name = inv_builtin;
    }

    if (const auto* exp = doc.find("expect")) {
        for (const auto& l : exp->lines) {
            const auto& crit = known_criteria();
            const auto& labels = known_labels();
            if (std::find(crit.begin(), crit.end(), l.key) == crit.end())
                parse_fail(l.line_no, "unknown criterion '" + l.key + "' in [expect]");
            if (std::find(labels.begin(), labels.end(), l.value) == labels.end())
                parse_fail(l.line_no, "unknown verdict label '" + l.value + "' in [expect]");
            entry.expected_verdicts.push_back({l.key, l.value});
        }
    }

    if (const auto* ps = doc.find("patch.source")) {
        entry.source_patch = parse_patch(*ps, dim);
        PatchDecl decl;
        if (const auto* l = ps->find("norm")) decl.norm_text = l->value;
        if (const auto* l = ps->find("domain")) decl.domain_text = l->value;
        if (const auto* l = ps->find("modulus")) decl.modulus_text = l->value;
        entry.source_patch_decl = decl;
    }
    if (const auto* pt = doc.find("patch.target")) {
        entry.target_patch = parse_patch(*pt, map_dim_out(entry.map));
        PatchDecl decl;
        if (const auto* l = pt->find("norm")) decl.norm_text = l->value;
        if (const auto* l = pt->find("domain")) decl.domain_text = l->value;
        if (const auto* l = pt->find("modulus")) decl.modulus_text = l->value;
        entry.target_patch_decl = decl;
    }

    return entry;
}

/** Check entry invariants; throws ValidationError on failure. */
inline void validate_entry(const CorpusEntry& entry, std::uint64_t seed = 2024)
{
    if (std::holds_alternative<PwaMap>(entry.map)) std::get<PwaMap>(entry.map).validate(256, seed);

    if (std::holds_alternative<LipschitzMap>(entry.map)) {
        const auto& m = std::get<LipschitzMap>(entry.map);
        Rng rng(seed);
        if (m.jac_fn) {
            // a.e. differentiability: random points avoid kinks almost surely
            for (int s = 0; s < 16; ++s) {
                const Vec x = entry.eval_region.sample(rng);
                if (!m.domain.contains(x)) continue;
                const Mat J = m.jac_fn(x);
                const double h = 1e-6 * std::max(1.0, x.norm());
                for (int j = 0; j < m.dim_in; ++j) {
                    Vec xp = x, xm = x;
                    xp[j] += h;
                    xm[j] -= h;
                    const Vec fd = (m.eval_fn(xp) - m.eval_fn(xm)) / (2.0 * h);
                    require((fd - J.col(j)).norm() <= 1e-4 * (1.0 + J.col(j).norm()), ErrorKind::ValidationError,
                            "Jacobian oracle disagrees with finite differences for entry " + entry.name);
                }
            }
        }
        if (m.lipschitz_hint > 0.0) {
            for (int s = 0; s < 200; ++s) {
                const Vec x = entry.eval_region.sample(rng);
                const Vec y = entry.eval_region.sample(rng);
                if ((x - y).norm() < 1e-12) continue;
                const double q = (m.eval(x) - m.eval(y)).norm() / (x - y).norm();
                require(q <= m.lipschitz_hint + 1e-9, ErrorKind::ValidationError,
                        "sampled difference quotient exceeds the declared Lipschitz bound for entry " + entry.name);
            }
        }
    }

    if (entry.known_inverse) {
        // f(g(y)) = y on a grid of images y = f(x)
        Rng rng(seed + 1);
        for (int s = 0; s < 64; ++s) {
            const Vec x = entry.eval_region.sample(rng);
            if (!map_domain(entry.map).contains(x)) continue;
            const Vec y = map_eval(entry.map, x);
            if (!map_domain(*entry.known_inverse).contains(y)) continue;
            const Vec x_back = map_eval(*entry.known_inverse, y);
            if (!map_domain(entry.map).contains(x_back)) continue;
            const Vec y_back = map_eval(entry.map, x_back);
            require((y_back - y).norm() <= 1e-8 * (1.0 + y.norm()), ErrorKind::ValidationError,
                    "known inverse fails the round trip for entry " + entry.name);
        }
    }
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_vec_plain(const Vec& v)
{
    std::string out;
    for (int i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += format_17g(v[i]);
    }
    return out;
}

inline std::string format_mat_plain(const Mat& m)
{
    std::string out;
    for (int i = 0; i < m.rows(); ++i) {
        if (i) out += " ; ";
        out += format_vec_plain(m.row(i).transpose());
    }
    return out;
}

inline void serialize_map_sections(std::ostringstream& os, const AnyMap& map, const std::string& head,
                                   const std::string& piece_prefix, const std::string& builtin_name,
                                   const std::string& head_extra = "")
{
    os << "[" << head << "]\n";
    if (!builtin_name.empty()) {
        os << "kind = builtin\n";
        os << "builtin = " << builtin_name << "\n";
        const auto& dom = map_domain(map);
        if (dom.kind == Domain::Kind::Box)
            os << "domain = box " << format_vec_plain(dom.lo) << " ; " << format_vec_plain(dom.hi) << "\n";
        os << head_extra;
        return;
    }
    require(std::holds_alternative<PwaMap>(map), ErrorKind::ValidationError,
            "only piecewise or registry maps can be serialized");
    const auto& pwa = std::get<PwaMap>(map);
    os << "kind = pwa\n";
    if (pwa.domain().kind == Domain::Kind::Box)
        os << "domain = box " << format_vec_plain(pwa.domain().lo) << " ; " << format_vec_plain(pwa.domain().hi)
           << "\n";
    else
        os << "domain = all\n";
    os << head_extra;
    int i = 1;
    for (const auto& p : pwa.pieces()) {
        os << "\n[" << piece_prefix << i++ << "]\n";
        os << "A = " << format_mat_plain(p.A) << "\n";
        os << "b = " << format_vec_plain(p.b) << "\n";
        for (const auto& r : p.cell.rows)
            os << "ineq = " << format_vec_plain(r.a) << " ; " << format_17g(r.c) << "\n";
    }
}

}  // namespace detail

/** Serialize an entry back into the function-spec format. */
inline std::string serialize_entry(const CorpusEntry& entry)
{
    std::ostringstream os;
    os << "[map]\nname = " << entry.name << "\n";
    {
        std::ostringstream head;
        head << "center = " << detail::format_vec_plain(entry.profile_center) << "\n";
        if (entry.eval_region.kind == Region::Kind::Box)
            head << "region = " << detail::format_vec_plain(entry.eval_region.lo) << " ; "
                 << detail::format_vec_plain(entry.eval_region.hi) << "\n";
        std::ostringstream body;
        detail::serialize_map_sections(body, entry.map, "map", "piece.", entry.builtin_name, head.str());
        const std::string text = body.str();
        os << text.substr(text.find('\n') + 1);  // drop the duplicate [map] header
    }

    if (entry.known_inverse) {
        os << "\n";
        detail::serialize_map_sections(os, *entry.known_inverse, "inverse", "inverse.piece.",
                                       entry.inverse_builtin_name);
    }

    if (!entry.expected_verdicts.empty()) {
        os << "\n[expect]\n";
        for (const auto& ev : entry.expected_verdicts) os << ev.criterion << " = " << ev.label << "\n";
    }

    auto emit_patch = [&os](const char* head, const std::optional<PatchDecl>& decl) {
        if (!decl) return;
        os << "\n[" << head << "]\n";
        os << "norm = " << decl->norm_text << "\n";
        os << "domain = " << decl->domain_text << "\n";
        if (!decl->modulus_text.empty()) os << "modulus = " << decl->modulus_text << "\n";
    };
    emit_patch("patch.source", entry.source_patch_decl);
    emit_patch("patch.target", entry.target_patch_decl);
    return os.str();
}

// ---------------------------------------------------------------------------
// Bundled corpus.
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& bundled_corpus_texts()
{
    static const std::vector<std::string> texts = {
        // shear map with an absolute-value kink: f(x, y) = (x + |y|, y)
        R"(# f(x, y) = (x + |y|, y)
[map]
name = shear_abs
kind = pwa
domain = all
center = 0 0
region = -5 -5 ; 5 5

[piece.1]
A = 1 1 ; 0 1
b = 0 0
ineq = 0 -1 ; 0

[piece.2]
A = 1 -1 ; 0 1
b = 0 0
ineq = 0 1 ; 0

[inverse]
kind = pwa
domain = all

[inverse.piece.1]
A = 1 -1 ; 0 1
b = 0 0
ineq = 0 -1 ; 0

[inverse.piece.2]
A = 1 1 ; 0 1
b = 0 0
ineq = 0 1 ; 0

[expect]
maximal_rank = positive
hadamard = positive_to_horizon
spectral = positive
half_plane = negative
)",
        // exponential on the line: invertible onto (0, inf) but not onto R
        R"(# f(x) = e^x
[map]
name = exp1d
kind = builtin
builtin = exp1d
center = 0
region = -3 ; 3

[inverse]
kind = builtin
builtin = exp1d_inverse

[expect]
maximal_rank = heuristic_positive
hadamard = negative_signal
spectral = negative
half_plane = negative
)",
        // strictly increasing with oscillating slope in [1, 3]
        R"(# f(x) = 2x + sin x
[map]
name = twoxsin
kind = builtin
builtin = twoxsin
center = 3.1415926535897931
region = -10 ; 10

[inverse]
kind = builtin
builtin = twoxsin_inverse

[expect]
maximal_rank = heuristic_positive
hadamard = positive_to_horizon
spectral = heuristic_positive
half_plane = negative
)",
        // coupled negative cross: f(x, y) = (-x + 0.3|y|, -y + 0.3|x|)
        R"(# f(x, y) = (-x + 0.3|y|, -y + 0.3|x|)
[map]
name = neg_cross
kind = pwa
domain = all
center = 0 0
region = -5 -5 ; 5 5

[piece.1]
A = -1 0.3 ; 0.3 -1
b = 0 0
ineq = -1 0 ; 0
ineq = 0 -1 ; 0

[piece.2]
A = -1 -0.3 ; 0.3 -1
b = 0 0
ineq = -1 0 ; 0
ineq = 0 1 ; 0

[piece.3]
A = -1 0.3 ; -0.3 -1
b = 0 0
ineq = 1 0 ; 0
ineq = 0 -1 ; 0

[piece.4]
A = -1 -0.3 ; -0.3 -1
b = 0 0
ineq = 1 0 ; 0
ineq = 0 1 ; 0

[inverse]
kind = builtin
builtin = neg_cross_inverse

[expect]
maximal_rank = positive
hadamard = positive_to_horizon
spectral = positive
half_plane = positive
)"};
    return texts;
}

inline std::vector<CorpusEntry> bundled_corpus()
{
    std::vector<CorpusEntry> entries;
    for (const auto& text : bundled_corpus_texts()) {
        CorpusEntry e = parse_entry(text);
        validate_entry(e);
        entries.push_back(std::move(e));
    }
    return entries;
}

/**
 * Load corpus entries. "builtin" (or empty) returns the bundled set; a
 * directory loads every *.spec file in name order; anything else is read
 * as a single function-spec file.
 */
inline std::vector<CorpusEntry> load_corpus(const std::string& path)
{
    namespace fs = std::filesystem;
    if (path.empty() || path == "builtin") return bundled_corpus();

    auto load_file = [](const fs::path& p) {
        std::ifstream in(p);
        require(in.good(), ErrorKind::ParseError, "cannot open function spec '" + p.string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        CorpusEntry e = parse_entry(buf.str());
        validate_entry(e);
        return e;
    };

    std::vector<CorpusEntry> entries;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& de : fs::directory_iterator(path))
            if (de.path().extension() == ".spec") files.push_back(de.path());
        std::sort(files.begin(), files.end());
        require(!files.empty(), ErrorKind::ParseError, "corpus directory contains no .spec files: " + path);
        for (const auto& f : files) entries.push_back(load_file(f));
        return entries;
    }
    entries.push_back(load_file(path));
    return entries;
}

/** Bundled corpus, or the directory named by LIPINV_CORPUS_DIR when set. */
inline std::vector<CorpusEntry> resolve_corpus()
{
    const char* dir = std::getenv("LIPINV_CORPUS_DIR");
    if (dir != nullptr && *dir != '\0') return load_corpus(dir);
    return bundled_corpus();
}

/** Find a corpus entry by name in the resolved corpus. */
inline CorpusEntry find_corpus_entry(const std::string& name)
{
    auto entries = resolve_corpus();
    for (auto& e : entries)
        if (e.name == name) return std::move(e);
    fail(ErrorKind::ParseError, "no corpus entry named '" + name + "'");
}

}  // namespace lipinv

#endif  // LIPINV_CORPUS_HPP
