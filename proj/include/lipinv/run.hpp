/**
 * Batch pipeline behind the command-line tool: resolve a map source, run
 * the selected certificates or an inversion, emit one-line summaries plus
 * deterministic machine-readable outputs.
 *
 * Exit codes: 0 for a completed run regardless of verdicts, 2 for spec
 * parse failures, 3 for numeric failures. corpus-test exits 1 when any
 * expected verdict mismatches.
 */

#ifndef LIPINV_RUN_HPP
#define LIPINV_RUN_HPP

#include <iostream>

#include "corpus.hpp"
#include "inverter.hpp"
#include "report.hpp"

namespace lipinv {

struct RunConfig {
    std::string subcommand = "certify";  // certify | invert | profile | corpus-test
    std::string map_source;              // "corpus:<name>" or a function-spec path
    std::vector<std::string> criteria;   // empty = all region criteria
    std::string radii_text = "1..10";
    int samples = 200;
    int grid = 21;
    std::uint64_t seed = 2024;  // defaulted here so the echoed config is always explicit
    double tol = 1e-10;
    double eps = kSpectralEpsDefault;
    std::string out_dir;  // empty = print only
    int threads = 0;      // 0 = available parallelism
    bool no_timestamp = false;
    std::vector<double> target;
    std::vector<double> from;
};

/** Radii syntax a..b[..step]; default step (b-a)/20. */
inline std::vector<double> parse_radii(const std::string& text)
{
    const auto fail_syntax = [&]() -> void {
        fail(ErrorKind::ParseError, "bad radii '" + text + "': expected a..b[..step]");
    };
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = text.find("..", pos);
        if (dot == std::string::npos) {
            parts.push_back(text.substr(pos));
            break;
        }
        parts.push_back(text.substr(pos, dot - pos));
        pos = dot + 2;
    }
    if (parts.size() < 2 || parts.size() > 3) fail_syntax();
    double a = 0, b = 0, step = 0;
    try {
        std::size_t used = 0;
        a = std::stod(parts[0], &used);
        if (used != parts[0].size()) fail_syntax();
        b = std::stod(parts[1], &used);
        if (used != parts[1].size()) fail_syntax();
        step = parts.size() == 3 ? std::stod(parts[2], &used) : (b - a) / 20.0;
        if (parts.size() == 3 && used != parts[2].size()) fail_syntax();
    } catch (const std::logic_error&) {
        fail_syntax();
    }
    require(b > a && step > 0.0, ErrorKind::ParseError, "radii range needs a < b and step > 0");
    std::vector<double> out;
    for (double v = a; v <= b + 1e-9 * step; v += step) out.push_back(std::min(v, b));
    if (b - out.back() > 1e-9 * step)
        out.push_back(b);
    else
        out.back() = b;  // snap accumulated rounding onto the endpoint
    return out;
}

inline CorpusEntry load_map_source(const std::string& source)
{
    require(!source.empty(), ErrorKind::ParseError, "no map source given (use corpus:<name> or a spec path)");
    if (source.rfind("corpus:", 0) == 0) return find_corpus_entry(source.substr(7));
    auto entries = load_corpus(source);
    require(entries.size() == 1, ErrorKind::ParseError, "map source must resolve to a single function spec");
    return std::move(entries.front());
}

namespace detail {

inline Certificate run_criterion(const std::string& name, const CorpusEntry& entry, const RunConfig& cfg,
                                 const std::vector<double>& radii, RadialProfile* profile_out)
{
    const AnyMap& map = entry.map;
    const Region& region = entry.eval_region;
    if (name == "maximal_rank") return check_maximal_rank_region(map, region, cfg.samples, cfg.grid, cfg.seed);
    if (name == "hadamard") {
        const FinslerPatch* src = entry.source_patch ? &*entry.source_patch : nullptr;
        const FinslerPatch* dst = entry.target_patch ? &*entry.target_patch : nullptr;
        RadialProfile profile = radial_profile(map, entry.profile_center, radii, RadialProfile::Kind::CoNorm,
                                               cfg.samples, cfg.grid, cfg.seed, src, dst);
        if (profile_out != nullptr) *profile_out = profile;
        return hadamard_verdict(profile);
    }
    if (name == "spectral" || name == "eps_disc")
        return spectral_eps_disc(map, region, cfg.eps, cfg.samples, cfg.grid, cfg.seed);
    if (name == "disc_sequence")
        return disc_sequence_injectivity(map, DiscSpec::dyadic(8), region, cfg.samples, cfg.grid, cfg.seed);
    if (name == "half_plane") return half_plane_injectivity(map, region, cfg.samples, cfg.grid, cfg.seed);
    fail(ErrorKind::ParseError, "unknown criterion '" + name + "'");
}

inline Json config_echo(const RunConfig& cfg, const std::vector<double>& radii)
{
    Json j = Json::object();
    j["subcommand"] = cfg.subcommand;
    if (!cfg.map_source.empty()) j["map"] = cfg.map_source;
    j["radii"] = radii;
    j["samples"] = cfg.samples;
    j["grid"] = cfg.grid;
    j["seed"] = cfg.seed;
    j["tol"] = cfg.tol;
    j["eps"] = cfg.eps;
    return j;
}

inline int run_certify(const RunConfig& cfg)
{
    const CorpusEntry entry = load_map_source(cfg.map_source);
    const std::vector<double> radii = parse_radii(cfg.radii_text);
    std::vector<std::string> selected = cfg.criteria;
    if (selected.empty()) selected = {"maximal_rank", "hadamard", "spectral", "disc_sequence", "half_plane"};

    Json report = Json::object();
    report["config"] = config_echo(cfg, radii);
    report["map"] = entry.name;
    if (!cfg.no_timestamp) report["generated_at"] = timestamp_utc();
    Json certs = Json::array();

    std::optional<RadialProfile> profile;
    for (const auto& name : selected) {
        RadialProfile p;
        const Certificate cert = run_criterion(name, entry, cfg, radii, &p);
        if (name == "hadamard") profile = p;
        std::cout << summary_line(cert) << '\n';
        certs.push_back(cert.to_json());
    }
    report["certificates"] = certs;

    if (!cfg.out_dir.empty()) {
        const std::filesystem::path dir(cfg.out_dir);
        write_text_file(dir / "report.json", dump_report(report));
        if (profile) write_text_file(dir / "profile.dat", profile_series(*profile));
        std::cout << "report written to " << (dir / "report.json").string() << '\n';
    }
    return 0;
}

inline int run_profile(const RunConfig& cfg)
{
    const CorpusEntry entry = load_map_source(cfg.map_source);
    const std::vector<double> radii = parse_radii(cfg.radii_text);
    Vec center = entry.profile_center;
    if (!cfg.from.empty()) center = make_vec(cfg.from);
    const FinslerPatch* src = entry.source_patch ? &*entry.source_patch : nullptr;
    const FinslerPatch* dst = entry.target_patch ? &*entry.target_patch : nullptr;
    const RadialProfile profile = radial_profile(entry.map, center, radii, RadialProfile::Kind::CoNorm, cfg.samples,
                                                 cfg.grid, cfg.seed, src, dst);
    std::cout << "# t value\n";
    for (std::size_t i = 0; i < profile.radii.size(); ++i)
        std::cout << format_17g(profile.radii[i]) << ' ' << format_17g(profile.values[i]) << '\n';

    if (!cfg.out_dir.empty()) {
        const std::filesystem::path dir(cfg.out_dir);
        Json report = Json::object();
        report["config"] = config_echo(cfg, radii);
        report["map"] = entry.name;
        if (!cfg.no_timestamp) report["generated_at"] = timestamp_utc();
        report["profile"] = profile.to_json();
        write_text_file(dir / "profile.json", dump_report(report));
        write_text_file(dir / "profile.dat", profile_series(profile));
    }
    return 0;
}

inline int run_invert(const RunConfig& cfg)
{
    const CorpusEntry entry = load_map_source(cfg.map_source);
    require(!cfg.target.empty(), ErrorKind::ParseError, "invert needs --target");
    const Vec y = make_vec(cfg.target);
    const Vec x0 = cfg.from.empty() ? entry.profile_center : make_vec(cfg.from);
    require(static_cast<int>(y.size()) == map_dim_out(entry.map), ErrorKind::DimensionMismatch,
            "target dimension does not match the map");

    const InversionResult result = lift_path(entry.map, x0, y, cfg.tol, 2000);
    std::cout << "status = " << lift_status_name(result.status) << '\n';
    std::cout << "x* =";
    for (int i = 0; i < result.preimage.size(); ++i) std::cout << ' ' << format_17g(result.preimage[i]);
    std::cout << '\n';
    std::cout << "residual = " << format_17g(result.final_residual()) << '\n';
    std::cout << "steps = " << (result.trace.empty() ? 0 : result.trace.back().step_count) << '\n';

    if (!cfg.out_dir.empty()) {
        const std::filesystem::path dir(cfg.out_dir);
        Json report = Json::object();
        report["config"] = config_echo(cfg, {});
        report["map"] = entry.name;
        if (!cfg.no_timestamp) report["generated_at"] = timestamp_utc();
        report["result"] = result.to_json();
        write_text_file(dir / "invert.json", dump_report(report));
        write_text_file(dir / "trace.dat", trace_series(result));
    }
    return 0;
}

inline int run_corpus_test(const RunConfig& cfg)
{
    const auto entries = resolve_corpus();
    const std::vector<double> radii = parse_radii(cfg.radii_text);
    int mismatches = 0;
    Json table = Json::array();
    for (const auto& entry : entries) {
        for (const auto& ev : entry.expected_verdicts) {
            const Certificate cert = run_criterion(ev.criterion, entry, cfg, radii, nullptr);
            const bool ok = cert.label == ev.label || verdict_name(cert.verdict) == ev.label;
            std::cout << entry.name << ' ' << ev.criterion << ": " << cert.label
                      << (ok ? "" : "  MISMATCH (expected " + ev.label + ")") << '\n';
            if (!ok) mismatches += 1;
            table.push_back(Json{{"map", entry.name},
                                 {"criterion", ev.criterion},
                                 {"expected", ev.label},
                                 {"got", cert.label},
                                 {"ok", ok}});
        }
    }
    std::cout << (mismatches == 0 ? "corpus-test: all expectations met"
                                  : "corpus-test: " + std::to_string(mismatches) + " mismatch(es)")
              << '\n';
    if (!cfg.out_dir.empty()) {
        Json report = Json::object();
        report["config"] = config_echo(cfg, radii);
        if (!cfg.no_timestamp) report["generated_at"] = timestamp_utc();
        report["results"] = table;
        write_text_file(std::filesystem::path(cfg.out_dir) / "corpus_test.json", dump_report(report));
    }
    return mismatches == 0 ? 0 : 1;
}

}  // namespace detail

/** Execute the configured pipeline; returns the process exit status. */
inline int run(const RunConfig& cfg)
{
    try {
        require(cfg.tol > 0.0 && cfg.eps > 0.0, ErrorKind::ValidationError, "tolerances must be positive");
        if (cfg.threads > 0) set_worker_count(cfg.threads);
        if (cfg.subcommand == "certify") return detail::run_certify(cfg);
        if (cfg.subcommand == "profile") return detail::run_profile(cfg);
        if (cfg.subcommand == "invert") return detail::run_invert(cfg);
        if (cfg.subcommand == "corpus-test") return detail::run_corpus_test(cfg);
        fail(ErrorKind::ParseError, "unknown subcommand '" + cfg.subcommand + "'");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ValidationError) ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace lipinv

#endif  // LIPINV_RUN_HPP
