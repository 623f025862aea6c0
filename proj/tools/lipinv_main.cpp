/** Command-line front end: certify | profile | invert | corpus-test. */

#include <CLI11.hpp>

#include <lipinv/lipinv.hpp>

namespace {

std::vector<std::string> split_csv(const std::string& text)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<double> split_numbers(const std::string& text)
{
    std::vector<double> out;
    std::string cur;
    for (char c : text) {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stod(cur));
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    lipinv::RunConfig cfg;
    std::string criteria_csv, target_text, from_text;

    CLI::App app{"Invertibility certificates and path-lifting inversion for locally Lipschitz maps"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--map", cfg.map_source, "map source: corpus:<name> or a function-spec path");
        sub->add_option("--samples", cfg.samples, "random samples per region scan")->check(CLI::PositiveNumber);
        sub->add_option("--grid", cfg.grid, "barycentric grid resolution")->check(CLI::Range(2, 100000));
        sub->add_option("--seed", cfg.seed, "RNG seed, echoed in every report");
        sub->add_option("--tol", cfg.tol, "numerical tolerance");
        sub->add_option("--out", cfg.out_dir, "directory for machine-readable outputs");
        sub->add_option("--threads", cfg.threads, "worker threads (0 = available parallelism)");
        sub->add_flag("--no-timestamp", cfg.no_timestamp, "omit timestamps so outputs are byte-reproducible");
    };

    CLI::App* certify = app.add_subcommand("certify", "run invertibility certificates on a map");
    add_common(certify);
    certify->add_option("--criteria", criteria_csv, "comma-separated: maximal_rank,hadamard,spectral,disc_sequence,half_plane");
    certify->add_option("--radii", cfg.radii_text, "profile radii a..b[..step], default step (b-a)/20");

    CLI::App* profile = app.add_subcommand("profile", "emit the radial co-norm profile m(t)");
    add_common(profile);
    profile->add_option("--radii", cfg.radii_text, "profile radii a..b[..step]");
    profile->add_option("--from", from_text, "profile center (comma-separated coordinates)");

    CLI::App* invert = app.add_subcommand("invert", "invert a target point by path lifting");
    add_common(invert);
    invert->add_option("--target", target_text, "target point (comma-separated coordinates)")->required();
    invert->add_option("--from", from_text, "starting preimage guess");

    CLI::App* corpus = app.add_subcommand("corpus-test", "check every corpus entry against its expected verdicts");
    add_common(corpus);
    corpus->add_option("--radii", cfg.radii_text, "profile radii a..b[..step]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.criteria = split_csv(criteria_csv);
    try {
        cfg.target = split_numbers(target_text);
        cfg.from = split_numbers(from_text);
    } catch (const std::exception&) {
        std::cerr << "error: --target/--from expect comma-separated numbers\n";
        return 2;
    }
    return lipinv::run(cfg);
}
