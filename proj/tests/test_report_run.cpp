#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include <lipinv/run.hpp>

namespace {

using namespace lipinv;

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag)
    {
        path = std::filesystem::temp_directory_path() / ("lipinv_run_" + tag);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("float formatting survives a parse round trip", "[report][format]")
{
    for (double v : {0.1, 1.0 / 3.0, 2.0 / (1.0 + std::sqrt(5.0)), 1e-300, 6.02214076e23, -0.0, 42.0}) {
        const std::string s = format_17g(v);
        REQUIRE(std::stod(s) == v);
    }
}

TEST_CASE("report dumps are deterministic and order their keys", "[report][json]")
{
    Json j = Json::object();
    j["zeta"] = 1.0 / 3.0;
    j["alpha"] = Json{{"nested", Json::array({1.5, 2.5, Json("text")})}};
    j["mid"] = true;
    j["null_entry"] = nullptr;
    j["count"] = 7;
    const std::string once = dump_report(j);
    const std::string twice = dump_report(j);
    REQUIRE(once == twice);
    REQUIRE(once.back() == '\n');
    // keys are emitted in sorted order regardless of insertion
    REQUIRE(once.find("\"alpha\"") < once.find("\"count\""));
    REQUIRE(once.find("\"count\"") < once.find("\"mid\""));
    REQUIRE(once.find("\"mid\"") < once.find("\"zeta\""));
    // numeric payloads re-parse to identical values
    const Json back = Json::parse(once);
    REQUIRE(back["zeta"].get<double>() == 1.0 / 3.0);
    REQUIRE(back["alpha"]["nested"][1].get<double>() == 2.5);
}

TEST_CASE("series files carry a labeled header and full-precision columns", "[report][series]")
{
    const std::string s = format_series("t", "value", {1.0, 2.0}, {0.1, 0.2});
    REQUIRE(s.rfind("# t value\n", 0) == 0);
    REQUIRE(s.find("0.10000000000000001") != std::string::npos);  // 0.1 at 17 digits
    REQUIRE_THROWS_AS(format_series("a", "b", {1.0}, {}), Error);

    RadialProfile p;
    p.kind = RadialProfile::Kind::CoNorm;
    p.radii = {1.0};
    p.values = {0.5};
    REQUIRE(profile_series(p).rfind("# t value\n", 0) == 0);
}

TEST_CASE("text files land in freshly created directories", "[report][io]")
{
    TempDir tmp("write");
    const auto nested = tmp.path / "a" / "b" / "c.txt";
    write_text_file(nested, "payload");
    REQUIRE(slurp(nested) == "payload");
}

TEST_CASE("summary lines compress a certificate to one line", "[report][summary]")
{
    Certificate c = Certificate::make("spectral", Verdict::Positive, "positive");
    c.note("floor exceeds the disc radius");
    REQUIRE(summary_line(c) == "[spectral] positive — floor exceeds the disc radius");
    Certificate h = Certificate::make("maximal_rank", Verdict::Heuristic, "heuristic_positive");
    REQUIRE(summary_line(h) == "[maximal_rank] heuristic (heuristic_positive)");
}

TEST_CASE("radii ranges parse with defaults, explicit steps, and endpoint closure", "[run][radii]")
{
    const auto def = parse_radii("1..10");
    REQUIRE(def.size() == 21);
    REQUIRE(def.front() == 1.0);
    REQUIRE(def.back() == 10.0);
    REQUIRE(def[1] == Catch::Approx(1.45));

    const auto stepped = parse_radii("1..2..0.5");
    REQUIRE(stepped.size() == 3);
    REQUIRE(stepped[1] == 1.5);

    const auto closed = parse_radii("0.5..2..0.7");
    REQUIRE(closed.back() == 2.0);  // endpoint appended when the step overshoots

    for (const char* bad : {"5..1", "1..2..-1", "1", "a..b", "1..2..3..4", "1x..2", "1..2y"}) {
        try {
            parse_radii(bad);
            FAIL(std::string("expected a parse failure for: ") + bad);
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::ParseError);
        }
    }
}

TEST_CASE("map sources resolve corpus names and reject the unknown", "[run][source]")
{
    const CorpusEntry e = load_map_source("corpus:shear_abs");
    REQUIRE(e.name == "shear_abs");
    REQUIRE_THROWS_AS(load_map_source("corpus:nope"), Error);
    REQUIRE_THROWS_AS(load_map_source(""), Error);
}

TEST_CASE("the certify runner writes a report and exits cleanly", "[run][certify]")
{
    TempDir tmp("certify");
    RunConfig cfg;
    cfg.subcommand = "certify";
    cfg.map_source = "corpus:shear_abs";
    cfg.criteria = {"maximal_rank", "hadamard"};
    cfg.radii_text = "1..4";
    cfg.samples = 40;
    cfg.grid = 21;
    cfg.seed = 7;
    cfg.out_dir = tmp.path.string();
    cfg.no_timestamp = true;
    REQUIRE(run(cfg) == 0);

    const Json report = Json::parse(slurp(tmp.path / "report.json"));
    REQUIRE(report["map"] == "shear_abs");
    REQUIRE_FALSE(report.contains("generated_at"));
    REQUIRE(report["certificates"].size() == 2);
    REQUIRE(report["certificates"][0]["criterion"] == "maximal_rank");
    REQUIRE(report["certificates"][0]["verdict"] == "positive");
    REQUIRE(report["config"]["seed"] == 7);
    REQUIRE(std::filesystem::exists(tmp.path / "profile.dat"));

    // identical configuration, identical bytes
    TempDir tmp2("certify2");
    RunConfig cfg2 = cfg;
    cfg2.out_dir = tmp2.path.string();
    REQUIRE(run(cfg2) == 0);
    REQUIRE(slurp(tmp.path / "report.json") == slurp(tmp2.path / "report.json"));
}

TEST_CASE("the profile runner emits matching table and series files", "[run][profile]")
{
    TempDir tmp("profile");
    RunConfig cfg;
    cfg.subcommand = "profile";
    cfg.map_source = "corpus:exp1d";
    cfg.radii_text = "1..3..1";
    cfg.samples = 40;
    cfg.out_dir = tmp.path.string();
    cfg.no_timestamp = true;
    REQUIRE(run(cfg) == 0);
    const Json j = Json::parse(slurp(tmp.path / "profile.json"));
    REQUIRE(j["profile"]["radii"].size() == 3);
    const std::string dat = slurp(tmp.path / "profile.dat");
    REQUIRE(dat.rfind("# t value\n", 0) == 0);
    // the series and the json carry the same final value
    const double last = j["profile"]["values"][2].get<double>();
    REQUIRE(last == Catch::Approx(std::exp(-3.0)).margin(1e-3));
}

TEST_CASE("the invert runner requires a target and records the trace", "[run][invert]")
{
    TempDir tmp("invert");
    RunConfig cfg;
    cfg.subcommand = "invert";
    cfg.map_source = "corpus:shear_abs";
    cfg.out_dir = tmp.path.string();
    cfg.no_timestamp = true;
    REQUIRE(run(cfg) == 2);  // no target given

    cfg.target = {3.0, -2.0};
    REQUIRE(run(cfg) == 0);
    const Json j = Json::parse(slurp(tmp.path / "invert.json"));
    REQUIRE(j["result"]["status"] == "converged");
    REQUIRE(j["result"]["preimage"][0].get<double>() == Catch::Approx(1.0).margin(1e-8));
    REQUIRE(j["result"]["preimage"][1].get<double>() == Catch::Approx(-2.0).margin(1e-8));
    REQUIRE(std::filesystem::exists(tmp.path / "trace.dat"));
    const std::string trace = slurp(tmp.path / "trace.dat");
    REQUIRE(trace.rfind("# step s residual step_size newton_iters\n", 0) == 0);
}

TEST_CASE("the corpus-test runner passes the bundled expectations", "[run][corpus]")
{
    TempDir tmp("corpus");
    RunConfig cfg;
    cfg.subcommand = "corpus-test";
    cfg.samples = 200;
    cfg.grid = 21;
    cfg.seed = 2024;
    cfg.out_dir = tmp.path.string();
    cfg.no_timestamp = true;
    REQUIRE(run(cfg) == 0);
    const Json j = Json::parse(slurp(tmp.path / "corpus_test.json"));
    REQUIRE(j["results"].size() == 16);
    for (const auto& row : j["results"]) REQUIRE(row["ok"].get<bool>());
}

TEST_CASE("invalid configuration surfaces as exit code 2", "[run][errors]")
{
    RunConfig bad_tol;
    bad_tol.subcommand = "certify";
    bad_tol.map_source = "corpus:shear_abs";
    bad_tol.tol = -1.0;
    REQUIRE(run(bad_tol) == 2);

    RunConfig bad_criterion;
    bad_criterion.subcommand = "certify";
    bad_criterion.map_source = "corpus:shear_abs";
    bad_criterion.criteria = {"astrology"};
    REQUIRE(run(bad_criterion) == 2);

    RunConfig bad_source;
    bad_source.subcommand = "certify";
    bad_source.map_source = "/no/such/file.spec";
    REQUIRE(run(bad_source) == 2);
}
