#include <doctest.h>

#include "diforge/cli.hpp"
#include "diforge/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace diforge;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("diforge-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }

    static int& counter() {
        static int c = 0;
        return c;
    }
};

PrimitiveCodebook sample_book() {
    CodebookParams p;
    p.n = 16;
    p.L = 2;
    p.delta = 0.25;
    p.radii = {0.6, 0.35};
    p.min_proj_dist = 0.2;
    p.branching = {3, 4};
    p.seed = 91;
    p.mode = BuildMode::Custom;
    return build_primitive(p);
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out, err;
    int rc = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

} // namespace

TEST_CASE("codebook json round-trip preserves every codeword") {
    auto cb = sample_book();
    json j = codebook_to_json(cb);
    CHECK(j["schema_version"] == 1);
    CHECK(j["params"]["n"] == 16);
    CHECK(j["params"]["mode"] == "custom");
    CHECK(j["nodes"].size() == 3 + 12); // layer-1 nodes plus leaves

    auto back = codebook_from_json(j);
    CHECK(back.params.n == cb.params.n);
    CHECK(back.params.radii == cb.params.radii);
    CHECK(back.leaf_ids.size() == cb.leaf_ids.size());
    for (const auto& id : cb.leaf_ids) {
        Vec a = codeword_vector(cb, id);
        Vec b = codeword_vector(back, id);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
    CHECK(verify_codebook(back).ok);
}

TEST_CASE("save and load through files") {
    TempDir dir;
    auto cb = sample_book();
    save_codebook(cb, dir.file("book.json"));
    auto back = load_codebook(dir.file("book.json"));
    CHECK(back.params.seed == cb.params.seed);
    CHECK(back.nodes.size() == cb.nodes.size());

    CHECK_THROWS_AS(load_codebook(dir.file("missing.json")), UsageError);

    std::ofstream(dir.file("garbage.json")) << "not json at all";
    CHECK_THROWS_AS(load_codebook(dir.file("garbage.json")), UsageError);
}

TEST_CASE("atomic_write leaves no temp file behind") {
    TempDir dir;
    atomic_write(dir.file("x.txt"), "payload");
    std::ifstream in(dir.file("x.txt"));
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == "payload");
    CHECK(!fs::exists(dir.file("x.txt") + ".tmp"));
}

TEST_CASE("estimate serialization carries the verdict") {
    auto est = make_estimate(0, 100, 1e-12);
    json j = to_json(est);
    CHECK(j["p_hat"] == 0.0);
    CHECK(j["trials"] == 100);
    CHECK(j["ci"].size() == 2);
    CHECK(j["zero_failure_regime"] == true);
    CHECK(j["verdict"] == "ok");

    auto bad = make_estimate(50, 100, 1e-4);
    CHECK(to_json(bad)["verdict"] == "violation");
}

TEST_CASE("cli: build, verify, report round-trip") {
    TempDir dir;
    std::string book = dir.file("book.json");
    std::string out, err;

    int rc = cli({"build", "--n", "32", "--L", "2", "--delta", "0.2", "--mode",
                  "custom", "--radii", "0.6,0.35", "--d", "0.2", "--branching", "3,3",
                  "--seed", "7", "--out", book},
                 &out, &err);
    CHECK(rc == 0);
    CHECK(fs::exists(book));

    rc = cli({"verify", "--in", book}, &out, &err);
    CHECK(rc == 0);
    json report = json::parse(out);
    CHECK(report["ok"] == true);

    rc = cli({"verify", "--in", book, "--format", "table"}, &out, &err);
    CHECK(rc == 0);
    CHECK(out.find("overall: ok") != std::string::npos);

    rc = cli({"report", "--in", book}, &out, &err);
    CHECK(rc == 0);
    json rep = json::parse(out);
    CHECK(rep["params"]["n"] == 32);
    CHECK(rep["expurgation"]["total"] == 9);
    CHECK(rep["rate"]["linear_rate"].is_number());
}

TEST_CASE("cli: tampering with a stored codebook fails verification") {
    TempDir dir;
    std::string book = dir.file("book.json");
    CHECK(cli({"build", "--n", "32", "--L", "2", "--delta", "0.2", "--mode", "custom",
               "--radii", "0.6,0.35", "--d", "0.2", "--branching", "3,3", "--seed",
               "7", "--out", book}) == 0);

    json j;
    {
        std::ifstream in(book);
        in >> j;
    }
    // stretch one direction: breaks the layer radius and the sphere identity
    for (auto& node : j["nodes"]) {
        if (node["id_path"].size() == 1) {
            for (auto& c : node["direction"]) c = c.get<double>() * 1.5;
            break;
        }
    }
    std::ofstream(book) << j;

    std::string out, err;
    int rc = cli({"verify", "--in", book}, &out, &err);
    CHECK(rc == 5);
    json report = json::parse(out);
    CHECK(report["ok"] == false);
    CHECK(report["failures"].size() > 0);
}

TEST_CASE("cli: simulate emits reproducible json-lines records") {
    TempDir dir;
    std::string book = dir.file("book.json");
    CHECK(cli({"build", "--n", "32", "--L", "2", "--delta", "0.2", "--mode", "custom",
               "--radii", "0.6,0.35", "--d", "0.2", "--branching", "3,3", "--seed",
               "7", "--out", book}) == 0);

    auto run_once = [&](std::string& payload) {
        std::string err;
        return cli({"simulate", "--in", book, "--experiment", "missed-id", "--t",
                    "2.0", "--trials", "500", "--trial-seed", "3"},
                   &payload, &err);
    };
    std::string a, b;
    CHECK(run_once(a) == 0);
    CHECK(run_once(b) == 0);

    // line 1 is metadata (timestamped), line 2 the record; records must be
    // byte-identical across runs
    auto second_line = [](const std::string& s) {
        auto pos = s.find('\n');
        return s.substr(pos + 1);
    };
    CHECK(second_line(a) == second_line(b));

    json record = json::parse(second_line(a));
    CHECK(record["record"] == "experiment");
    CHECK(record["experiment"] == "missed-id");
    CHECK(record["inputs"]["trials"] == 500);
    CHECK(record["p_hat"].is_number());
    CHECK(record["ci"].size() == 2);
    CHECK(record["bound"].is_number());
    CHECK((record["verdict"] == "ok" || record["verdict"] == "violation"));

    // false-id with an explicit pair
    std::string out, err;
    int rc = cli({"simulate", "--in", book, "--experiment", "false-id", "--t", "0.1",
                  "--trials", "200", "--tested", "0,0", "--transmitted", "1,0"},
                 &out, &err);
    CHECK(rc == 0);

    // concentration without a codebook
    rc = cli({"simulate", "--experiment", "concentration", "--n", "64", "--t", "1.0",
              "--trials", "1000", "--channel", "poisson", "--A", "0.5"},
             &out, &err);
    CHECK(rc == 0);
    json crec = json::parse(second_line(out));
    CHECK(crec["inputs"]["n"] == 64);
}

TEST_CASE("cli: sweep and reduce-demo formats") {
    std::string out, err;
    int rc = cli({"sweep-rr", "--n", "64", "--L", "2", "--delta", "0.5", "--E-grid",
                  "0.05,0.1", "--branching", "2,2", "--gen-separation", "0.3",
                  "--seed", "5", "--format", "csv"},
                 &out, &err);
    CHECK(rc == 0);
    CHECK(out.find("E,t,lambda,retained") == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 3); // header + 2 rows

    // a grid point beyond the regime shows up as a row status, not a crash
    rc = cli({"sweep-rr", "--n", "64", "--L", "2", "--delta", "0.5", "--E-grid",
              "0.05,0.9", "--branching", "2,2", "--gen-separation", "0.3", "--seed",
              "5"},
             &out, &err);
    CHECK(rc == 0);
    json sweep = json::parse(out);
    CHECK(sweep["rows"][1]["status"] == "regime-violation");

    rc = cli({"reduce-demo", "--A", "1.0", "--x", "0.3,0.7", "--trials", "2000",
              "--trial-seed", "2"},
             &out, &err);
    CHECK(rc == 0);
    json demo = json::parse(out);
    CHECK(demo["rows"].size() == 2);
    CHECK(demo["induced_interval"][0].get<double>() ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("cli: exit codes map the documented failure classes") {
    TempDir dir;
    std::string out, err;

    // usage: missing required flag
    CHECK(cli({"build", "--L", "2", "--out", dir.file("x.json")}, &out, &err) == 2);
    // usage: domain violation surfaces the offending parameter
    CHECK(cli({"build", "--n", "32", "--delta", "1.5", "--branching", "2,2", "--out",
               dir.file("x.json")},
              &out, &err) == 2);
    CHECK(err.find("delta") != std::string::npos);
    // usage: unknown subcommand
    CHECK(cli({"frobnicate"}, &out, &err) == 2);
    // usage: trials = 0 propagates the estimator precondition
    CHECK(cli({"build", "--n", "32", "--L", "2", "--mode", "custom", "--radii",
               "0.6,0.35", "--d", "0.2", "--branching", "3,3", "--seed", "7", "--out",
               dir.file("b.json")},
              &out, &err) == 0);
    CHECK(cli({"simulate", "--in", dir.file("b.json"), "--experiment", "missed-id",
               "--t", "1.0", "--trials", "0"},
              &out, &err) == 2);

    // placement: separation impossible on the requested sphere
    CHECK(cli({"build", "--n", "16", "--L", "1", "--mode", "custom", "--radii", "1.0",
               "--d", "1.99", "--branching", "8", "--seed", "1", "--out",
               dir.file("y.json")},
              &out, &err) == 3);

    // regime violation
    CHECK(cli({"build", "--n", "64", "--L", "2", "--delta", "0.5", "--mode",
               "rate-reliability", "--E", "0.9", "--branching", "2,2", "--out",
               dir.file("z.json")},
              &out, &err) == 4);

    // help exits cleanly
    CHECK(cli({"--help"}, &out, &err) == 0);
    CHECK(out.find("build") != std::string::npos);
}
