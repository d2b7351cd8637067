#include "spatial_ak/commands.hpp"
#include "spatial_ak/config.hpp"
#include "spatial_ak/errors.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace spatial_ak;
namespace fs = std::filesystem;

namespace {

const char* kHomogeneous = R"(schema_version = 1

[grid]
n_points = 64

[params]
sigma = 1
rho = 1
gamma = 0.5
q = 0

[A]
kind = constant
value = 1

[eta]
kind = constant
value = 1

[K0]
kind = cosine
base = 1
amplitude = 0.4
mode = 1

[verify]
seed = 5
n_perturbations = 6
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

struct Sandbox {
    fs::path root;
    Sandbox() {
        static int counter = 0;
        root = fs::temp_directory_path() / ("spatial_ak_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~Sandbox() { fs::remove_all(root); }

    std::string write(const std::string& text, const std::string& name = "run.ini") const {
        std::ofstream(root / name) << text;
        return (root / name).string();
    }
    fs::path out(const std::string& name = "out") const { return root / name; }
};

struct Result {
    int code;
    std::string log;
    std::string err;
};

Result run(const std::string& command, const std::string& config, const fs::path& out, CommandOptions options = {}) {
    options.out_dir = out.string();
    options.quiet = true;
    std::ostringstream log, err;
    const int code = run_command(command, config, options, log, err);
    return {code, log.str(), err.str()};
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream is(p);
    return nlohmann::json::parse(is);
}

std::string read_text(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream is(kHomogeneous);
    const RunConfig c = parse_config(is);
    CHECK(c.n_points == 64);
    CHECK(c.rho == 1.0);
    CHECK(c.K0.kind == "cosine");
    CHECK(c.K0.amplitude == 0.4);
    CHECK(c.seed == 5);
    CHECK(c.n_perturbations == 6);
    CHECK_NOTHROW(validate_config(c));

    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse(replace(kHomogeneous, "schema_version = 1\n", "")), ConfigError);
    CHECK_THROWS_AS(parse(replace(kHomogeneous, "schema_version = 1", "schema_version = 2")), ConfigError);
    CHECK_THROWS_AS(parse(replace(kHomogeneous, "q = 0", "q = 0\nkappa = 3")), ConfigError);
    CHECK_THROWS_AS(parse(replace(kHomogeneous, "[grid]", "[mesh]")), ConfigError);
    CHECK_THROWS_AS(parse(replace(kHomogeneous, "rho = 1", "rho = fast")), ConfigError);
    CHECK_THROWS_AS(parse(replace(kHomogeneous, "n_points = 64", "n_points = 64.5")), ConfigError);

    RunConfig bad = parse(replace(kHomogeneous, "kind = constant\nvalue = 1\n\n[eta]", "kind = table\n\n[eta]"));
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = parse(replace(kHomogeneous, "kind = constant\nvalue = 1\n\n[eta]", "kind = table\nvalues = 1, 1, 1\n\n[eta]"));
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = parse(replace(kHomogeneous, "gamma = 0.5", "gamma = 1"));
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = parse(replace(kHomogeneous, "kind = constant\nvalue = 1\n\n[eta]", "kind = sawtooth\n\n[eta]"));
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("table profiles") {
    std::string values;
    for (int j = 0; j < 64; ++j) values += (j ? ", " : "") + std::to_string(1.0 + 0.01 * j);
    std::istringstream is(replace(kHomogeneous, "kind = constant\nvalue = 1\n\n[eta]", "kind = table\nvalues = " + values + "\n\n[eta]"));
    const RunConfig c = parse_config(is);
    CHECK_NOTHROW(validate_config(c));
    const GridFunction A = make_profile(c.A, Grid(64), "A");
    CHECK(A[10] == doctest::Approx(1.1));
}

TEST_CASE("solve") {
    Sandbox box;
    const Result r = run("solve", box.write(kHomogeneous), box.out());
    REQUIRE(r.code == kExitOk);
    const nlohmann::json s = read_json(box.out() / "solve.json");
    CHECK(std::abs(s["lambda0"].get<double>() - 1.0) < 1e-9);
    CHECK(std::abs(s["g"].get<double>()) < 1e-9);
    CHECK(s["wellposed"] == true);
    CHECK(fs::exists(box.out() / "spectral.json"));
    CHECK(fs::exists(box.out() / "hjb.json"));
    const nlohmann::json h = read_json(box.out() / "hjb.json");
    for (const char* key : {"alpha", "alpha0", "g", "lambda0", "wellposed"}) CHECK(h.contains(key));
}

TEST_CASE("exit codes") {
    Sandbox box;
    const Result infeasible = run("solve", box.write(replace(kHomogeneous, "rho = 1", "rho = 0.4")), box.out("a"));
    CHECK(infeasible.code == kExitInfeasible);
    CHECK_FALSE(fs::exists(box.out("a")));
    for (const char* cmd : {"simulate", "verify"}) {
        CHECK(run(cmd, box.write(replace(kHomogeneous, "rho = 1", "rho = 0.4")), box.out("a")).code == kExitInfeasible);
    }

    const Result missing =
        run("solve", box.write(replace(kHomogeneous, "kind = constant\nvalue = 1\n\n[eta]", "kind = table\n\n[eta]")), box.out("b"));
    CHECK(missing.code == kExitInternal);
    CHECK(missing.err.find("table") != std::string::npos);
    CHECK_FALSE(fs::exists(box.out("b")));

    CHECK(run("solve", (box.root / "nope.ini").string(), box.out("c")).code == kExitInternal);
    CHECK(run("frobnicate", box.write(kHomogeneous), box.out("d")).code == kExitInternal);
}

TEST_CASE("command-line overrides") {
    Sandbox box;
    CommandOptions opts;
    opts.n_points = 32;
    REQUIRE(run("solve", box.write(kHomogeneous), box.out(), opts).code == kExitOk);
    CHECK(read_json(box.out() / "solve.json")["grid_points"] == 32);
    opts.n_points = 33;
    CHECK(run("solve", box.write(kHomogeneous), box.out("odd"), opts).code == kExitInternal);
    CHECK_FALSE(fs::exists(box.out("odd")));
}

TEST_CASE("simulate") {
    Sandbox box;
    const std::string window = replace(kHomogeneous, "rho = 1", "rho = 0.75");
    REQUIRE(run("simulate", box.write(window), box.out("a")).code == kExitOk);
    const nlohmann::json a = read_json(box.out("a") / "stability.json");
    CHECK(a["admissibility_condition"] == true);
    CHECK(a["positivity"] == true);
    CHECK(a["bound_satisfied"] == true);
    CHECK(a["stability_window"] == true);
    CHECK(fs::exists(box.out("a") / "trajectory.csv"));
    CHECK(fs::exists(box.out("a") / "trajectory_summary.json"));
    CHECK(fs::exists(box.out("a") / "deviation.csv"));

    REQUIRE(run("simulate", box.write(replace(window, "amplitude = 0.4", "amplitude = 0.6")), box.out("b")).code == kExitOk);
    const nlohmann::json b = read_json(box.out("b") / "stability.json");
    CHECK(b["admissibility_condition"] == false);
    CHECK(b["positivity"] == true);

    const std::string steady = replace(window, "kind = cosine\nbase = 1\namplitude = 0.4\nmode = 1", "kind = steady_state\nscale = 2");
    REQUIRE(run("simulate", box.write(steady), box.out("c")).code == kExitOk);
    std::istringstream csv(read_text(box.out("c") / "deviation.csv"));
    std::string line;
    std::getline(csv, line);
    int rows = 0;
    while (std::getline(csv, line)) {
        const double dev = std::stod(line.substr(line.find(',') + 1));
        CHECK(dev < 1e-8);
        ++rows;
    }
    CHECK(rows == 201);
}

TEST_CASE("verify") {
    Sandbox box;
    const std::string cfg = box.write(kHomogeneous);
    const Result ok = run("verify", cfg, box.out("a"));
    CHECK_MESSAGE(ok.code == kExitOk, ok.err);
    const nlohmann::json doc = read_json(box.out("a") / "audit.json");
    for (const char* key : {"J_opt", "v", "rel_gap", "n_perturbations", "max_perturbed_J", "all_dominated"}) {
        CHECK(doc.contains(key));
    }
    CHECK(doc["failed"].empty());

    REQUIRE(run("verify", cfg, box.out("b")).code == kExitOk);
    CHECK(read_text(box.out("a") / "audit.json") == read_text(box.out("b") / "audit.json"));

    CommandOptions reseeded;
    reseeded.seed = 6;
    REQUIRE(run("verify", cfg, box.out("c"), reseeded).code == kExitOk);
    CHECK(read_text(box.out("a") / "audit.json") != read_text(box.out("c") / "audit.json"));

    CommandOptions broken;
    broken.debug_alpha_scale = 1.01;
    const Result bad = run("verify", cfg, box.out("d"), broken);
    CHECK(bad.code == kExitAuditFailed);
    CHECK(bad.err.find("hjb_residual") != std::string::npos);
}

TEST_CASE("sweep") {
    Sandbox box;
    const std::string cfg = box.write(std::string(kHomogeneous) + "\n[sweep]\nrho = 0.4, 0.75, 1.2\ngamma = 0.5, 0.8, 2\nsigma = 1\n");
    REQUIRE(run("sweep", cfg, box.out()).code == kExitOk);
    std::istringstream csv(read_text(box.out() / "sweep.csv"));
    std::string header, line;
    std::getline(csv, header);
    CHECK(header.rfind("rho,gamma,sigma,lambda0,lambda1,g,alpha,M,rate,feasible", 0) == 0);
    int rows = 0;
    while (std::getline(csv, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        const double rho = std::stod(f[0]), gamma = std::stod(f[1]), lambda0 = std::stod(f[3]), g = std::stod(f[5]);
        CHECK(std::abs(g - (lambda0 - rho) / gamma) < 1e-12);
        CHECK((f[9] == "1") == (rho > lambda0 * (1.0 - gamma)));
        if (f[9] == "0") CHECK(f[6].empty());
        ++rows;
    }
    CHECK(rows == 9);
}

TEST_CASE("perron audit command") {
    Sandbox box;
    REQUIRE(run("perron-audit", box.write(kHomogeneous), box.out()).code == kExitOk);
    const nlohmann::json doc = read_json(box.out() / "perron_audit.json");
    CHECK(doc["n_passed"] == 100);
    CHECK(doc["discretized_generator"]["metzler"] == false);
}
