#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "ellab/cli.hpp"

using namespace ellab;
using nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
    json doc;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    RunResult r{code, out.str(), err.str(), json()};
    if (!r.out.empty() && r.out[0] == '{') r.doc = json::parse(r.out);
    return r;
}

std::string mask_duration(std::string s) {
    return std::regex_replace(s, std::regex("\"duration_ms\": [0-9]+"),
                              "\"duration_ms\": X");
}

}  // namespace

TEST_CASE("cli: benchmark values and exit code") {
    RunResult r = run({"benchmark", "--n", "4", "--p", "2.5"});
    CHECK(r.code == 0);
    CHECK(std::abs(r.doc["values"]["K0"].get<double>() - 0.2) <= 1e-12);
    CHECK(std::abs(r.doc["values"]["K1"].get<double>() - 2.0) <= 1e-12);
    CHECK(std::abs(r.doc["values"]["K2"].get<double>() - 1.4) <= 1e-12);
    CHECK(std::abs(r.doc["values"]["K3"].get<double>() - 1.0) <= 1e-12);
    CHECK(r.doc["command"] == "benchmark");
    CHECK(r.doc["witnesses"].is_array());
}

TEST_CASE("cli: checker verdicts drive the exit code") {
    RunResult ok = run({"check", "--theorem", "B", "--n", "3", "--f", "u^2"});
    CHECK(ok.code == 0);
    CHECK(ok.doc["verdicts"]["B"]["holds"] == "yes");
    RunResult bad = run({"check", "--theorem", "B", "--n", "4", "--f",
                         "(1.5 + min(1, u^1.5)) * u^2.5"});
    CHECK(bad.code == 1);
    CHECK(bad.doc["verdicts"]["B"]["holds"] == "no");
    CHECK(!bad.doc["witnesses"].empty());
}

TEST_CASE("cli: usage errors exit with code 2") {
    CHECK(run({"check", "--theorem", "nope", "--n", "3", "--f", "u^2"}).code == 2);
    CHECK(run({"no-such-command"}).code == 2);
    CHECK(run({"benchmark", "--n", "4"}).code == 2);  // missing --p
}

TEST_CASE("cli: named constants in numeric arguments") {
    // p = kappa(3) + 0.5 = 3.5
    RunResult r = run({"benchmark", "--n", "3", "--p", "kappa(3)+0.5"});
    CHECK(r.code == 0);
    CHECK(std::abs(r.doc["inputs"]["p"].get<double>() - 3.5) <= 1e-15);
    CHECK(parse_cli_number("pS(3)") == 5.0);
    CHECK(parse_cli_number("pstar(5)") == 2.0);
    CHECK(parse_cli_number("theta(1)") == 1.0);
    CHECK(parse_cli_number("2*(pS(3)-1)/4") == 2.0);
    CHECK_THROWS(parse_cli_number("nope(3)"));
}

TEST_CASE("cli: determinism up to the wall-clock field") {
    std::vector<std::string> argv{"check", "--theorem", "GS", "--n", "4", "--f",
                                  "(1.2 + min(1, u^1.5)) * u^2.5"};
    RunResult a = run(argv);
    RunResult b = run(argv);
    CHECK(mask_duration(a.out) == mask_duration(b.out));
    // keys are sorted at every level
    std::vector<std::string> keys;
    for (auto it = a.doc.begin(); it != a.doc.end(); ++it) keys.push_back(it.key());
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    // floats carry 17 significant digits
    CHECK(a.out.find("0.058823529411763") != std::string::npos);
}

TEST_CASE("cli: shoot writes a profile CSV artifact") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "ellab_cli_test_csv";
    fs::remove_all(dir);
    RunResult r = run({"shoot", "--n", "3", "--f", "u^3", "--s0", "1", "--rmax", "50",
                       "--csv", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.doc["values"]["outcome"] == "FirstZero");
    REQUIRE(r.doc["artifacts"].size() == 1);
    std::ifstream in(r.doc["artifacts"][0].get<std::string>());
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "r,u,du");
    // strictly increasing radii, LF endings, '.' decimal point
    double prev = -1.0;
    std::string line;
    while (std::getline(in, line)) {
        CHECK(line.find(',') != std::string::npos);
        double rr = std::stod(line.substr(0, line.find(',')));
        CHECK(rr > prev);
        prev = rr;
    }
    fs::remove_all(dir);
}

TEST_CASE("cli: report round-trips through JSON parsing") {
    RunResult r = run({"theta", "--K", "10"});
    CHECK(r.code == 0);
    json reparsed = json::parse(r.out);
    CHECK(reparsed["values"]["theta"].get<double>() ==
          r.doc["values"]["theta"].get<double>());
    CHECK(reparsed["version"] == "ellab 0.1.0");
}

TEST_CASE("cli: exponents subcommand") {
    RunResult r = run({"exponents", "--n", "4", "--geometry", "half"});
    CHECK(r.code == 0);
    CHECK(r.doc["values"]["p_star_star"].get<double>() == 2.0);
    CHECK(r.doc["values"]["p_S"].get<double>() == 3.0);
}

TEST_CASE("cli: analyze reports regular-variation data") {
    RunResult r = run({"analyze", "--f", "u^2.5 * log(2+u)^0.3"});
    CHECK(r.code == 0);
    CHECK(std::abs(r.doc["values"]["index_infinity"].get<double>() - 2.5) <= 1e-9);
    CHECK(r.doc["values"]["structural"] == true);
}

TEST_CASE("cli: pohozaev identity on the first-zero ball") {
    RunResult r = run({"pohozaev", "--f", "u^3", "--n", "3", "--s0", "1"});
    CHECK(r.code == 0);
    CHECK(r.doc["values"]["identity_residual"].get<double>() <= 1e-6);
    CHECK(r.doc["values"]["psi_positive_up_to"].get<double>() == 0.0);
}

TEST_CASE("cli: verify closed forms") {
    RunResult r = run({"verify", "--preset", "benchmark-explicit", "--n", "4", "--p",
                       "2.5", "--K", "0.2"});
    CHECK(r.code == 0);
    CHECK(r.doc["values"]["max_residual"].get<double>() <= 1e-10);
    RunResult uk = run({"verify", "--preset", "uk", "--n", "3", "--k", "10", "--rmax",
                        "10"});
    CHECK(uk.code == 0);
    CHECK(uk.doc["values"]["max_residual"].get<double>() <= 1e-8);
    CHECK(std::abs(uk.doc["values"]["p_k"].get<double>() - 3.1) <= 1e-12);
}

TEST_CASE("cli: counterexample subcommand") {
    RunResult r = run(
        {"counterexample", "--p", "0.4", "--q", "0.4", "--lambda", "1", "--geometry",
         "whole"});
    CHECK(r.code == 0);
    CHECK(std::abs(r.doc["values"]["a"].get<double>() - 10.0) <= 1e-12);
    CHECK(r.doc["values"]["max_rel_residual"].get<double>() <= 1e-8);
}

TEST_CASE("cli: rescale convergence and critical limit") {
    RunResult c = run({"rescale", "--mode", "convergence", "--f", "u^2 * log(2+u)",
                       "--lambda", "1e3,1e6,1e9,1e12", "--S", "2"});
    CHECK(c.code == 0);
    CHECK(c.doc["values"]["monotone_decreasing"] == true);
    RunResult k = run({"rescale", "--mode", "critical-limit", "--n", "3", "--klist",
                       "10", "--klist", "30"});
    CHECK(k.code == 0);
    CHECK(k.doc["values"]["table"].size() == 2);
    CHECK(k.doc["values"]["table"][0]["v0"].get<double>() == 1.0);
}

TEST_CASE("cli: out path writes the report to a file") {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "ellab_report_test.json";
    fs::remove(path);
    RunResult r = run({"theta", "--K", "2", "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    REQUIRE(in.good());
    json doc = json::parse(in);
    CHECK(std::abs(doc["values"]["theta"].get<double>() - 2.6783469900166605) <= 1e-12);
    fs::remove(path);
}

TEST_CASE("cli: doubling mode reads a CSV field") {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "ellab_field_test.csv";
    {
        std::ofstream out(path);
        out << "x1,x2,dist,M\n";
        const int N = 15;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                double x = -0.8 + 1.6 * i / (N - 1);
                double y = -0.8 + 1.6 * j / (N - 1);
                double r = std::sqrt(x * x + y * y);
                if (r >= 0.9) continue;
                double dx = x - 0.2, dy = y - 0.1;
                out << x << ',' << y << ',' << (1.0 - r) << ','
                    << 5.0 / (0.02 + dx * dx + dy * dy) << '\n';
            }
    }
    RunResult r = run({"rescale", "--mode", "doubling", "--field", path.string(), "--k",
                       "0.05"});
    CHECK(r.code == 0);
    CHECK(r.doc["values"]["found"] == true);
    CHECK(r.doc["witnesses"].size() == 2);
    fs::remove(path);
}

TEST_CASE("cli: decay and solve-ball subcommands") {
    RunResult d = run({"decay", "--f", "u^2", "--n", "3", "--Lambda", "1", "--b", "0",
                       "--R", "2,4", "--mesh", "128"});
    CHECK(d.code == 0);
    CHECK(d.doc["values"]["table"][0]["center"].get<double>() == 0.0);
    RunResult s = run({"solve-ball", "--f1", "u^2", "--f2", "u^3", "--n", "3", "--R", "1",
                       "--guess", "bump:10,0.4", "--mesh", "128"});
    CHECK(s.code == 0);
    CHECK(s.doc["values"]["converged"] == true);
    CHECK(s.doc["values"]["center"].get<double>() > 0.0);
    RunResult g = run({"solve-ball", "--f", "u^3", "--n", "3", "--R", "1", "--guess",
                       "ground", "--mesh", "128"});
    CHECK(g.code == 0);
    CHECK(g.doc["values"]["center"].get<double>() > 1.0);
}

TEST_CASE("cli: gradient-system check via a potential expression") {
    RunResult r = run({"check", "--theorem", "thm1", "--n", "4", "--F",
                       "(u^3 + v^3) * c", "--param", "c=0.33333333333333331", "--p", "2",
                       "--q", "2", "--M", "1"});
    CHECK(r.code == 0);
    CHECK(r.doc["verdicts"]["Thm1"]["holds"] == "yes");
}

TEST_CASE("cli: bound sweep with jobs") {
    RunResult r = run({"bound", "--f", "u^3", "--n", "3", "--R", "1,2", "--jobs", "2",
                       "--mesh", "128"});
    CHECK(r.code == 0);
    double ratio = r.doc["values"]["family_ratio"].get<double>();
    CHECK(std::abs(ratio - 1.0) <= 1e-6);
}
