#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run okr_run(std::vector<std::string> args) {
    args.insert(args.begin(), "okr");
    std::ostringstream out, err;
    const int code = okr::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("okr_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(okr_run({}).code == 2);
    CHECK(okr_run({"compare", "--no-such-flag"}).code == 2);
    CHECK(okr_run({"compare", "--algs", "gp,bogus", "--n", "10"}).code == 2);
    CHECK(okr_run({"reconverge", "--channel-model", "lowpass"}).code == 2);

    const Run missing = okr_run({"compare", "--csv", "/nonexistent/data.csv", "--dim", "2"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("/nonexistent/data.csv") != std::string::npos);
}

TEST_CASE("malformed csv exits with 3 and names the row") {
    const fs::path dir = fresh_dir("badcsv");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.csv") << "1,2,3\n4,x,6\n1,2,3\n5,5,5\n";
    const Run r = okr_run({"compare", "--csv", (dir / "bad.csv").string(), "--dim", "2", "--out", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("row 2") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("verify passes and its negative controls fail") {
    const Run ok = okr_run({"verify"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("all checks passed") != std::string::npos);

    const Run perturbed = okr_run({"verify", "--perturb-noise", "0.05"});
    CHECK(perturbed.code == 1);
    CHECK(perturbed.out.find("verification FAILED") != std::string::npos);

    CHECK(okr_run({"verify", "--tol", "1e-15"}).code == 1);
}

TEST_CASE("compare writes the learning curve and reruns are byte-identical") {
    const fs::path a = fresh_dir("cmp_a"), b = fresh_dir("cmp_b");
    const std::vector<std::string> common{"compare", "--n", "60", "--n-test", "30", "--dim", "3", "--seeds", "2",
                                          "--eval-every", "20", "--algs", "gp,beta:0,knlms", "--dump-state"};
    auto args_a = common, args_b = common;
    args_a.insert(args_a.end(), {"--out", a.string()});
    args_b.insert(args_b.end(), {"--out", b.string()});
    REQUIRE(okr_run(args_a).code == 0);
    REQUIRE(okr_run(args_b).code == 0);

    const std::string curve = slurp(a / "learning_curve.csv");
    CHECK(curve == slurp(b / "learning_curve.csv"));
    CHECK(curve.rfind("algorithm,step,nmse_db\n", 0) == 0);
    CHECK(count_lines(curve) == 1 + 3 * 3);
    for (const char* s : {"state_gp.txt", "state_beta_0.txt", "state_knlms.txt"}) {
        CHECK(fs::exists(a / s));
        CHECK(slurp(a / s) == slurp(b / s));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("compare on csv input") {
    const fs::path dir = fresh_dir("cmp_csv");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "data.csv");
        f << "x,y\n";
        for (int i = 0; i < 40; ++i) f << (i * 0.37 - 7.0) << ',' << (i % 7) * 0.1 << '\n';
    }
    const Run r = okr_run({"compare", "--csv", (dir / "data.csv").string(), "--dim", "1", "--header", "--eval-every",
                           "5", "--algs", "gp", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(count_lines(slurp(dir / "learning_curve.csv")) == 1 + 4);
    fs::remove_all(dir);
}

TEST_CASE("reconverge and uncertainty outputs") {
    const fs::path dir = fresh_dir("rec");
    REQUIRE(okr_run({"reconverge", "--n", "300", "--switch-at", "150", "--seeds", "2", "--algs", "beta:0,knlms",
                     "--out", dir.string()}).code == 0);
    const std::string rec = slurp(dir / "reconvergence.csv");
    CHECK(rec.rfind("# switch_at=150,seeds=2,smoothing=20\n", 0) == 0);
    CHECK(count_lines(rec) == 2 + 2 * 300);

    REQUIRE(okr_run({"uncertainty", "--prefixes", "3,10", "--grid", "50", "--out", dir.string()}).code == 0);
    const std::string unc = slurp(dir / "uncertainty.csv");
    CHECK(unc.rfind("algorithm,prefix,x,mean,std\n", 0) == 0);
    CHECK(count_lines(unc) == 1 + 6 * 50);

    CHECK(okr_run({"reconverge", "--switch-at", "2000", "--out", dir.string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("config file keeps comma lists intact and flags override it") {
    const fs::path dir = fresh_dir("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "run.cfg") << "n=40\nn-test=20\nalgs=gp,beta:0\neval-every=10\n";
    REQUIRE(okr_run({"compare", "--config", (dir / "run.cfg").string(), "--eval-every", "20", "--out", dir.string()})
                .code == 0);
    const std::string curve = slurp(dir / "learning_curve.csv");
    CHECK(count_lines(curve) == 1 + 2 * 2);
    CHECK(curve.find("beta:0,40,") != std::string::npos);
    fs::remove_all(dir);
}
