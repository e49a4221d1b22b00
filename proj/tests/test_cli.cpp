#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CmdResult {
    int code;
    std::string out;
};

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "rmls_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CmdResult run_cli(const std::string& args, const std::string& extra_env = "") {
    const fs::path out_file = work_dir() / "stdout.txt";
    std::string cmd = extra_env + std::string(RMLS_CLI_PATH) + " " + args + " > " +
                      out_file.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(out_file)};
}

// A shared small instance generated once per test binary run.
const fs::path& shared_instance() {
    static const fs::path path = [] {
        const fs::path p = work_dir() / "shared_k2.qlsp";
        const CmdResult r = run_cli("gen --n 2 --d 2 --kappa 2 --b-sparsity 2 --seed 3 --out " +
                                    p.string());
        REQUIRE(r.code == 0);
        return p;
    }();
    return path;
}

} // namespace

TEST_CASE("cli gen: deterministic output and kappa report") {
    const fs::path p1 = work_dir() / "gen1.qlsp";
    const fs::path p2 = work_dir() / "gen2.qlsp";
    const std::string flags = "gen --n 3 --d 3 --kappa 4 --kappa-tol 0.5 --seed 11 --out ";
    const CmdResult r1 = run_cli(flags + p1.string());
    const CmdResult r2 = run_cli(flags + p2.string());
    CHECK(r1.code == 0);
    CHECK(r2.code == 0);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(r1.out.find("kappa") != std::string::npos);
    CHECK(r1.out.find("attempts") != std::string::npos);
}

TEST_CASE("cli gen: unreachable kappa reports nearest miss with exit 1") {
    const CmdResult r = run_cli("gen --n 2 --d 2 --kappa 1 --max-attempts 20 --seed 1 --out " +
                                (work_dir() / "never.qlsp").string());
    CHECK(r.code == 1);
    CHECK(r.out.find("closest kappa") != std::string::npos);
}

TEST_CASE("cli run: rejects q = 0 and missing instance") {
    const CmdResult r = run_cli("run --instance " + shared_instance().string() +
                                " --variant amplified --q 0 --nrep 4 --seed 1");
    CHECK(r.code == 1);
    const CmdResult r2 = run_cli("run --instance /nonexistent.qlsp --q 5 --nrep 1 --seed 1");
    CHECK(r2.code == 3);
}

TEST_CASE("cli run: epsilon computes and echoes q") {
    const CmdResult r = run_cli("run --instance " + shared_instance().string() +
                                " --variant amplified --epsilon 0.5 --nrep 4 --seed 1");
    CHECK(r.code == 0);
    // q = ceil(2 ln(24)^2 / 0.5) = 41
    CHECK(r.out.find("# q 41") != std::string::npos);
    CHECK(r.out.find("error ") != std::string::npos);
    CHECK(r.out.find("expected_time_T ") != std::string::npos);
    CHECK(r.out.find("wall_time_s ") != std::string::npos);
}

TEST_CASE("cli run: positive mode on an indefinite matrix names the eigenvalue") {
    const CmdResult r = run_cli("run --instance " + shared_instance().string() +
                                " --variant ground --mode positive --q 10 --nrep 2 --seed 1");
    CHECK(r.code == 1);
    CHECK(r.out.find("min eigenvalue") != std::string::npos);
}

TEST_CASE("cli sweep: exact csv schema and reproducibility from its config line") {
    const fs::path csv1 = work_dir() / "sweep1.csv";
    const fs::path csv2 = work_dir() / "sweep2.csv";
    const std::string flags = "sweep --instance " + shared_instance().string() +
                              " --variant amplified --q-list 20,40,80 --nrep 10 --seed 9 --out ";
    CHECK(run_cli(flags + csv1.string()).code == 0);

    const std::string content = slurp(csv1);
    std::istringstream lines(content);
    std::string config_line, header;
    std::getline(lines, config_line);
    std::getline(lines, header);
    CHECK(header == "q,error,inv_error,expected_time_T,variant,kappa,n,d,nrep,master_seed");
    REQUIRE(config_line.rfind("# config: rmls ", 0) == 0);

    // replay the recorded command verbatim (minus the leading marker), with a
    // different output path and thread count: bytes must match
    std::string replay = config_line.substr(std::string("# config: rmls ").size());
    replay += " --threads 1 --out " + csv2.string();
    CHECK(run_cli(replay).code == 0);
    CHECK(slurp(csv2) == content);
}

TEST_CASE("cli sweep: empty q list rejected") {
    const CmdResult r = run_cli("sweep --instance " + shared_instance().string() +
                                " --variant ground --q-list , --nrep 2 --seed 1 --out " +
                                (work_dir() / "empty.csv").string());
    CHECK(r.code == 1);
}

TEST_CASE("cli sweep: unwritable output path is an io error") {
    const CmdResult r = run_cli("sweep --instance " + shared_instance().string() +
                                " --variant ground --q-list 5,10 --nrep 2 --seed 1 --out " +
                                "/nonexistent_dir/x.csv");
    CHECK(r.code == 3);
}

TEST_CASE("cli check: passes on a generated instance") {
    const CmdResult r = run_cli("check --instance " + shared_instance().string() +
                                " --s-grid 21");
    CHECK(r.code == 0);
    CHECK(r.out.find("all checks passed") != std::string::npos);
}

TEST_CASE("cli check: endpoint-only grid shows both bound rows") {
    const CmdResult r = run_cli("check --instance " + shared_instance().string() +
                                " --s-grid 2 --variant ground");
    CHECK(r.code == 0);
    CHECK(r.out.find("1.000e+00") != std::string::npos); // gap bound at s=0
}

TEST_CASE("cli check: corrupted norm is rejected at load with exit 1") {
    const fs::path bad = work_dir() / "bad_norm.qlsp";
    std::ofstream out(bad);
    out << "format 1\nn 1\nd 2\nb-sparsity 1\nseed 0\nattempts 0\nkappa 1\n"
        << "A 2\n0 0 2 0\n1 1 2 0\n"
        << "b 2\n1 0\n0 0\n";
    out.close();
    const CmdResult r = run_cli("check --instance " + bad.string());
    CHECK(r.code == 1);
    CHECK(r.out.find("spectral norm") != std::string::npos);
}

TEST_CASE("cli solve-exact: identity instance echoes b") {
    // hand-written identity instance with basis-state b
    const fs::path ident = work_dir() / "ident.qlsp";
    std::ofstream out(ident);
    out << "format 1\nn 1\nd 1\nb-sparsity 1\nseed 0\nattempts 0\nkappa 1\n"
        << "A 2\n0 0 1 0\n1 1 1 0\n"
        << "b 2\n1 0\n0 0\n";
    out.close();
    const CmdResult r = run_cli("solve-exact --instance " + ident.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("0 1 0") != std::string::npos);
    CHECK(r.out.find("residual 0") != std::string::npos);
}

TEST_CASE("cli solve-exact: 2x2 diagonal hand solve") {
    const fs::path diag = work_dir() / "diag.qlsp";
    std::ofstream out(diag);
    out << "format 1\nn 1\nd 1\nb-sparsity 2\nseed 0\nattempts 0\nkappa 2\n"
        << "A 2\n0 0 1 0\n1 1 0.5 0\n"
        << "b 2\n0.70710678118654746 0\n0.70710678118654746 0\n";
    out.close();
    const CmdResult r = run_cli("solve-exact --instance " + diag.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("0.4472135954999579") != std::string::npos);
    CHECK(r.out.find("0.8944271909999158") != std::string::npos);
}

TEST_CASE("cli: RMLS_SEED environment fallback matches --seed") {
    const fs::path a = work_dir() / "env_a.csv";
    const fs::path b = work_dir() / "env_b.csv";
    CHECK(run_cli("sweep --instance " + shared_instance().string() +
                  " --variant amplified --q-list 10,20 --nrep 5 --seed 77 --out " + a.string())
              .code == 0);
    CHECK(run_cli("sweep --instance " + shared_instance().string() +
                      " --variant amplified --q-list 10,20 --nrep 5 --out " + b.string(),
                  "RMLS_SEED=77 ")
              .code == 0);
    CHECK(slurp(a) == slurp(b));
}
