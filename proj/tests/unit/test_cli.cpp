#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "corround/error.hpp"
#include "corround/experiment.hpp"
#include "doctest.h"

using namespace corround;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("corround_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& body) {
    const auto p = scratch() / name;
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run(const std::string& args) {
    const std::string cmd = std::string(CORROUND_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("round on a deterministic instance has no sampling error") {
    const auto m = write_file("det.txt", "2 3\n0 1 0\n0 0 1\n");
    for (Scheme s : {Scheme::Independent, Scheme::Dilate, Scheme::ForceOpen}) {
        std::ostringstream out, log;
        const int rc = cli::cmd_round({m.string(), s, 1000, 3, ""}, out, log);
        CHECK(rc == cli::kOk);
        CHECK(out.str().find("item,fc,u,empirical,abs_err\n") == 0);
        CHECK(out.str().find("0,1,1,1,0\n") != std::string::npos);
        CHECK(out.str().find("1,2,1,1,0\n") != std::string::npos);
        CHECK(log.str().find("PASS") != std::string::npos);
    }
}

TEST_CASE("lp-optimal reports alpha") {
    const auto m = write_file("pairs.txt", "3 3\n0.5 0.5 0\n0 0.5 0.5\n0.5 0 0.5\n");
    std::ostringstream out, log;
    CHECK(cli::cmd_lp_optimal({m.string(), "", 12}, out, log) == cli::kOk);
    CHECK(log.str().find("alpha 1.333333333") != std::string::npos);
    CHECK(out.str().rfind("alpha ", 0) == 0);
}

TEST_CASE("cover on a hard instance stays feasible") {
    cli::CoverArgs args;
    args.hard_d = 2;
    args.hard_k = 4;
    args.samples = 2000;
    std::ostringstream out, log;
    CHECK(cli::cmd_cover(args, out, log) == cli::kOk);
    CHECK(out.str().rfind("set,y,usage_empirical,bound\n", 0) == 0);
    CHECK(log.str().find("feasible covers 2000 / 2000") != std::string::npos);
}

TEST_CASE("seed precedence") {
    ::unsetenv("CORROUND_SEED");
    CHECK(cli::resolve_seed(std::nullopt, 9) == 9);
    ::setenv("CORROUND_SEED", "17", 1);
    CHECK(cli::resolve_seed(std::nullopt, 9) == 17);
    CHECK(cli::resolve_seed(5, 9) == 5);
    ::setenv("CORROUND_SEED", "seventeen", 1);
    CHECK_THROWS_AS(cli::resolve_seed(std::nullopt, 9), Error);
    ::unsetenv("CORROUND_SEED");
}

TEST_CASE("campaign output is reproducible without timing") {
    cli::CampaignConfig c;
    c.generator.n = 6;
    c.generator.n_max = 3;
    c.generator.n_per = 2;
    c.generator.regions = 3;
    c.generator.fcs = 3;
    c.generator.horizon = 300;
    c.instances = 2;
    c.replications = 3;
    c.seed = 4;
    c.threads = 3;
    c.record_timing = false;
    std::ostringstream a, b, sa, sb;
    const auto ra = cli::run_campaign(c);
    const auto rb = cli::run_campaign(c);
    cli::write_campaign_rows(ra, a);
    cli::write_campaign_rows(rb, b);
    cli::write_campaign_summary(ra, sa);
    cli::write_campaign_summary(rb, sb);
    CHECK(a.str() == b.str());
    CHECK(sa.str() == sb.str());
    CHECK(a.str().rfind(std::string(kReportHeader), 0) == 0);
    // Header plus instances x replications x policies rows.
    const std::string rows = a.str();
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 1 + 2 * 3 * 5);

    // Every policy in a replication sees the same arrivals.
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t p = 1; p < 5; ++p)
                CHECK(ra.report(i, r, p).orders == ra.report(i, r, 0).orders);

    std::stringstream js;
    cli::write_campaign(c, js);
    const auto back = cli::read_campaign(js);
    CHECK(back.instances == 2);
    CHECK(back.generator.horizon == 300);
    CHECK(back.record_timing == false);
}

TEST_CASE("binary exit codes") {
    const auto m = write_file("small.txt", "1 2\n0.5 0.5\n");
    CHECK(run("round " + m.string() + " --samples 1000 --out " + (scratch() / "r.csv").string()) ==
          0);
    CHECK(fs::exists(scratch() / "r.csv.usage.csv"));
    CHECK(run("round " + m.string() + " --scheme bogus") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("round " + (scratch() / "missing.txt").string()) != 0);

    const auto garbled = write_file("garbled.txt", "2 2\n0.5 x\n");
    CHECK(run("round " + garbled.string()) == 3);

    std::string wide = "1 13\n";
    for (int k = 0; k < 13; ++k) wide += k == 0 ? "1" : " 0";
    const auto w = write_file("wide.txt", wide + "\n");
    CHECK(run("lp-optimal " + w.string()) == 4);

    CHECK(run("cover --hard-d 9 --hard-k 4") == cli::kFailure);
}

TEST_CASE("binary simulate is byte-identical for a seed") {
    const auto cfg = write_file("campaign.json", R"({
 "generator": {"n": 6, "n_max": 2, "n_per": 2, "regions": 3, "fcs": 2, "horizon": 200},
 "instances": 1, "replications": 2, "record_timing": false
})");
    const auto a = scratch() / "a.csv", b = scratch() / "b.csv";
    CHECK(run("simulate --config " + cfg.string() + " --seed 5 --out " + a.string()) == 0);
    CHECK(run("simulate --config " + cfg.string() + " --seed 5 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(fs::path(a.string() + ".summary.csv")) == slurp(fs::path(b.string() + ".summary.csv")));
    CHECK(run("simulate --config " + cfg.string() + " --policies dilate,greedy") == 2);
}
