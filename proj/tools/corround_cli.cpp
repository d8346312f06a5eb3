// Command-line driver: round, lp-optimal, cover, gen-instance, simulate, bench.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "corround/experiment.hpp"

using namespace corround;

namespace {

Scheme scheme_or_throw(const std::string& name) {
    const auto s = parse_scheme(name);
    if (!s) throw CLI::ValidationError("--scheme", "unknown scheme `" + name + "`");
    return *s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlated rounding and dynamic fulfillment experiments"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string scheme_name = "dilate";

    cli::RoundArgs round_args;
    auto* round_cmd = app.add_subcommand("round", "Monte Carlo check of a rounding scheme");
    round_cmd->add_option("instance", round_args.instance, "Marginal matrix file")->required();
    round_cmd->add_option("--scheme", scheme_name, "independent | dilate | force_open");
    round_cmd->add_option("--samples", round_args.samples, "Number of roundings");
    round_cmd->add_option("--seed", seed, "Seed (else $CORROUND_SEED)");
    round_cmd->add_option("--out", round_args.out, "Marginals CSV path");

    cli::LpOptimalArgs lp_args;
    auto* lp_cmd = app.add_subcommand("lp-optimal", "Solve for the instance-optimal ratio");
    lp_cmd->add_option("instance", lp_args.instance, "Marginal matrix file")->required();
    lp_cmd->add_option("--max-fcs", lp_args.max_fcs, "Largest K accepted");
    lp_cmd->add_option("--out", lp_args.out, "Solution file");

    cli::CoverArgs cover_args;
    auto* cover_cmd = app.add_subcommand("cover", "Round a fractional set cover");
    cover_cmd->add_option("instance", cover_args.instance, "Set cover file");
    cover_cmd->add_option("--fractional", cover_args.cover, "File with one y_k per set");
    cover_cmd->add_option("--hard-d", cover_args.hard_d, "Use the d-subset hard instance");
    cover_cmd->add_option("--hard-k", cover_args.hard_k, "Set count for the hard instance");
    cover_cmd->add_option("--scheme", scheme_name, "independent | dilate | force_open");
    cover_cmd->add_option("--samples", cover_args.samples, "Number of roundings");
    cover_cmd->add_option("--seed", seed, "Seed (else $CORROUND_SEED)");
    cover_cmd->add_option("--out", cover_args.out, "Usage CSV path");

    cli::GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen-instance", "Generate a fulfillment instance");
    gen_cmd->add_option("--config", gen_args.config, "Generator config (JSON)");
    gen_cmd->add_option("--seed", seed, "Seed (else $CORROUND_SEED, else config)");
    gen_cmd->add_option("--data", gen_args.data_dir, "Directory with metros.csv and fcs.csv");
    gen_cmd->add_option("--out", gen_args.out, "Instance file (JSON)");

    cli::SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a fulfillment simulation campaign");
    sim_cmd->add_option("--config", sim_args.config, "Campaign config (JSON)");
    sim_cmd->add_option("--seed", seed, "Base seed (else $CORROUND_SEED, else config)");
    sim_cmd->add_option("--policies", sim_args.policies,
                        "myopic independent dilate force_open best")
        ->delimiter(',')
        ->check(CLI::Validator(
            [](std::string& name) {
                return parse_policy(name) ? std::string{} : "unknown policy `" + name + "`";
            },
            "POLICY"));
    sim_cmd->add_option("--scale", sim_args.scale, "Scale theta for horizon and inventory");
    sim_cmd->add_option("--out", sim_args.out, "Per-replication CSV path");

    cli::BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Time the rounding schemes");
    bench_cmd->add_option("--fcs", bench_args.fcs, "K");
    bench_cmd->add_option("--min-items", bench_args.min_items, "Smallest q");
    bench_cmd->add_option("--max-items", bench_args.max_items, "Largest q (doubling sweep)");
    bench_cmd->add_option("--min-ms", bench_args.min_ms, "Time budget per point");
    bench_cmd->add_option("--seed", seed, "Seed (else $CORROUND_SEED)");
    bench_cmd->add_option("--out", bench_args.out, "CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::kOk : cli::kUsage;
    }

    try {
        if (*round_cmd) {
            round_args.scheme = scheme_or_throw(scheme_name);
            round_args.seed = cli::resolve_seed(seed, 1);
            return cli::cmd_round(round_args, std::cout, std::cerr);
        }
        if (*lp_cmd) return cli::cmd_lp_optimal(lp_args, std::cout, std::cerr);
        if (*cover_cmd) {
            cover_args.scheme = scheme_or_throw(scheme_name);
            cover_args.seed = cli::resolve_seed(seed, 1);
            if (cover_args.hard_d == 0 && (cover_args.instance.empty() || cover_args.cover.empty()))
                throw CLI::ValidationError("cover", "give an instance and --fractional, or --hard-d");
            return cli::cmd_cover(cover_args, std::cout, std::cerr);
        }
        if (*gen_cmd) {
            gen_args.seed = seed;
            return cli::cmd_gen_instance(gen_args, std::cout, std::cerr);
        }
        if (*sim_cmd) {
            sim_args.seed = seed;
            return cli::cmd_simulate(sim_args, std::cout, std::cerr);
        }
        if (*bench_cmd) {
            bench_args.seed = cli::resolve_seed(seed, 1);
            return cli::cmd_bench(bench_args, std::cout, std::cerr);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return cli::kUsage;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
        return cli::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kFailure;
    }
    return cli::kUsage;
}
