#include "mawhf/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using mawhf::cli::RunConfig;
    CLI::App app{"Wiener-Hopf factorization engine for Markov-additive processes"};
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.workers = mawhf::cli::default_workers();
    std::size_t grid_n = 0;
    double x_span = 0.0;

    auto add_common = [&](CLI::App* sub, bool needs_model) {
        auto* opt = sub->add_option("model", cfg.model_path, "Model JSON file");
        if (needs_model) opt->required();
        sub->add_option("--out", cfg.out_dir, "Write artifacts into this directory");
        sub->add_flag("--deterministic", cfg.deterministic, "Omit timestamps and timings");
    };
    auto add_numeric = [&](CLI::App* sub) {
        sub->add_option("--s", cfg.s, "Killing rate of the exponential horizon");
        sub->add_option("--grid-n", grid_n, "Inversion grid size (power of two)");
        sub->add_option("--x-span", x_span, "Half-width of the inversion window");
        sub->add_option("--x", cfg.x, "Evaluation points (alphas for transform)")->delimiter(',');
        sub->add_flag("--csv", cfg.csv, "Emit CSV tables after a JSON header line");
        sub->add_option("--stride", cfg.csv_stride, "Grid stride for CSV tables");
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "Number of paths");
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_option("--workers", cfg.workers, "Worker threads (0: all cores)");
    };

    auto* validate = app.add_subcommand("validate", "Check a model file");
    add_common(validate, true);
    auto* transform = app.add_subcommand("transform", "Tabulate the cumulant and killed transforms");
    add_common(transform, true);
    add_numeric(transform);
    auto* factorize = app.add_subcommand("factorize", "Solve both factorization sides");
    add_common(factorize, true);
    add_numeric(factorize);
    auto* extrema = app.add_subcommand("extrema", "Laws of the extrema at an exponential horizon");
    add_common(extrema, true);
    add_numeric(extrema);
    auto* ruin = app.add_subcommand("ruin", "Law of the all-time infimum");
    add_common(ruin, true);
    add_numeric(ruin);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo paths up to an exponential horizon");
    add_common(simulate, true);
    add_numeric(simulate);
    add_sim(simulate);
    simulate->add_option("--levels", cfg.levels, "First-passage levels")->delimiter(',');
    auto* compare = app.add_subcommand("compare", "Compare simulated and analytic laws");
    add_common(compare, true);
    add_numeric(compare);
    add_sim(compare);
    auto* selftest = app.add_subcommand("selftest", "Run the scalar benchmark suite");
    add_common(selftest, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mawhf::cli::kExitInvalid;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (grid_n > 0) cfg.grid_n = grid_n;
    if (x_span > 0.0) cfg.x_span = x_span;
    return mawhf::cli::run(cfg, std::cout, std::cerr);
}
