// Command-line front end: dataset generation, active-learning runs, one-shot
// acquisition, k-Center solving, bound evaluation and plotting.
//
// Failures print a single line `error,<code>,<message>` on stderr and exit
// nonzero.

#include "coreset/harness/dataset_io.hpp"
#include "coreset/harness/experiment.hpp"
#include "coreset/harness/report.hpp"
#include "coreset/harness/synthetic.hpp"
#include "coreset/kcenter.hpp"
#include "coreset/learner.hpp"
#include "coreset/strategies.hpp"
#include "coreset/theory.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace coreset;
using namespace coreset::harness;

std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string_view field(text.data() + start, end - start);
        T v{};
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
            fail(ErrorCode::kInvalidArgument, std::string("cannot parse ") + what + " '" + std::string(field) + "'");
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

// "5" means seeds 0..4; "3,8,11" is an explicit list.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    if (text.find(',') == std::string::npos) {
        const auto count = parse_list<std::uint64_t>(text, "seed count").front();
        require(count >= 1, ErrorCode::kInvalidArgument, "seed count must be >= 1");
        std::vector<std::uint64_t> seeds(count);
        std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
        return seeds;
    }
    return parse_list<std::uint64_t>(text, "seed");
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    harness::detail::write_file(path, text);
}

struct SyntheticFlags {
    SyntheticSpec spec;
    void add(CLI::App* cmd) {
        cmd->add_option("--classes", spec.num_classes, "number of classes")->capture_default_str();
        cmd->add_option("--per-class", spec.per_class, "points per class")->capture_default_str();
        cmd->add_option("--dim", spec.dim, "feature dimension")->capture_default_str();
        cmd->add_option("--spread", spec.spread, "isotropic standard deviation per class")->capture_default_str();
    }
};

// The labeled seed set of `select` and `solve-kcenter`: an explicit list, or
// `initial` points drawn uniformly with `seed`.
std::vector<Index> seed_set(const std::string& labeled, std::size_t initial, std::uint64_t seed, std::size_t n) {
    if (!labeled.empty()) return parse_list<Index>(labeled, "index");
    require(initial >= 1 && initial <= n, ErrorCode::kInvalidArgument, "--initial must be in [1, n]");
    return select_random(PoolState(n, {}), initial, seed);
}

std::string format_index_csv(const std::vector<Index>& indices) {
    std::string out = "index\n";
    for (Index i : indices) out += std::to_string(i) + '\n';
    return out;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Core-set batch active learning toolkit"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "write a synthetic Gaussian-mixture dataset");
    SyntheticFlags gen_flags;
    gen_flags.add(gen);
    std::string gen_out;
    gen->add_option("--seed", gen_flags.spec.seed, "generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output path (.csv for CSV, otherwise binary)")->required();

    // run
    auto* run = app.add_subcommand("run", "simulate pool-based active learning");
    ExperimentConfig cfg;
    std::string run_data, run_out, run_strategy = "random", run_seeds = "5", run_embedding = "raw";
    SyntheticFlags run_synth;
    std::uint64_t data_seed = 0;
    run->add_option("--data", run_data, "dataset path; a synthetic mixture is generated when omitted");
    run_synth.add(run);
    run->add_option("--data-seed", data_seed, "seed of the generated dataset")->capture_default_str();
    run->add_option("--strategy", run_strategy, "random|entropy|oracle|kmedoids|coreset-greedy|coreset-robust")
        ->capture_default_str();
    run->add_option("--budget", cfg.budget, "labels acquired per round")->capture_default_str();
    run->add_option("--initial", cfg.initial, "initial labeled set size")->capture_default_str();
    run->add_option("--rounds", cfg.rounds, "acquisition rounds")->capture_default_str();
    run->add_option("--seeds", run_seeds, "seed count or comma-separated seed list")->capture_default_str();
    run->add_option("--xi-frac", cfg.xi_frac, "outlier cap as a fraction of the unlabeled pool")->capture_default_str();
    run->add_option("--time-limit-s", cfg.time_limit_s, "time limit per feasibility probe")->capture_default_str();
    run->add_option("--epochs", cfg.learner.epochs, "learner epochs")->capture_default_str();
    run->add_option("--lr", cfg.learner.learning_rate, "learner step size")->capture_default_str();
    run->add_option("--l2", cfg.learner.l2, "learner l2 penalty")->capture_default_str();
    run->add_option("--embedding", run_embedding, "distance space for core-set/k-medoids: raw|logits")
        ->capture_default_str();
    run->add_flag("--timing", cfg.record_time, "record wall-clock milliseconds (output no longer reproducible)");
    run->add_option("--out", run_out, "results CSV path")->required();

    // select
    auto* sel = app.add_subcommand("select", "one acquisition step on a dataset");
    std::string sel_data, sel_out, sel_strategy = "coreset-greedy", sel_labeled;
    std::size_t sel_budget = 10, sel_initial = 1;
    std::uint64_t sel_seed = 0;
    double sel_xi_frac = 1e-4, sel_time_limit = 30.0;
    sel->add_option("--data", sel_data, "dataset path")->required();
    sel->add_option("--strategy", sel_strategy, "strategy id")->capture_default_str();
    sel->add_option("--budget", sel_budget, "points to select")->capture_default_str();
    sel->add_option("--labeled", sel_labeled, "comma-separated labeled indices");
    sel->add_option("--initial", sel_initial, "random labeled set size when --labeled is absent")
        ->capture_default_str();
    sel->add_option("--seed", sel_seed, "random seed")->capture_default_str();
    sel->add_option("--xi-frac", sel_xi_frac, "outlier cap fraction")->capture_default_str();
    sel->add_option("--time-limit-s", sel_time_limit, "time limit per feasibility probe")->capture_default_str();
    sel->add_option("--out", sel_out, "output CSV path (stdout when omitted)");

    // solve-kcenter
    auto* kc = app.add_subcommand("solve-kcenter", "k-Center with fixed seed centers");
    std::string kc_data, kc_out, kc_mode = "robust", kc_labeled;
    std::size_t kc_budget = 10, kc_initial = 1;
    std::optional<std::size_t> kc_xi;
    std::uint64_t kc_seed = 0;
    double kc_xi_frac = 1e-4, kc_time_limit = 30.0;
    kc->add_option("--data", kc_data, "dataset path")->required();
    kc->add_option("--mode", kc_mode, "greedy|robust")->capture_default_str();
    kc->add_option("--budget", kc_budget, "extra centers")->capture_default_str();
    kc->add_option("--labeled", kc_labeled, "comma-separated seed centers");
    kc->add_option("--initial", kc_initial, "random seed-center count when --labeled is absent")
        ->capture_default_str();
    kc->add_option("--seed", kc_seed, "random seed")->capture_default_str();
    kc->add_option("--xi", kc_xi, "outlier cap as a count (overrides --xi-frac)");
    kc->add_option("--xi-frac", kc_xi_frac, "outlier cap as a fraction of n")->capture_default_str();
    kc->add_option("--time-limit-s", kc_time_limit, "time limit per feasibility probe")->capture_default_str();
    kc->add_option("--out", kc_out, "output CSV path (stdout when omitted)");

    // bound
    auto* bound = app.add_subcommand("bound", "evaluate the core-set loss bound");
    BoundInputs bin;
    bin.loss_bound = std::sqrt(2.0);
    std::string bound_out;
    bound->add_option("--delta", bin.delta, "cover radius")->required();
    bound->add_option("--lambda-l", bin.lambda_l, "loss Lipschitz constant")->required();
    bound->add_option("--lambda-eta", bin.lambda_eta, "regression-function Lipschitz constant")->required();
    bound->add_option("--loss-bound", bin.loss_bound, "maximum loss L")->capture_default_str();
    bound->add_option("--classes", bin.num_classes, "number of classes C")->required();
    bound->add_option("--n", bin.n, "dataset size")->required();
    bound->add_option("--gamma", bin.gamma, "failure probability")->capture_default_str();
    bound->add_option("--out", bound_out, "output CSV path (stdout when omitted)");

    // plot
    auto* plot = app.add_subcommand("plot", "accuracy curves with mean and std over seeds");
    std::vector<std::string> plot_in, plot_names;
    std::string plot_out;
    plot->add_option("--in", plot_in, "results CSV files, one series each")->required();
    plot->add_option("--names", plot_names, "series names (default: file stems)");
    plot->add_option("--out", plot_out, "output prefix; writes <prefix>.dat and <prefix>.svg")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error,usage," << one_line(e.what()) << '\n';
        return 2;
    }

    if (*gen) {
        save_dataset(gen_out, generate_synthetic(gen_flags.spec).features);
    } else if (*run) {
        cfg.strategy = parse_strategy(run_strategy);
        cfg.seeds = parse_seeds(run_seeds);
        if (run_embedding == "raw") cfg.embedding = Embedding::kRaw;
        else if (run_embedding == "logits") cfg.embedding = Embedding::kLogits;
        else fail(ErrorCode::kInvalidArgument, "unknown embedding '" + run_embedding + "'");
        run_synth.spec.seed = data_seed;
        const auto data = run_data.empty() ? generate_synthetic(run_synth.spec).features : load_dataset(run_data);
        const auto curve = run_experiment(data, cfg);
        save_curve_csv(run_out, curve);
        for (const auto& note : curve.notes) std::cerr << "note," << one_line(note) << '\n';
    } else if (*sel) {
        const auto data = load_dataset(sel_data);
        const auto strategy = parse_strategy(sel_strategy);
        PoolState pool(data.size(), seed_set(sel_labeled, sel_initial, sel_seed, data.size()));
        std::vector<Index> batch;
        if (strategy == Strategy::kRandom) {
            batch = select_random(pool, sel_budget, sel_seed);
        } else if (strategy == Strategy::kEntropy || strategy == Strategy::kOracle) {
            const auto model = fit(data.subset(pool.labeled()));
            const auto probs = predict_proba(model, data);
            if (strategy == Strategy::kEntropy) {
                batch = select_uncertainty(probs, pool, sel_budget);
            } else {
                const auto losses = point_losses(probs, data.labels(), LossKind::kCrossEntropy);
                auto r = select_oracle_uncertainty(losses.values, pool, sel_budget, sel_seed);
                if (r.uniform_fallback) std::cerr << "note,zero losses, uniform draws\n";
                batch = std::move(r.indices);
            }
        } else {
            const DistanceOracle oracle(data);
            if (strategy == Strategy::kKMedoids) {
                batch = select_kmedoids(oracle, pool, sel_budget, sel_seed);
            } else {
                const auto mode = strategy == Strategy::kCoresetGreedy ? CoresetMode::kGreedy : CoresetMode::kRobust;
                const auto r = select_coreset(oracle, pool, sel_budget, mode,
                                              outlier_cap(sel_xi_frac, pool.unlabeled().size()), sel_time_limit);
                if (mode == CoresetMode::kRobust && !r.optimal)
                    std::cerr << "note,feasibility timed out, greedy centers used\n";
                batch = r.indices;
            }
        }
        write_text(sel_out, format_index_csv(batch));
    } else if (*kc) {
        const auto data = load_dataset(kc_data);
        const DistanceOracle oracle(data);
        const auto s0 = seed_set(kc_labeled, kc_initial, kc_seed, data.size());
        KCenterSolution solution;
        if (kc_mode == "greedy") {
            solution = greedy_k_center(oracle, s0, kc_budget);
        } else if (kc_mode == "robust") {
            const std::size_t xi = kc_xi ? *kc_xi : outlier_cap(kc_xi_frac, data.size());
            solution = robust_k_center(oracle, s0, kc_budget, xi, {kc_time_limit});
        } else {
            fail(ErrorCode::kInvalidArgument, "unknown mode '" + kc_mode + "'");
        }
        std::string text = "kind,value\nradius," + format_double(solution.radius) +
                           "\noptimal," + (solution.optimal ? "1" : "0") + '\n';
        for (Index c : solution.centers) text += "center," + std::to_string(c) + '\n';
        for (Index o : solution.outliers) text += "outlier," + std::to_string(o) + '\n';
        write_text(kc_out, text);
    } else if (*bound) {
        const auto t = bound_terms(bin);
        write_text(bound_out, "cover_term,hoeffding_term,bound\n" + format_double(t.cover) + ',' +
                                  format_double(t.hoeffding) + ',' + format_double(t.total) + '\n');
    } else if (*plot) {
        require(plot_names.empty() || plot_names.size() == plot_in.size(), ErrorCode::kInvalidArgument,
                "--names must match --in");
        std::vector<Series> series;
        for (std::size_t k = 0; k < plot_in.size(); ++k) {
            const auto name = plot_names.empty() ? std::filesystem::path(plot_in[k]).stem().string() : plot_names[k];
            series.push_back(summarize(load_curve_csv(plot_in[k]), name));
        }
        emit_plot_data(series, plot_out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const coreset::Error& e) {
        std::cerr << "error," << coreset::to_string(e.code()) << ',' << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error,internal," << one_line(e.what()) << '\n';
        return 3;
    }
}
