// Command-line front end: preprocessing, simulation, fitting, lambda-path
// model selection, decoding, residual diagnostics, and the simulation-study
// harness.
//
// Exit codes: 0 success, 1 usage error, 2 data/domain error, 3 numeric
// failure.

#include "arhmm/core.hpp"
#include "arhmm/decode.hpp"
#include "arhmm/errors.hpp"
#include "arhmm/fit.hpp"
#include "arhmm/geometry.hpp"
#include "arhmm/io.hpp"
#include "arhmm/likelihood.hpp"
#include "arhmm/model.hpp"
#include "arhmm/optim.hpp"
#include "arhmm/rng.hpp"
#include "arhmm/simulate.hpp"
#include "arhmm/special.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace arhmm;

// ---------------------------------------------------------------------------
// shared option plumbing

struct FitFlags {
    int starts = 10;
    int max_iters = 2000;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    int fresh_starts = 2;

    FitOptions to_options() const {
        FitOptions opts;
        opts.n_starts = starts;
        opts.max_iters = max_iters;
        opts.tol = tol;
        opts.seed = seed;
        opts.threads = threads;
        opts.path_fresh_starts = fresh_starts;
        return opts;
    }
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
    cmd->add_option("--starts", flags.starts, "Random optimizer starts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-iters", flags.max_iters, "Optimizer iteration budget")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tol", flags.tol, "Objective-change convergence tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", flags.seed, "Random seed")->capture_default_str();
    cmd->add_option("--threads", flags.threads, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

ModelSpec spec_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("model spec JSON: ") + e.what());
    }
    ModelSpec spec;
    try {
        spec.n_states = j.at("n_states").get<int>();
        auto degrees = [&](const char* key) -> std::vector<int> {
            if (!j.contains(key))
                return std::vector<int>(static_cast<std::size_t>(spec.n_states), 0);
            if (j.at(key).is_number_integer())
                return std::vector<int>(static_cast<std::size_t>(spec.n_states),
                                        j.at(key).get<int>());
            return j.at(key).get<std::vector<int>>();
        };
        spec.p_step = degrees("p_step");
        spec.p_turn = degrees("p_turn");
    } catch (const json::exception& e) {
        throw DataError(std::string("model spec JSON: ") + e.what());
    }
    spec.validate();
    return spec;
}

// --spec accepts inline JSON (starts with '{') or a path to a JSON file.
ModelSpec parse_spec_arg(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && arg[first] == '{') return spec_from_json_text(arg);
    return spec_from_json_text(slurp_file(arg));
}

// ---------------------------------------------------------------------------
// small statistics used by the residual summary

struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double lag1 = 0.0;
    double ks_normal = 0.0;
};

SummaryStats summarize_residuals(const std::vector<double>& values) {
    std::vector<double> defined;
    defined.reserve(values.size());
    for (double v : values)
        if (!std::isnan(v)) defined.push_back(v);

    SummaryStats s;
    s.n = defined.size();
    if (defined.size() < 2) return s;

    double m = 0.0;
    for (double v : defined) m += v;
    m /= static_cast<double>(defined.size());
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : defined) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const auto n = static_cast<double>(defined.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.mean = m;
    s.sd = std::sqrt(m2);
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;

    // Lag-1 autocorrelation over consecutive defined pairs of the original
    // (NaN-preserving) sequence.
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
        if (std::isnan(values[t])) continue;
        den += (values[t] - m) * (values[t] - m);
        if (!std::isnan(values[t + 1])) num += (values[t] - m) * (values[t + 1] - m);
    }
    if (!values.empty() && !std::isnan(values.back()))
        den += (values.back() - m) * (values.back() - m);
    s.lag1 = den > 0.0 ? num / den : 0.0;

    std::sort(defined.begin(), defined.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < defined.size(); ++i) {
        const double cdf = normal_cdf(defined[i]);
        const double hi = static_cast<double>(i + 1) / n - cdf;
        const double lo = cdf - static_cast<double>(i) / n;
        ks = std::max(ks, std::max(hi, lo));
    }
    s.ks_normal = ks;
    return s;
}

void print_residual_summary(const char* label, const SummaryStats& s, int n_clamped) {
    std::cout << label << ": n=" << s.n << " clamped=" << n_clamped << " mean=" << s.mean
              << " sd=" << s.sd << " skewness=" << s.skewness
              << " excess_kurtosis=" << s.excess_kurtosis << " lag1_acf=" << s.lag1
              << " ks_vs_normal=" << s.ks_normal << '\n';
}

double quantile_of(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return std::nan("");
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

// ---------------------------------------------------------------------------
// subcommand bodies

struct PrepArgs {
    std::string input;
    std::string out;
    unsigned downsample_factor = 1;
    double zero_floor = 0.0;
};

void run_prep(const PrepArgs& a) {
    const auto tracks = read_tracks(a.input);
    std::vector<StepTurnSeries> series;
    series.reserve(tracks.size());
    for (const auto& track : tracks) {
        const Track reduced =
            a.downsample_factor > 1 ? downsample(track, a.downsample_factor) : track;
        series.push_back(steps_and_turns(reduced, a.zero_floor));
    }
    write_series(a.out, series);
    std::size_t total = 0;
    for (const auto& s : series) total += s.length();
    std::cout << "prep: " << tracks.size() << " track(s) -> " << series.size()
              << " series, " << total << " observations -> " << a.out << '\n';
}

struct SimulateArgs {
    int degree = 0;
    std::size_t T = 2000;
    std::uint64_t seed = 0;
    std::string id = "sim";
    std::string out_series;
    std::string out_states;
};

void run_simulate(const SimulateArgs& a) {
    SimScenario sc = benchmark_scenario(a.degree);
    sc.T = a.T;
    sc.seed = a.seed;
    sc.track_id = a.id;
    const SimResult result = simulate(sc);
    write_series(a.out_series, {result.series});
    write_states(a.out_states, {result.states});
    std::cout << "simulate: degree " << a.degree << ", T=" << a.T << ", seed=" << a.seed
              << " -> " << a.out_series << ", " << a.out_states << '\n';
}

struct FitArgs {
    std::string input;
    std::string spec_arg;
    std::string out;
    double lambda = 0.0;
    bool use_path = false;
    std::string criterion = "bic";
    std::string grid_arg;
    double epsilon = 1e-6;
    FitFlags flags;
};

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            grid.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ArgumentError("--grid: cannot parse '" + item + "' as a number");
        }
    }
    if (grid.empty()) throw ArgumentError("--grid: empty grid");
    return grid;
}

void print_fit_line(const char* label, const FitResult& fr) {
    std::cout << label << ": lambda=" << fr.lambda << " loglik=" << fr.loglik
              << " aic=" << fr.aic << " bic=" << fr.bic << " edf=" << fr.edf
              << " converged=" << (fr.converged ? "yes" : "no")
              << " starts_agreeing=" << fr.n_starts_agreeing << '\n';
    for (std::size_t j = 0; j < fr.params.mu_step.size(); ++j) {
        // sd_step is the implied steady-state standard deviation cv * mu.
        std::cout << "  state " << (j + 1) << ": mu_step=" << fr.params.mu_step[j]
                  << " cv_step=" << fr.params.cv_step[j]
                  << " sd_step=" << fr.params.cv_step[j] * fr.params.mu_step[j]
                  << " mu_turn=" << fr.params.mu_turn[j]
                  << " kappa_turn=" << fr.params.kappa_turn[j] << '\n';
    }
}

void run_fit(const FitArgs& a) {
    const ModelSpec spec = parse_spec_arg(a.spec_arg);
    const PooledData data(read_series(a.input));
    const FitOptions opts = a.flags.to_options();

    if (!a.use_path) {
        const FitResult fr =
            fit(data, spec, PenaltyConfig{a.lambda, a.epsilon}, opts);
        write_fit_json(a.out, fr);
        print_fit_line("fit", fr);
        return;
    }

    Criterion criterion;
    if (a.criterion == "aic")
        criterion = Criterion::aic;
    else if (a.criterion == "bic")
        criterion = Criterion::bic;
    else
        throw ArgumentError("--criterion must be aic or bic");

    const std::vector<double> grid =
        a.grid_arg.empty() ? default_lambda_grid() : parse_grid(a.grid_arg);
    const LambdaPath path = lambda_path(data, spec, grid, opts, a.epsilon);
    const FitResult selected = select_lambda(path, criterion);
    const Degrees degrees = selected_degrees(selected.params);

    // Re-fit unpenalized at the selected degrees to remove the shrinkage bias
    // from the reported coefficients.
    ModelSpec refit_spec;
    refit_spec.n_states = spec.n_states;
    refit_spec.p_step = degrees.step;
    refit_spec.p_turn = degrees.turn;
    const FitResult refit =
        fit(data, refit_spec, PenaltyConfig{0.0, a.epsilon}, opts);

    json out;
    out["mode"] = "path";
    out["criterion"] = a.criterion;
    out["path"] = json::parse(lambda_path_to_json(path));
    out["selected"] = json::parse(fit_to_json(selected));
    out["selected_degrees"]["step"] = degrees.step;
    out["selected_degrees"]["turn"] = degrees.turn;
    out["refit"] = json::parse(fit_to_json(refit));
    spit_file(a.out, out.dump(2) + "\n");

    print_fit_line("selected", selected);
    std::cout << "selected_degrees: step=(";
    for (std::size_t j = 0; j < degrees.step.size(); ++j)
        std::cout << (j ? "," : "") << degrees.step[j];
    std::cout << ") turn=(";
    for (std::size_t j = 0; j < degrees.turn.size(); ++j)
        std::cout << (j ? "," : "") << degrees.turn[j];
    std::cout << ")\n";
    print_fit_line("refit", refit);
}

struct DecodeArgs {
    std::string input;
    std::string fit_path;
    std::string out;
    std::string truth_path;
};

void run_decode(const DecodeArgs& a) {
    const FitResult fr = read_fit_json(a.fit_path);
    const auto series = read_series(a.input);
    std::vector<StateSequence> decoded;
    decoded.reserve(series.size());
    for (const auto& s : series) decoded.push_back(viterbi(s, fr.params, fr.spec));
    write_states(a.out, decoded);
    std::cout << "decode: " << series.size() << " series -> " << a.out << '\n';

    if (!a.truth_path.empty()) {
        const auto truth = read_states(a.truth_path);
        if (truth.size() != decoded.size())
            throw DataError("truth file has " + std::to_string(truth.size()) +
                            " sequence(s), decoded " + std::to_string(decoded.size()));
        for (const auto& t : truth)
            for (int v : t.states)
                if (v > fr.spec.n_states)
                    throw DataError("truth state " + std::to_string(v) +
                                    " exceeds the fitted state count " +
                                    std::to_string(fr.spec.n_states));
        std::cout << "accuracy=" << pooled_decoding_accuracy(decoded, truth) << '\n';
    }
}

struct ResidualArgs {
    std::string input;
    std::string fit_path;
    std::string out;
};

std::string insert_variable_suffix(const std::string& path, const char* variable) {
    const std::size_t slash = path.find_last_of('/');
    const std::size_t dot = path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return path.substr(0, dot) + "." + variable + path.substr(dot);
    return path + "." + variable + ".csv";
}

void run_residuals(const ResidualArgs& a) {
    const FitResult fr = read_fit_json(a.fit_path);
    const auto series = read_series(a.input);
    std::vector<ResidualSeries> residuals;
    residuals.reserve(series.size());
    int clamped = 0;
    std::vector<double> pooled_step;
    std::vector<double> pooled_turn;
    for (const auto& s : series) {
        residuals.push_back(pseudo_residuals(s, fr.params, fr.spec));
        clamped += residuals.back().n_clamped;
        const auto& r = residuals.back();
        pooled_step.insert(pooled_step.end(), r.r_step.begin(), r.r_step.end());
        pooled_turn.insert(pooled_turn.end(), r.r_turn.begin(), r.r_turn.end());
    }
    const std::string out_step = insert_variable_suffix(a.out, "step");
    const std::string out_turn = insert_variable_suffix(a.out, "turn");
    write_residuals(out_step, residuals, ResidualVariable::step);
    write_residuals(out_turn, residuals, ResidualVariable::turn);
    std::cout << "residuals: " << series.size() << " series -> " << out_step << ", "
              << out_turn << '\n';
    print_residual_summary("step", summarize_residuals(pooled_step), clamped);
    print_residual_summary("turn", summarize_residuals(pooled_turn), clamped);
}

struct StudyArgs {
    std::string scenario = "table1";
    int replicates = 25;
    std::string out_dir;
    std::size_t T = 2000;
    std::vector<std::size_t> stability_T = {100, 500};
    std::vector<std::size_t> consistency_T = {100, 500, 2000};
    FitFlags flags;
};

// Truth parameters expressed in a (possibly misspecified) fit structure:
// shared AR lags copy over, extra lags start at zero (the working transform
// nudges them interior).
Parameters embed_truth(const Parameters& truth, const ModelSpec& fit_spec) {
    Parameters p = truth;
    auto resize_rows = [](std::vector<std::vector<double>>& rows,
                          const std::vector<int>& degrees) {
        for (std::size_t j = 0; j < rows.size(); ++j)
            rows[j].resize(static_cast<std::size_t>(degrees[j]), 0.0);
    };
    resize_rows(p.phi_step, fit_spec.p_step);
    resize_rows(p.phi_turn, fit_spec.p_turn);
    return p;
}

void run_study(const StudyArgs& a) {
    if (a.scenario != "table1")
        throw ArgumentError("unknown scenario '" + a.scenario + "' (available: table1)");
    if (a.replicates < 1) throw ArgumentError("--replicates must be >= 1");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw DataError("cannot create output directory '" + a.out_dir + "': " +
                            ec.message());

    const int R = a.replicates;
    const auto base_opts = a.flags.to_options();

    // ---- decoding accuracy: sim degree x fit degree cross on shared data --
    struct AccuracyRow {
        double accuracy[4] = {0, 0, 0, 0};
    };
    std::vector<AccuracyRow> acc(static_cast<std::size_t>(4 * R));
    parallel_for(
        acc.size(),
        [&](std::size_t task) {
            const int sim_deg = static_cast<int>(task) / R;
            const int rep = static_cast<int>(task) % R;
            SimScenario sc = benchmark_scenario(sim_deg);
            sc.T = a.T;
            sc.seed = derive_seed(a.flags.seed, 1, static_cast<std::uint64_t>(sim_deg),
                                  static_cast<std::uint64_t>(rep));
            const SimResult sim = simulate(sc);
            const PooledData data({sim.series});
            for (int fit_deg = 0; fit_deg < 4; ++fit_deg) {
                FitOptions opts = base_opts;
                opts.seed = derive_seed(a.flags.seed, 2,
                                        static_cast<std::uint64_t>(sim_deg * 4 + fit_deg),
                                        static_cast<std::uint64_t>(rep));
                const ModelSpec spec = ModelSpec::uniform(2, fit_deg, fit_deg);
                const FitResult fr = fit(data, spec, PenaltyConfig{}, opts);
                const StateSequence decoded = viterbi(sim.series, fr.params, fr.spec);
                acc[task].accuracy[fit_deg] = decoding_accuracy(decoded, sim.states);
            }
        },
        a.flags.threads);

    {
        std::ostringstream rows;
        rows << "sim_degree,fit_degree,replicate,accuracy\n";
        for (int sim_deg = 0; sim_deg < 4; ++sim_deg)
            for (int rep = 0; rep < R; ++rep)
                for (int fit_deg = 0; fit_deg < 4; ++fit_deg)
                    rows << sim_deg << ',' << fit_deg << ',' << rep << ','
                         << format_double(
                                acc[static_cast<std::size_t>(sim_deg * R + rep)]
                                    .accuracy[fit_deg])
                         << '\n';
        spit_file(a.out_dir + "/accuracy.csv", rows.str());

        std::ostringstream summary;
        summary << "sim_degree,fit_degree,mean_accuracy,sd_accuracy\n";
        std::cout << "accuracy (rows: sim degree, cols: fit degree, " << R
                  << " replicate mean)\n";
        for (int sim_deg = 0; sim_deg < 4; ++sim_deg) {
            std::cout << "  sim p=" << sim_deg << ":";
            for (int fit_deg = 0; fit_deg < 4; ++fit_deg) {
                double mean = 0.0;
                for (int rep = 0; rep < R; ++rep)
                    mean += acc[static_cast<std::size_t>(sim_deg * R + rep)]
                                .accuracy[fit_deg];
                mean /= R;
                double var = 0.0;
                for (int rep = 0; rep < R; ++rep) {
                    const double d = acc[static_cast<std::size_t>(sim_deg * R + rep)]
                                         .accuracy[fit_deg] -
                                     mean;
                    var += d * d;
                }
                const double sd = R > 1 ? std::sqrt(var / (R - 1)) : 0.0;
                summary << sim_deg << ',' << fit_deg << ',' << format_double(mean) << ','
                        << format_double(sd) << '\n';
                std::cout << "  " << mean;
            }
            std::cout << '\n';
        }
        spit_file(a.out_dir + "/accuracy_summary.csv", summary.str());
    }

    // ---- stability: single-start runs vs truth-anchored optimum ----------
    struct StabilityRow {
        int success[4] = {0, 0, 0, 0};
        double objective[4] = {0, 0, 0, 0};
        double anchor[4] = {0, 0, 0, 0};
    };
    const std::size_t n_stab_T = a.stability_T.size();
    std::vector<StabilityRow> stab(n_stab_T * 4 * static_cast<std::size_t>(R));
    parallel_for(
        stab.size(),
        [&](std::size_t task) {
            const std::size_t ti = task / static_cast<std::size_t>(4 * R);
            const int sim_deg = static_cast<int>((task / static_cast<std::size_t>(R)) % 4);
            const int rep = static_cast<int>(task % static_cast<std::size_t>(R));
            SimScenario sc = benchmark_scenario(sim_deg);
            sc.T = a.stability_T[ti];
            sc.seed = derive_seed(a.flags.seed, 3, ti * 16 + static_cast<std::uint64_t>(sim_deg),
                                  static_cast<std::uint64_t>(rep));
            const SimResult sim = simulate(sc);
            const PooledData data({sim.series});
            for (int fit_deg = 0; fit_deg < 4; ++fit_deg) {
                const ModelSpec spec = ModelSpec::uniform(2, fit_deg, fit_deg);
                const PenaltyConfig pen{};
                // Truth-anchored reference: descend from the true parameters.
                const Objective objective = [&](const std::vector<double>& w) {
                    return -penalized_cond_loglik(data, from_working(w, spec), spec, pen);
                };
                MinimizeOptions mopts;
                mopts.max_iters = base_opts.max_iters;
                mopts.tol = base_opts.tol;
                const MinimizeResult anchor_run = minimize(
                    objective, to_working(embed_truth(sc.params, spec), spec), mopts);
                // One random start, as one "run" of the stability protocol.
                FitOptions opts = base_opts;
                opts.n_starts = 1;
                opts.seed = derive_seed(a.flags.seed, 4,
                                        ti * 64 +
                                            static_cast<std::uint64_t>(sim_deg * 4 + fit_deg),
                                        static_cast<std::uint64_t>(rep));
                const FitResult fr = fit(data, spec, pen, opts);
                stab[task].anchor[fit_deg] = -anchor_run.f;
                stab[task].objective[fit_deg] = fr.penalized_objective;
                stab[task].success[fit_deg] =
                    fr.penalized_objective >= -anchor_run.f - 1e-3 ? 1 : 0;
            }
        },
        a.flags.threads);

    {
        std::ostringstream rows;
        rows << "T,sim_degree,fit_degree,replicate,success,objective,anchor\n";
        std::ostringstream summary;
        summary << "T,sim_degree,fit_degree,prop_success\n";
        for (std::size_t ti = 0; ti < n_stab_T; ++ti) {
            for (int sim_deg = 0; sim_deg < 4; ++sim_deg) {
                for (int fit_deg = 0; fit_deg < 4; ++fit_deg) {
                    int hits = 0;
                    for (int rep = 0; rep < R; ++rep) {
                        const auto& row =
                            stab[ti * static_cast<std::size_t>(4 * R) +
                                 static_cast<std::size_t>(sim_deg * R + rep)];
                        rows << a.stability_T[ti] << ',' << sim_deg << ',' << fit_deg
                             << ',' << rep << ',' << row.success[fit_deg] << ','
                             << format_double(row.objective[fit_deg]) << ','
                             << format_double(row.anchor[fit_deg]) << '\n';
                        hits += row.success[fit_deg];
                    }
                    summary << a.stability_T[ti] << ',' << sim_deg << ',' << fit_deg
                            << ',' << format_double(static_cast<double>(hits) / R) << '\n';
                }
            }
        }
        spit_file(a.out_dir + "/stability.csv", rows.str());
        spit_file(a.out_dir + "/stability_summary.csv", summary.str());
    }

    // ---- consistency: correctly specified fits across T ------------------
    struct ConsistencyRow {
        double mu_step[2] = {0, 0};
        double cv_step[2] = {0, 0};
        double kappa_turn[2] = {0, 0};
    };
    const std::size_t n_cons_T = a.consistency_T.size();
    std::vector<ConsistencyRow> cons(4 * n_cons_T * static_cast<std::size_t>(R));
    parallel_for(
        cons.size(),
        [&](std::size_t task) {
            const int deg = static_cast<int>(task / (n_cons_T * static_cast<std::size_t>(R)));
            const std::size_t ti =
                (task / static_cast<std::size_t>(R)) % n_cons_T;
            const int rep = static_cast<int>(task % static_cast<std::size_t>(R));
            SimScenario sc = benchmark_scenario(deg);
            sc.T = a.consistency_T[ti];
            sc.seed = derive_seed(a.flags.seed, 5, ti * 16 + static_cast<std::uint64_t>(deg),
                                  static_cast<std::uint64_t>(rep));
            const SimResult sim = simulate(sc);
            const PooledData data({sim.series});
            FitOptions opts = base_opts;
            opts.seed = derive_seed(a.flags.seed, 6, ti * 16 + static_cast<std::uint64_t>(deg),
                                    static_cast<std::uint64_t>(rep));
            const FitResult fr = fit(data, sc.spec, PenaltyConfig{}, opts);
            for (int j = 0; j < 2; ++j) {
                cons[task].mu_step[j] = fr.params.mu_step[static_cast<std::size_t>(j)];
                cons[task].cv_step[j] = fr.params.cv_step[static_cast<std::size_t>(j)];
                cons[task].kappa_turn[j] =
                    fr.params.kappa_turn[static_cast<std::size_t>(j)];
            }
        },
        a.flags.threads);

    {
        std::ostringstream rows;
        rows << "degree,T,replicate,mu_step_1,mu_step_2,cv_step_1,cv_step_2,"
                "kappa_turn_1,kappa_turn_2\n";
        std::ostringstream summary;
        summary << "degree,T,q1_mu_step_2,median_mu_step_2,q3_mu_step_2,iqr_mu_step_2\n";
        for (int deg = 0; deg < 4; ++deg) {
            for (std::size_t ti = 0; ti < n_cons_T; ++ti) {
                std::vector<double> mu2;
                mu2.reserve(static_cast<std::size_t>(R));
                for (int rep = 0; rep < R; ++rep) {
                    const auto& row =
                        cons[static_cast<std::size_t>(deg) * n_cons_T *
                                 static_cast<std::size_t>(R) +
                             ti * static_cast<std::size_t>(R) +
                             static_cast<std::size_t>(rep)];
                    rows << deg << ',' << a.consistency_T[ti] << ',' << rep << ','
                         << format_double(row.mu_step[0]) << ','
                         << format_double(row.mu_step[1]) << ','
                         << format_double(row.cv_step[0]) << ','
                         << format_double(row.cv_step[1]) << ','
                         << format_double(row.kappa_turn[0]) << ','
                         << format_double(row.kappa_turn[1]) << '\n';
                    mu2.push_back(row.mu_step[1]);
                }
                const double q1 = quantile_of(mu2, 0.25);
                const double q2 = quantile_of(mu2, 0.5);
                const double q3 = quantile_of(mu2, 0.75);
                summary << deg << ',' << a.consistency_T[ti] << ',' << format_double(q1)
                        << ',' << format_double(q2) << ',' << format_double(q3) << ','
                        << format_double(q3 - q1) << '\n';
            }
        }
        spit_file(a.out_dir + "/consistency.csv", rows.str());
        spit_file(a.out_dir + "/consistency_summary.csv", summary.str());
    }

    std::cout << "study: wrote accuracy, stability and consistency tables to "
              << a.out_dir << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Autoregressive hidden Markov models for step/turn movement series"};
    app.require_subcommand(1);

    PrepArgs prep_args;
    auto* prep_cmd = app.add_subcommand(
        "prep", "Convert a location CSV into step/turn series");
    prep_cmd->add_option("input", prep_args.input, "Input CSV (id,x,y[,t_sec])")
        ->required();
    prep_cmd->add_option("--downsample", prep_args.downsample_factor,
                         "Keep every k-th location")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    prep_cmd
        ->add_option("--zero-floor", prep_args.zero_floor,
                     "Raise zero-length steps to this value (0 = reject them)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    prep_cmd->add_option("--out", prep_args.out, "Output series CSV")->required();

    SimulateArgs sim_args;
    auto* sim_cmd =
        app.add_subcommand("simulate", "Draw a series from a benchmark scenario");
    sim_cmd->add_option("--degree", sim_args.degree, "AR degree of the scenario (0-3)")
        ->required()
        ->check(CLI::Range(0, 3));
    sim_cmd->add_option("--T", sim_args.T, "Series length")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim_args.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--id", sim_args.id, "Track id of the output")
        ->capture_default_str();
    sim_cmd->add_option("--out-series", sim_args.out_series, "Output series CSV")
        ->required();
    sim_cmd->add_option("--out-states", sim_args.out_states, "Output true-states CSV")
        ->required();

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Penalized maximum-likelihood fit");
    fit_cmd->add_option("input", fit_args.input, "Input series CSV")->required();
    fit_cmd
        ->add_option("--spec", fit_args.spec_arg,
                     "Model spec: inline JSON or a JSON file "
                     "({\"n_states\":2,\"p_step\":1,\"p_turn\":[1,2]})")
        ->required();
    fit_cmd->add_option("--out", fit_args.out, "Output fit JSON")->required();
    auto* lambda_opt = fit_cmd
                           ->add_option("--lambda", fit_args.lambda,
                                        "Penalty strength for a single fit")
                           ->check(CLI::NonNegativeNumber)
                           ->capture_default_str();
    auto* path_flag = fit_cmd->add_flag(
        "--path", fit_args.use_path,
        "Fit a whole lambda grid, select by --criterion, re-fit unpenalized at "
        "the selected degrees");
    path_flag->excludes(lambda_opt);
    fit_cmd
        ->add_option("--criterion", fit_args.criterion,
                     "Selection criterion for --path (aic|bic)")
        ->check(CLI::IsMember({"aic", "bic"}))
        ->capture_default_str();
    fit_cmd->add_option("--grid", fit_args.grid_arg,
                        "Comma-separated lambda grid (must start at 0)");
    fit_cmd->add_option("--epsilon", fit_args.epsilon, "Penalty smoothing epsilon")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fit_cmd
        ->add_option("--fresh-starts", fit_args.flags.fresh_starts,
                     "Fresh random starts per positive-lambda grid point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_fit_flags(fit_cmd, fit_args.flags);

    DecodeArgs decode_args;
    auto* decode_cmd = app.add_subcommand("decode", "Most-likely state path");
    decode_cmd->add_option("input", decode_args.input, "Input series CSV")->required();
    decode_cmd->add_option("--fit", decode_args.fit_path, "Fit JSON")->required();
    decode_cmd->add_option("--out", decode_args.out, "Output states CSV")->required();
    decode_cmd->add_option("--truth", decode_args.truth_path,
                           "True states CSV; prints decoding accuracy");

    ResidualArgs residual_args;
    auto* residual_cmd =
        app.add_subcommand("residuals", "One-step-ahead pseudo-residuals");
    residual_cmd->add_option("input", residual_args.input, "Input series CSV")
        ->required();
    residual_cmd->add_option("--fit", residual_args.fit_path, "Fit JSON")->required();
    residual_cmd
        ->add_option("--out", residual_args.out,
                     "Output CSV path; .step/.turn variants are written")
        ->required();

    StudyArgs study_args;
    auto* study_cmd =
        app.add_subcommand("study", "Simulation study: accuracy, stability, consistency");
    study_cmd->add_option("--scenario", study_args.scenario, "Scenario preset")
        ->check(CLI::IsMember({"table1"}))
        ->capture_default_str();
    study_cmd->add_option("--replicates", study_args.replicates, "Replicates per cell")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    study_cmd->add_option("--out", study_args.out_dir, "Output directory")->required();
    study_cmd->add_option("--T", study_args.T, "Series length for the accuracy cross")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    study_cmd
        ->add_option("--stability-T", study_args.stability_T,
                     "Series lengths for the stability protocol")
        ->delimiter(',')
        ->capture_default_str();
    study_cmd
        ->add_option("--consistency-T", study_args.consistency_T,
                     "Series lengths for the consistency protocol")
        ->delimiter(',')
        ->capture_default_str();
    study_cmd
        ->add_option("--fresh-starts", study_args.flags.fresh_starts,
                     "(unused; kept for flag symmetry)")
        ->group(""); // hidden
    add_fit_flags(study_cmd, study_args.flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (prep_cmd->parsed()) run_prep(prep_args);
        if (sim_cmd->parsed()) run_simulate(sim_args);
        if (fit_cmd->parsed()) run_fit(fit_args);
        if (decode_cmd->parsed()) run_decode(decode_args);
        if (residual_cmd->parsed()) run_residuals(residual_args);
        if (study_cmd->parsed()) run_study(study_args);
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
