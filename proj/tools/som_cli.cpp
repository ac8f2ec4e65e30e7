// Experiment harness for the sum-of-minimum library.
//
// Subcommands: gpca-compare | mlr-compare | mnr-train | bounds-check |
//              seed | solve | gen-data
//
// Every command accepts --seed and writes deterministic CSV files plus a
// summary.json carrying the fully resolved configuration.  Wall-clock
// timings are reported only in summary.json; the CSV outputs are
// byte-reproducible for a fixed seed.  Option precedence: command-line flag
// > config file > built-in default.  Exit codes: 0 success, 2 configuration
// error, 3 failed check in bounds-check mode.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <som/som.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace som;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

class csv_file {
  public:
    csv_file(const fs::path& path, const std::string& header) : os_(path) {
        if (!os_) throw invalid_input("cannot open " + path.string());
        os_ << header << '\n';
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

  private:
    std::ofstream os_;
};

struct common_opts {
    std::string config_path;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::string out_dir;
    std::size_t trials = 0;  // 0 = command default
    std::string format = "csv";

    json file;  // parsed config file ({} when absent)

    fs::path out_root() const {
        if (!out_dir.empty()) return out_dir;
        if (const char* env = std::getenv("SOM_OUT_DIR")) return env;
        return "som-out";
    }
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw invalid_config("config file not found: " + path);
    json j;
    is >> j;
    return j;
}

// flag > config file > default
template <typename T>
T resolve(const CLI::Option* opt, T flag_value, const json& section, const char* key,
          T fallback) {
    if (opt && opt->count() > 0) return flag_value;
    if (section.contains(key)) return section[key].get<T>();
    return fallback;
}

fs::path prepare_dir(const common_opts& common, const std::string& command) {
    const fs::path dir = common.out_root() / command;
    fs::create_directories(dir);
    return dir;
}

void write_summary(const fs::path& dir, const json& summary) {
    std::ofstream os(dir / "summary.json");
    os << summary.dump(2) << '\n';
}

json common_json(const common_opts& c, std::size_t trials) {
    return {{"seed", c.seed}, {"jobs", c.jobs}, {"trials", trials},
            {"out", (c.out_root()).string()}, {"format", c.format}};
}

// Emit rows either as file.csv or file.json (array of objects), per --format.
void write_table(const fs::path& dir, const std::string& name, const std::string& format,
                 const std::string& header, const std::vector<std::vector<std::string>>& rows) {
    if (format == "json") {
        std::vector<std::string> cols;
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        json arr = json::array();
        for (const auto& r : rows) {
            json obj;
            for (std::size_t i = 0; i < cols.size(); ++i) obj[cols[i]] = r[i];
            arr.push_back(obj);
        }
        std::ofstream os(dir / (name + ".json"));
        os << arr.dump(2) << '\n';
    } else {
        csv_file f(dir / (name + ".csv"), header);
        for (const auto& r : rows) f.row(r);
    }
}

// ---------------------------------------------------------------------------
// gpca-compare

int cmd_gpca_compare(const common_opts& common, const json& section,
                     const std::vector<std::size_t>& ks, const std::vector<std::size_t>& ds,
                     const std::vector<std::size_t>& iter_caps, std::size_t n,
                     std::size_t trials) {
    const fs::path dir = prepare_dir(common, "gpca-compare");
    std::vector<std::vector<std::string>> trial_rows, cell_rows;
    json cells = json::array();

    for (std::size_t k : ks) {
        for (std::size_t d : ds) {
            for (std::size_t cap : iter_caps) {
                gpca_cell_config cfg;
                cfg.k = k;
                cfg.d = d;
                cfg.r = d - 2;
                cfg.n = n;
                cfg.iters = cap;
                cfg.trials = trials;
                cfg.jobs = common.jobs;
                cfg.seed = derive_seed(common.seed, k * 1000 + d * 10 + cap);
                const auto rows = run_gpca_cell(cfg);

                double som_acc = 0.0, sop_acc = 0.0, som_s = 0.0, sop_s = 0.0;
                for (const auto& r : rows) {
                    trial_rows.push_back({std::to_string(k), std::to_string(d),
                                          std::to_string(cap), std::to_string(r.trial),
                                          fmt(r.som_accuracy), fmt(r.sop_accuracy),
                                          std::to_string(r.som_iters)});
                    som_acc += r.som_accuracy;
                    sop_acc += r.sop_accuracy;
                    som_s += r.som_seconds;
                    sop_s += r.sop_seconds;
                }
                const double nt = static_cast<double>(rows.size());
                cell_rows.push_back({std::to_string(k), std::to_string(d), std::to_string(cap),
                                     std::to_string(rows.size()), fmt(som_acc / nt),
                                     fmt(sop_acc / nt)});
                cells.push_back({{"k", k},
                                 {"d", d},
                                 {"iters", cap},
                                 {"som_mean_accuracy", som_acc / nt},
                                 {"sop_mean_accuracy", sop_acc / nt},
                                 {"som_mean_seconds", som_s / nt},
                                 {"sop_mean_seconds", sop_s / nt}});
            }
        }
    }

    write_table(dir, "trials", common.format,
                "k,d,iters,trial,som_accuracy,sop_accuracy,som_iters", trial_rows);
    write_table(dir, "cells", common.format,
                "k,d,iters,trials,som_mean_accuracy,sop_mean_accuracy", cell_rows);
    json summary = {{"command", "gpca-compare"},
                    {"common", common_json(common, trials)},
                    {"grid", {{"k", ks}, {"d", ds}, {"iters", iter_caps}, {"n", n}}},
                    {"config_file_section", section},
                    {"cells", cells}};
    write_summary(dir, summary);
    return 0;
}

// ---------------------------------------------------------------------------
// mlr-compare

int cmd_mlr_compare(const common_opts& common, const json& section,
                    const std::vector<std::size_t>& ks, const std::vector<std::size_t>& ds,
                    std::size_t n, double lambda, double sigma, std::size_t max_iters,
                    std::size_t trials) {
    const fs::path dir = prepare_dir(common, "mlr-compare");
    std::vector<std::vector<std::string>> trial_rows, cell_rows;
    json cells = json::array();

    for (std::size_t k : ks) {
        for (std::size_t d : ds) {
            mlr_cell_config cfg;
            cfg.k = k;
            cfg.d = d;
            cfg.n = n;
            cfg.lambda = lambda;
            cfg.sigma = sigma;
            cfg.max_iters = max_iters;
            cfg.trials = trials;
            cfg.jobs = common.jobs;
            cfg.seed = derive_seed(common.seed, k * 100 + d);
            const auto rows = run_mlr_cell(cfg);

            std::map<init_method, std::pair<double, double>> agg;  // failures, iters
            std::map<init_method, std::size_t> counts;
            for (const auto& r : rows) {
                trial_rows.push_back({std::to_string(k), std::to_string(d),
                                      std::to_string(r.trial), init_method_name(r.method),
                                      r.success ? "1" : "0", std::to_string(r.iters)});
                agg[r.method].first += r.success ? 0.0 : 1.0;
                agg[r.method].second += static_cast<double>(r.iters);
                ++counts[r.method];
            }
            for (const auto& [method, sums] : agg) {
                const double nt = static_cast<double>(counts[method]);
                cell_rows.push_back({std::to_string(k), std::to_string(d),
                                     init_method_name(method), std::to_string(counts[method]),
                                     fmt(sums.first / nt), fmt(sums.second / nt)});
                cells.push_back({{"k", k},
                                 {"d", d},
                                 {"method", init_method_name(method)},
                                 {"failure_rate", sums.first / nt},
                                 {"mean_iters", sums.second / nt}});
            }
        }
    }

    write_table(dir, "trials", common.format, "k,d,trial,method,success,iters", trial_rows);
    write_table(dir, "cells", common.format, "k,d,method,trials,failure_rate,mean_iters",
                cell_rows);
    json summary = {{"command", "mlr-compare"},
                    {"common", common_json(common, trials)},
                    {"grid",
                     {{"k", ks},
                      {"d", ds},
                      {"n", n},
                      {"lambda", lambda},
                      {"sigma", sigma},
                      {"max_iters", max_iters}}},
                    {"config_file_section", section},
                    {"cells", cells}};
    write_summary(dir, summary);
    return 0;
}

// ---------------------------------------------------------------------------
// mnr-train

int cmd_mnr_train(const common_opts& common, const json& section,
                  const std::vector<std::pair<std::size_t, std::size_t>>& dims, std::size_t k,
                  std::size_t n, std::size_t n_test, double lambda, double sigma,
                  std::size_t period, double lr, std::size_t max_epochs,
                  std::size_t fixed_epochs, std::size_t trials) {
    const fs::path dir = prepare_dir(common, "mnr-train");
    const bool fixed = fixed_epochs > 0;
    std::vector<std::vector<std::string>> trial_rows, cell_rows;
    json cells = json::array();

    for (const auto& [d_in, d_hidden] : dims) {
        mnr_cell_config cfg;
        cfg.k = k;
        cfg.d_in = d_in;
        cfg.d_hidden = d_hidden;
        cfg.n = n;
        cfg.n_test = n_test;
        cfg.lambda = lambda;
        cfg.sigma = sigma;
        cfg.reclass_period = period;
        cfg.lr = lr;
        cfg.max_epochs = max_epochs;
        cfg.fixed_epochs = fixed_epochs;
        cfg.trials = trials;
        cfg.jobs = common.jobs;
        cfg.seed = derive_seed(common.seed, d_in * 100 + d_hidden);
        const auto rows = run_mnr_cell(cfg);

        std::map<init_method, json> agg;
        std::map<init_method, std::size_t> counts;
        std::map<init_method, double> epochs_sum, train_sum, test_sum, reach_sum;
        for (const auto& r : rows) {
            if (fixed) {
                trial_rows.push_back({std::to_string(d_in), std::to_string(d_hidden),
                                      std::to_string(r.trial), init_method_name(r.method),
                                      std::to_string(r.epochs), fmt(r.train_loss),
                                      fmt(r.test_loss)});
            } else {
                trial_rows.push_back({std::to_string(d_in), std::to_string(d_hidden),
                                      std::to_string(r.trial), init_method_name(r.method),
                                      std::to_string(r.epochs), r.reached_target ? "1" : "0"});
            }
            ++counts[r.method];
            epochs_sum[r.method] += static_cast<double>(r.epochs);
            train_sum[r.method] += r.train_loss;
            test_sum[r.method] += r.test_loss;
            reach_sum[r.method] += r.reached_target ? 1.0 : 0.0;
        }
        for (const auto& [method, count] : counts) {
            const double nt = static_cast<double>(count);
            if (fixed) {
                cell_rows.push_back({std::to_string(d_in), std::to_string(d_hidden),
                                     init_method_name(method), std::to_string(count),
                                     fmt(train_sum[method] / nt), fmt(test_sum[method] / nt)});
                cells.push_back({{"d_in", d_in},
                                 {"d_hidden", d_hidden},
                                 {"method", init_method_name(method)},
                                 {"mean_train_loss", train_sum[method] / nt},
                                 {"mean_test_loss", test_sum[method] / nt}});
            } else {
                cell_rows.push_back({std::to_string(d_in), std::to_string(d_hidden),
                                     init_method_name(method), std::to_string(count),
                                     fmt(epochs_sum[method] / nt), fmt(reach_sum[method] / nt)});
                cells.push_back({{"d_in", d_in},
                                 {"d_hidden", d_hidden},
                                 {"method", init_method_name(method)},
                                 {"mean_epochs", epochs_sum[method] / nt},
                                 {"reach_rate", reach_sum[method] / nt}});
            }
        }
    }

    if (fixed) {
        write_table(dir, "trials", common.format,
                    "d_in,d_hidden,trial,method,epochs,train_loss,test_loss", trial_rows);
        write_table(dir, "cells", common.format,
                    "d_in,d_hidden,method,trials,mean_train_loss,mean_test_loss", cell_rows);
    } else {
        write_table(dir, "trials", common.format, "d_in,d_hidden,trial,method,epochs,reached",
                    trial_rows);
        write_table(dir, "cells", common.format,
                    "d_in,d_hidden,method,trials,mean_epochs,reach_rate", cell_rows);
    }
    json dims_json = json::array();
    for (const auto& [a, b] : dims) dims_json.push_back({a, b});
    json summary = {{"command", "mnr-train"},
                    {"common", common_json(common, trials)},
                    {"grid",
                     {{"dims", dims_json},
                      {"k", k},
                      {"n", n},
                      {"n_test", n_test},
                      {"lambda", lambda},
                      {"sigma", sigma},
                      {"reclass_period", period},
                      {"lr", lr},
                      {"max_epochs", max_epochs},
                      {"fixed_epochs", fixed_epochs}}},
                    {"config_file_section", section},
                    {"cells", cells}};
    write_summary(dir, summary);
    return 0;
}

// ---------------------------------------------------------------------------
// bounds-check

int cmd_bounds_check(const common_opts& common, const json& section, std::size_t trials) {
    const fs::path dir = prepare_dir(common, "bounds-check");
    std::vector<std::vector<std::string>> rows;
    bool all_pass = true;
    json checks = json::array();

    auto record = [&](const std::string& name, const std::string& instance, double measured,
                      double bound, bool pass) {
        rows.push_back({name, instance, fmt(measured), fmt(bound), pass ? "1" : "0"});
        checks.push_back({{"check", name},
                          {"instance", instance},
                          {"measured", measured},
                          {"bound", bound},
                          {"pass", pass}});
        all_pass = all_pass && pass;
    };

    // k-means++ reduction: careful-seeding weights match squared distances
    {
        rng gen(derive_seed(common.seed, 1));
        double worst = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            const std::size_t n = 5 + gen.uniform_index(20);
            const std::size_t k = 2 + gen.uniform_index(3);
            std::vector<Vec> pts;
            for (std::size_t i = 0; i < n; ++i) pts.push_back(gen.normal_vec(3));
            worst = std::max(worst, kmeanspp_weight_deviation(pts, k, gen.next()));
        }
        record("kmeanspp_reduction", "20 random quadratic instances", worst, 1e-12,
               worst <= 1e-12);
    }

    // Initialization ceiling on tiny brute-forced instances
    {
        rng gen(derive_seed(common.seed, 2));
        for (int inst = 0; inst < 3; ++inst) {
            std::vector<Vec> centers;
            for (int i = 0; i < 7; ++i) centers.push_back(gen.normal_vec(2));
            const problem prob = make_quad_problem(centers);
            const brute_force_result bf = brute_force_optimum(prob, 2);
            rng egen(derive_seed(common.seed, 20 + inst));
            const ratio_stats stats = init_bound_experiment(prob, 2, trials,
                                                            score_mode::exact_gap(), egen,
                                                            bf.objective);
            const double upper = stats.mean + 2.326347 * stats.stderr_mean;
            record("init_ratio_ceiling", "quad N=7 k=2 #" + std::to_string(inst), upper,
                   stats.ceiling, upper <= stats.ceiling);
        }
    }

    // Lower-bound instance: ratio > 1 and increasing in L/mu
    {
        const lower_bound_instance easy = build_lower_bound_instance(3, 50, 1e4, 10.0, 1.0);
        const lower_bound_instance hard = build_lower_bound_instance(3, 50, 1e4, 100.0, 1.0);
        rng g1(derive_seed(common.seed, 3)), g2(derive_seed(common.seed, 3));
        const ratio_stats easy_stats =
            init_bound_experiment(easy.prob, 3, trials, score_mode::exact_gap(), g1, easy.F_star);
        const ratio_stats hard_stats =
            init_bound_experiment(hard.prob, 3, trials, score_mode::exact_gap(), g2, hard.F_star);
        record("init_ratio_lower_bound", "simplex k=3 n=50 L/mu=10", easy_stats.mean, 1.0,
               easy_stats.mean > 1.0);
        record("init_ratio_conditioning", "simplex L/mu: 10 vs 100", hard_stats.mean,
               easy_stats.mean, hard_stats.mean > easy_stats.mean);
    }

    // Convergence rates on random ridge instances
    {
        rng gen(derive_seed(common.seed, 4));
        for (int inst = 0; inst < 3; ++inst) {
            const labeled_dataset ds = gen_mlr(3, 5, 200, 0.01, gen.next());
            const problem prob = make_ridge_problem(ds.inputs, ds.targets, 0.01);
            rng igen(derive_seed(common.seed, 40 + inst));
            const auto init = careful_seed(prob, 3, score_mode::exact_gap(), igen);

            const bound_check gd = check_gd_rate(prob, init.params, 200);
            record("lloyd_gd_rate", "ridge N=200 d=5 #" + std::to_string(inst), gd.measured,
                   gd.bound, gd.pass);

            const momentum_check_result mm = check_momentum_rate(
                prob, init.params, 200, 0.5, 1.25, derive_seed(common.seed, 50 + inst));
            record("momentum_rate", "ridge N=200 d=5 #" + std::to_string(inst), mm.rate.measured,
                   mm.rate.bound, mm.rate.pass && mm.size_control_ok);
        }
    }

    write_table(dir, "checks", common.format, "check,instance,measured,bound,pass", rows);
    json summary = {{"command", "bounds-check"},
                    {"common", common_json(common, trials)},
                    {"config_file_section", section},
                    {"all_pass", all_pass},
                    {"checks", checks}};
    write_summary(dir, summary);
    std::cout << (all_pass ? "bounds-check: all checks passed\n"
                           : "bounds-check: FAILURES, see checks output\n");
    return all_pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// seed / solve / gen-data: generic synthetic-instance utilities

struct family_opts {
    std::string family = "mlr";  // mlr | gpca | mnr
    std::size_t k = 4, d = 4, d_hidden = 3, r = 0, n = 1000, n_test = 200;
    double lambda = 0.01, sigma = 0.01;
};

struct built_instance {
    problem prob;
    labeled_dataset data;
    std::size_t frame_rank = 0;
};

built_instance build_family(const family_opts& f, std::uint64_t seed) {
    built_instance out;
    if (f.family == "mlr") {
        out.data = gen_mlr(f.k, f.d, f.n, f.sigma, seed);
        out.prob = make_ridge_problem(out.data.inputs, out.data.targets, f.lambda);
    } else if (f.family == "gpca") {
        const std::size_t r = f.r > 0 ? f.r : f.d - 2;
        out.data = gen_gpca(f.k, f.d, r, f.n, seed);
        out.prob = make_gpca_problem(out.data.inputs, r);
        out.frame_rank = r;
    } else if (f.family == "mnr") {
        out.data = gen_mnr(f.k, f.d, f.d_hidden, f.n, f.n_test, f.sigma, seed).train;
        out.prob = make_mnr_problem(out.data.inputs, out.data.targets, f.lambda,
                                    mlp_dims{f.d, f.d_hidden}, seed);
    } else {
        throw invalid_config("unknown family: " + f.family);
    }
    return out;
}

score_mode parse_score(const std::string& name, double epsilon) {
    if (name == "exactgap") return score_mode::exact_gap();
    if (name == "gradnorm") return score_mode::grad_norm();
    if (name == "noisy") return score_mode::additive_noisy(epsilon);
    throw invalid_config("unknown score mode: " + name);
}

int cmd_seed(const common_opts& common, const family_opts& fam, const std::string& method,
             const std::string& score, double epsilon, std::size_t trials) {
    const fs::path dir = prepare_dir(common, "seed");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t ts = derive_seed(common.seed, seed_role::trial, t);
        built_instance inst = build_family(fam, ts);
        rng gen(derive_seed(ts, seed_role::init));

        init_result res;
        if (method == "random") {
            res.params = init_random(inst.prob, fam.k, gen);
        } else if (method == "uniform") {
            res = init_uniform_seeding(inst.prob, fam.k, gen);
        } else if (method == "careful") {
            res = careful_seed(inst.prob, fam.k, parse_score(score, epsilon), gen);
        } else {
            throw invalid_config("unknown seeding method: " + method);
        }
        std::string indices;
        for (std::size_t i : res.indices) {
            if (!indices.empty()) indices += ';';
            indices += std::to_string(i);
        }
        rows.push_back({std::to_string(t), indices.empty() ? "-" : indices,
                        fmt(evaluate_objective(res.params, inst.prob))});
    }
    write_table(dir, "seeds", common.format, "trial,indices,objective", rows);
    json summary = {{"command", "seed"},
                    {"common", common_json(common, trials)},
                    {"family", fam.family},
                    {"method", method},
                    {"score", score},
                    {"epsilon", epsilon},
                    {"k", fam.k},
                    {"d", fam.d},
                    {"n", fam.n}};
    write_summary(dir, summary);
    return 0;
}

int cmd_solve(const common_opts& common, const family_opts& fam, const std::string& algo,
              const std::string& update, const std::string& method, const std::string& score,
              double epsilon, double gamma, double beta, double alpha, std::size_t period,
              std::size_t iters, std::size_t trials) {
    const fs::path dir = prepare_dir(common, "solve");
    std::vector<std::vector<std::string>> trial_rows, trace_rows;

    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t ts = derive_seed(common.seed, seed_role::trial, t);
        built_instance inst = build_family(fam, ts);
        rng gen(derive_seed(ts, seed_role::init));

        std::vector<Vec> init_params;
        if (method == "random") {
            init_params = init_random(inst.prob, fam.k, gen);
        } else if (method == "uniform") {
            init_params = init_uniform_seeding(inst.prob, fam.k, gen).params;
        } else if (method == "careful") {
            init_params =
                careful_seed(inst.prob, fam.k, parse_score(score, epsilon), gen).params;
        } else {
            throw invalid_config("unknown seeding method: " + method);
        }

        run_trace trace;
        std::vector<Vec> final_params;
        std::size_t iters_run = 0;
        if (algo == "lloyd") {
            lloyd_config cfg;
            cfg.mode = update == "gradient"  ? update_mode::gradient
                       : update == "exactmin" ? update_mode::exact_min
                       : update == "adam"     ? update_mode::adam
                                              : throw invalid_config("unknown update: " + update);
            cfg.gamma = gamma;
            cfg.reclass_period = period;
            cfg.max_iters = iters;
            cfg.stop_on_stable = (cfg.mode == update_mode::exact_min);
            const lloyd_result res = lloyd_run(inst.prob, init_params, cfg);
            trace = res.trace;
            final_params = res.params;
            iters_run = res.iters_run;
        } else if (algo == "momentum") {
            momentum_config cfg;
            cfg.gamma = gamma;
            cfg.beta = beta;
            cfg.alpha = alpha;
            cfg.reclass_period = period;
            cfg.max_iters = iters;
            rng mgen(derive_seed(ts, seed_role::order));
            const momentum_result res = momentum_run(inst.prob, init_params, cfg, mgen);
            trace = res.trace;
            final_params = res.params;
            iters_run = iters;
        } else {
            throw invalid_config("unknown algorithm: " + algo);
        }

        const double f_final = evaluate_objective(final_params, inst.prob);
        double accuracy = 0.0;
        if (!inst.data.labels.empty()) {
            const partition part = reclassify(final_params, inst.prob);
            accuracy = cluster_accuracy(part.assignment, inst.data.labels, fam.k);
        }
        trial_rows.push_back({std::to_string(t), fmt(f_final), std::to_string(iters_run),
                              fmt(accuracy)});
        if (t == 0) {
            for (const trace_row& row : trace.rows) {
                std::string sizes;
                for (std::size_t s : row.cluster_sizes) {
                    if (!sizes.empty()) sizes += ';';
                    sizes += std::to_string(s);
                }
                trace_rows.push_back({std::to_string(row.iter), fmt(row.objective),
                                      fmt(row.weighted_grad_sq), sizes});
            }
        }
    }

    write_table(dir, "trials", common.format, "trial,final_objective,iters,accuracy", trial_rows);
    write_table(dir, "trace", common.format, "iter,objective,weighted_grad_sq,cluster_sizes",
                trace_rows);
    json summary = {{"command", "solve"},    {"common", common_json(common, trials)},
                    {"family", fam.family},  {"algo", algo},
                    {"update", update},      {"init", method},
                    {"gamma", gamma},        {"beta", beta},
                    {"alpha", alpha},        {"reclass_period", period},
                    {"iters", iters},        {"k", fam.k},
                    {"d", fam.d},            {"n", fam.n}};
    write_summary(dir, summary);
    return 0;
}

int cmd_gen_data(const common_opts& common, const family_opts& fam, std::string out_file) {
    const fs::path dir = prepare_dir(common, "gen-data");
    if (out_file.empty()) out_file = (dir / "dataset.txt").string();

    labeled_dataset ds;
    if (fam.family == "mlr") {
        ds = gen_mlr(fam.k, fam.d, fam.n, fam.sigma, common.seed);
    } else if (fam.family == "gpca") {
        ds = gen_gpca(fam.k, fam.d, fam.r > 0 ? fam.r : fam.d - 2, fam.n, common.seed);
    } else if (fam.family == "mnr") {
        const mnr_data data =
            gen_mnr(fam.k, fam.d, fam.d_hidden, fam.n, fam.n_test, fam.sigma, common.seed);
        dump_dataset(data.test, out_file + ".test");
        ds = data.train;
    } else {
        throw invalid_config("unknown family: " + fam.family);
    }
    dump_dataset(ds, out_file);
    json summary = {{"command", "gen-data"}, {"common", common_json(common, 1)},
                    {"family", fam.family},  {"k", fam.k},
                    {"d", fam.d},            {"n", fam.n},
                    {"sigma", fam.sigma},    {"file", out_file}};
    write_summary(dir, summary);
    std::cout << "wrote " << out_file << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sum-of-minimum optimization experiment harness"};
    app.require_subcommand(1);

    common_opts common;
    app.add_option("--config", common.config_path, "JSON config file");
    auto* seed_opt = app.add_option("--seed", common.seed, "base seed");
    auto* jobs_opt = app.add_option("--jobs", common.jobs, "worker threads");
    auto* out_opt = app.add_option("--out", common.out_dir, "output directory root");
    auto* trials_opt = app.add_option("--trials", common.trials, "trials per cell");
    auto* format_opt = app.add_option("--format", common.format, "csv|json")
                           ->check(CLI::IsMember({"csv", "json"}));

    // gpca-compare
    auto* gpca_cmd = app.add_subcommand("gpca-compare", "SoM vs SoP GPCA accuracy/time grid");
    std::vector<std::size_t> gpca_k, gpca_d, gpca_iters;
    std::size_t gpca_n = 0;
    auto* gk = gpca_cmd->add_option("--k", gpca_k, "cluster counts");
    auto* gd = gpca_cmd->add_option("--d", gpca_d, "dimensions");
    auto* gi = gpca_cmd->add_option("--iters", gpca_iters, "iteration caps");
    auto* gn = gpca_cmd->add_option("--n", gpca_n, "points per trial");

    // mlr-compare
    auto* mlr_cmd = app.add_subcommand("mlr-compare", "seeding comparison on mixed linear regression");
    std::vector<std::size_t> mlr_k, mlr_d;
    std::size_t mlr_n = 0, mlr_max_iters = 0;
    double mlr_lambda = -1.0, mlr_sigma = -1.0;
    auto* lk = mlr_cmd->add_option("--k", mlr_k, "cluster counts");
    auto* ld = mlr_cmd->add_option("--d", mlr_d, "dimensions");
    auto* ln = mlr_cmd->add_option("--n", mlr_n, "samples per trial");
    auto* ll = mlr_cmd->add_option("--lambda", mlr_lambda, "l2 regularization");
    auto* ls = mlr_cmd->add_option("--sigma", mlr_sigma, "noise level");
    auto* lm = mlr_cmd->add_option("--max-iters", mlr_max_iters, "iteration cap");

    // mnr-train
    auto* mnr_cmd = app.add_subcommand("mnr-train", "seeding comparison on mixed nonlinear regression");
    std::vector<std::size_t> mnr_dims_flat;
    std::size_t mnr_k = 0, mnr_n = 0, mnr_ntest = 0, mnr_r = 0, mnr_max_epochs = 0,
                mnr_fixed = 0;
    double mnr_lambda = -1.0, mnr_sigma = -1.0, mnr_lr = -1.0;
    auto* nd = mnr_cmd->add_option("--dims", mnr_dims_flat,
                                   "flattened (d_in, d_hidden) pairs, e.g. --dims 5 3 7 5");
    auto* nk = mnr_cmd->add_option("--k", mnr_k, "cluster count");
    auto* nn = mnr_cmd->add_option("--n", mnr_n, "training samples");
    auto* nt = mnr_cmd->add_option("--n-test", mnr_ntest, "test samples");
    auto* nl = mnr_cmd->add_option("--lambda", mnr_lambda, "l2 regularization");
    auto* ns = mnr_cmd->add_option("--sigma", mnr_sigma, "noise level");
    auto* nr = mnr_cmd->add_option("--r", mnr_r, "reclassification period");
    auto* nlr = mnr_cmd->add_option("--lr", mnr_lr, "ADAM learning rate");
    auto* nme = mnr_cmd->add_option("--max-epochs", mnr_max_epochs, "epoch cap (target mode)");
    auto* nfe = mnr_cmd->add_option("--fixed-epochs", mnr_fixed,
                                    "train exactly this many epochs and report losses");

    // bounds-check
    auto* bounds_cmd = app.add_subcommand("bounds-check", "empirical theorem checks");

    // seed / solve / gen-data
    family_opts fam;
    std::string method = "careful", score = "exactgap", algo = "lloyd", update = "exactmin";
    std::string out_file;
    double gamma = 1e-2, beta = 0.5, alpha = 1.25, epsilon = 0.0;
    std::size_t period = 1, iters = 100;

    auto add_family = [&fam](CLI::App* cmd) {
        cmd->add_option("--family", fam.family, "mlr|gpca|mnr");
        cmd->add_option("--k", fam.k, "cluster count");
        cmd->add_option("--d", fam.d, "dimension (input dim for mnr)");
        cmd->add_option("--d-hidden", fam.d_hidden, "hidden width (mnr)");
        cmd->add_option("--r", fam.r, "frame co-dimension (gpca; default d-2)");
        cmd->add_option("--n", fam.n, "samples");
        cmd->add_option("--n-test", fam.n_test, "test samples (mnr)");
        cmd->add_option("--lambda", fam.lambda, "l2 regularization");
        cmd->add_option("--sigma", fam.sigma, "noise level");
    };

    auto* seed_cmd = app.add_subcommand("seed", "run a seeding method on a synthetic instance");
    add_family(seed_cmd);
    seed_cmd->add_option("--method", method, "random|uniform|careful");
    seed_cmd->add_option("--score", score, "exactgap|gradnorm|noisy");
    seed_cmd->add_option("--epsilon", epsilon, "additive noise for --score noisy");

    auto* solve_cmd = app.add_subcommand("solve", "run a solver on a synthetic instance");
    add_family(solve_cmd);
    solve_cmd->add_option("--method", method, "random|uniform|careful");
    solve_cmd->add_option("--score", score, "exactgap|gradnorm|noisy");
    solve_cmd->add_option("--epsilon", epsilon, "additive noise for --score noisy");
    solve_cmd->add_option("--algo", algo, "lloyd|momentum");
    solve_cmd->add_option("--update", update, "gradient|exactmin|adam");
    solve_cmd->add_option("--gamma", gamma, "step size");
    solve_cmd->add_option("--beta", beta, "momentum factor");
    solve_cmd->add_option("--alpha", alpha, "size-control factor");
    solve_cmd->add_option("--period", period, "reclassification period");
    solve_cmd->add_option("--iters", iters, "iteration cap");

    auto* gen_cmd = app.add_subcommand("gen-data", "dump a synthetic dataset");
    add_family(gen_cmd);
    gen_cmd->add_option("--out-file", out_file, "output path (default <out>/gen-data/dataset.txt)");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        common.file = load_config(common.config_path);
        const json& cf = common.file;
        common.seed = resolve<std::uint64_t>(seed_opt, common.seed, cf, "seed", common.seed);
        common.jobs = resolve<std::size_t>(jobs_opt, common.jobs, cf, "jobs", common.jobs);
        common.out_dir = resolve<std::string>(out_opt, common.out_dir, cf, "out", common.out_dir);
        common.format = resolve<std::string>(format_opt, common.format, cf, "format", common.format);

        if (gpca_cmd->parsed()) {
            const json sec = cf.value("gpca", json::object());
            const auto ks = resolve<std::vector<std::size_t>>(gk, gpca_k, sec, "k", {2, 3, 4});
            const auto ds = resolve<std::vector<std::size_t>>(gd, gpca_d, sec, "d", {4, 5, 6});
            const auto caps =
                resolve<std::vector<std::size_t>>(gi, gpca_iters, sec, "iters", {10, 50});
            const auto n = resolve<std::size_t>(gn, gpca_n, sec, "n", 1000);
            const auto trials =
                resolve<std::size_t>(trials_opt, common.trials, sec, "trials", 100);
            return cmd_gpca_compare(common, sec, ks, ds, caps, n, trials);
        }
        if (mlr_cmd->parsed()) {
            const json sec = cf.value("mlr", json::object());
            const auto ks = resolve<std::vector<std::size_t>>(lk, mlr_k, sec, "k", {4, 5, 6});
            const auto ds =
                resolve<std::vector<std::size_t>>(ld, mlr_d, sec, "d", {4, 5, 6, 7, 8});
            const auto n = resolve<std::size_t>(ln, mlr_n, sec, "n", 1000);
            const auto lambda = resolve<double>(ll, mlr_lambda, sec, "lambda", 0.01);
            const auto sigma = resolve<double>(ls, mlr_sigma, sec, "sigma", 0.01);
            const auto cap = resolve<std::size_t>(lm, mlr_max_iters, sec, "max_iters", 200);
            const auto trials =
                resolve<std::size_t>(trials_opt, common.trials, sec, "trials", 1000);
            return cmd_mlr_compare(common, sec, ks, ds, n, lambda, sigma, cap, trials);
        }
        if (mnr_cmd->parsed()) {
            const json sec = cf.value("mnr", json::object());
            auto flat = resolve<std::vector<std::size_t>>(nd, mnr_dims_flat, sec, "dims",
                                                          {5, 3, 7, 5, 10, 5});
            if (flat.size() % 2 != 0)
                throw invalid_config("mnr-train: --dims needs (d_in, d_hidden) pairs");
            std::vector<std::pair<std::size_t, std::size_t>> dims;
            for (std::size_t i = 0; i + 1 < flat.size(); i += 2)
                dims.emplace_back(flat[i], flat[i + 1]);
            const auto k = resolve<std::size_t>(nk, mnr_k, sec, "k", 5);
            const auto n = resolve<std::size_t>(nn, mnr_n, sec, "n", 1000);
            const auto ntest = resolve<std::size_t>(nt, mnr_ntest, sec, "n_test", 200);
            const auto lambda = resolve<double>(nl, mnr_lambda, sec, "lambda", 0.01);
            const auto sigma = resolve<double>(ns, mnr_sigma, sec, "sigma", 0.01);
            const auto period = resolve<std::size_t>(nr, mnr_r, sec, "r", 10);
            const auto lr = resolve<double>(nlr, mnr_lr, sec, "lr", 1e-3);
            const auto cap = resolve<std::size_t>(nme, mnr_max_epochs, sec, "max_epochs", 3000);
            const auto fixed = resolve<std::size_t>(nfe, mnr_fixed, sec, "fixed_epochs", 0);
            const auto trials =
                resolve<std::size_t>(trials_opt, common.trials, sec, "trials", 20);
            return cmd_mnr_train(common, sec, dims, k, n, ntest, lambda, sigma, period, lr, cap,
                                 fixed, trials);
        }
        if (bounds_cmd->parsed()) {
            const json sec = cf.value("bounds", json::object());
            const auto trials =
                resolve<std::size_t>(trials_opt, common.trials, sec, "trials", 500);
            return cmd_bounds_check(common, sec, trials);
        }
        if (seed_cmd->parsed()) {
            const auto trials = common.trials > 0 ? common.trials : 10;
            return cmd_seed(common, fam, method, score, epsilon, trials);
        }
        if (solve_cmd->parsed()) {
            const auto trials = common.trials > 0 ? common.trials : 10;
            return cmd_solve(common, fam, algo, update, method, score, epsilon, gamma, beta,
                             alpha, period, iters, trials);
        }
        if (gen_cmd->parsed()) {
            return cmd_gen_data(common, fam, out_file);
        }
        throw invalid_config("no subcommand given");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
