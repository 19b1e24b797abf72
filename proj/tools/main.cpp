// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0
//
// scalekit — fit compute-optimal scaling laws from experiment logs.
// Subcommands: synth, bc-run, fit, forecast, cv, report.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "common.hpp"
#include "scalekit/bcdesk.hpp"
#include "scalekit/crossval.hpp"
#include "scalekit/forecast.hpp"
#include "scalekit/isoflop.hpp"
#include "scalekit/parametric.hpp"
#include "scalekit/records.hpp"
#include "scalekit/report.hpp"
#include "scalekit/synth.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scalekit;
using namespace scalekit::cli;

namespace {

// ---------------------------------------------------------------------------
// Shared input handling
// ---------------------------------------------------------------------------

RecordFormat format_for(const fs::path& path, const std::string& override_format) {
    if (override_format == "jsonl") return RecordFormat::jsonl;
    if (override_format == "csv") return RecordFormat::csv;
    if (!override_format.empty()) throw UsageError("unknown --format '" + override_format + "'");
    return path.extension() == ".csv" ? RecordFormat::csv : RecordFormat::jsonl;
}

std::vector<ExperimentRecord> load_records(const fs::path& path, const std::string& fmt) {
    const std::string content = read_file(path);
    std::istringstream in(content);
    try {
        return parse_records(in, format_for(path, fmt));
    } catch (const Error& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

FlopRule rule_from_string(const std::string& name) {
    if (name == "6nd") return FlopRule::linear_bc();
    if (name == "8nd") return FlopRule::linear_rl();
    throw UsageError("unknown --rule '" + name + "' (expected 6nd or 8nd)");
}

// Selects the records backing the requested metric. Files produced by
// bc-run carry each observation under both settings, so the setting is
// filtered first; synthetic files carry both metrics on one setting.
std::vector<ExperimentRecord> select_metric_records(const std::vector<ExperimentRecord>& records,
                                                    const std::string& metric) {
    std::map<Setting, std::vector<ExperimentRecord>> by_setting;
    for (const auto& rec : records) by_setting[rec.setting].push_back(rec);

    auto has_metric = [&](const std::vector<ExperimentRecord>& recs) {
        for (const auto& rec : recs) {
            if (metric == "loss" && !rec.loss) return false;
            if (metric == "return" && !rec.mean_return) return false;
        }
        return !recs.empty();
    };

    std::vector<Setting> preference;
    if (metric == "loss")
        preference = {Setting::bc_loss, Setting::bc_return, Setting::rl_return};
    else
        preference = {Setting::bc_return, Setting::rl_return, Setting::bc_loss};
    for (const Setting setting : preference) {
        const auto it = by_setting.find(setting);
        if (it != by_setting.end() && has_metric(it->second)) return it->second;
    }
    throw UsageError("records lack " + std::string(metric == "loss" ? "loss" : "mean_return") +
                     " values for --metric " + metric);
}

double parse_json_number(const json& j, const char* key) {
    if (!j.contains(key)) throw UsageError(std::string("missing field '") + key + "'");
    if (!j.at(key).is_number()) throw UsageError(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

SynthSpec parse_synth_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("synth spec: malformed json: ") + e.what());
    }
    SynthSpec spec;
    if (!j.contains("surface") || !j.at("surface").is_object())
        throw UsageError("missing field 'surface'");
    const json& s = j.at("surface");
    spec.surface.b0 = parse_json_number(s, "b0");
    spec.surface.bN = parse_json_number(s, "bN");
    spec.surface.bD = parse_json_number(s, "bD");
    spec.surface.bN2 = parse_json_number(s, "bN2");
    spec.surface.bND = parse_json_number(s, "bND");
    spec.surface.bD2 = parse_json_number(s, "bD2");
    spec.surface.direction = FitDirection::minimize;

    spec.return_delta = parse_json_number(j, "return_delta");
    spec.return_prefactor = parse_json_number(j, "return_prefactor");
    spec.noise_sigma = parse_json_number(j, "noise_sigma");
    if (!j.contains("seed")) throw UsageError("missing field 'seed'");
    if (!j.at("seed").is_number_integer()) throw UsageError("field 'seed' must be an integer");
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.flop_denominator = j.value("flop_denominator", 6.0);
    spec.domain = j.value("domain", std::string("synthetic"));

    for (const char* key : {"budgets", "model_grid"}) {
        if (!j.contains(key) || !j.at(key).is_array())
            throw UsageError(std::string("missing array field '") + key + "'");
        auto& target = std::string(key) == "budgets" ? spec.budgets : spec.model_grid;
        for (const auto& v : j.at(key)) target.push_back(v.get<double>());
    }
    return spec;
}

int cmd_synth(const std::string& spec_path, const std::string& out_records,
              const std::string& out_truth) {
    const std::string spec_text = read_file(resolve_out(spec_path));
    SynthSpec spec = parse_synth_spec(spec_text);
    const std::string digest = content_digest(spec_text);

    std::vector<ExperimentRecord> records;
    SynthTruth truth;
    try {
        records = generate(spec);
        truth = analytic_optima(spec);
    } catch (const Error& e) {
        throw UsageError(std::string("synth spec: ") + e.what());
    }

    std::ostringstream records_out;
    serialize_records(records_out, records, RecordFormat::jsonl);

    json truth_json;
    truth_json["alpha"] = truth.alpha;
    truth_json["beta"] = truth.beta;
    truth_json["G"] = truth.G;
    truth_json["gamma_loss"] = truth.gamma_loss;
    truth_json["gamma_return"] = truth.gamma_return;
    truth_json["return_delta"] = truth.return_delta;
    truth_json["flop_denominator"] = spec.flop_denominator;
    json per_budget = json::array();
    for (const auto& bt : truth.per_budget)
        per_budget.push_back(json{{"budget", bt.budget},
                                  {"n_opt", bt.n_opt},
                                  {"d_opt", bt.d_opt},
                                  {"loss_opt", bt.loss_opt},
                                  {"return_opt", bt.return_opt}});
    truth_json["per_budget"] = per_budget;
    truth_json["config_digest"] = digest;

    const fs::path records_path = resolve_out(out_records);
    const fs::path truth_path = resolve_out(out_truth);
    atomic_write(records_path, records_out.str());
    atomic_write(truth_path, truth_json.dump(2) + "\n");

    ManifestBuilder manifest;
    manifest.command = "synth";
    manifest.config_digest = digest;
    manifest.add_input(spec_path, spec_text);
    manifest.add_output(records_path, records_out.str());
    manifest.add_output(truth_path, truth_json.dump(2) + "\n");
    manifest.write(manifest_path_for(records_path));

    std::printf("synth: wrote %zu records to %s\n", records.size(), records_path.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bc-run
// ---------------------------------------------------------------------------

TrainConfig parse_train_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("bc-run config: malformed json: ") + e.what());
    }
    TrainConfig config;
    if (j.contains("widths")) config.widths = j.at("widths").get<std::vector<int>>();
    if (j.contains("flop_budgets"))
        config.flop_budgets = j.at("flop_budgets").get<std::vector<double>>();
    config.learning_rate = j.value("learning_rate", config.learning_rate);
    config.batch_size = j.value("batch_size", config.batch_size);
    config.max_samples = j.value("max_samples", config.max_samples);
    config.dataset_episodes = j.value("dataset_episodes", config.dataset_episodes);
    config.validation_trajectories =
        j.value("validation_trajectories", config.validation_trajectories);
    config.rollout_episodes = j.value("rollout_episodes", config.rollout_episodes);
    config.sample_actions = j.value("sample_actions", config.sample_actions);
    config.seed = j.value("seed", config.seed);
    return config;
}

json train_config_to_json(const TrainConfig& config) {
    return json{{"widths", config.widths},
                {"flop_budgets", config.flop_budgets},
                {"learning_rate", config.learning_rate},
                {"batch_size", config.batch_size},
                {"max_samples", config.max_samples},
                {"dataset_episodes", config.dataset_episodes},
                {"validation_trajectories", config.validation_trajectories},
                {"rollout_episodes", config.rollout_episodes},
                {"sample_actions", config.sample_actions},
                {"seed", config.seed}};
}

int cmd_bc_run(const std::string& config_path, const std::string& out_records,
               const std::string& out_manifest) {
    TrainConfig config;
    std::string config_text = "{}";
    if (!config_path.empty()) {
        config_text = read_file(resolve_out(config_path));
        config = parse_train_config(config_text);
    }
    const std::string digest = content_digest(train_config_to_json(config).dump());

    IsoflopRunResult result;
    try {
        result = run_isoflop_experiment(config);
    } catch (const Error& e) {
        throw UsageError(std::string("bc-run: ") + e.what());
    }

    std::ostringstream records_out;
    serialize_records(records_out, result.records, RecordFormat::jsonl);
    const fs::path records_path = resolve_out(out_records);
    atomic_write(records_path, records_out.str());

    ManifestBuilder manifest;
    manifest.command = "bc-run";
    manifest.config_digest = digest;
    manifest.add_output(records_path, records_out.str());
    manifest.extra["config"] = train_config_to_json(config);
    manifest.extra["expert_return"] = result.expert_return;
    manifest.extra["random_baseline"] = result.random_baseline;
    manifest.extra["warnings"] = result.warnings;
    manifest.extra["record_count"] = result.records.size();
    manifest.write(resolve_out(out_manifest));

    std::printf("bc-run: wrote %zu records to %s (expert %.3f, random %.3f, %zu warnings)\n",
                result.records.size(), records_path.c_str(), result.expert_return,
                result.random_baseline, result.warnings.size());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOptions {
    std::string records_path;
    std::string format;
    std::string method = "both";
    std::string metric = "loss";
    std::string rule = "6nd";
    int skip_budgets = 0;
    double rel_tol = 1e-3;
    std::string out = "fit_report.json";
    std::string plots_dir;
};

std::vector<BudgetGroup> grouped_for_metric(const std::vector<ExperimentRecord>& records,
                                            const std::string& metric, const FlopRule& rule,
                                            double rel_tol, int skip_budgets) {
    const auto selected = select_metric_records(records, metric);
    for (const auto& rec : selected) {
        try {
            validate_flop_rule(rec, rule);
        } catch (const Error& e) {
            throw UsageError(std::string("record violates the FLOP rule: ") + e.what());
        }
    }
    auto groups = group_by_budget(selected, rel_tol);
    if (skip_budgets < 0 || static_cast<std::size_t>(skip_budgets) >= groups.size())
        throw UsageError("--skip-budgets leaves no budget groups");
    groups.erase(groups.begin(), groups.begin() + skip_budgets);
    return groups;
}

int cmd_fit(const FitOptions& options) {
    if (options.method != "isoflop" && options.method != "parametric" && options.method != "both")
        throw UsageError("unknown --method '" + options.method + "'");
    if (options.metric != "loss" && options.metric != "return")
        throw UsageError("unknown --metric '" + options.metric + "'");
    const FlopRule rule = rule_from_string(options.rule);

    const fs::path records_path = resolve_out(options.records_path);
    const std::string records_text = read_file(records_path);
    const auto records = load_records(records_path, options.format);
    const std::string digest = content_digest(records_text);

    FitReport report;
    report.metric = options.metric;
    report.rule = options.rule;
    report.flop_denominator = rule.denominator();
    report.config_digest = digest;

    const Objective objective =
        options.metric == "loss" ? Objective::min_loss : Objective::max_return;
    const SurfaceMetric surface_metric =
        options.metric == "loss" ? SurfaceMetric::loss : SurfaceMetric::mean_return;

    std::vector<BudgetGroup> groups;
    try {
        groups = grouped_for_metric(records, options.metric, rule, options.rel_tol,
                                    options.skip_budgets);
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    if (options.method != "parametric") {
        try {
            report.isoflop = approach1_laws(groups, objective, rule);
            for (const auto& w : report.isoflop->warnings) report.warnings.push_back(w);
        } catch (const Error& e) {
            report.errors.push_back(std::string("isoflop: ") + e.what());
        }
    }
    if (options.method != "isoflop") {
        try {
            std::vector<ExperimentRecord> pooled;
            for (const auto& group : groups)
                pooled.insert(pooled.end(), group.records.begin(), group.records.end());
            std::vector<std::string> warnings;
            const QuadraticSurface surface = fit_surface(pooled, surface_metric, &warnings);
            report.surface = surface;
            report.allocation = allocation_with_ci(surface, rule.denominator());
            for (const auto& w : warnings) report.warnings.push_back(w);
        } catch (const Error& e) {
            report.errors.push_back(std::string("parametric: ") + e.what());
        }
    }

    // The loss-return link is fitted whenever both metrics are available;
    // failures here only warn.
    try {
        const auto loss_groups =
            grouped_for_metric(records, "loss", rule, options.rel_tol, options.skip_budgets);
        const auto return_groups =
            grouped_for_metric(records, "return", rule, options.rel_tol, options.skip_budgets);
        const IsoflopLaws loss_laws = approach1_laws(loss_groups, Objective::min_loss, rule);
        const IsoflopLaws return_laws = approach1_laws(return_groups, Objective::max_return, rule);
        std::vector<std::string> warnings;
        report.return_loss = fit_return_loss(loss_laws.optima, return_laws.optima, &warnings);
        for (const auto& w : warnings) report.warnings.push_back(w);
    } catch (const Error& e) {
        report.warnings.push_back(std::string("return-loss law unavailable: ") + e.what());
    }

    const fs::path report_path = resolve_out(options.out);
    atomic_write(report_path, report.to_json());

    ManifestBuilder manifest;
    manifest.command = "fit";
    manifest.config_digest = digest;
    manifest.add_input(records_path, records_text);
    manifest.add_output(report_path, report.to_json());

    if (report.isoflop) {
        const fs::path plots_dir =
            options.plots_dir.empty() ? report_path.parent_path() : resolve_out(options.plots_dir);
        const auto& laws = *report.isoflop;
        const std::string metric_name = options.metric == "loss" ? "loss" : "return";
        const std::vector<std::pair<std::string, std::string>> files = {
            {"optima.csv", optima_csv(laws.optima)},
            {metric_name + "_vs_flops.csv", law_csv(laws.optima, laws.metric_law, "metric_opt")},
            {"params_vs_flops.csv", law_csv(laws.optima, laws.n_law, "n_opt")},
            {"samples_vs_flops.csv", law_csv(laws.optima, laws.d_law, "d_opt")},
        };
        for (const auto& [name, content] : files) {
            atomic_write(plots_dir / name, content);
            manifest.add_output(plots_dir / name, content);
        }
    }
    manifest.write(manifest_path_for(report_path));

    if (report.allocation)
        std::printf("fit: alpha %.4f (%.4f, %.4f)  beta %.4f (%.4f, %.4f)  G %.4g\n",
                    report.allocation->alpha, report.allocation->alpha_ci95.first,
                    report.allocation->alpha_ci95.second, report.allocation->beta,
                    report.allocation->beta_ci95.first, report.allocation->beta_ci95.second,
                    report.allocation->G);
    if (report.isoflop)
        std::printf("fit: isoflop alpha %.4f beta %.4f metric exponent %.4f (%zu optima)\n",
                    report.isoflop->n_law.exponent, report.isoflop->d_law.exponent,
                    report.isoflop->metric_law.exponent, report.isoflop->optima.size());
    if (options.method == "both" && report.isoflop && report.allocation)
        std::printf("fit: method alpha difference %.4f\n",
                    report.isoflop->n_law.exponent - report.allocation->alpha);
    for (const auto& e : report.errors) std::fprintf(stderr, "fit error: %s\n", e.c_str());
    return report.errors.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------------------
// forecast
// ---------------------------------------------------------------------------

int cmd_forecast(const std::string& fit_path, std::optional<double> target_return,
                 std::optional<double> target_loss, std::optional<double> budget,
                 const std::string& out) {
    const int given = (target_return ? 1 : 0) + (target_loss ? 1 : 0) + (budget ? 1 : 0);
    if (given != 1)
        throw UsageError("exactly one of --target-return, --target-loss, --budget is required");

    const fs::path report_path = resolve_out(fit_path);
    const std::string report_text = read_file(report_path);
    FitReport report;
    try {
        report = FitReport::from_json(report_text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    std::vector<Forecast> forecasts;
    try {
        std::optional<double> chain_budget;
        if (target_return) {
            if (report.metric == "return" && report.isoflop) {
                forecasts.push_back(forecast_from_return_law(*target_return, *report.isoflop));
                chain_budget = forecasts.back().budget_c;
            } else if (report.isoflop && report.return_loss) {
                forecasts.push_back(
                    forecast_isoflop_chain(*target_return, *report.return_loss, *report.isoflop));
                chain_budget = forecasts.back().budget_c;
            } else if (!report.surface) {
                throw UsageError(
                    "--target-return needs isoflop laws (plus the return-loss law for a loss "
                    "report)");
            }
        } else if (target_loss) {
            if (report.metric != "loss")
                throw UsageError("--target-loss needs a fit report with --metric loss");
            if (report.isoflop) {
                forecasts.push_back(forecast_from_loss(*target_loss, *report.isoflop));
                chain_budget = forecasts.back().budget_c;
            } else if (!report.surface) {
                throw UsageError("--target-loss needs isoflop laws in the fit report");
            }
        } else {
            chain_budget = *budget;
            if (report.isoflop) {
                Forecast f;
                f.method = ForecastMethod::isoflop_chain;
                f.budget_c = *budget;
                f.target_metric = report.isoflop->metric_law.predict(*budget);
                f.n_opt = report.isoflop->n_law.predict(*budget);
                f.d_opt = report.isoflop->d_law.predict(*budget);
                forecasts.push_back(std::move(f));
            }
        }
        if (report.surface && chain_budget) {
            forecasts.push_back(
                forecast_parametric(*chain_budget, *report.surface, report.flop_denominator));
        }
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        throw UsageError(std::string("forecast: ") + e.what());
    }
    if (forecasts.empty())
        throw UsageError("fit report contains no laws usable for the requested forecast");

    const std::string text = forecasts_to_json(forecasts, report.config_digest);
    const fs::path out_path = resolve_out(out);
    atomic_write(out_path, text);

    ManifestBuilder manifest;
    manifest.command = "forecast";
    manifest.config_digest = report.config_digest;
    manifest.add_input(report_path, report_text);
    manifest.add_output(out_path, text);
    manifest.write(manifest_path_for(out_path));

    for (const auto& f : forecasts) {
        std::printf("forecast [%s]: C %.4g  N %.4g  D %.4g", to_string(f.method).c_str(),
                    f.budget_c, f.n_opt, f.d_opt);
        if (f.implied_loss) std::printf("  implied loss %.4g", *f.implied_loss);
        std::printf("\n");
        for (const auto& w : f.warnings) std::printf("  warning: %s\n", w.c_str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// cv
// ---------------------------------------------------------------------------

int cmd_cv(const std::string& records_path, const std::string& format, int min_train,
           const std::string& rule_name, double rel_tol, int skip_budgets, const std::string& out,
           const std::string& trajectories) {
    const FlopRule rule = rule_from_string(rule_name);
    const fs::path path = resolve_out(records_path);
    const std::string records_text = read_file(path);
    const auto records = load_records(path, format);
    const std::string digest = content_digest(records_text);

    std::vector<NamedSeries> series;
    std::optional<IsoflopLaws> loss_laws, return_laws;
    for (const std::string metric : {"loss", "return"}) {
        std::vector<BudgetGroup> groups;
        try {
            groups = grouped_for_metric(records, metric, rule, rel_tol, skip_budgets);
        } catch (const Error&) {
            continue;  // metric not present in this file
        }
        const Objective objective = metric == "loss" ? Objective::min_loss : Objective::max_return;
        IsoflopLaws laws;
        try {
            laws = approach1_laws(groups, objective, rule);
        } catch (const Error& e) {
            series.push_back({metric + "_optimum_vs_flops", {}});
            continue;
        }
        NamedSeries metric_series{metric + "_optimum_vs_flops", {}};
        NamedSeries n_series{metric + "_optimal_params_vs_flops", {}};
        NamedSeries d_series{metric + "_optimal_samples_vs_flops", {}};
        for (const auto& opt : laws.optima) {
            if (opt.metric_opt > 0.0) metric_series.points.emplace_back(opt.budget, opt.metric_opt);
            n_series.points.emplace_back(opt.budget, opt.n_opt);
            d_series.points.emplace_back(opt.budget, opt.d_opt);
        }
        series.push_back(std::move(metric_series));
        series.push_back(std::move(n_series));
        series.push_back(std::move(d_series));
        if (metric == "loss") loss_laws = laws;
        else return_laws = laws;
    }
    if (series.empty()) throw UsageError("records contain no usable metric series");

    // Return vs loss, keyed on inverse loss so that later budgets sit at
    // larger x (the rolling window must move forward in time).
    if (loss_laws && return_laws) {
        NamedSeries rl{"return_vs_inverse_loss", {}};
        for (const auto& loss_opt : loss_laws->optima)
            for (const auto& ret_opt : return_laws->optima)
                if (std::abs(loss_opt.budget - ret_opt.budget) / loss_opt.budget <= 1e-6 &&
                    loss_opt.metric_opt > 0.0 && ret_opt.metric_opt > 0.0)
                    rl.points.emplace_back(1.0 / loss_opt.metric_opt, ret_opt.metric_opt);
        std::sort(rl.points.begin(), rl.points.end());
        series.push_back(std::move(rl));
    }

    const auto reports = cv_all(series, min_train);
    const std::string report_text = cv_reports_to_json(reports, digest);
    const fs::path out_path = resolve_out(out);
    atomic_write(out_path, report_text);
    const std::string trajectory_text = cv_trajectory_csv(reports);
    const fs::path trajectory_path = resolve_out(trajectories);
    atomic_write(trajectory_path, trajectory_text);

    ManifestBuilder manifest;
    manifest.command = "cv";
    manifest.config_digest = digest;
    manifest.add_input(path, records_text);
    manifest.add_output(out_path, report_text);
    manifest.add_output(trajectory_path, trajectory_text);
    manifest.write(manifest_path_for(out_path));

    bool any_failed = false;
    for (const auto& report : reports) {
        if (report.ok())
            std::printf("cv %-32s mean RMSE %.6g over %zu steps\n", report.regression_name.c_str(),
                        report.mean_rmse, report.steps.size());
        else {
            std::printf("cv %-32s error: %s\n", report.regression_name.c_str(),
                        report.error.c_str());
            any_failed = true;
        }
    }
    return any_failed ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int cmd_report(const std::string& records_path, const std::string& format,
               const std::string& fit_path, double rel_tol, const std::string& out_dir_arg) {
    const fs::path path = resolve_out(records_path);
    const auto records = load_records(path, format);
    const fs::path dir = resolve_out(out_dir_arg);
    fs::create_directories(dir);

    std::optional<FitReport> fit;
    if (!fit_path.empty()) fit = FitReport::from_json(read_file(resolve_out(fit_path)));
    const std::string metric = fit ? fit->metric : "loss";

    const auto selected = select_metric_records(records, metric);
    const auto groups = group_by_budget(selected, rel_tol);

    // IsoFLOP curves: metric vs model size, one colored series per budget.
    LogLogPlot curves("isoFLOP profiles (" + metric + ")", "parameters",
                      metric == "loss" ? "validation loss" : "mean return");
    curves.linear_y();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<std::pair<double, double>> xy;
        for (const auto& rec : groups[g].records) {
            const double value = metric == "loss" ? rec.loss.value_or(0.0)
                                                  : rec.mean_return.value_or(0.0);
            xy.emplace_back(static_cast<double>(rec.params), value);
        }
        std::sort(xy.begin(), xy.end());
        char label[40];
        std::snprintf(label, sizeof(label), "C=%.2g", groups[g].budget);
        curves.add_points(xy, series_color(g), label);
        curves.add_line(xy, series_color(g));
    }
    atomic_write(dir / "isoflop_curves.svg", curves.render());

    std::ostringstream summary;
    summary << "records: " << records.size() << " total, " << selected.size() << " in metric '"
            << metric << "', " << groups.size() << " budget groups\n";
    summary << "budgets:";
    for (const auto& group : groups) summary << " " << group.budget;
    summary << "\n";

    if (fit && fit->isoflop) {
        const auto& laws = *fit->isoflop;
        const std::vector<std::tuple<std::string, const PowerLaw*, std::string>> panels = {
            {"params_vs_flops.svg", &laws.n_law, "optimal parameters"},
            {"samples_vs_flops.svg", &laws.d_law, "optimal samples"},
            {"optimum_vs_flops.svg", &laws.metric_law, "optimal " + metric},
        };
        for (const auto& [file, law, label] : panels) {
            LogLogPlot plot(label + " vs FLOPs", "FLOPs", label);
            std::vector<std::pair<double, double>> observed, fitted;
            for (const auto& opt : laws.optima) {
                const double y = file == "params_vs_flops.svg"  ? opt.n_opt
                                 : file == "samples_vs_flops.svg" ? opt.d_opt
                                                                  : opt.metric_opt;
                if (y > 0.0) {
                    observed.emplace_back(opt.budget, y);
                    fitted.emplace_back(opt.budget, law->predict(opt.budget));
                }
            }
            plot.add_points(observed, "#1f77b4", "observed");
            plot.add_line(fitted, "#d62728", "fitted law");
            atomic_write(dir / file, plot.render());
        }
        char line[200];
        std::snprintf(line, sizeof(line),
                      "isoflop: alpha %.4f (%.4f, %.4f)  beta %.4f  metric exponent %.4f\n",
                      laws.n_law.exponent, laws.n_law.exponent_ci95.first,
                      laws.n_law.exponent_ci95.second, laws.d_law.exponent,
                      laws.metric_law.exponent);
        summary << line;
    }
    if (fit && fit->allocation) {
        char line[240];
        std::snprintf(line, sizeof(line),
                      "parametric: alpha %.4f (%.4f, %.4f)  beta %.4f (%.4f, %.4f)  G %.6g\n",
                      fit->allocation->alpha, fit->allocation->alpha_ci95.first,
                      fit->allocation->alpha_ci95.second, fit->allocation->beta,
                      fit->allocation->beta_ci95.first, fit->allocation->beta_ci95.second,
                      fit->allocation->G);
        summary << line;
    }
    if (fit && fit->return_loss) {
        char line[160];
        std::snprintf(line, sizeof(line), "return-loss: delta %.4f  r^2 %.4f over %d budgets\n",
                      fit->return_loss->delta, fit->return_loss->r_squared, fit->return_loss->n);
        summary << line;
    }
    if (fit)
        for (const auto& w : fit->warnings) summary << "warning: " << w << "\n";

    atomic_write(dir / "summary.txt", summary.str());
    std::printf("report: wrote summary and plots to %s\n", dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scalekit - compute-optimal scaling law toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(SCALEKIT_VERSION));

    // synth
    auto* synth = app.add_subcommand("synth", "Generate ground-truth synthetic records");
    std::string synth_spec;
    std::string synth_records = "synth_records.jsonl";
    std::string synth_truth = "synth_truth.json";
    synth->add_option("--spec", synth_spec, "Synth spec JSON")->required();
    synth->add_option("--out-records", synth_records, "Records JSONL output");
    synth->add_option("--out-truth", synth_truth, "Analytic truth JSON output");

    // bc-run
    auto* bc_run = app.add_subcommand("bc-run", "Run the behavioral-cloning isoFLOP sweep");
    std::string bc_config;
    std::string bc_records = "bc_records.jsonl";
    std::string bc_manifest = "bc_manifest.json";
    bc_run->add_option("--config", bc_config, "Sweep config JSON (defaults when omitted)");
    bc_run->add_option("--out-records", bc_records, "Records JSONL output");
    bc_run->add_option("--out-manifest", bc_manifest, "Run manifest output");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit scaling laws from records");
    FitOptions fit_options;
    fit->add_option("--records", fit_options.records_path, "Records file")->required();
    fit->add_option("--format", fit_options.format, "jsonl or csv (default: by extension)");
    fit->add_option("--method", fit_options.method, "isoflop, parametric or both");
    fit->add_option("--metric", fit_options.metric, "loss or return");
    fit->add_option("--rule", fit_options.rule, "FLOP rule: 6nd or 8nd");
    fit->add_option("--skip-budgets", fit_options.skip_budgets, "Drop the first K budget groups");
    fit->add_option("--rel-tol", fit_options.rel_tol, "Budget grouping tolerance");
    fit->add_option("--out", fit_options.out, "Fit report JSON output");
    fit->add_option("--plots-dir", fit_options.plots_dir, "Directory for plot CSVs");

    // forecast
    auto* forecast = app.add_subcommand("forecast", "Forecast compute for a target");
    std::string forecast_fit;
    std::string forecast_out = "forecast.json";
    double opt_target_return = 0, opt_target_loss = 0, opt_budget = 0;
    auto* flag_return =
        forecast->add_option("--target-return", opt_target_return, "Target mean return");
    auto* flag_loss = forecast->add_option("--target-loss", opt_target_loss, "Target loss");
    auto* flag_budget = forecast->add_option("--budget", opt_budget, "Fixed compute budget");
    forecast->add_option("--fit", forecast_fit, "Fit report JSON")->required();
    forecast->add_option("--out", forecast_out, "Forecast JSON output");

    // cv
    auto* cv = app.add_subcommand("cv", "Rolling cross-validation of the fitted laws");
    std::string cv_records, cv_format;
    int cv_min_train = 6;
    std::string cv_rule = "6nd";
    double cv_rel_tol = 1e-3;
    int cv_skip = 0;
    std::string cv_out = "cv_report.json";
    std::string cv_trajectories = "cv_trajectories.csv";
    cv->add_option("--records", cv_records, "Records file")->required();
    cv->add_option("--format", cv_format, "jsonl or csv");
    cv->add_option("--min-train", cv_min_train, "Initial training window");
    cv->add_option("--rule", cv_rule, "FLOP rule: 6nd or 8nd");
    cv->add_option("--rel-tol", cv_rel_tol, "Budget grouping tolerance");
    cv->add_option("--skip-budgets", cv_skip, "Drop the first K budget groups");
    cv->add_option("--out", cv_out, "CV report JSON output");
    cv->add_option("--trajectories", cv_trajectories, "Coefficient trajectory CSV output");

    // report
    auto* report = app.add_subcommand("report", "Render summary text and SVG plots");
    std::string report_records, report_format, report_fit;
    double report_rel_tol = 1e-3;
    std::string report_dir = "report";
    report->add_option("--records", report_records, "Records file")->required();
    report->add_option("--format", report_format, "jsonl or csv");
    report->add_option("--fit", report_fit, "Fit report JSON to include");
    report->add_option("--rel-tol", report_rel_tol, "Budget grouping tolerance");
    report->add_option("--out-dir", report_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_spec, synth_records, synth_truth);
        if (bc_run->parsed()) return cmd_bc_run(bc_config, bc_records, bc_manifest);
        if (fit->parsed()) return cmd_fit(fit_options);
        if (forecast->parsed()) {
            return cmd_forecast(
                forecast_fit,
                flag_return->count() ? std::optional<double>(opt_target_return) : std::nullopt,
                flag_loss->count() ? std::optional<double>(opt_target_loss) : std::nullopt,
                flag_budget->count() ? std::optional<double>(opt_budget) : std::nullopt,
                forecast_out);
        }
        if (cv->parsed())
            return cmd_cv(cv_records, cv_format, cv_min_train, cv_rule, cv_rel_tol, cv_skip,
                          cv_out, cv_trajectories);
        if (report->parsed())
            return cmd_report(report_records, report_format, report_fit, report_rel_tol,
                              report_dir);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
