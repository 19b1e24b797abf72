// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "scalekit/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>

#include "scalekit/error.hpp"

namespace scalekit {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json power_law_to_json(const PowerLaw& law) {
    return json{{"exponent", law.exponent},
                {"log_prefactor", law.log_prefactor},
                {"exponent_ci95", {law.exponent_ci95.first, law.exponent_ci95.second}},
                {"r_squared", law.r_squared},
                {"n", law.n}};
}

PowerLaw power_law_from_json(const json& j) {
    PowerLaw law;
    law.exponent = j.at("exponent").get<double>();
    law.log_prefactor = j.at("log_prefactor").get<double>();
    law.exponent_ci95 = {j.at("exponent_ci95").at(0).get<double>(),
                         j.at("exponent_ci95").at(1).get<double>()};
    law.r_squared = j.at("r_squared").get<double>();
    law.n = j.at("n").get<int>();
    return law;
}

json optimum_to_json(const BudgetOptimum& opt) {
    return json{{"budget", opt.budget},
                {"n_opt", opt.n_opt},
                {"d_opt", opt.d_opt},
                {"metric_opt", opt.metric_opt},
                {"parabola",
                 {{"a", opt.parabola.a},
                  {"b", opt.parabola.b},
                  {"c", opt.parabola.c},
                  {"vertex_u", opt.parabola.vertex_u},
                  {"vertex_y", opt.parabola.vertex_y}}}};
}

BudgetOptimum optimum_from_json(const json& j) {
    BudgetOptimum opt;
    opt.budget = j.at("budget").get<double>();
    opt.n_opt = j.at("n_opt").get<double>();
    opt.d_opt = j.at("d_opt").get<double>();
    opt.metric_opt = j.at("metric_opt").get<double>();
    const json& p = j.at("parabola");
    opt.parabola.a = p.at("a").get<double>();
    opt.parabola.b = p.at("b").get<double>();
    opt.parabola.c = p.at("c").get<double>();
    opt.parabola.vertex_u = p.at("vertex_u").get<double>();
    opt.parabola.vertex_y = p.at("vertex_y").get<double>();
    return opt;
}

json isoflop_to_json(const IsoflopLaws& laws) {
    json optima = json::array();
    for (const auto& opt : laws.optima) optima.push_back(optimum_to_json(opt));
    return json{{"n_law", power_law_to_json(laws.n_law)},
                {"d_law", power_law_to_json(laws.d_law)},
                {"metric_law", power_law_to_json(laws.metric_law)},
                {"optima", optima},
                {"warnings", laws.warnings}};
}

IsoflopLaws isoflop_from_json(const json& j) {
    IsoflopLaws laws;
    laws.n_law = power_law_from_json(j.at("n_law"));
    laws.d_law = power_law_from_json(j.at("d_law"));
    laws.metric_law = power_law_from_json(j.at("metric_law"));
    for (const auto& o : j.at("optima")) laws.optima.push_back(optimum_from_json(o));
    laws.warnings = j.at("warnings").get<std::vector<std::string>>();
    return laws;
}

json surface_to_json(const QuadraticSurface& surface) {
    json cov = json::array();
    for (std::size_t i = 0; i < 6; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < 6; ++j) row.push_back(surface.covariance(i, j));
        cov.push_back(row);
    }
    return json{{"b0", surface.b0},
                {"bN", surface.bN},
                {"bD", surface.bD},
                {"bN2", surface.bN2},
                {"bND", surface.bND},
                {"bD2", surface.bD2},
                {"covariance", cov},
                {"direction",
                 surface.direction == FitDirection::minimize ? "minimize" : "maximize"},
                {"n", surface.n}};
}

QuadraticSurface surface_from_json(const json& j) {
    QuadraticSurface surface;
    surface.b0 = j.at("b0").get<double>();
    surface.bN = j.at("bN").get<double>();
    surface.bD = j.at("bD").get<double>();
    surface.bN2 = j.at("bN2").get<double>();
    surface.bND = j.at("bND").get<double>();
    surface.bD2 = j.at("bD2").get<double>();
    surface.covariance = Matrix(6, 6);
    const json& cov = j.at("covariance");
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 6; ++c) surface.covariance(r, c) = cov.at(r).at(c).get<double>();
    surface.direction = j.at("direction").get<std::string>() == "maximize"
                            ? FitDirection::maximize
                            : FitDirection::minimize;
    surface.n = j.at("n").get<int>();
    return surface;
}

json allocation_to_json(const AllocationLaw& law) {
    return json{{"alpha", law.alpha},
                {"beta", law.beta},
                {"G", law.G},
                {"alpha_ci95", {law.alpha_ci95.first, law.alpha_ci95.second}},
                {"beta_ci95", {law.beta_ci95.first, law.beta_ci95.second}},
                {"flop_denominator", law.flop_denominator}};
}

AllocationLaw allocation_from_json(const json& j) {
    AllocationLaw law;
    law.alpha = j.at("alpha").get<double>();
    law.beta = j.at("beta").get<double>();
    law.G = j.at("G").get<double>();
    law.alpha_ci95 = {j.at("alpha_ci95").at(0).get<double>(), j.at("alpha_ci95").at(1).get<double>()};
    law.beta_ci95 = {j.at("beta_ci95").at(0).get<double>(), j.at("beta_ci95").at(1).get<double>()};
    law.flop_denominator = j.at("flop_denominator").get<double>();
    return law;
}

json return_loss_to_json(const ReturnLossLaw& law) {
    return json{{"delta", law.delta},
                {"log_prefactor", law.log_prefactor},
                {"r_squared", law.r_squared},
                {"n", law.n}};
}

ReturnLossLaw return_loss_from_json(const json& j) {
    ReturnLossLaw law;
    law.delta = j.at("delta").get<double>();
    law.log_prefactor = j.at("log_prefactor").get<double>();
    law.r_squared = j.at("r_squared").get<double>();
    law.n = j.at("n").get<int>();
    return law;
}

}  // namespace

std::string FitReport::to_json() const {
    json j;
    j["metric"] = metric;
    j["rule"] = rule;
    j["flop_denominator"] = flop_denominator;
    j["isoflop"] = isoflop ? isoflop_to_json(*isoflop) : json(nullptr);
    j["surface"] = surface ? surface_to_json(*surface) : json(nullptr);
    j["allocation"] = allocation ? allocation_to_json(*allocation) : json(nullptr);
    j["return_loss"] = return_loss ? return_loss_to_json(*return_loss) : json(nullptr);
    j["warnings"] = warnings;
    j["errors"] = errors;
    j["config_digest"] = config_digest;
    return j.dump(2) + "\n";
}

FitReport FitReport::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("fit report: malformed json: ") + e.what());
    }
    FitReport report;
    try {
        report.metric = j.at("metric").get<std::string>();
        report.rule = j.at("rule").get<std::string>();
        report.flop_denominator = j.at("flop_denominator").get<double>();
        if (!j.at("isoflop").is_null()) report.isoflop = isoflop_from_json(j.at("isoflop"));
        if (!j.at("surface").is_null()) report.surface = surface_from_json(j.at("surface"));
        if (!j.at("allocation").is_null())
            report.allocation = allocation_from_json(j.at("allocation"));
        if (!j.at("return_loss").is_null())
            report.return_loss = return_loss_from_json(j.at("return_loss"));
        report.warnings = j.at("warnings").get<std::vector<std::string>>();
        report.errors = j.at("errors").get<std::vector<std::string>>();
        report.config_digest = j.value("config_digest", "");
    } catch (const json::exception& e) {
        throw Error(std::string("fit report: missing or mistyped field: ") + e.what());
    }
    return report;
}

std::string forecasts_to_json(std::span<const Forecast> forecasts,
                              const std::string& config_digest) {
    json arr = json::array();
    for (const auto& f : forecasts) {
        json j;
        j["method"] = to_string(f.method);
        j["target"] = f.target_metric;
        j["implied_loss"] = f.implied_loss ? json(*f.implied_loss) : json(nullptr);
        j["flops"] = f.budget_c;
        j["params"] = f.n_opt;
        j["samples"] = f.d_opt;
        j["warnings"] = f.warnings;
        arr.push_back(j);
    }
    return json{{"forecasts", arr}, {"config_digest", config_digest}}.dump(2) + "\n";
}

std::string cv_reports_to_json(std::span<const CvReport> reports,
                               const std::string& config_digest) {
    json arr = json::array();
    for (const auto& report : reports) {
        json steps = json::array();
        for (const auto& step : report.steps) {
            steps.push_back(json{{"train_size", step.train_size},
                                 {"eval_budget", step.eval_x},
                                 {"predicted", step.predicted},
                                 {"actual", step.actual},
                                 {"rmse", step.rmse},
                                 {"b0", step.b0},
                                 {"b1", step.b1},
                                 {"fit_failed", step.fit_failed}});
        }
        arr.push_back(json{{"regression_name", report.regression_name},
                           {"steps", steps},
                           {"mean_rmse", report.mean_rmse},
                           {"error", report.error}});
    }
    return json{{"reports", arr}, {"config_digest", config_digest}}.dump(2) + "\n";
}

std::string optima_csv(std::span<const BudgetOptimum> optima) {
    std::string out = "budget,n_opt,d_opt,metric_opt\n";
    for (const auto& opt : optima) {
        out += fmt_double(opt.budget) + "," + fmt_double(opt.n_opt) + "," +
               fmt_double(opt.d_opt) + "," + fmt_double(opt.metric_opt) + "\n";
    }
    return out;
}

std::string law_csv(std::span<const BudgetOptimum> optima, const PowerLaw& law,
                    const std::string& observed_column) {
    std::string out = "flops," + observed_column + ",fitted\n";
    for (const auto& opt : optima) {
        const double observed = observed_column == "n_opt"
                                    ? opt.n_opt
                                    : (observed_column == "d_opt" ? opt.d_opt : opt.metric_opt);
        out += fmt_double(opt.budget) + "," + fmt_double(observed) + "," +
               fmt_double(law.predict(opt.budget)) + "\n";
    }
    return out;
}

std::string cv_trajectory_csv(std::span<const CvReport> reports) {
    std::string out = "regression_name,train_size,b0,b1,predicted,actual,abs_error\n";
    for (const auto& report : reports) {
        for (const auto& step : report.steps) {
            if (step.fit_failed) continue;
            out += report.regression_name + "," + std::to_string(step.train_size) + "," +
                   fmt_double(step.b0) + "," + fmt_double(step.b1) + "," +
                   fmt_double(step.predicted) + "," + fmt_double(step.actual) + "," +
                   fmt_double(step.rmse) + "\n";
        }
    }
    return out;
}

std::string content_digest(const std::string& content) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : content) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace scalekit
