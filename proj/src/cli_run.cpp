#include "gmvalloc/cli_run.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "gmvalloc/allocators.hpp"
#include "gmvalloc/errors.hpp"
#include "gmvalloc/gmv_objectives.hpp"
#include "gmvalloc/kelly.hpp"
#include "gmvalloc/market_model.hpp"
#include "gmvalloc/mc_oracle.hpp"
#include "gmvalloc/serialization.hpp"

namespace gmv::cli {

namespace {

using io::Json;

struct Output {
    Json json;
    std::vector<std::string> csv_header;
    std::vector<std::vector<double>> csv_rows;
    bool csv_supported = true;
};

std::string weight_label(const ReturnModel& model, int i) {
    if (static_cast<int>(model.assets.size()) > i) return "w_" + model.assets[i];
    return "w_" + std::to_string(i + 1);
}

Output run_calibrate(const Json& in, const RunSpec& spec) {
    io::check_keys(in, {"schema_version", "gamble", "family"}, "calibrate input");
    const auto git = in.find("gamble");
    if (git == in.end())
        throw std::invalid_argument("calibrate input: missing 'gamble'");
    const Gamble gamble = io::gamble_from_json(*git);
    CalibrationFamily family;  // symmetric Gaussian unless stated
    if (const auto fit = in.find("family"); fit != in.end())
        family = io::calibration_family_from_json(*fit);
    (void)spec;
    const CalibrationResult result = calibrate_risk_aversion(gamble, family);
    Output out;
    out.json = io::to_json(result);
    out.csv_header = {"a", "mu_c", "sigma_c2", "residual", "iterations"};
    out.csv_rows = {{result.a, result.mu_c, result.sigma_c2, result.residual,
                     static_cast<double>(result.iterations)}};
    return out;
}

Output allocation_output(const ReturnModel& model, const AllocationResult& result) {
    Output out;
    out.json = io::to_json(result);
    if (!model.assets.empty()) out.json["assets"] = model.assets;
    std::vector<double> row;
    for (int i = 0; i < model.size(); ++i) {
        out.csv_header.push_back(weight_label(model, i));
        row.push_back(result.w(i));
    }
    for (const char* k : {"cash", "mu_p", "sigma_p2", "sigma0_p2", "sharpe"})
        out.csv_header.push_back(k);
    row.insert(row.end(), {result.cash, result.mu_p, result.sigma_p2, result.sigma0_p2,
                           result.sharpe});
    out.csv_rows = {std::move(row)};
    return out;
}

Output run_allocate(const Json& in, const RunSpec& spec) {
    io::check_keys(in,
                   {"schema_version", "model", "risk_aversion", "sigma_target", "solver",
                    "constraints"},
                   "allocate input");
    const auto mit = in.find("model");
    if (mit == in.end()) throw std::invalid_argument("allocate input: missing 'model'");
    const ReturnModel model = io::return_model_from_json(*mit);

    if (in.contains("sigma_target")) {
        if (in.contains("risk_aversion") || !std::isnan(spec.risk_aversion))
            throw std::invalid_argument(
                "allocate input: give either sigma_target or risk_aversion, not both");
        const double st = io::get_number(in, "sigma_target", "allocate input");
        return allocation_output(model, risk_budget(model, st));
    }

    double a = io::get_number_or(in, "risk_aversion", kInf, "allocate input");
    if (!std::isnan(spec.risk_aversion)) a = spec.risk_aversion;
    if (!std::isfinite(a))
        throw std::invalid_argument("allocate input: missing 'risk_aversion'");

    std::string solver = "closed";
    if (in.contains("solver")) solver = io::get_string(in, "solver", "allocate input");
    Constraints cons;
    if (const auto cit = in.find("constraints"); cit != in.end()) {
        io::check_keys(*cit, {"long_only", "full_investment"}, "constraints");
        cons.long_only = io::get_bool_or(*cit, "long_only", false, "constraints");
        cons.full_investment =
            io::get_bool_or(*cit, "full_investment", false, "constraints");
        if (solver == "closed" && (cons.long_only || cons.full_investment))
            solver = "numeric";
    }

    AllocationResult result;
    if (solver == "closed") result = solve_closed(model, a);
    else if (solver == "numeric") result = solve_numeric(model, a, {}, cons);
    else throw std::invalid_argument("allocate input: solver must be closed or numeric");
    return allocation_output(model, result);
}

Output leverage_output(const LeverageResult& result) {
    Output out;
    out.json = io::to_json(result);
    out.csv_header = {"f_star", "objective", "mean_logw", "var_logw"};
    out.csv_rows = {{result.f_star, result.objective, result.mean_logw, result.var_logw}};
    return out;
}

LeverageInputs apply_overrides(LeverageInputs in, const RunSpec& spec) {
    if (!std::isnan(spec.lambda)) in.lambda = spec.lambda;
    if (!std::isnan(spec.horizon)) in.T = spec.horizon;
    return in;
}

Output run_leverage(const Json& in, const RunSpec& spec) {
    io::check_keys(in, {"schema_version", "inputs", "criterion", "gamma"},
                   "leverage input");
    const auto iit = in.find("inputs");
    if (iit == in.end()) throw std::invalid_argument("leverage input: missing 'inputs'");
    const LeverageInputs inputs = apply_overrides(io::leverage_inputs_from_json(*iit), spec);
    std::string criterion = "gmv";
    if (in.contains("criterion"))
        criterion = io::get_string(in, "criterion", "leverage input");

    LeverageResult result;
    if (criterion == "gmv") result = kelly_gmv(inputs);
    else if (criterion == "gmv_uncertain_variance")
        result = kelly_gmv_uncertain_variance(inputs);
    else if (criterion == "crra")
        result = crra_leverage(io::get_number(in, "gamma", "leverage input"), inputs);
    else
        throw std::invalid_argument(
            "leverage input: criterion must be gmv, gmv_uncertain_variance, or crra");
    return leverage_output(result);
}

Output run_bet(const Json& in, const RunSpec& spec) {
    io::check_keys(in, {"schema_version", "binary", "bayes"}, "bet input");
    const bool has_binary = in.contains("binary");
    const bool has_bayes = in.contains("bayes");
    if (has_binary == has_bayes)
        throw std::invalid_argument("bet input: give exactly one of 'binary' or 'bayes'");
    LeverageResult result;
    if (has_binary) {
        BinaryBet bet = io::binary_bet_from_json(in["binary"]);
        if (!std::isnan(spec.lambda)) bet.lambda = spec.lambda;
        result = binary_gmv(bet);
    } else {
        BayesBinaryBet bet = io::bayes_bet_from_json(in["bayes"]);
        if (!std::isnan(spec.lambda)) bet.lambda = spec.lambda;
        result = bayes_binary_optimal(bet);
    }
    return leverage_output(result);
}

Output stats_output(const mc::PathStats& stats) {
    Output out;
    out.json = io::to_json(stats);
    out.csv_header = {"sample_mean", "sample_var", "sample_mode_kde", "se_mean",
                      "se_var", "n_paths"};
    out.csv_rows = {{stats.sample_mean, stats.sample_var, stats.sample_mode_kde,
                     stats.se_mean, stats.se_var, static_cast<double>(stats.n_paths)}};
    return out;
}

Output run_simulate(const Json& in, const RunSpec& spec) {
    io::check_keys(in,
                   {"schema_version", "process", "x0", "belief", "sigma2", "horizon",
                    "bet", "f", "n_rounds", "config", "exec"},
                   "simulate input");
    const std::string process = io::get_string(in, "process", "simulate input");
    mc::SimConfig config;
    if (const auto cit = in.find("config"); cit != in.end())
        config = io::sim_config_from_json(*cit);
    if (spec.seed >= 0) config.seed = static_cast<std::uint64_t>(spec.seed);
    mc::ExecMode mode = mc::ExecMode::Parallel;
    if (in.contains("exec")) {
        const std::string e = io::get_string(in, "exec", "simulate input");
        if (e == "serial") mode = mc::ExecMode::Serial;
        else if (e != "parallel")
            throw std::invalid_argument("simulate input: exec must be parallel or serial");
    }

    mc::PathStats stats;
    if (process == "abm" || process == "gbm") {
        const auto bit = in.find("belief");
        if (bit == in.end())
            throw std::invalid_argument("simulate input: missing 'belief'");
        const PosteriorBelief belief = io::belief_from_json(*bit);
        const double sigma2 = io::get_number(in, "sigma2", "simulate input");
        HorizonSpec horizon;
        if (const auto hit = in.find("horizon"); hit != in.end())
            horizon = io::horizon_from_json(*hit);
        if (!std::isnan(spec.horizon)) horizon.T = spec.horizon;
        const double x0 =
            io::get_number_or(in, "x0", process == "gbm" ? 1.0 : 0.0, "simulate input");
        stats = process == "abm"
                    ? mc::simulate_abm(x0, belief, sigma2, horizon, config, mode)
                    : mc::simulate_gbm(x0, belief, sigma2, horizon, config, mode);
    } else if (process == "binary") {
        const auto bit = in.find("bet");
        if (bit == in.end()) throw std::invalid_argument("simulate input: missing 'bet'");
        const BinaryBet bet = io::binary_bet_from_json(*bit);
        const double f = io::get_number(in, "f", "simulate input");
        const long long rounds = io::get_integer_or(in, "n_rounds", 1, "simulate input");
        stats = mc::simulate_binary(bet, f, rounds, config, mode);
    } else if (process == "bayes_binary") {
        const auto bit = in.find("bet");
        if (bit == in.end()) throw std::invalid_argument("simulate input: missing 'bet'");
        const BayesBinaryBet bet = io::bayes_bet_from_json(*bit);
        const double f = io::get_number(in, "f", "simulate input");
        stats = mc::simulate_bayes_binary(bet, f, config, mode);
    } else {
        throw std::invalid_argument(
            "simulate input: process must be abm, gbm, binary, or bayes_binary");
    }
    return stats_output(stats);
}

// Diversify, then decide how hard to lean on the result: the leverage stage
// sees the fully-invested (normalized) risky portfolio's moments, and the
// final book scales the unnormalized optimal weights by f*.
Output run_pipeline(const Json& in, const RunSpec& spec) {
    io::check_keys(in, {"schema_version", "model", "risk_aversion", "lambda", "T"},
                   "pipeline input");
    const auto mit = in.find("model");
    if (mit == in.end()) throw std::invalid_argument("pipeline input: missing 'model'");
    const ReturnModel model = io::return_model_from_json(*mit);
    double a = io::get_number_or(in, "risk_aversion", kInf, "pipeline input");
    if (!std::isnan(spec.risk_aversion)) a = spec.risk_aversion;
    if (!std::isfinite(a))
        throw std::invalid_argument("pipeline input: missing 'risk_aversion'");
    double lambda = io::get_number_or(in, "lambda", 1.0, "pipeline input");
    if (!std::isnan(spec.lambda)) lambda = spec.lambda;
    double T = io::get_number_or(in, "T", 1.0, "pipeline input");
    if (!std::isnan(spec.horizon)) T = spec.horizon;

    const AllocationResult alloc = solve_closed(model, a);
    const double total = alloc.w.sum();
    if (!(total > 0.0))
        throw std::invalid_argument(
            "pipeline: allocation has no net long exposure to leverage");
    const Eigen::VectorXd w_hat = alloc.w / total;

    const Eigen::MatrixXd S = model.sigma;
    const Eigen::VectorXd excess = model.mu0.array() - model.r0;
    LeverageInputs lin;
    lin.sigma_r2 = w_hat.dot(S * w_hat);
    lin.mu_r = model.r0 + excess.dot(w_hat);
    if (model.family == Family::Ald) {
        const Eigen::VectorXd ma = model.mu_a_or_zero();
        const double skew = ma.dot(w_hat);
        lin.mu_r += skew;
        lin.sigma_r2 += skew * skew;
    }
    if (model.sigma0.size() > 0) lin.sigma0_2 = w_hat.dot(model.sigma0 * w_hat);
    lin.r0 = model.r0;
    lin.T = T;
    lin.lambda = lambda;
    const LeverageResult lev = kelly_gmv(lin);

    const Eigen::VectorXd w_final = combine_allocation(alloc.w, lev.f_star);

    Output out;
    out.json["allocation"] = io::to_json(alloc);
    Json norm;
    norm["weights"] = io::to_json(w_hat);
    norm["mu_r"] = lin.mu_r;
    norm["sigma_r2"] = lin.sigma_r2;
    norm["sigma0_2"] = lin.sigma0_2;
    out.json["normalized"] = std::move(norm);
    out.json["leverage"] = io::to_json(lev);
    out.json["final_weights"] = io::to_json(w_final);
    out.json["final_cash"] = 1.0 - w_final.sum();
    out.csv_supported = false;
    return out;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        if (spec.format != "json" && spec.format != "csv") {
            err << "error: format must be json or csv\n";
            return kExitValidation;
        }
        if (spec.input_path.empty()) {
            err << "error: --input is required\n";
            return kExitValidation;
        }
        const Json input = io::read_json_file(spec.input_path);
        io::check_schema_version(input, spec.command.c_str());

        Output result;
        if (spec.command == "calibrate") result = run_calibrate(input, spec);
        else if (spec.command == "allocate") result = run_allocate(input, spec);
        else if (spec.command == "leverage") result = run_leverage(input, spec);
        else if (spec.command == "bet") result = run_bet(input, spec);
        else if (spec.command == "simulate") result = run_simulate(input, spec);
        else if (spec.command == "pipeline") result = run_pipeline(input, spec);
        else {
            err << "error: unknown command '" << spec.command << "'\n";
            return kExitValidation;
        }

        std::string text;
        if (spec.format == "json") {
            Json wrapped;
            wrapped["schema_version"] = io::kSchemaVersion;
            for (auto& item : result.json.items()) wrapped[item.key()] = item.value();
            text = wrapped.dump(2);
            text += '\n';
        } else {
            if (!result.csv_supported) {
                err << "error: " << spec.command << " does not support csv output\n";
                return kExitValidation;
            }
            text = io::to_csv(result.csv_header, result.csv_rows);
        }
        if (spec.output_path.empty()) out << text;
        else io::write_file_atomic(spec.output_path, text);
        return kExitOk;
    } catch (const SolverError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const QuadratureError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUnexpected;
    }
}

}  // namespace gmv::cli
