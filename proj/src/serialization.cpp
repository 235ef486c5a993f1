#include "gmvalloc/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gmv::io {

namespace {

[[noreturn]] void fail(const char* context, const std::string& what) {
    throw std::invalid_argument(std::string(context) + ": " + what);
}

const Json* find(const Json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double as_number(const Json& v, const char* key, const char* context) {
    if (!v.is_number()) fail(context, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

}  // namespace

Json parse_json_text(const std::string& text, const char* context) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.what() carries the line/column of the defect; keep it.
        fail(context, e.what());
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), path.c_str());
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + tmp);
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("short write to: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename into place: " + path);
    }
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const char* context) {
    if (!j.is_object()) fail(context, "expected a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const std::string_view k : allowed)
            if (k == item.key()) {
                known = true;
                break;
            }
        if (!known) fail(context, "unknown field '" + item.key() + "'");
    }
}

void check_schema_version(const Json& j, const char* context) {
    const Json* v = find(j, "schema_version");
    if (!v) fail(context, "missing 'schema_version'");
    if (!v->is_number_integer() || v->get<long long>() != kSchemaVersion)
        fail(context, "unsupported schema_version (expected 1)");
}

double get_number(const Json& j, const char* key, const char* context) {
    const Json* v = find(j, key);
    if (!v) fail(context, std::string("missing required field '") + key + "'");
    return as_number(*v, key, context);
}

double get_number_or(const Json& j, const char* key, double fallback,
                     const char* context) {
    const Json* v = find(j, key);
    return v ? as_number(*v, key, context) : fallback;
}

long long get_integer(const Json& j, const char* key, const char* context) {
    const Json* v = find(j, key);
    if (!v) fail(context, std::string("missing required field '") + key + "'");
    if (!v->is_number_integer())
        fail(context, std::string("field '") + key + "' must be an integer");
    return v->get<long long>();
}

long long get_integer_or(const Json& j, const char* key, long long fallback,
                         const char* context) {
    const Json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number_integer())
        fail(context, std::string("field '") + key + "' must be an integer");
    return v->get<long long>();
}

bool get_bool_or(const Json& j, const char* key, bool fallback, const char* context) {
    const Json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(context, std::string("field '") + key + "' must be a bool");
    return v->get<bool>();
}

std::string get_string(const Json& j, const char* key, const char* context) {
    const Json* v = find(j, key);
    if (!v) fail(context, std::string("missing required field '") + key + "'");
    if (!v->is_string()) fail(context, std::string("field '") + key + "' must be a string");
    return v->get<std::string>();
}

Json to_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json to_json(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::VectorXd vector_from_json(const Json& j, const char* context) {
    if (!j.is_array()) fail(context, "expected an array of numbers");
    Eigen::VectorXd v(j.size());
    Eigen::Index i = 0;
    for (const auto& e : j) {
        if (!e.is_number()) fail(context, "expected an array of numbers");
        v(i++) = e.get<double>();
    }
    return v;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const char* context) {
    if (!j.is_array() || j.empty()) fail(context, "expected an array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) fail(context, "expected an array of rows");
    Eigen::MatrixXd m(j.size(), cols);
    Eigen::Index r = 0;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols) fail(context, "ragged matrix rows");
        Eigen::Index c = 0;
        for (const auto& e : row) {
            if (!e.is_number()) fail(context, "matrix entries must be numbers");
            m(r, c++) = e.get<double>();
        }
        ++r;
    }
    return m;
}

namespace {

std::string family_name(Family f) {
    switch (f) {
        case Family::Gaussian: return "gaussian";
        case Family::GaussianWishart: return "gaussian_wishart";
        case Family::Ald: return "ald";
    }
    return "gaussian";
}

Family family_from_name(const std::string& s, const char* context) {
    if (s == "gaussian") return Family::Gaussian;
    if (s == "gaussian_wishart") return Family::GaussianWishart;
    if (s == "ald") return Family::Ald;
    fail(context, "unknown family '" + s + "'");
}

}  // namespace

Json to_json(const ReturnModel& model) {
    Json j;
    j["family"] = family_name(model.family);
    j["mu0"] = to_json(model.mu0);
    j["sigma"] = to_json(model.sigma);
    j["r0"] = model.r0;
    if (model.sigma0.size() > 0) j["sigma0"] = to_json(model.sigma0);
    if (model.mu_a.size() > 0) j["mu_a"] = to_json(model.mu_a);
    if (std::isfinite(model.alpha)) j["alpha"] = model.alpha;
    if (!model.assets.empty()) j["assets"] = model.assets;
    return j;
}

ReturnModel return_model_from_json(const Json& j) {
    const char* ctx = "return model";
    check_keys(j, {"family", "mu0", "sigma", "r0", "sigma0", "mu_a", "alpha", "assets"},
               ctx);
    ReturnModel model;
    model.family = family_from_name(get_string(j, "family", ctx), ctx);
    const Json* mu0 = find(j, "mu0");
    if (!mu0) fail(ctx, "missing required field 'mu0'");
    model.mu0 = vector_from_json(*mu0, ctx);
    const Json* sigma = find(j, "sigma");
    if (!sigma) fail(ctx, "missing required field 'sigma'");
    model.sigma = matrix_from_json(*sigma, ctx);
    model.r0 = get_number_or(j, "r0", 0.0, ctx);
    if (const Json* s0 = find(j, "sigma0")) model.sigma0 = matrix_from_json(*s0, ctx);
    if (const Json* ma = find(j, "mu_a")) model.mu_a = vector_from_json(*ma, ctx);
    model.alpha = get_number_or(j, "alpha", kInf, ctx);
    if (const Json* assets = find(j, "assets")) {
        if (!assets->is_array()) fail(ctx, "'assets' must be an array of strings");
        for (const auto& e : *assets) {
            if (!e.is_string()) fail(ctx, "'assets' must be an array of strings");
            model.assets.push_back(e.get<std::string>());
        }
    }
    model.validate();
    return model;
}

Json to_json(const PosteriorBelief& belief) {
    Json j;
    j["mu_pd"] = belief.mu_pd;
    j["sigma_pd2"] = belief.sigma_pd2;
    j["sigma_mu2"] = belief.sigma_mu2;
    j["n_eff"] = belief.n_eff;
    return j;
}

PosteriorBelief belief_from_json(const Json& j) {
    const char* ctx = "belief";
    check_keys(j, {"mu_pd", "sigma_pd2", "sigma_mu2", "n_eff"}, ctx);
    PosteriorBelief b;
    b.mu_pd = get_number(j, "mu_pd", ctx);
    b.sigma_pd2 = get_number(j, "sigma_pd2", ctx);
    b.sigma_mu2 = get_number_or(j, "sigma_mu2", 0.0, ctx);
    b.n_eff = get_number_or(j, "n_eff", 0.0, ctx);
    return b;
}

Json to_json(const HorizonSpec& horizon) {
    Json j;
    j["T"] = horizon.T;
    j["dt"] = horizon.dt;
    j["t0"] = horizon.t0;
    return j;
}

HorizonSpec horizon_from_json(const Json& j) {
    const char* ctx = "horizon";
    check_keys(j, {"T", "dt", "t0"}, ctx);
    HorizonSpec h;
    h.T = get_number(j, "T", ctx);
    h.dt = get_number_or(j, "dt", h.dt, ctx);
    h.t0 = get_number_or(j, "t0", 0.0, ctx);
    return h;
}

LeverageInputs leverage_inputs_from_json(const Json& j) {
    const char* ctx = "leverage inputs";
    check_keys(j, {"mu_r", "sigma_r2", "r0", "sigma0_2", "alpha", "T", "lambda"}, ctx);
    LeverageInputs in;
    in.mu_r = get_number(j, "mu_r", ctx);
    in.sigma_r2 = get_number(j, "sigma_r2", ctx);
    in.r0 = get_number_or(j, "r0", 0.0, ctx);
    in.sigma0_2 = get_number_or(j, "sigma0_2", 0.0, ctx);
    in.alpha = get_number_or(j, "alpha", kInf, ctx);
    in.T = get_number_or(j, "T", 1.0, ctx);
    in.lambda = get_number_or(j, "lambda", 1.0, ctx);
    return in;
}

BinaryBet binary_bet_from_json(const Json& j) {
    const char* ctx = "binary bet";
    check_keys(j, {"p", "b", "a_loss", "lambda"}, ctx);
    BinaryBet bet;
    bet.p = get_number(j, "p", ctx);
    bet.b = get_number(j, "b", ctx);
    bet.a_loss = get_number(j, "a_loss", ctx);
    bet.lambda = get_number_or(j, "lambda", 1.0, ctx);
    return bet;
}

BayesBinaryBet bayes_bet_from_json(const Json& j) {
    const char* ctx = "bayes bet";
    check_keys(j, {"y1", "n1", "prior_alpha", "prior_beta", "N", "b", "a_loss", "lambda"},
               ctx);
    BayesBinaryBet bet;
    bet.y1 = get_number(j, "y1", ctx);
    bet.n1 = get_number(j, "n1", ctx);
    bet.prior_alpha = get_number_or(j, "prior_alpha", 1.0, ctx);
    bet.prior_beta = get_number_or(j, "prior_beta", 1.0, ctx);
    bet.N = get_integer(j, "N", ctx);
    bet.b = get_number(j, "b", ctx);
    bet.a_loss = get_number(j, "a_loss", ctx);
    bet.lambda = get_number_or(j, "lambda", 1.0, ctx);
    return bet;
}

Gamble gamble_from_json(const Json& j) {
    const char* ctx = "gamble";
    check_keys(j, {"outcomes", "probs", "ce", "sigma0_2"}, ctx);
    Gamble g;
    const Json* outcomes = find(j, "outcomes");
    const Json* probs = find(j, "probs");
    if (!outcomes || !probs) fail(ctx, "needs 'outcomes' and 'probs'");
    g.outcomes = vector_from_json(*outcomes, ctx);
    g.probs = vector_from_json(*probs, ctx);
    g.ce = get_number(j, "ce", ctx);
    g.sigma0_2 = get_number_or(j, "sigma0_2", 0.0, ctx);
    return g;
}

CalibrationFamily calibration_family_from_json(const Json& j) {
    const char* ctx = "calibration family";
    check_keys(j, {"family", "mu_a", "alpha"}, ctx);
    CalibrationFamily fam;
    const std::string name = get_string(j, "family", ctx);
    if (name == "gaussian") fam.kind = CalibrationFamily::Kind::Gaussian;
    else if (name == "ald") fam.kind = CalibrationFamily::Kind::Ald;
    else if (name == "gamma_variance") fam.kind = CalibrationFamily::Kind::GammaVariance;
    else fail(ctx, "unknown family '" + name + "'");
    fam.mu_a = get_number_or(j, "mu_a", 0.0, ctx);
    fam.alpha = get_number_or(j, "alpha", kInf, ctx);
    return fam;
}

mc::SimConfig sim_config_from_json(const Json& j) {
    const char* ctx = "sim config";
    check_keys(j, {"n_paths", "seed", "antithetic"}, ctx);
    mc::SimConfig cfg;
    cfg.n_paths = get_integer_or(j, "n_paths", cfg.n_paths, ctx);
    const long long seed = get_integer_or(j, "seed", 1, ctx);
    if (seed < 0) fail(ctx, "seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.antithetic = get_bool_or(j, "antithetic", false, ctx);
    return cfg;
}

Json to_json(const AllocationResult& result) {
    Json j;
    j["weights"] = to_json(result.w);
    j["cash"] = result.cash;
    j["mu_p"] = result.mu_p;
    j["sigma_p2"] = result.sigma_p2;
    j["sigma0_p2"] = result.sigma0_p2;
    j["sharpe"] = result.sharpe;
    j["method"] = result.method;
    return j;
}

Json to_json(const LeverageResult& result) {
    Json j;
    j["f_star"] = result.f_star;
    j["objective"] = result.objective;
    j["mean_logw"] = result.mean_logw;
    j["var_logw"] = result.var_logw;
    j["method"] = result.method;
    if (!result.flag.empty()) j["flag"] = result.flag;
    if (std::isfinite(result.f_kelly)) j["f_kelly"] = result.f_kelly;
    if (std::isfinite(result.f_linearized)) j["f_linearized"] = result.f_linearized;
    if (std::isfinite(result.delta)) j["delta"] = result.delta;
    return j;
}

Json to_json(const mc::PathStats& stats) {
    Json j;
    j["sample_mean"] = stats.sample_mean;
    j["sample_var"] = stats.sample_var;
    j["sample_mode_kde"] = stats.sample_mode_kde;
    j["se_mean"] = stats.se_mean;
    j["se_var"] = stats.se_var;
    j["n_paths"] = stats.n_paths;
    return j;
}

Json to_json(const CalibrationResult& result) {
    Json j;
    j["a"] = result.a;
    j["mu_c"] = result.mu_c;
    j["sigma_c2"] = result.sigma_c2;
    j["residual"] = result.residual;
    j["iterations"] = result.iterations;
    return j;
}

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(header[i]);
    }
    out += "\r\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_full(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

}  // namespace gmv::io
