#include "grf/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace grf {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError(std::string(what) + ": invalid JSON");
    return j;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScalarFunction parse_scalar(const json& j, const std::string& name) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("coeffs"))
        throw ConfigError(name + ": expected {kind, coeffs}");
    const std::string kind = j.at("kind").get<std::string>();
    std::vector<double> coeffs = j.at("coeffs").get<std::vector<double>>();
    if (kind == "const") {
        if (coeffs.size() != 1) throw ConfigError(name + ": const takes one coefficient");
    } else if (kind == "linear") {
        if (coeffs.size() != 2) throw ConfigError(name + ": linear takes two coefficients");
    } else if (kind != "poly") {
        throw ConfigError(name + ": kind must be const, linear, or poly");
    }
    if (coeffs.empty()) throw ConfigError(name + ": coeffs must be non-empty");
    return ScalarFunction::poly(std::move(coeffs));
}

Kernel parse_kernel(const json& j) {
    const std::string kind = j.is_string() ? j.get<std::string>() : "";
    if (kind == "gaussian") return gaussian_kernel();
    if (kind == "custom")
        throw ConfigError("kernel: custom kernels require the C++ API, not a config file");
    throw ConfigError("kernel: must be \"gaussian\"");
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw ConfigError(name + ": expected a matrix");
    const auto rows = j.size();
    const auto cols = j.at(0).size();
    Eigen::MatrixXd m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        if (j.at(r).size() != cols) throw ConfigError(name + ": ragged matrix");
        for (size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    }
    return m;
}

Eigen::RowVectorXd parse_row(const json& j, const std::string& name) {
    if (!j.is_array()) throw ConfigError(name + ": expected an array");
    Eigen::RowVectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

}  // namespace

ProcessModel parse_model(const std::string& text) {
    const json j = parse_json(text, "model");
    if (!j.contains("type")) throw ConfigError("model: missing \"type\"");
    const std::string type = j.at("type").get<std::string>();

    ProcessModel base = [&] {
        if (type == "cosine") {
            if (!j.contains("cosine")) throw ConfigError("model: cosine needs a \"cosine\" block");
            const json& c = j.at("cosine");
            return ProcessModel::cosine(c.at("c1").get<double>(), c.at("c2").get<double>(),
                                        c.at("omega").get<double>());
        }
        if (type != "stationary" && type != "varying_bandwidth")
            throw ConfigError("model: unknown type " + type);
        Kernel k = parse_kernel(j.contains("kernel") ? j.at("kernel") : json("gaussian"));
        if (!j.contains("nu")) throw ConfigError("model: missing \"nu\"");
        ScalarFunction nu = parse_scalar(j.at("nu"), "nu");
        if (type == "stationary") {
            if (j.at("nu").at("kind").get<std::string>() != "const")
                throw ConfigError("model: stationary requires a const nu");
            return ProcessModel::stationary(std::move(k), nu.f(0.0));
        }
        return ProcessModel::varying_bandwidth(std::move(k), std::move(nu));
    }();

    if (j.contains("sigma")) {
        if (type == "cosine") throw ConfigError("model: cosine does not take a sigma scaling");
        return ProcessModel::scaled(std::move(base), parse_scalar(j.at("sigma"), "sigma"));
    }
    return base;
}

ProcessModel load_model(const std::string& path) { return parse_model(slurp(path)); }

JointGaussianSpec parse_joint_spec(const std::string& text) {
    const json j = parse_json(text, "spec");
    JointGaussianSpec s;
    try {
        s.fv = j.at("fv").get<double>();
        s.dv = parse_matrix(j.at("dv"), "dv");
        s.d2v = parse_matrix(j.at("d2v"), "d2v");
        s.fdcov = parse_row(j.at("fdcov"), "fdcov");
        s.fd2cov = parse_row(j.at("fd2cov"), "fd2cov");
        s.dd2cov = parse_matrix(j.at("dd2cov"), "dd2cov");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spec: ") + e.what());
    }
    try {
        s.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("spec: ") + e.what());
    }
    return s;
}

JointGaussianSpec load_joint_spec(const std::string& path) {
    return parse_joint_spec(slurp(path));
}

}  // namespace grf
