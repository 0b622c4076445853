#include "fracmono/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "fracmono/operators/operator.hpp"

namespace fracmono::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::string_view section, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(std::string(section) + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key))
            throw ConfigError("unknown key '" + key + "' in " + std::string(section));
}

template <typename T>
T get(const json& j, const std::string& key, std::string_view section) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(section) + "." + key + ": " + e.what());
    }
}

template <typename T>
void read(const json& j, const std::string& key, std::string_view section, T& target) {
    if (j.contains(key)) target = get<T>(j, key, section);
}

Equation equation_from_string(const std::string& s) {
    if (s == "porous_medium") return Equation::PorousMedium;
    if (s == "p_laplace") return Equation::PLaplace;
    if (s == "linear") return Equation::Linear;
    throw ConfigError("equation: expected porous_medium, p_laplace or linear (got '" + s + "')");
}

kernels::MemoryScheme scheme_from_string(const std::string& s) {
    if (s == "l1") return kernels::MemoryScheme::L1;
    if (s == "gl") return kernels::MemoryScheme::GrunwaldLetnikov;
    throw ConfigError("scheme: expected l1 or gl (got '" + s + "')");
}

std::string scheme_name(kernels::MemoryScheme s) { return s == kernels::MemoryScheme::L1 ? "l1" : "gl"; }

std::vector<double> read_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("initial: cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    for (auto& c : text)
        if (c == ',') c = ' ';
    std::istringstream tokens(text);
    std::vector<double> values;
    std::string token;
    while (tokens >> token) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ConfigError("initial: bad number '" + token + "' in " + path.string());
        }
    }
    return values;
}

std::filesystem::path resolve(const RunConfig& c, const std::filesystem::path& p) {
    return p.is_absolute() || c.base_dir.empty() ? p : c.base_dir / p;
}

} // namespace

std::string_view to_string(Equation e) {
    switch (e) {
    case Equation::PorousMedium: return "porous_medium";
    case Equation::PLaplace: return "p_laplace";
    case Equation::Linear: return "linear";
    }
    return "unknown";
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    check_keys(j, "config",
               {"equation", "grid", "p", "alpha_frac", "lambda", "zero_order", "beta", "gamma", "T", "dt", "scheme",
                "solver", "initial", "noise", "monte_carlo", "seed", "output"});
    RunConfig c;
    c.base_dir = base_dir;
    if (!j.contains("equation")) throw ConfigError("config: missing key 'equation'");
    c.equation = equation_from_string(get<std::string>(j, "equation", "config"));
    for (const char* key : {"beta", "T", "dt"})
        if (!j.contains(key)) throw ConfigError(std::string("config: missing key '") + key + "'");

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, "grid", {"n", "length"});
        read(g, "n", "grid", c.n);
        read(g, "length", "grid", c.length);
    }
    read(j, "p", "config", c.p);
    read(j, "alpha_frac", "config", c.alpha_frac);
    read(j, "lambda", "config", c.lambda);
    read(j, "zero_order", "config", c.zero_order);
    read(j, "beta", "config", c.beta);
    if (j.contains("gamma")) c.gamma = get<double>(j, "gamma", "config");
    read(j, "T", "config", c.T);
    read(j, "dt", "config", c.dt);
    if (j.contains("scheme")) c.scheme = scheme_from_string(get<std::string>(j, "scheme", "config"));
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        check_keys(s, "solver", {"nonlinear_tol", "max_newton"});
        read(s, "nonlinear_tol", "solver", c.nonlinear_tol);
        read(s, "max_newton", "solver", c.max_newton);
    }
    if (j.contains("initial")) {
        const auto& s = j.at("initial");
        check_keys(s, "initial", {"profile", "k", "amplitude", "center", "width", "value", "path"});
        read(s, "profile", "initial", c.initial.profile);
        read(s, "k", "initial", c.initial.k);
        read(s, "amplitude", "initial", c.initial.amplitude);
        read(s, "center", "initial", c.initial.center);
        read(s, "width", "initial", c.initial.width);
        read(s, "value", "initial", c.initial.value);
        if (s.contains("path")) c.initial.path = get<std::string>(s, "path", "initial");
    }
    if (j.contains("noise")) {
        const auto& s = j.at("noise");
        check_keys(s, "noise", {"modes", "diagonal", "matrix", "regularity"});
        NoiseConfig n;
        read(s, "modes", "noise", n.modes);
        if (s.contains("diagonal")) {
            if (s.at("diagonal").is_number())
                n.diagonal.assign(n.modes, get<double>(s, "diagonal", "noise"));
            else
                n.diagonal = get<std::vector<double>>(s, "diagonal", "noise");
        }
        if (s.contains("matrix")) n.matrix = get<std::vector<std::vector<double>>>(s, "matrix", "noise");
        if (s.contains("regularity")) {
            try {
                n.regularity = stochastic::noise_regularity_from_string(get<std::string>(s, "regularity", "noise"));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("noise.regularity: ") + e.what());
            }
        }
        c.noise = std::move(n);
    }
    if (j.contains("monte_carlo")) {
        const auto& s = j.at("monte_carlo");
        check_keys(s, "monte_carlo", {"paths"});
        read(s, "paths", "monte_carlo", c.monte_carlo_paths);
    }
    read(j, "seed", "config", c.seed);
    if (j.contains("output")) {
        const auto& s = j.at("output");
        check_keys(s, "output", {"directory", "binary_dump"});
        if (s.contains("directory")) c.output_directory = get<std::string>(s, "directory", "output");
        read(s, "binary_dump", "output", c.binary_dump);
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    auto c = parse_config(j, path.parent_path());
    validate(c);
    return c;
}

void validate(const RunConfig& c) {
    if (c.n == 0) throw ConfigError("grid.n must be at least 1");
    if (!(c.length > 0.0)) throw ConfigError("grid.length must be positive");
    if (!(c.p >= 2.0)) throw ConfigError("p >= 2 is required (got " + std::to_string(c.p) + ")");
    if (c.equation == Equation::Linear && c.p != 2.0) throw ConfigError("the linear equation uses p = 2");
    if (!(c.alpha_frac > 0.0 && c.alpha_frac <= 1.0)) throw ConfigError("alpha_frac must lie in (0, 1]");
    if (c.equation != Equation::PorousMedium && c.alpha_frac != 1.0)
        throw ConfigError("alpha_frac applies to the porous medium equation only");
    if (!(c.lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
    if (!(c.beta > 0.0 && c.beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
    if (!(c.T > 0.0)) throw ConfigError("T must be positive");
    if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
    try {
        (void)stepper::step_count(c.T, c.dt);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(c.nonlinear_tol > 0.0)) throw ConfigError("solver.nonlinear_tol must be positive");
    if (c.max_newton == 0) throw ConfigError("solver.max_newton must be at least 1");

    const auto& ic = c.initial;
    if (ic.profile == "sine_mode") {
        if (ic.k < 1) throw ConfigError("initial.k must be at least 1");
    } else if (ic.profile == "bump") {
        if (!(ic.width > 0.0)) throw ConfigError("initial.width must be positive");
    } else if (ic.profile == "file") {
        if (ic.path.empty()) throw ConfigError("initial.path is required for the file profile");
        const auto values = read_values(resolve(c, ic.path));
        if (values.size() != c.n)
            throw ConfigError("initial: " + std::to_string(values.size()) + " values in " + ic.path.string() +
                              ", expected " + std::to_string(c.n));
    } else if (ic.profile != "constant") {
        throw ConfigError("initial.profile: expected sine_mode, bump, constant or file (got '" + ic.profile + "')");
    }

    if (c.noise && !c.gamma) throw ConfigError("a noise block requires gamma");
    if (c.gamma && !c.noise) throw ConfigError("gamma is given without a noise block");
    if (c.monte_carlo_paths != 0 && !c.noise) throw ConfigError("monte_carlo requires a noise block");
    if (c.monte_carlo_paths == 1) throw ConfigError("monte_carlo.paths must be at least 2");
    if (c.noise) {
        const auto& n = *c.noise;
        if (n.modes == 0) throw ConfigError("noise.modes must be at least 1");
        if (n.diagonal.empty() == n.matrix.empty()) throw ConfigError("noise: give exactly one of diagonal or matrix");
        if (!n.diagonal.empty()) {
            if (n.diagonal.size() != n.modes) throw ConfigError("noise.diagonal must have 'modes' entries");
            if (n.modes > c.n) throw ConfigError("noise: a diagonal B needs modes <= grid.n");
        } else {
            if (n.matrix.size() != c.n) throw ConfigError("noise.matrix must have grid.n rows");
            for (const auto& row : n.matrix)
                if (row.size() != n.modes) throw ConfigError("noise.matrix rows must have 'modes' entries");
        }
        const auto gate = stochastic::validate_noise(c.beta, make_noise(c));
        if (!gate) throw ConfigError("noise rejected: " + gate.reason);
    }
}

json to_json(const RunConfig& c) {
    json j;
    j["equation"] = std::string(to_string(c.equation));
    j["grid"] = {{"n", c.n}, {"length", c.length}};
    j["p"] = c.p;
    if (c.equation == Equation::PorousMedium) j["alpha_frac"] = c.alpha_frac;
    if (c.equation == Equation::Linear) j["lambda"] = c.lambda;
    if (c.equation == Equation::PLaplace) j["zero_order"] = c.zero_order;
    j["beta"] = c.beta;
    if (c.gamma) j["gamma"] = *c.gamma;
    j["T"] = c.T;
    j["dt"] = c.dt;
    j["scheme"] = scheme_name(c.scheme);
    j["solver"] = {{"nonlinear_tol", c.nonlinear_tol}, {"max_newton", c.max_newton}};
    json ic = {{"profile", c.initial.profile}};
    if (c.initial.profile == "sine_mode") {
        ic["k"] = c.initial.k;
        ic["amplitude"] = c.initial.amplitude;
    } else if (c.initial.profile == "bump") {
        ic["amplitude"] = c.initial.amplitude;
        ic["center"] = c.initial.center;
        ic["width"] = c.initial.width;
    } else if (c.initial.profile == "constant") {
        ic["value"] = c.initial.value;
    } else {
        ic["path"] = c.initial.path.string();
    }
    j["initial"] = ic;
    if (c.noise) {
        json n = {{"modes", c.noise->modes}, {"regularity", std::string(stochastic::to_string(c.noise->regularity))}};
        if (!c.noise->diagonal.empty())
            n["diagonal"] = c.noise->diagonal;
        else
            n["matrix"] = c.noise->matrix;
        j["noise"] = n;
    }
    if (c.monte_carlo_paths > 0) j["monte_carlo"] = {{"paths", c.monte_carlo_paths}};
    j["seed"] = c.seed;
    json out = {{"binary_dump", c.binary_dump}};
    if (!c.output_directory.empty()) out["directory"] = c.output_directory.string();
    j["output"] = out;
    return j;
}

std::vector<double> initial_state(const RunConfig& c) {
    const operators::Grid1D grid{c.n, c.length};
    std::vector<double> x(c.n);
    const auto& ic = c.initial;
    if (ic.profile == "file") return read_values(resolve(c, ic.path));
    for (std::size_t i = 0; i < c.n; ++i) {
        const double s = grid.x(i) / c.length;
        if (ic.profile == "sine_mode") {
            x[i] = ic.amplitude * std::sin(ic.k * std::numbers::pi * s);
        } else if (ic.profile == "bump") {
            const double r = (s - ic.center) / ic.width;
            x[i] = std::fabs(r) < 1.0 ? ic.amplitude * (1.0 - r * r) * (1.0 - r * r) : 0.0;
        } else {
            x[i] = ic.value;
        }
    }
    return x;
}

stepper::ProblemSpec make_problem(const RunConfig& c) {
    stepper::ProblemSpec p;
    p.beta = c.beta;
    p.T = c.T;
    const operators::Grid1D grid{c.n, c.length};
    switch (c.equation) {
    case Equation::PorousMedium: {
        p.triple = operators::TripleSpec{.grid = grid, .kind = operators::TripleKind::PorousMedium, .p = c.p, .pivot_order = c.alpha_frac};
        operators::PorousMediumSpec pm;
        pm.alpha_frac = c.alpha_frac;
        p.op.kind = pm;
        break;
    }
    case Equation::PLaplace:
        p.triple = operators::TripleSpec{.grid = grid, .kind = operators::TripleKind::PLaplace, .p = c.p};
        p.op.kind = operators::PLaplaceSpec{c.zero_order};
        break;
    case Equation::Linear:
        p.triple = operators::TripleSpec{.grid = grid, .kind = operators::TripleKind::PLaplace, .p = 2.0};
        p.op.kind = operators::LinearSpec{c.lambda};
        break;
    }
    p.x0 = initial_state(c);
    return p;
}

stepper::SolverConfig make_solver_config(const RunConfig& c) {
    stepper::SolverConfig s;
    s.scheme = c.scheme;
    s.dt = c.dt;
    s.nonlinear_tol = c.nonlinear_tol;
    s.max_newton = c.max_newton;
    return s;
}

stochastic::NoiseSpec make_noise(const RunConfig& c) {
    if (!c.noise || !c.gamma) throw ConfigError("no noise configured");
    const auto& n = *c.noise;
    stochastic::NoiseSpec spec;
    spec.gamma = *c.gamma;
    spec.regularity = n.regularity;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c.n), static_cast<Eigen::Index>(n.modes));
    if (!n.diagonal.empty()) {
        for (std::size_t i = 0; i < n.diagonal.size() && i < c.n; ++i)
            B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = n.diagonal[i];
    } else {
        for (std::size_t i = 0; i < n.matrix.size() && i < c.n; ++i)
            for (std::size_t m = 0; m < n.matrix[i].size() && m < n.modes; ++m)
                B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = n.matrix[i][m];
    }
    spec.B = {B};
    return spec;
}

void set_axis(RunConfig& c, std::string_view axis, double value) {
    if (axis == "beta") {
        c.beta = value;
    } else if (axis == "gamma") {
        if (!c.noise) throw ConfigError("sweep over gamma needs a noise block in the base config");
        c.gamma = value;
    } else if (axis == "dt") {
        c.dt = value;
    } else if (axis == "p") {
        c.p = value;
    } else if (axis == "alpha_frac") {
        c.alpha_frac = value;
    } else {
        throw ConfigError("unknown sweep axis '" + std::string(axis) + "' (expected beta, gamma, dt, p or alpha_frac)");
    }
}

} // namespace fracmono::cli
