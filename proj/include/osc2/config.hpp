#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "osc2/core.hpp"
#include "osc2/dynamics.hpp"
#include "osc2/models.hpp"

namespace osc2 {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON <-> value helpers
// ---------------------------------------------------------------------------

inline json to_json(const Vec& v) { return json(v); }

inline Vec vec_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw InvalidSpec(what + " must be an array of numbers");
    Vec v;
    for (const auto& e : j) {
        if (!e.is_number()) throw InvalidSpec(what + " must contain only numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

inline json to_json(const SquareField& f) {
    json rows = json::array();
    for (int i = 0; i < f.n; ++i) {
        json row = json::array();
        for (int j = 0; j < f.n; ++j) row.push_back(f(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline json to_json(const CubeField& f) {
    json out = json::array();
    for (int i = 0; i < f.n; ++i) {
        json mid = json::array();
        for (int j = 0; j < f.n; ++j) {
            json row = json::array();
            for (int k = 0; k < f.n; ++k) row.push_back(f(i, j, k));
            mid.push_back(row);
        }
        out.push_back(mid);
    }
    return out;
}

inline SquareField square_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw InvalidSpec(what + " must be a non-empty matrix");
    const int n = static_cast<int>(j.size());
    SquareField f(n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
            throw InvalidSpec(what + " must be a square matrix");
        for (int k = 0; k < n; ++k) f(i, k) = j[i][k].get<double>();
    }
    return f;
}

// ---------------------------------------------------------------------------
// Spec parsing (strict: unknown keys are config errors)
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw InvalidSpec("unknown key '" + key + "' in " + where);
    }
}

}  // namespace detail

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::euclidean: return "euclidean";
        case ModelKind::flat_polar: return "flat_polar";
        case ModelKind::sphere: return "sphere";
        case ModelKind::hyperbolic_half_plane: return "hyperbolic_half_plane";
        case ModelKind::randers: return "randers";
        case ModelKind::minkowski_norm: return "minkowski_norm";
        default: return "riemannian_callback";
    }
}

inline ModelKind model_kind_from_string(const std::string& s) {
    for (ModelKind k : {ModelKind::euclidean, ModelKind::flat_polar, ModelKind::sphere,
                        ModelKind::hyperbolic_half_plane, ModelKind::randers,
                        ModelKind::minkowski_norm, ModelKind::riemannian_callback})
        if (s == to_string(k)) return k;
    throw InvalidSpec("unknown model kind '" + s + "'");
}

inline const char* to_string(ForceKind k) {
    switch (k) {
        case ForceKind::zero: return "zero";
        case ForceKind::linear_drag: return "linear_drag";
        case ForceKind::position_spring: return "position_spring";
        default: return "callback";
    }
}

inline ForceKind force_kind_from_string(const std::string& s) {
    for (ForceKind k :
         {ForceKind::zero, ForceKind::linear_drag, ForceKind::position_spring, ForceKind::callback})
        if (s == to_string(k)) return k;
    throw InvalidSpec("unknown force kind '" + s + "'");
}

inline ModelSpec model_spec_from_json(const json& j) {
    detail::reject_unknown(j, {"kind", "n", "radius", "b", "a"}, "model");
    ModelSpec spec;
    if (!j.contains("kind")) throw InvalidSpec("model.kind is required");
    spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (spec.kind == ModelKind::riemannian_callback)
        throw InvalidSpec("riemannian_callback models are not constructible from a config file");
    spec.n = j.value("n", 2);
    spec.radius = j.value("radius", 1.0);
    if (j.contains("b")) spec.randers_b = vec_from_json(j.at("b"), "model.b");
    if (j.contains("a")) spec.randers_a = square_from_json(j.at("a"), "model.a");
    return spec;
}

inline json model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    j["n"] = spec.n;
    if (spec.kind == ModelKind::sphere) j["radius"] = spec.radius;
    if (spec.kind == ModelKind::randers) {
        j["b"] = to_json(spec.randers_b);
        if (spec.randers_a) j["a"] = to_json(*spec.randers_a);
    }
    return j;
}

inline ForceSpec force_spec_from_json(const json& j, int n) {
    detail::reject_unknown(j, {"kind", "k", "K"}, "force");
    ForceSpec spec;
    spec.n = n;
    if (!j.contains("kind")) throw InvalidSpec("force.kind is required");
    spec.kind = force_kind_from_string(j.at("kind").get<std::string>());
    if (spec.kind == ForceKind::callback)
        throw InvalidSpec("callback forces are not constructible from a config file");
    spec.drag_k = j.value("k", 1.0);
    if (j.contains("K")) spec.spring_K = square_from_json(j.at("K"), "force.K");
    return spec;
}

inline json force_spec_to_json(const ForceSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    if (spec.kind == ForceKind::linear_drag) j["k"] = spec.drag_k;
    if (spec.kind == ForceKind::position_spring && spec.spring_K) j["K"] = to_json(*spec.spring_K);
    return j;
}

// ---------------------------------------------------------------------------
// Scenario configuration
// ---------------------------------------------------------------------------

struct ScenarioConfig {
    ModelSpec model;
    ForceSpec force;
    Vec x0, y0, w0, w0dot;
    IntegratorConfig integrator;
    DiffStrategy diff;
    std::string trajectory_csv;  ///< optional output path
    std::string report_json;     ///< optional output path

    FirstOrderState initial_state() const { return {x0, y0}; }
};

inline ScenarioConfig parse_config(const json& j) {
    detail::reject_unknown(j, {"model", "force", "initial", "integrator", "diff", "outputs"},
                           "config");
    if (!j.contains("model")) throw InvalidSpec("config.model is required");
    ScenarioConfig c;
    c.model = model_spec_from_json(j.at("model"));
    c.force = j.contains("force") ? force_spec_from_json(j.at("force"), c.model.n)
                                  : ForceSpec{ForceKind::zero, c.model.n};
    c.force.n = c.model.n;

    if (!j.contains("initial")) throw InvalidSpec("config.initial is required");
    const json& init = j.at("initial");
    detail::reject_unknown(init, {"x", "y", "w", "w_dot"}, "initial");
    if (!init.contains("x") || !init.contains("y"))
        throw InvalidSpec("initial.x and initial.y are required");
    c.x0 = vec_from_json(init.at("x"), "initial.x");
    c.y0 = vec_from_json(init.at("y"), "initial.y");
    c.w0 = init.contains("w") ? vec_from_json(init.at("w"), "initial.w") : Vec(c.model.n, 0.0);
    c.w0dot = init.contains("w_dot") ? vec_from_json(init.at("w_dot"), "initial.w_dot")
                                     : Vec(c.model.n, 0.0);
    const auto nsz = static_cast<std::size_t>(c.model.n);
    if (c.x0.size() != nsz || c.y0.size() != nsz || c.w0.size() != nsz || c.w0dot.size() != nsz)
        throw InvalidSpec("initial blocks must all have dimension n = " + std::to_string(c.model.n));

    if (j.contains("integrator")) {
        const json& ij = j.at("integrator");
        detail::reject_unknown(ij, {"dt", "t_end", "method"}, "integrator");
        c.integrator.dt = ij.value("dt", 1e-3);
        c.integrator.t_end = ij.value("t_end", 1.0);
        if (ij.value("method", std::string("rk4")) != "rk4")
            throw InvalidSpec("integrator.method: only rk4 is supported");
    }
    c.integrator.validate();

    if (j.contains("diff")) {
        const json& dj = j.at("diff");
        detail::reject_unknown(dj, {"mode", "h1", "h2", "h3"}, "diff");
        const std::string mode = dj.value("mode", std::string("analytic"));
        if (mode == "analytic")
            c.diff.mode = DiffMode::analytic_if_available;
        else if (mode == "fd" || mode == "forced_fd")
            c.diff.mode = DiffMode::forced_finite_difference;
        else
            throw InvalidSpec("diff.mode must be 'analytic' or 'fd'");
        c.diff.h1 = dj.value("h1", c.diff.h1);
        c.diff.h2 = dj.value("h2", c.diff.h2);
        c.diff.h3 = dj.value("h3", c.diff.h3);
        c.diff.validate();
    }

    if (j.contains("outputs")) {
        const json& oj = j.at("outputs");
        detail::reject_unknown(oj, {"trajectory_csv", "report_json"}, "outputs");
        c.trajectory_csv = oj.value("trajectory_csv", std::string());
        c.report_json = oj.value("report_json", std::string());
    }
    return c;
}

inline json config_to_json(const ScenarioConfig& c) {
    json j;
    j["model"] = model_spec_to_json(c.model);
    j["force"] = force_spec_to_json(c.force);
    j["initial"]["x"] = to_json(c.x0);
    j["initial"]["y"] = to_json(c.y0);
    j["initial"]["w"] = to_json(c.w0);
    j["initial"]["w_dot"] = to_json(c.w0dot);
    j["integrator"]["dt"] = c.integrator.dt;
    j["integrator"]["t_end"] = c.integrator.t_end;
    j["integrator"]["method"] = "rk4";
    j["diff"]["mode"] = c.diff.mode == DiffMode::forced_finite_difference ? "fd" : "analytic";
    j["diff"]["h1"] = c.diff.h1;
    j["diff"]["h2"] = c.diff.h2;
    j["diff"]["h3"] = c.diff.h3;
    j["outputs"]["trajectory_csv"] = c.trajectory_csv;
    j["outputs"]["report_json"] = c.report_json;
    return j;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpec("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidSpec("config parse error: " + std::string(e.what()));
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// CSV output (full-precision scientific notation, bit-stable)
// ---------------------------------------------------------------------------

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

struct CsvColumn {
    std::string name;
    const std::vector<double>* data = nullptr;
};

/// Writes t plus per-component blocks of the trajectory and any extra scalar
/// columns. Column layout: t, x_1.., y_1.., y2_1.. [, w_1.., w1_1..][, extras].
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 const std::vector<CsvColumn>& extras = {},
                                 bool include_deviation = false) {
    const int n = traj.n();
    os << "t";
    auto block = [&](const char* base) {
        for (int i = 1; i <= n; ++i) os << "," << base << "_" << i;
    };
    block("x");
    block("y");
    block("y2");
    if (include_deviation) {
        block("w");
        block("w1");
    }
    for (const auto& c : extras) os << "," << c.name;
    os << "\n";
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        os << format_g17(traj.t[k]);
        auto row = [&](const std::vector<Vec>& col) {
            for (int i = 0; i < n; ++i) os << "," << format_g17(col[k][i]);
        };
        row(traj.x);
        row(traj.y);
        row(traj.y2);
        if (include_deviation) {
            row(traj.w);
            row(traj.w1);
        }
        for (const auto& c : extras) os << "," << format_g17((*c.data)[k]);
        os << "\n";
    }
}

}  // namespace osc2
