#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tubeh/boundary_operators.hpp"
#include "tubeh/bv_pipeline.hpp"
#include "tubeh/cone_geometry.hpp"
#include "tubeh/grid_field.hpp"
#include "tubeh/grid_io.hpp"
#include "tubeh/kernels.hpp"
#include "tubeh/report.hpp"

namespace tubeh::harness {

inline constexpr int kExitPass = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitStageFailure = 3;

/** @brief Validated experiment descriptor with every default filled in. */
struct Descriptor {
    std::string suite;
    Json cone;  // normalized cone spec
    int n = 1;
    std::size_t N = 512;
    double L = 512.0 / 3.0;
    std::size_t d = 1;
    std::string recipe;
    std::uint64_t data_seed = 1;
    std::string path;
    double p = 2.0;
    std::map<std::string, double> tol;
    double R = 0.0;
    std::string output = "out";
    std::uint64_t seed = 1;
    bool plots = false;

    GridSpec grid() const { return GridSpec::make(n, N, L); }
    double tolerance(const std::string& key, double fallback) const {
        const auto it = tol.find(key);
        return it == tol.end() ? fallback : it->second;
    }
    /// Resolved descriptor; the output directory is left out so reports do not depend on it.
    Json echo() const {
        Json j;
        j["suite"] = suite;
        j["cone"] = cone;
        j["grid"] = {{"n", n}, {"N", N}, {"L", L}, {"d", d}};
        Json data = {{"recipe", recipe}, {"seed", data_seed}};
        if (!path.empty()) data["path"] = path;
        j["data"] = data;
        j["p"] = std::isinf(p) ? Json("inf") : Json(p);
        j["tolerances"] = Json::object();
        for (const auto& [k, v] : tol) j["tolerances"][k] = v;
        j["R"] = R;
        j["seed"] = seed;
        j["plots"] = plots;
        return j;
    }
};

// ---- suite table --------------------------------------------------------------------

struct SuiteDefaults {
    std::size_t N;
    double L;
    std::size_t d;
    std::string recipe;
    double p;
};

struct SuiteInfo {
    std::string id;
    std::string description;
    std::set<std::string> recipes;
    int default_n = 1;
    std::function<SuiteDefaults(int n)> defaults;
};

inline const std::vector<SuiteInfo>& suites() {
    static const std::vector<SuiteInfo> table = {
        {"kernel-checks",
         "Cauchy/Poisson kernel closed forms, quadrature cross-check, positivity, homogeneity and unit mass",
         {"gaussian"},
         1,
         [](int n) { return n == 1 ? SuiteDefaults{16384, 512.0, 1, "gaussian", 2.0}
                                   : SuiteDefaults{n == 2 ? 4096u : 64u, n == 2 ? 256.0 : 16.0, 1, "gaussian", 2.0}; }},
        {"lemma31", "Damped L^p integral of data supported in the dual cone against its closed-form bound",
         {"dual-exp", "spectral", "zero"},
         1,
         [](int n) { return n == 1 ? SuiteDefaults{16384, 32.0, 1, "dual-exp", 2.0}
                                   : SuiteDefaults{n == 2 ? 1024u : 64u, 16.0, 1, "dual-exp", 2.0}; }},
        {"lemma32", "Spectral integral of G equals the Cauchy integral of its transform",
         {"spectral", "zero"},
         1,
         [](int n) { return n == 1 ? SuiteDefaults{512, 512.0 / 3.0, 3, "spectral", 2.0}
                                   : SuiteDefaults{n == 2 ? 256u : 32u, (n == 2 ? 256.0 : 32.0) / 3.0, 2, "spectral", 2.0}; }},
        {"lemma33", "Kernel L^q norms, K(2iy) lower bound and sup bound on random truncated subcones",
         {"gaussian"},
         1,
         [](int n) { return n == 1 ? SuiteDefaults{4096, 256.0, 1, "gaussian", 2.0}
                                   : SuiteDefaults{n == 2 ? 512u : 64u, n == 2 ? 64.0 : 16.0, 1, "gaussian", 2.0}; }},
        {"lemma34", "Poisson extension: L^p contraction, boundary convergence, weak-star limit and growth constants",
         {"gaussian", "tanh", "zero", "file"},
         1,
         [](int n) { return n == 1 ? SuiteDefaults{16384, 32.0, 3, "gaussian", 2.0}
                                   : SuiteDefaults{n == 2 ? 512u : 64u, 16.0, 1, "gaussian", 2.0}; }},
        {"lemma35", "Regularizer bounds and the eps -> 0 limit of the Poisson integral of h / X_eps",
         {"tanh", "gaussian", "zero", "file"},
         1,
         [](int n) { return n == 1 ? SuiteDefaults{4096, 128.0, 1, "tanh", INFINITY}
                                   : SuiteDefaults{n == 2 ? 256u : 32u, 32.0, 1, "tanh", INFINITY}; }},
        {"thm42", "Boundary-value verdict for p = 2: spectral support, identity chain, eps limit, Poisson representation",
         {"spectral", "spectral-two-sided"},
         1,
         [](int n) { return n == 1 ? SuiteDefaults{512, 512.0 / 3.0, 3, "spectral", 2.0}
                                   : SuiteDefaults{n == 2 ? 256u : 32u, (n == 2 ? 256.0 : 32.0) / 3.0, 2, "spectral", 2.0}; }},
        {"thm43", "Boundary-value verdict for 2 < p <= inf on the same pipeline",
         {"spectral", "spectral-two-sided"},
         1,
         [](int n) { return n == 1 ? SuiteDefaults{512, 512.0 / 3.0, 3, "spectral", 4.0}
                                   : SuiteDefaults{n == 2 ? 256u : 32u, (n == 2 ? 256.0 : 32.0) / 3.0, 2, "spectral", 4.0}; }},
        {"thm44", "Hardy sup over a cone assembled from its n-rant pieces, including shared boundary rays",
         {"gaussian", "tanh", "file"},
         2,
         [](int n) { return n == 2 ? SuiteDefaults{256, 16.0, 1, "gaussian", 2.0}
                                   : SuiteDefaults{n == 1 ? 4096u : 32u, n == 1 ? 64.0 : 8.0, 1, "gaussian", 2.0}; }},
        {"fourier-type", "Hausdorff-Young ratios of random compactly supported fields for p in {1, 4/3, 2}",
         {"random-compact"},
         1,
         [](int n) { return n == 1 ? SuiteDefaults{1024, 32.0, 2, "random-compact", 2.0}
                                   : SuiteDefaults{n == 2 ? 128u : 32u, 16.0, 2, "random-compact", 2.0}; }},
    };
    return table;
}

inline const SuiteInfo* find_suite(const std::string& id) {
    for (const auto& s : suites())
        if (s.id == id) return &s;
    return nullptr;
}

inline std::string list_suites() {
    std::ostringstream os;
    for (const auto& s : suites()) os << s.id << std::string(16 - std::min<std::size_t>(15, s.id.size()), ' ') << s.description << "\n";
    return os.str();
}

// ---- parsing --------------------------------------------------------------------------

inline const std::set<std::string>& tolerance_keys() {
    static const std::set<std::string> keys = {
        "agreement", "chain",    "convergence", "cross_validation", "cutoff",   "eps",         "eps_conv",
        "eps_slack", "hardy_slack", "identity", "kernel_abs",       "leakage",  "mass",        "parseval",
        "ratio",     "reconstruct", "residual", "spectral_match",   "y_independence"};
    return keys;
}

namespace detail {

[[noreturn]] inline void invalid(const std::string& field, const std::string& msg) {
    fail(ErrorKind::DescriptorInvalid, field + ": " + msg);
}

inline void only_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) invalid(where, "must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) invalid(where.empty() ? k : where + "." + k, "unknown key");
}

inline double number(const Json& j, const std::string& field) {
    if (!j.is_number()) invalid(field, "must be a number");
    return j.get<double>();
}

inline std::uint64_t count(const Json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() < 0) invalid(field, "must be a non-negative integer");
    return j.get<std::uint64_t>();
}

}  // namespace detail

/// Builds the cone described by a normalized cone spec.
inline Cone make_cone(const Json& spec, int n) {
    const std::string shape = spec.at("shape").get<std::string>();
    if (shape == "halfline") return Cone::half_line(spec.at("sign").get<int>());
    if (shape == "nrant") {
        const auto v = spec.at("v").get<std::vector<int>>();
        return n == 1 ? Cone::half_line(v[0] == 0 ? 1 : -1) : Cone::nrant(v);
    }
    if (shape == "lightcone") return Cone::light_cone(n);
    std::vector<RVec> gens;
    for (const auto& g : spec.at("generators")) gens.push_back(RVec::from(g.get<std::vector<double>>()));
    return Cone::polyhedral(gens);
}

namespace detail {

// {"shape":"nrant","v":[0,1]} with v_j = 1 flipping axis j, {"shape":"halfline","sign":-1},
// {"shape":"lightcone","dim":2}, {"shape":"polyhedral","generators":[[..],..]}
inline Json normalize_cone(const Json& raw, int n) {
    Json spec;
    if (raw.is_null()) {
        spec = {{"shape", "nrant"}, {"v", std::vector<int>(n, 0)}};
    } else {
        only_keys(raw, "cone", {"shape", "v", "sign", "dim", "generators"});
        if (!raw.contains("shape") || !raw["shape"].is_string()) invalid("cone.shape", "required string");
        const std::string shape = raw["shape"].get<std::string>();
        if (raw.contains("dim") && (!raw["dim"].is_number_integer() || raw["dim"].get<int>() != n))
            invalid("cone.dim", "must equal grid.n = " + std::to_string(n));
        if (shape == "halfline") {
            if (n != 1) invalid("cone.shape", "halfline needs grid.n = 1");
            const int sg = raw.contains("sign") && raw["sign"].is_number_integer() ? raw["sign"].get<int>() : 0;
            if (raw.contains("sign") && sg != 1 && sg != -1) invalid("cone.sign", "must be +1 or -1");
            spec = {{"shape", shape}, {"sign", raw.contains("sign") ? sg : 1}};
        } else if (shape == "nrant") {
            std::vector<int> v(n, 0);
            if (raw.contains("v")) {
                if (!raw["v"].is_array() || raw["v"].size() != static_cast<std::size_t>(n))
                    invalid("cone.v", "needs " + std::to_string(n) + " entries");
                for (std::size_t j = 0; j < v.size(); ++j) {
                    const Json& bit = raw["v"][j];
                    if (!bit.is_number_integer() || (bit.get<int>() != 0 && bit.get<int>() != 1))
                        invalid("cone.v", "entries must be 0 or 1");
                    v[j] = bit.get<int>();
                }
            }
            spec = {{"shape", shape}, {"v", v}};
        } else if (shape == "lightcone") {
            if (n < 2) invalid("cone.shape", "lightcone needs grid.n >= 2");
            spec = {{"shape", shape}, {"dim", n}};
        } else if (shape == "polyhedral") {
            if (!raw.contains("generators") || !raw["generators"].is_array()) invalid("cone.generators", "required array");
            for (const auto& g : raw["generators"]) {
                if (!g.is_array() || g.size() != static_cast<std::size_t>(n))
                    invalid("cone.generators", "each generator needs " + std::to_string(n) + " coordinates");
                for (const auto& x : g)
                    if (!x.is_number()) invalid("cone.generators", "coordinates must be numbers");
            }
            spec = {{"shape", shape}, {"generators", raw["generators"]}};
        } else {
            invalid("cone.shape", "unknown shape '" + shape + "'");
        }
    }
    try {
        make_cone(spec, n);
    } catch (const Error& e) {
        invalid("cone", e.what());
    }
    return spec;
}

inline double parse_p(const Json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return INFINITY;
        invalid("p", "must be a number >= 1 or \"inf\"");
    }
    const double p = number(j, "p");
    if (!(p >= 1.0)) invalid("p", "must be >= 1");
    return p;
}

}  // namespace detail

/**
 * @brief Parses and validates a descriptor; every failure is DescriptorInvalid
 * with the offending field named first.
 */
inline Descriptor parse_descriptor(const Json& j) {
    using namespace detail;
    only_keys(j, "", {"suite", "cone", "grid", "data", "p", "tolerances", "R", "output", "seed", "plots"});
    if (!j.contains("suite") || !j["suite"].is_string()) invalid("suite", "required string");
    Descriptor D;
    D.suite = j["suite"].get<std::string>();
    const SuiteInfo* info = find_suite(D.suite);
    if (!info) invalid("suite", "unknown suite '" + D.suite + "' (see --list-suites)");

    Json grid = j.value("grid", Json::object());
    only_keys(grid, "grid", {"n", "N", "L", "d"});
    D.n = grid.contains("n") ? static_cast<int>(count(grid["n"], "grid.n")) : info->default_n;
    if (D.n < 1 || D.n > kMaxDim) invalid("grid.n", "must be 1, 2 or 3");
    const SuiteDefaults def = info->defaults(D.n);
    D.N = grid.contains("N") ? count(grid["N"], "grid.N") : def.N;
    D.L = grid.contains("L") ? number(grid["L"], "grid.L") : def.L;
    D.d = grid.contains("d") ? count(grid["d"], "grid.d") : def.d;
    if (D.d < 1 || D.d > 16) invalid("grid.d", "must lie in 1..16");
    try {
        D.grid();
    } catch (const Error& e) {
        invalid("grid", e.what());
    }

    Json cone = j.value("cone", Json());
    if (cone.is_null() && D.suite == "thm44") cone = {{"shape", "lightcone"}};
    D.cone = normalize_cone(cone, D.n);

    Json data = j.value("data", Json::object());
    only_keys(data, "data", {"recipe", "seed", "path"});
    D.recipe = data.contains("recipe") ? data["recipe"].get<std::string>() : def.recipe;
    if (!info->recipes.count(D.recipe)) {
        std::string allowed;
        for (const auto& r : info->recipes) allowed += (allowed.empty() ? "" : ", ") + r;
        invalid("data.recipe", D.suite + " accepts " + allowed);
    }
    if (data.contains("path")) D.path = data["path"].get<std::string>();
    if (D.recipe == "file" && D.path.empty()) invalid("data.path", "required for the file recipe");

    D.seed = j.contains("seed") ? count(j["seed"], "seed") : 1;
    D.data_seed = data.contains("seed") ? count(data["seed"], "data.seed") : D.seed;
    D.p = j.contains("p") ? parse_p(j["p"]) : def.p;
    if (j.contains("R")) {
        D.R = number(j["R"], "R");
        if (!(D.R >= 0)) invalid("R", "must be >= 0");
    }
    if (j.contains("output")) D.output = j["output"].get<std::string>();
    if (j.contains("plots")) {
        if (!j["plots"].is_boolean()) invalid("plots", "must be true or false");
        D.plots = j["plots"].get<bool>();
    }
    if (j.contains("tolerances")) {
        only_keys(j["tolerances"], "tolerances", tolerance_keys());
        for (const auto& [k, v] : j["tolerances"].items()) {
            const double t = number(v, "tolerances." + k);
            if (!(t > 0)) invalid("tolerances." + k, "must be positive");
            D.tol[k] = t;
        }
    }

    // suite-specific rules
    const Cone C = make_cone(D.cone, D.n);
    if (D.suite == "thm42" && D.p != 2.0) invalid("p", "thm42 requires p=2");
    if (D.suite == "thm43" && !(D.p > 2.0)) invalid("p", "thm43 requires p>2");
    if (D.suite == "lemma31" && std::isinf(D.p)) invalid("p", "lemma31 requires p<inf");
    if (D.suite == "lemma35" && !(D.p >= 2.0)) invalid("p", "lemma35 requires p in [2, inf]");
    const bool needs_orthant = D.suite == "thm42" || D.suite == "thm43" || D.suite == "lemma35" ||
                               D.recipe == "spectral" || D.recipe == "spectral-two-sided";
    if (needs_orthant) {
        try {
            Regularizer::for_cone(C, 1.0);
        } catch (const Error&) {
            invalid("cone", D.suite + " with recipe " + D.recipe + " needs a cone inside a single n-rant");
        }
    }
    if (D.suite == "thm44" && D.n != 2) invalid("grid.n", "thm44 runs on planar cones");
    return D;
}

inline Descriptor load_descriptor(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::DescriptorInvalid, "descriptor: cannot open " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        fail(ErrorKind::DescriptorInvalid, std::string("descriptor: malformed JSON: ") + e.what());
    }
    return parse_descriptor(j);
}

// ---- data recipes ----------------------------------------------------------------------

inline GridField recipe_field(const Descriptor& D, const Cone& C) {
    const GridSpec g = D.grid();
    const double norm = 1.0 / std::sqrt(static_cast<double>(D.d));
    if (D.recipe == "gaussian")
        return GridField::from_function(g, D.d, Side::Physical, [&](const RVec& t, std::span<cplx> v) {
            const double e = std::exp(-kPi * t.dot(t)) * norm;
            for (auto& c : v) c = e;
        });
    if (D.recipe == "tanh")
        return GridField::from_function(g, D.d, Side::Physical, [&](const RVec& t, std::span<cplx> v) {
            double e = norm;
            for (int a = 0; a < t.size(); ++a) e *= 0.5 * (std::tanh(8.0 * (t[a] + 1.0)) - std::tanh(8.0 * (t[a] - 1.0)));
            for (auto& c : v) c = e;
        });
    if (D.recipe == "dual-exp")
        return GridField::from_function(g, D.d, Side::Physical, [&](const RVec& t, std::span<cplx> v) {
            if (dual_contains(C, t)) v[0] = std::exp(-t.norm());
        });
    if (D.recipe == "zero") return GridField(g, D.d);
    if (D.recipe == "file") {
        GridField f = read_binary(D.path);
        if (!(f.spec() == g) || f.value_dim() != D.d)
            fail(ErrorKind::DescriptorInvalid, "data.path: field grid does not match the descriptor grid");
        return f;
    }
    fail(ErrorKind::DescriptorInvalid, "data.recipe: '" + D.recipe + "' has no field form");
}

inline SpectralData recipe_spectrum(const Descriptor& D, const Cone& C) {
    return make_spectral_data(Regularizer::for_cone(C, 1.0).signs, D.d, D.data_seed, 6, D.recipe == "spectral-two-sided");
}

/// Five probes x_k + i s_k c along the central direction c.
inline std::vector<TubePoint> standard_probes(const Cone& C) {
    static const double xs[5] = {0.0, 0.5, -0.7, 1.3, -1.9};
    static const double ss[5] = {1.0, 1.25, 1.5, 1.0, 2.0};
    const int n = C.dim();
    const RVec c = central_direction(C);
    std::vector<TubePoint> out;
    for (int k = 0; k < 5; ++k) {
        RVec x(n);
        for (int a = 0; a < n; ++a) x[a] = xs[k] * (a == 0 ? 1.0 : -0.5);
        out.push_back(TubePoint::make(C, x, c * ss[k]));
    }
    return out;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << (std::abs(v) < 1e-12 ? 0.0 : v);
    return os.str();
}

// ---- suites ---------------------------------------------------------------------------------

inline void run_kernel_checks(const Descriptor& D, ExperimentReport& rep) {
    const Cone C = make_cone(D.cone, D.n);
    const KernelEvaluator E(C);
    const int n = D.n;
    std::mt19937_64 rng(D.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const bool upper_half_plane = C.shape() == ConeShape::HalfLine && C.signs()[0] == 1;
    const bool first_quadrant = C.shape() == ConeShape::NRant && n == 2 && C.signs() == std::vector<int>{1, 1};

    if (upper_half_plane || first_quadrant)
        rep.run_stage("closed_form_values", [&](StageReport& s) {
            const double tol = D.tolerance("kernel_abs", 1e-10);
            if (upper_half_plane) {
                const TubePoint z = TubePoint::make(C, RVec{0.0}, RVec{1.0});
                s.add(check_near("cauchy_at_i", std::abs(E.cauchy(z, RVec{0.0})), 1.0 / kTwoPi, tol));
                s.add(check_near("cauchy_imag_at_i", E.cauchy(z, RVec{0.0}).imag(), 0.0, tol));
                s.add(check_near("k2iy_at_1", E.k2iy(RVec{1.0}), 1.0 / (4.0 * kPi), tol));
                s.add(check_near("poisson_at_i", E.poisson(z, RVec{0.0}), 1.0 / kPi, tol));
                const TubePoint w = TubePoint::make(C, RVec{2.0}, RVec{1.0});
                s.add(check_near("poisson_translated", E.poisson(w, RVec{2.0}), 1.0 / kPi, tol));
            } else {
                const TubePoint z = TubePoint::make(C, RVec{0.0, 0.0}, RVec{1.0, 1.0});
                s.add(check_near("cauchy_at_ii", E.cauchy(z, RVec{0.0, 0.0}).real(), 1.0 / (4.0 * kPi * kPi), tol));
                s.add(check_near("k2iy_at_1_2", E.k2iy(RVec{1.0, 2.0}), 1.0 / (32.0 * kPi * kPi), tol));
                s.add(check_near("poisson_at_ii", E.poisson(z, RVec{0.0, 0.0}), 1.0 / (kPi * kPi), tol));
            }
        });

    if (upper_half_plane)
        rep.run_stage("half_plane_identity", [&](StageReport& s) {
            double worst = 0.0;
            for (int k = 0; k < 1000; ++k) {
                const double x = -5 + 10 * U(rng), y = 0.05 + 5 * U(rng), t = -5 + 10 * U(rng);
                const double classical = y / (kPi * ((x - t) * (x - t) + y * y));
                worst = std::max(worst, std::abs(E.poisson(TubePoint::make(C, RVec{x}, RVec{y}), RVec{t}) - classical));
            }
            s.add(check_le("max_abs_error", worst, D.tolerance("kernel_abs", 1e-10)));
        });

    rep.run_stage("closed_form_vs_quadrature", [&](StageReport& s) {
        const int count = n == 3 ? 20 : 100;
        const auto dirs = sample_projection(C, count, D.seed + 11);
        std::vector<std::pair<RVec, RVec>> probes;
        for (int k = 0; k < count; ++k) {
            RVec u(n);
            for (int a = 0; a < n; ++a) u[a] = -3 + 6 * U(rng);
            RVec y = dirs[k] * (0.5 + 1.5 * U(rng));
            if (C.interior_margin(dirs[k]) < 0.05) y = central_direction(C) * y.norm();
            probes.push_back({u, y});
        }
        s.add(check_lt("max_relative_disagreement", cross_validate(E, probes), D.tolerance("cross_validation", 1e-6)));
    });

    rep.run_stage("positivity_homogeneity_translation", [&](StageReport& s) {
        const auto dirs = sample_projection(C, 200, D.seed + 17);
        double min_q = INFINITY, hom = 0.0, trans = 0.0, scale = 0.0;
        for (int k = 0; k < 200; ++k) {
            RVec u(n), a(n);
            for (int j = 0; j < n; ++j) {
                u[j] = -4 + 8 * U(rng);
                a[j] = -2 + 4 * U(rng);
            }
            const RVec y = dirs[k] * (0.25 + 2 * U(rng));
            if (C.interior_margin(dirs[k]) < 1e-3) continue;
            min_q = std::min(min_q, E.poisson_offset(u, y));
            const cplx k1 = E.closed_form(u, y), k2 = E.closed_form(u * 2.0, y * 2.0);
            hom = std::max(hom, std::abs(k2 - k1 * std::pow(2.0, -n)) / std::abs(k1));
            const TubePoint z = TubePoint::make(C, u, y), za = TubePoint::make(C, u + a, y);
            trans = std::max(trans, std::abs(E.cauchy(za, a) - E.cauchy(z, RVec(n))) / std::abs(k1));
            scale = std::max(scale, std::abs(E.k2iy(y * 2.0) - E.k2iy(y) * std::pow(2.0, -n)) / E.k2iy(y));
        }
        s.add(check_ge("min_poisson", min_q, 0.0));
        s.add(check_le("homogeneity_relative", hom, 1e-12));
        s.add(check_le("translation_relative", trans, 1e-12));
        s.add(check_le("k2iy_scaling_relative", scale, 1e-12));
    });

    rep.run_stage("poisson_mass", [&](StageReport& s) {
        const double tol = D.tolerance("mass", n == 1 ? 2e-3 : 5e-3);
        const TubePoint z = TubePoint::make(C, RVec(n), central_direction(C) * (0.25 * std::sqrt(double(n))));
        const double tail = poisson_tail_estimate(E, z, D.grid());
        s.metrics["tail_estimate"] = tail;
        s.add(check_near("mass", poisson_mass(E, z, D.grid(), tol), 1.0, tol));
    });
}

inline void run_lemma31(const Descriptor& D, ExperimentReport& rep) {
    const Cone C = make_cone(D.cone, D.n);
    const int n = D.n;
    const RVec c = central_direction(C);
    const CompactSubcone Cp = CompactSubcone::from_generators(C, {c});
    const double sigma = 0.05, r = 0.125, delta = Cp.delta();
    const std::vector<double> ys = {0.25, 1.0, 4.0};
    std::set<double> ps = {1.0, 2.0, 4.0};
    ps.insert(D.p);

    GridField g;
    bool ok = rep.run_stage("data", [&](StageReport& s) {
        g = D.recipe == "spectral" ? spectral_synthetic(C, D.grid(), recipe_spectrum(D, C)).spectrum_field()
                                   : recipe_field(D, C);
        g.set_side(Side::Physical);
        s.add(check_le("support_leakage", support_leakage(g, C), 0.0));
    });
    if (!ok) return;
    const GridSpec& grid = g.spec();

    // M of the growth condition, fitted over every y' = mu y used below
    double M = 0.0;
    for (double yn : ys) {
        const double mu = 0.5 * (1.0 + r / yn);
        const RVec yp = c * (mu * yn);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const RVec t = grid.point(i);
            M = std::max(M, g.value_norm(i) * std::exp(-kTwoPi * (yp.dot(t) + sigma * yp.norm())));
        }
    }

    rep.run_stage("damped_integral_bound", [&](StageReport& s) {
        s.metrics["M"] = M;
        s.metrics["sigma"] = sigma;
        s.metrics["r"] = r;
        s.metrics["delta"] = delta;
        Table t{"damped_integral", {"p", "y_norm", "mu", "measured", "bound", "margin"}, {}};
        int violations = 0;
        for (double p : ps)
            for (double yn : ys) {
                const RVec y = c * yn;
                const double mu = 0.5 * (1.0 + r / yn);
                double measured = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i)
                    measured += std::pow(std::exp(-kTwoPi * y.dot(grid.point(i))) * g.value_norm(i), p);
                measured *= grid.cell_volume();
                const double bound = unit_sphere_area(n) * std::pow(M, p) * std::exp(kTwoPi * sigma * mu * p * yn) *
                                     factorial(n - 1) * std::pow(kTwoPi * delta * (1.0 - mu) * p * yn, -n);
                t.rows.push_back({p, yn, mu, measured, bound, bound - measured});
                const CheckRecord rec = check_le("p=" + format_p(p) + ",y=" + fmt(yn), measured, bound);
                if (!rec.pass) ++violations;
                s.add(rec);
            }
        rep.tables.push_back(std::move(t));
        s.metrics["violations"] = violations;
        if (violations) fail(ErrorKind::BoundViolated, std::to_string(violations) + " damped integrals exceed the bound");
    });
}

inline void run_lemma32(const Descriptor& D, ExperimentReport& rep) {
    const Cone C = make_cone(D.cone, D.n);
    const KernelEvaluator E(C);
    rep.run_stage("spectral_vs_cauchy", [&](StageReport& s) {
        const double tol = D.tolerance("identity", 1e-4);
        std::optional<SyntheticAnalytic> f;
        GridField zero;
        if (D.recipe == "spectral") f.emplace(spectral_synthetic(C, D.grid(), recipe_spectrum(D, C)));
        else zero = GridField(D.grid(), D.d);
        Table t{"spectral_vs_cauchy", {"probe", "spectral_norm", "cauchy_norm", "relative_deviation"}, {}};
        double worst = 0.0;
        int k = 0;
        for (const auto& z : standard_probes(C)) {
            const CVec a = f ? (*f)(z) : CVec(D.d);
            const CVec b = cauchy_integral(f ? f->boundary() : zero, z, E);
            CVec diff(a.size());
            for (std::size_t c = 0; c < a.size(); ++c) diff[c] = a[c] - b[c];
            const double scale = value_norm(a);
            const double dev = scale == 0.0 ? value_norm(diff) : value_norm(diff) / scale;
            worst = std::max(worst, dev);
            t.rows.push_back({double(k++), value_norm(a), value_norm(b), dev});
        }
        rep.tables.push_back(std::move(t));
        s.add(check_lt("max_relative_deviation", worst, tol));
        if (!(worst < tol)) fail(ErrorKind::IdentityBroken, "spectral and Cauchy integrals differ by " + fmt(worst));
    });
}

inline void run_lemma33(const Descriptor& D, ExperimentReport& rep) {
    const Cone C = make_cone(D.cone, D.n);
    const KernelEvaluator E(C);
    const int n = D.n;
    rep.run_stage("kernel_bounds", [&](StageReport& s) {
        std::mt19937_64 rng(D.seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const double qs[4] = {2.0, 3.0, 4.0, 6.0};
        Table t{"kernel_bounds",
                {"config", "q", "delta", "y_norm", "lq_cauchy", "lq_cauchy_bound", "k2iy", "k2iy_lower", "sup_cauchy",
                 "sup_cauchy_bound", "lq_poisson", "lq_poisson_bound"},
                {}};
        int violations[4] = {0, 0, 0, 0};
        double tightest = INFINITY;
        for (int k = 0; k < 50; ++k) {
            const double theta = 0.2 + 0.6 * U(rng), r = 0.25 + 0.75 * U(rng);
            const CompactSubcone Cp = n == 1 ? CompactSubcone::from_generators(C, {central_direction(C)}, r)
                                             : CompactSubcone::angular_shrink(C, theta, r);
            const RVec u = Cp.sample_directions(1, D.seed * 1000 + k).front();
            const RVec y = u * (r * (1.2 + 3.0 * U(rng)));
            RVec x(n);
            for (int a = 0; a < n; ++a) x[a] = -2 + 4 * U(rng);
            const double q = qs[k % 4];
            const auto b = kernel_bounds_report(E, Cp, TubePoint::make(C, x, y), q, D.grid());
            t.rows.push_back({double(k), q, b.delta, y.norm(), b.lq_norm_cauchy, b.lq_bound_cauchy, b.k2iy,
                              b.k2iy_lower_bound, b.sup_cauchy, b.sup_bound_cauchy, b.lq_norm_poisson,
                              b.lq_bound_poisson});
            violations[0] += b.lq_norm_cauchy > b.lq_bound_cauchy;
            violations[1] += b.k2iy < b.k2iy_lower_bound * (1.0 - kBoundRoundoff);
            violations[2] += b.sup_cauchy > b.sup_bound_cauchy;
            violations[3] += b.lq_norm_poisson > b.lq_bound_poisson;
            tightest = std::min({tightest, b.lq_bound_cauchy / b.lq_norm_cauchy, b.k2iy / b.k2iy_lower_bound,
                                 b.sup_bound_cauchy / b.sup_cauchy, b.lq_bound_poisson / b.lq_norm_poisson});
        }
        rep.tables.push_back(std::move(t));
        s.metrics["tightest_ratio"] = tightest;
        s.add(check_le("cauchy_lq_violations", violations[0], 0));
        s.add(check_le("k2iy_lower_violations", violations[1], 0));
        s.add(check_le("cauchy_sup_violations", violations[2], 0));
        s.add(check_le("poisson_lq_violations", violations[3], 0));
        if (violations[0] + violations[1] + violations[2] + violations[3])
            fail(ErrorKind::BoundViolated, "kernel bound violated");
    });
}

inline std::vector<RVec> dyadic_ys(const RVec& c, int k_first, int k_last) {
    std::vector<RVec> out;
    for (int k = k_first; k <= k_last; ++k) out.push_back(c * std::ldexp(1.0, -k));
    return out;
}

inline void run_lemma34(const Descriptor& D, ExperimentReport& rep) {
    const Cone C = make_cone(D.cone, D.n);
    const KernelEvaluator E(C);
    const int n = D.n;
    const RVec c = central_direction(C);
    GridField h;
    if (!rep.run_stage("data", [&](StageReport& s) {
            h = recipe_field(D, C);
            s.metrics["l2_norm"] = lp_norm(h, 2.0);
        }))
        return;

    rep.run_stage("contraction", [&](StageReport& s) {
        const double slack = D.tolerance("hardy_slack", 1e-3);
        Table t{"contraction", {"p", "y_norm", "slice_norm", "boundary_norm"}, {}};
        const auto ys = dyadic_ys(c, -1, 6);
        for (double p : {1.0, 2.0, 4.0, double(INFINITY)}) {
            const double hp = lp_norm(h, p);
            const HardyProfile prof = hardy_profile(h, p, E, ys);
            for (const auto& sl : prof.slices) t.rows.push_back({p, sl.y.norm(), sl.norm, hp});
            s.add(check_le("sup_slice_p=" + format_p(p), prof.sup, hp * (1.0 + slack)));
        }
        rep.tables.push_back(std::move(t));
    });

    const double pc = std::isinf(D.p) ? 2.0 : D.p;
    rep.run_stage("convergence", [&](StageReport& s) {
        const ConvergenceTable ct = boundary_convergence(h, pc, E, dyadic_ys(c, 0, 8));
        Table t{"convergence", {"y_norm", "error"}, {}};
        for (const auto& r : ct.rows) t.rows.push_back({r.y_norm, r.error});
        rep.tables.push_back(std::move(t));
        s.metrics["p"] = pc;
        s.metrics["fitted_order"] = ct.fitted_order;
        s.add(check_true("decreasing_with_slack", ct.decreasing(D.tolerance("eps_slack", 0.05))));
        s.add(check_lt("final_error", ct.final_error(), D.tolerance("convergence", 1e-3)));
    });

    rep.run_stage("weak_star", [&](StageReport& s) {
        const ConvergenceTable ct = weak_star_convergence(h, E, dyadic_ys(c, 0, 8));
        Table t{"weak_star", {"y_norm", "max_pairing_error"}, {}};
        for (const auto& r : ct.rows) t.rows.push_back({r.y_norm, r.error});
        rep.tables.push_back(std::move(t));
        s.metrics["fitted_order"] = ct.fitted_order;
        s.add(check_true("decreasing_with_slack", ct.decreasing(D.tolerance("eps_slack", 0.05))));
    });

    rep.run_stage("growth_p2", [&](StageReport& s) {
        const CompactSubcone Cp = CompactSubcone::from_generators(C, {c});
        std::vector<TubePoint> zs;
        for (int k = -4; k <= 2; ++k) zs.push_back(TubePoint::make(C, RVec(n, 0.3 * k), c * std::ldexp(1.0, k)));
        const GrowthReport g = growth_bound_check(h, 2.0, E, Cp, zs);
        s.add(check_le("scaled_sup", g.measured, g.bound));
    });

    rep.run_stage("growth_p4", [&](StageReport& s) {
        const double r = 0.125;
        const CompactSubcone Cp = CompactSubcone::from_generators(C, {c}, r);
        std::vector<TubePoint> zs;
        for (int k = -2; k <= 2; ++k) zs.push_back(TubePoint::make(C, RVec(n, 0.3 * k), c * std::ldexp(1.0, k)));
        const GrowthReport g = growth_bound_check(h, 4.0, E, Cp, zs);
        s.metrics["r"] = r;
        s.add(check_le("sup_ratio", g.measured, g.bound));
    });
}

inline std::vector<double> eps_ladder(double first = 0.125, int steps = 10) {
    std::vector<double> out;
    for (int k = 0; k < steps; ++k) out.push_back(first * std::ldexp(1.0, -k));
    return out;
}

inline void run_lemma35(const Descriptor& D, ExperimentReport& rep) {
    const Cone C = make_cone(D.cone, D.n);
    const KernelEvaluator E(C);
    const int n = D.n;
    const Regularizer reg = Regularizer::for_cone(C, D.tolerance("eps", 0.125), D.R);
    const auto ladder = eps_ladder(reg.eps);
    GridField h;
    if (!rep.run_stage("data", [&](StageReport& s) {
            h = recipe_field(D, C);
            s.metrics["sup_norm"] = lp_norm(h, INFINITY);
        }))
        return;

    rep.run_stage("regularizer_bounds", [&](StageReport& s) {
        double worst = 0.0;
        for (double e : ladder)
            for (std::size_t i = 0; i < h.size(); ++i)
                worst = std::max(worst, std::abs(reg.with_eps(e).inverse(h.spec().point(i), RVec(n))));
        s.add(check_le("max_abs_inverse", worst, 1.0, 1e-15));
        RVec corner(n);
        for (int j = 0; j < n; ++j) corner[j] = reg.signs[j] / reg.eps;
        const double expected = std::pow(2.0, -n * reg.exponent() / 2.0);
        s.add(check_near("inverse_at_unit_corner", std::abs(reg.inverse(corner, RVec(n))), expected, 1e-12 * expected));
    });

    const TubePoint z0 = TubePoint::make(C, RVec(n), central_direction(C));
    const auto patch = patch_points(C, z0, 0.25);
    auto emit = [&](const std::string& name, const EpsTable& et, StageReport& s) {
        Table t{name, {"eps", "error"}, {}};
        for (const auto& r : et.rows) t.rows.push_back({r.eps, r.error});
        rep.tables.push_back(std::move(t));
        s.add(check_true("decreasing_with_slack", et.decreasing(D.tolerance("eps_slack", 0.05))));
        s.add(check_lt("final_error", et.final_error(), D.tolerance("eps_conv", 1e-3)));
    };
    rep.run_stage("eps_limit_patch", [&](StageReport& s) {
        emit("eps_limit_patch", eps_limit_check(h, ladder, INFINITY, reg, &E, patch), s);
    });
    if (!std::isinf(D.p))
        rep.run_stage("eps_limit_norm", [&](StageReport& s) {
            emit("eps_limit_norm", eps_limit_check(h, ladder, D.p, reg), s);
        });
}

inline VerdictOptions verdict_options(const Descriptor& D, const Cone& C) {
    const RVec c = central_direction(C);
    VerdictOptions o;
    o.p = D.p;
    o.eps = D.tolerance("eps", 0.125);
    o.R = D.R;
    o.y_primary = c;
    o.y_secondary = c * 2.0;
    o.probes = standard_probes(C);
    o.eps_seq = eps_ladder(o.eps);
    o.patch = patch_points(C, TubePoint::make(C, RVec(D.n), c), 0.25);
    o.hardy_ys = {c * 0.25, c * 0.5, c, c * 2.0};
    o.leakage_tol = D.tolerance("leakage", o.leakage_tol);
    o.y_independence_tol = D.tolerance("y_independence", o.y_independence_tol);
    o.spectral_match_tol = D.tolerance("spectral_match", o.spectral_match_tol);
    o.reconstruct_tol = D.tolerance("reconstruct", o.reconstruct_tol);
    o.cutoff_tol = D.tolerance("cutoff", o.cutoff_tol);
    o.chain_tol = D.tolerance("chain", o.chain_tol);
    o.eps_conv = D.tolerance("eps_conv", o.eps_conv);
    o.eps_slack = D.tolerance("eps_slack", o.eps_slack);
    o.residual_tol = D.tolerance("residual", o.residual_tol);
    o.hardy_slack = D.tolerance("hardy_slack", o.hardy_slack);
    return o;
}

inline void run_boundary_verdict(const Descriptor& D, ExperimentReport& rep) {
    const Cone C = make_cone(D.cone, D.n);
    const KernelEvaluator E(C);
    const SyntheticAnalytic f = spectral_synthetic(C, D.grid(), recipe_spectrum(D, C));
    ExperimentReport v = boundary_value_verdict(f, E, verdict_options(D, C));
    for (auto& s : v.stages) rep.stages.push_back(std::move(s));
    for (auto& t : v.tables) rep.tables.push_back(std::move(t));
    if (v.failed_stage && !rep.failed_stage) rep.failed_stage = v.failed_stage;
}

inline void run_decomposition(const Descriptor& D, ExperimentReport& rep) {
    const Cone C = make_cone(D.cone, D.n);
    const KernelEvaluator E(C);
    const double eps = D.tolerance("agreement", 1e-6);
    GridField h;
    HardyProfile prof;
    bool ok = rep.run_stage("decomposed_sup", [&](StageReport& s) {
        h = recipe_field(D, C);
        prof = decomposed_hardy_bound(h, D.p, E, {0.25, 0.5, 1.0, 2.0}, 4, 0.5, D.seed);
        s.metrics["pieces"] = prof.subcone_sups.size();
        Json sups = Json::array();
        for (double a : prof.subcone_sups) sups.push_back(a);
        s.metrics["piece_sups"] = sups;
        s.metrics["A"] = prof.sup;
        double mx = 0.0;
        for (double a : prof.subcone_sups) mx = std::max(mx, a);
        s.add(check_near("A_equals_max_piece_sup", prof.sup, mx, 0.0));
        s.add(check_le("A_within_boundary_norm", prof.sup, lp_norm(h, D.p) * (1.0 + D.tolerance("hardy_slack", 1e-3))));
        Table t{"decomposition", {"piece", "y0", "y1", "slice_norm"}, {}};
        const std::size_t per = prof.slices.size() / std::max<std::size_t>(1, prof.subcone_sups.size());
        for (std::size_t i = 0; i < prof.slices.size(); ++i)
            t.rows.push_back({double(i / std::max<std::size_t>(1, per)), prof.slices[i].y[0], prof.slices[i].y[1],
                              prof.slices[i].norm});
        for (const auto& b : prof.boundary_slices) t.rows.push_back({-1.0, b.y[0], b.y[1], b.norm});
        rep.tables.push_back(std::move(t));
    });
    if (!ok) return;
    rep.run_stage("boundary_rays", [&](StageReport& s) {
        s.metrics["count"] = prof.boundary_slices.size();
        for (const auto& b : prof.boundary_slices)
            s.add(check_le("slice_y=(" + fmt(b.y[0]) + "," + fmt(b.y[1]) + ")", b.norm, prof.sup + eps));
    });
    rep.run_stage("direct_agreement", [&](StageReport& s) {
        std::vector<RVec> ys;
        for (const auto& sl : prof.slices) ys.push_back(sl.y);
        for (const auto& sl : prof.boundary_slices) ys.push_back(sl.y);
        const HardyProfile direct = hardy_profile(h, D.p, E, ys);
        s.add(check_near("direct_sup_minus_A", direct.sup - prof.sup, 0.0, eps));
    });
}

inline void run_fourier_type(const Descriptor& D, ExperimentReport& rep) {
    rep.run_stage("hausdorff_young", [&](StageReport& s) {
        const GridSpec g = D.grid();
        const double tol = D.tolerance("ratio", 1e-6), ptol = D.tolerance("parseval", 1e-8);
        std::mt19937_64 rng(D.data_seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::normal_distribution<double> Z(0.0, 1.0);
        Table t{"hausdorff_young", {"field", "p", "lhs", "rhs", "ratio"}, {}};
        double worst = 0.0, parseval = 0.0;
        const double half = 0.25 * g.extent;
        for (int k = 0; k < 20; ++k) {
            // a few random bumps inside [-L/4, L/4]^n, cut off exactly outside
            const int bumps = 1 + static_cast<int>(U(rng) * 4);
            std::vector<RVec> centres;
            std::vector<double> widths;
            std::vector<std::vector<cplx>> amps;
            for (int b = 0; b < bumps; ++b) {
                RVec c(D.n);
                for (int a = 0; a < D.n; ++a) c[a] = (-0.5 + U(rng)) * half;
                centres.push_back(c);
                widths.push_back(0.2 + 0.3 * half * U(rng));
                std::vector<cplx> amp;
                for (std::size_t ch = 0; ch < D.d; ++ch) amp.emplace_back(Z(rng), Z(rng));
                amps.push_back(amp);
            }
            const GridField f = GridField::from_function(g, D.d, Side::Physical, [&](const RVec& t, std::span<cplx> v) {
                for (int a = 0; a < t.size(); ++a)
                    if (std::abs(t[a]) > half) return;
                for (int b = 0; b < bumps; ++b) {
                    const RVec dlt = t - centres[b];
                    const double w = std::exp(-kPi * dlt.dot(dlt) / (widths[b] * widths[b]));
                    for (std::size_t ch = 0; ch < D.d; ++ch) v[ch] += amps[b][ch] * w;
                }
            });
            for (double p : {1.0, 4.0 / 3.0, 2.0}) {
                const HausdorffYoung hy = hausdorff_young_check(f, p);
                t.rows.push_back({double(k), p, hy.lhs, hy.rhs, hy.ratio});
                worst = std::max(worst, hy.ratio);
                if (p == 2.0) parseval = std::max(parseval, std::abs(hy.ratio - 1.0));
            }
        }
        rep.tables.push_back(std::move(t));
        s.add(check_le("max_ratio", worst, 1.0 + tol));
        s.add(check_le("parseval_deviation", parseval, ptol));
    });
}

inline void run_suite(const Descriptor& D, ExperimentReport& rep) {
    const std::string& s = D.suite;
    if (s == "kernel-checks") run_kernel_checks(D, rep);
    else if (s == "lemma31") run_lemma31(D, rep);
    else if (s == "lemma32") run_lemma32(D, rep);
    else if (s == "lemma33") run_lemma33(D, rep);
    else if (s == "lemma34") run_lemma34(D, rep);
    else if (s == "lemma35") run_lemma35(D, rep);
    else if (s == "thm42" || s == "thm43") run_boundary_verdict(D, rep);
    else if (s == "thm44") run_decomposition(D, rep);
    else if (s == "fourier-type") run_fourier_type(D, rep);
}

// ---- output ----------------------------------------------------------------------------

/// Line chart of every column against the first; log axis when all values are positive.
inline std::string svg_chart(const Table& t) {
    const double W = 640, H = 400, pad = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    bool positive = true;
    for (const auto& r : t.rows)
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (!std::isfinite(r[c])) continue;
            if (c == 0) {
                x0 = std::min(x0, r[c]);
                x1 = std::max(x1, r[c]);
            } else {
                positive = positive && r[c] > 0;
            }
        }
    auto ty = [&](double v) { return positive ? std::log10(v) : v; };
    for (const auto& r : t.rows)
        for (std::size_t c = 1; c < r.size(); ++c)
            if (std::isfinite(r[c]) && (!positive || r[c] > 0)) {
                y0 = std::min(y0, ty(r[c]));
                y1 = std::max(y1, ty(r[c]));
            }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
       << "<text x=\"" << pad << "\" y=\"20\" font-family=\"monospace\">" << t.name << (positive ? " (log10)" : "")
       << "</text>\n<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\""
       << H - 2 * pad << "\" fill=\"none\" stroke=\"black\"/>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[(c - 1) % 6] << "\" points=\"";
        for (const auto& r : t.rows) {
            if (c >= r.size() || !std::isfinite(r[c]) || (positive && r[c] <= 0)) continue;
            os << pad + (r[0] - x0) / (x1 - x0) * (W - 2 * pad) << ","
               << H - pad - (ty(r[c]) - y0) / (y1 - y0) * (H - 2 * pad) << " ";
        }
        os << "\"/>\n<text x=\"" << W - pad + 4 << "\" y=\"" << pad + 14 * c << "\" font-size=\"10\" fill=\""
           << colors[(c - 1) % 6] << "\">" << t.columns[c] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorKind::IoError, "cannot write " + p.string());
    out << text;
}

inline void write_outputs(const ExperimentReport& rep, const Descriptor& D, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
    write_text(dir / "report.json", rep.to_json().dump(2) + "\n");
    for (const auto& t : rep.tables) {
        write_text(dir / (t.name + ".csv"), t.csv());
        if (D.plots) write_text(dir / (t.name + ".svg"), svg_chart(t));
    }
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Runs a validated descriptor and writes its outputs; returns the process exit code.
inline int execute(const Descriptor& D, const std::filesystem::path& out_dir, ExperimentReport* out = nullptr) {
    ExperimentReport rep;
    rep.suite = D.suite;
    rep.descriptor = D.echo();
    rep.timestamp = utc_timestamp();
    const auto t0 = std::chrono::steady_clock::now();
    run_suite(D, rep);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!rep.failed_stage) rep.failed_stage = rep.first_failure();
    write_outputs(rep, D, out_dir);
    const int code = rep.pass() ? kExitPass : kExitStageFailure;
    if (out) *out = std::move(rep);
    return code;
}

}  // namespace tubeh::harness
