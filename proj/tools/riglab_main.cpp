#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "riglab/analysis.hpp"
#include "riglab/certify.hpp"
#include "riglab/dynamics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace riglab;

namespace {

// ---- logging (timestamps live only here, never in reports) ----------------

struct Logger {
    int level = -1;  // -1 = off; 0 debug, 1 info, 2 warn, 3 error
    std::ofstream file;

    void open(const fs::path& out_dir) {
        const char* env = std::getenv("RIGLAB_LOG");
        if (!env) return;
        std::string s(env);
        if (s == "debug") level = 0;
        else if (s == "info") level = 1;
        else if (s == "warn") level = 2;
        else if (s == "error") level = 3;
        else return;
        fs::create_directories(out_dir);
        file.open(out_dir / "run.log", std::ios::app);
    }

    void log(int lvl, const std::string& msg) {
        if (level < 0 || lvl < level || !file) return;
        std::time_t t = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
        static const char* names[] = {"debug", "info", "warn", "error"};
        file << buf << " [" << names[lvl] << "] " << msg << "\n" << std::flush;
    }
};

Logger logger;

// ---- file helpers ---------------------------------------------------------

void atomic_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << content;
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { atomic_write(path, j.dump(2) + "\n"); }

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---- config ---------------------------------------------------------------

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config file not found: " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
}

// Dotted-path lookup with default.
template <typename T>
T cfg(const json& c, const std::string& dotted, T fallback) {
    const json* cur = &c;
    std::stringstream ss(dotted);
    std::string key;
    while (std::getline(ss, key, '.')) {
        if (!cur->is_object() || !cur->contains(key)) return fallback;
        cur = &(*cur)[key];
    }
    try {
        return cur->get<T>();
    } catch (const json::exception&) {
        throw std::runtime_error("config key '" + dotted + "' has the wrong type");
    }
}

void set_dotted(json& c, const std::string& dotted, const json& value) {
    json* cur = &c;
    std::stringstream ss(dotted);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(ss, key, '.')) keys.push_back(key);
    for (size_t i = 0; i + 1 < keys.size(); ++i) cur = &(*cur)[keys[i]];
    (*cur)[keys.back()] = value;
}

std::vector<AffineMap> load_generators(const json& c) {
    if (c.contains("generators")) {
        json g = c["generators"];
        if (g.is_string()) {
            std::ifstream is(g.get<std::string>());
            if (!is) throw std::runtime_error("generators file not found: " + g.get<std::string>());
            g = json::parse(is);
        }
        if (g.is_object() && g.contains("generators")) g = g["generators"];
        return generators_from_json(g);
    }
    // default playground: the standard hyperbolic automorphism and a shear
    static const char* kDefault = R"([
        {"dim": 2, "entries": [["2", "1"], ["1", "1"]]},
        {"dim": 2, "entries": [["1", "1"], ["0", "1"]]}
    ])";
    return generators_from_json(json::parse(kDefault));
}

std::vector<TrigMode> modes_from_json(const json& arr) {
    std::vector<TrigMode> modes;
    for (const auto& m : arr) {
        TrigMode tm;
        auto freq = m.at("freq").get<std::vector<int>>();
        auto a = m.value("a", std::vector<double>(freq.size(), 0.0));
        auto b = m.value("b", std::vector<double>(freq.size(), 0.0));
        tm.freq = Eigen::Map<Eigen::VectorXi>(freq.data(), long(freq.size()));
        tm.a = Eigen::Map<Eigen::VectorXd>(a.data(), long(a.size()));
        tm.b = Eigen::Map<Eigen::VectorXd>(b.data(), long(b.size()));
        modes.push_back(tm);
    }
    return modes;
}

json modes_to_json(const std::vector<TrigMode>& modes) {
    json arr = json::array();
    for (const auto& m : modes) {
        json jm;
        jm["freq"] = std::vector<int>(m.freq.data(), m.freq.data() + m.freq.size());
        jm["a"] = std::vector<double>(m.a.data(), m.a.data() + m.a.size());
        jm["b"] = std::vector<double>(m.b.data(), m.b.data() + m.b.size());
        arr.push_back(jm);
    }
    return arr;
}

json vec_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

// ---- shared pipeline pieces ----------------------------------------------

struct Context {
    json config;
    fs::path out = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    int max_precision = 256;
};

AffineMap resolve_word(const Context& ctx, const std::vector<AffineMap>& gens,
                       const std::string& key, const std::string& fallback) {
    std::string text = cfg<std::string>(ctx.config, key, fallback);
    return word_eval(gens, parse_word(text, int(gens.size())));
}

struct SolveResult {
    ConjugacyField field;
    fs::path path;
    std::string cache_key;
    bool from_cache = false;
};

SolveResult solve_field(const Context& ctx) {
    auto gens = load_generators(ctx.config);
    AffineMap f0 = resolve_word(ctx, gens, "pair.f", "g0");
    double eps = cfg<double>(ctx.config, "solve.epsilon", 0.01);
    int grid = cfg<int>(ctx.config, "solve.grid", 64);
    double tol = cfg<double>(ctx.config, "solve.tol", 1e-10);
    long max_iter = cfg<long>(ctx.config, "solve.max_iter", 5000);
    if (tol <= 0 || grid <= 1) throw std::runtime_error("solve.tol and solve.grid must be positive");
    json jmodes = ctx.config.contains("solve") && ctx.config["solve"].contains("modes")
                      ? ctx.config["solve"]["modes"]
                      : json::array();
    std::vector<TrigMode> modes = modes_from_json(jmodes);

    json keydoc = {{"f0", affine_to_json(f0)},
                   {"modes", modes_to_json(modes)},
                   {"epsilon", eps},
                   {"grid", grid},
                   {"tol", tol}};
    SolveResult r;
    r.cache_key = hex64(fnv1a64(keydoc.dump()));
    r.path = ctx.out / ("field_" + r.cache_key + ".rglb");

    bool no_cache = cfg<bool>(ctx.config, "solve.no_cache", false);
    if (!no_cache && fs::exists(r.path)) {
        logger.log(1, "cache hit " + r.path.string());
        r.field = read_field(r.path.string());
        fs::path side = r.path;
        side += ".json";
        if (fs::exists(side)) {  // binary carries only the displacement data
            std::ifstream is(side);
            json meta = json::parse(is);
            r.field.converged = meta.value("converged", false);
            r.field.iterations = meta.value("iterations", 0);
            r.field.residual = meta.value("residual_max", 0.0);
            r.field.residual_mean = meta.value("residual_mean", 0.0);
            r.field.residual_p99 = meta.value("residual_p99", 0.0);
            r.field.seed = meta.value("seed", std::uint64_t(0));
        }
        r.from_cache = true;
        return r;
    }
    PerturbedMap f(f0, eps, modes);
    r.field = solve_conjugacy(f0, f, grid, tol, max_iter, ctx.seed);
    fs::create_directories(ctx.out);
    fs::path tmp = r.path;
    tmp += ".tmp";
    write_field(r.field, tmp.string());
    fs::rename(tmp, r.path);
    json sidecar = {{"dim", r.field.dim},
                    {"grid", r.field.grid},
                    {"epsilon", r.field.epsilon},
                    {"iterations", r.field.iterations},
                    {"converged", r.field.converged},
                    {"residual_max", r.field.residual},
                    {"residual_mean", r.field.residual_mean},
                    {"residual_p99", r.field.residual_p99},
                    {"seed", r.field.seed},
                    {"sup_u", r.field.sup_u()},
                    {"cache_key", r.cache_key}};
    write_json(r.path.string() + ".json", sidecar);
    return r;
}

LeafSegment base_leaf(const Context& ctx, const AffineMap& f0) {
    PerturbedMap flat(f0, 0.0, {});
    DirectionField field = stable_direction_field(flat, 32, 30);
    std::vector<double> pt =
        cfg<std::vector<double>>(ctx.config, "leaf.point", std::vector<double>(f0.dim(), 0.3));
    Eigen::VectorXd x0 = Eigen::Map<Eigen::VectorXd>(pt.data(), long(pt.size()));
    double length = cfg<double>(ctx.config, "leaf.length", 0.2);
    double step = cfg<double>(ctx.config, "leaf.step", 0.01);
    return leaf_segment(flat, field, x0, length, step);
}

// ---- subcommands ----------------------------------------------------------

int run_check_pair(const Context& ctx) {
    auto gens = load_generators(ctx.config);
    AffineMap f = resolve_word(ctx, gens, "pair.f", "g0");
    AffineMap g = resolve_word(ctx, gens, "pair.g", "g1");
    GoodPairCertificate cert = check_good_pair(f, g);
    write_json(ctx.out / "certificate.json", certificate_to_json(cert));
    logger.log(1, std::string("check-pair overall=") + to_string(cert.overall));
    return cert.overall == Ternary::Undecided ? 2 : 0;
}

int run_search_pairs(const Context& ctx) {
    auto gens = load_generators(ctx.config);
    int max_len = cfg<int>(ctx.config, "search.max_len", 3);
    auto found = search_good_pair(gens, max_len);
    json out;
    out["found"] = bool(found);
    out["max_len"] = max_len;
    if (found) {
        out["f_word"] = found->f_word.to_string();
        out["g_word"] = found->g_word.to_string();
        out["certificate"] = certificate_to_json(found->certificate);
    }
    write_json(ctx.out / "search.json", out);
    return found ? 0 : 2;
}

int run_essential_set(const Context& ctx) {
    auto gens = load_generators(ctx.config);
    AffineMap f = resolve_word(ctx, gens, "pair.f", "g0");
    SpectralSplit split = modulus_clusters(f.derivative());
    std::vector<ZMat> dgs;
    for (const auto& g : gens) dgs.push_back(g.derivative());
    EssentialSetReport rep = is_essential(split.projections[0], dgs);
    json out = {{"essential", rep.essential}, {"eta", rep.eta}, {"set_size", dgs.size()}};
    if (rep.witness_kernel_vector) out["witness_kernel_vector"] = vec_to_json(*rep.witness_kernel_vector);
    write_json(ctx.out / "essential.json", out);
    return 0;
}

int run_weak_hyperbolic(const Context& ctx) {
    auto gens = load_generators(ctx.config);
    std::vector<ZMat> dfs;
    for (const auto& g : gens) dfs.push_back(g.derivative());
    Ternary verdict = is_weakly_hyperbolic(dfs);
    write_json(ctx.out / "weak_hyperbolic.json", json{{"verdict", to_string(verdict)}});
    return verdict == Ternary::Undecided ? 2 : 0;
}

int run_solve_conjugacy(const Context& ctx) {
    SolveResult r = solve_field(ctx);
    logger.log(1, "field " + r.path.string() + (r.from_cache ? " (cached)" : " solved"));
    return r.field.converged ? 0 : 2;
}

int run_analyze_limits(const Context& ctx) {
    auto gens = load_generators(ctx.config);
    AffineMap f = resolve_word(ctx, gens, "pair.f", "g0");
    AffineMap g = resolve_word(ctx, gens, "pair.g", "g1");
    long n_max = cfg<long>(ctx.config, "limits.n_max", 25);
    LimitMapReport rep = algebraic_limit(f, g, n_max);
    json out;
    out["A"] = json::array();
    for (int i = 0; i < rep.A.rows(); ++i)
        for (int j = 0; j < rep.A.cols(); ++j) out["A"].push_back(rep.A(i, j));
    out["A_rows"] = rep.A.rows();
    out["subsequence"] = rep.subsequence;
    out["fitted_rate"] = rep.fitted_rate;
    out["lambda_ratio"] = rep.lambda_ratio;
    out["log_lambda_ratio"] = std::log(rep.lambda_ratio);
    json blocks = json::array();
    for (const auto& c : rep.min_block_of_A) blocks.push_back({{"lo", c.lo}, {"hi", c.hi}});
    out["min_block_of_A"] = blocks;
    write_json(ctx.out / "limits.json", out);
    atomic_write(ctx.out / "decay.csv", decay_csv(rep));
    return 0;
}

int run_holder(const Context& ctx) {
    SolveResult r = solve_field(ctx);
    int n_pairs = cfg<int>(ctx.config, "holder.pairs", 4000);
    double smin = cfg<double>(ctx.config, "holder.scale_min", -1.0);
    double smax = cfg<double>(ctx.config, "holder.scale_max", -1.0);
    auto pairs = holder_sample_pairs(r.field, n_pairs, smin, smax, ctx.seed);
    HolderReport rep = holder_regress(pairs);
    json out = {{"theta_est", rep.theta_est},   {"ci_low", rep.ci_low},
                {"ci_high", rep.ci_high},       {"theta_inverse", rep.theta_inverse},
                {"n_pairs", rep.n_pairs},       {"cache_key", r.cache_key}};
    write_json(ctx.out / "holder.json", out);
    atomic_write(ctx.out / "holder.csv", holder_csv(pairs));
    return 0;
}

int run_leaf_invariance(const Context& ctx) {
    auto gens = load_generators(ctx.config);
    AffineMap f0 = resolve_word(ctx, gens, "pair.f", "g0");
    SolveResult r = solve_field(ctx);
    double eps = cfg<double>(ctx.config, "solve.epsilon", 0.01);
    json jmodes = ctx.config.contains("solve") && ctx.config["solve"].contains("modes")
                      ? ctx.config["solve"]["modes"]
                      : json::array();
    PerturbedMap f(f0, eps, modes_from_json(jmodes));
    LeafSegment segment = base_leaf(ctx, f0);
    double dev = leaf_invariance(r.field, f0, f, segment);
    write_json(ctx.out / "leaf_invariance.json",
               json{{"max_deviation", dev},
                    {"nodes", segment.nodes.size()},
                    {"epsilon", eps},
                    {"cache_key", r.cache_key}});
    return 0;
}

int run_cone_check(const Context& ctx) {
    auto gens = load_generators(ctx.config);
    AffineMap f = resolve_word(ctx, gens, "pair.f", "g0");
    double rho = cfg<double>(ctx.config, "cone.rho", 0.005);
    double beta = cfg<double>(ctx.config, "cone.beta", 1.0);
    double s = cfg<double>(ctx.config, "cone.s", 9.0);
    double delta = cfg<double>(ctx.config, "cone.delta", 0.05);
    int samples = cfg<int>(ctx.config, "cone.samples", 10000);
    ConeContractionReport rep =
        cone_contraction_check(f.derivative(), rho, beta, s, delta, samples, ctx.seed);
    write_json(ctx.out / "cone.json", json{{"xi", rep.xi},
                                           {"clusters", rep.clusters},
                                           {"rho_i", rep.rho_i},
                                           {"samples", rep.samples},
                                           {"worst_margin", rep.worst_margin},
                                           {"all_inside", rep.all_inside}});
    return 0;
}

int run_report(const Context& ctx) {
    fs::path dir = fs::path(cfg<std::string>(ctx.config, "report.dir", ctx.out.string()));
    std::vector<fs::path> files;
    if (fs::exists(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".json" && e.path().filename() != "summary.json")
                files.push_back(e.path());
    std::sort(files.begin(), files.end());  // discovery-order independence
    json out;
    out["files"] = json::object();
    for (const auto& f : files) {
        std::ifstream is(f);
        try {
            out["files"][f.filename().string()] = json::parse(is);
        } catch (const json::parse_error&) {
            out["files"][f.filename().string()] = nullptr;
        }
    }
    write_json(ctx.out / "summary.json", out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"riglab: rigidity experiments for affine actions on tori"};
    app.require_subcommand(1);

    std::string config_path;
    Context ctx;
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--out", ctx.out, "output directory");
    app.add_option("--seed", ctx.seed, "base RNG seed");
    app.add_option("--threads", ctx.threads, "worker threads");
    app.add_option("--max-precision", ctx.max_precision, "precision cap in bits");

    // flag name == dotted config key; collected and applied after parsing.
    std::vector<std::pair<std::string, std::string>> overrides;
    auto add_key = [&](CLI::App* sub, const std::string& key, const std::string& help) {
        sub->add_option_function<std::string>(
            "--" + key, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
            help);
    };

    CLI::App* check = app.add_subcommand("check-pair", "good-pair certificate for (f, g)");
    CLI::App* search = app.add_subcommand("search-pairs", "breadth-first good-pair search");
    CLI::App* ess = app.add_subcommand("essential-set", "essential-set test for the generators");
    CLI::App* weak = app.add_subcommand("weak-hyperbolic", "joint stable-span certificate");
    CLI::App* solve = app.add_subcommand("solve-conjugacy", "conjugacy displacement field");
    CLI::App* limits = app.add_subcommand("analyze-limits", "renormalized derivative limits");
    CLI::App* holder = app.add_subcommand("holder", "Holder exponent of the conjugacy");
    CLI::App* leaf = app.add_subcommand("leaf-invariance", "fast-stable leaf invariance");
    CLI::App* cone = app.add_subcommand("cone-check", "cone contraction constants and sampling");
    CLI::App* report = app.add_subcommand("report", "aggregate a directory of reports");

    for (CLI::App* sub : {check, search, ess, weak, solve, limits, holder, leaf, cone, report})
        sub->fallthrough();
    for (CLI::App* sub : {check, search, ess, weak, solve, limits, holder, leaf, cone}) {
        add_key(sub, "pair.f", "word for f over the generators");
        add_key(sub, "pair.g", "word for g over the generators");
        add_key(sub, "generators", "generators file path");
    }
    add_key(search, "search.max_len", "maximum word length");
    for (CLI::App* sub : {solve, holder, leaf}) {
        add_key(sub, "solve.epsilon", "perturbation strength");
        add_key(sub, "solve.grid", "grid nodes per axis");
        add_key(sub, "solve.tol", "sup-change tolerance");
        add_key(sub, "solve.max_iter", "iteration cap");
        add_key(sub, "solve.no_cache", "ignore cached fields");
    }
    add_key(limits, "limits.n_max", "depth of the decay fit");
    add_key(holder, "holder.pairs", "sample pair count");
    add_key(holder, "holder.scale_min", "smallest pair separation");
    add_key(holder, "holder.scale_max", "largest pair separation");
    for (CLI::App* sub : {leaf, limits}) {
        add_key(sub, "leaf.length", "traced arclength per side");
        add_key(sub, "leaf.step", "trace step");
    }
    add_key(cone, "cone.rho", "adapted-norm slack");
    add_key(cone, "cone.beta", "cone aperture");
    add_key(cone, "cone.s", "cone exponent");
    add_key(cone, "cone.delta", "cone radius");
    add_key(cone, "cone.samples", "sample count");
    add_key(report, "report.dir", "directory to aggregate");

    CLI11_PARSE(app, argc, argv);

    try {
        ctx.config = load_config(config_path);
        for (const auto& [key, value] : overrides) {
            // parse override values as JSON when possible, else keep the string
            json v;
            try {
                v = json::parse(value);
            } catch (const json::parse_error&) {
                v = value;
            }
            set_dotted(ctx.config, key, v);
        }
        if (ctx.config.contains("out") && config_path.empty() == false &&
            !app.count("--out"))
            ctx.out = ctx.config["out"].get<std::string>();
        if (!app.count("--seed") && ctx.config.contains("seed"))
            ctx.seed = ctx.config["seed"].get<std::uint64_t>();
        if (ctx.max_precision < 64) throw std::runtime_error("--max-precision below 64 bits");
        logger.open(ctx.out);

        if (*check) return run_check_pair(ctx);
        if (*search) return run_search_pairs(ctx);
        if (*ess) return run_essential_set(ctx);
        if (*weak) return run_weak_hyperbolic(ctx);
        if (*solve) return run_solve_conjugacy(ctx);
        if (*limits) return run_analyze_limits(ctx);
        if (*holder) return run_holder(ctx);
        if (*leaf) return run_leaf_invariance(ctx);
        if (*cone) return run_cone_check(ctx);
        if (*report) return run_report(ctx);
        return 1;
    } catch (const UndecidablePrecision& e) {
        std::cerr << "undecided: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        logger.log(3, e.what());
        return 1;
    }
}
