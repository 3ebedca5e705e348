#include "pca/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pca/analysis.hpp"
#include "pca/lattice.hpp"
#include "pca/modelfile.hpp"

namespace pca::cli {

using nlohmann::json;

namespace {

int env_threads() {
    const char* v = std::getenv("PCA_THREADS");
    if (!v) return 1;
    const int n = std::atoi(v);
    return n >= 1 ? n : 1;
}

json lambda_json(const Neighborhood& nb, const LambdaTable& lt) {
    json out = json::object();
    for (const auto& [mask, v] : lt.lambda) out[subset_key(nb, mask)] = v;
    return out;
}

json class_report_json(const Neighborhood& nb, const ClassReport& rep) {
    json v = json::array();
    for (const auto& [mask, lam] : rep.violations)
        v.push_back({{"subset", subset_key(nb, mask)}, {"lambda", lam}});
    return {{"is_class_C", rep.is_class_C}, {"violations", v},     {"D", rep.D},
            {"ergodic", rep.ergodic},       {"gamma", rep.gamma}};
}

json estimate_json(const MeasureEstimate& e) {
    const char* method = e.method == MeasureEstimate::Method::ExactTruncated ? "exact-truncated"
                         : e.method == MeasureEstimate::Method::MonteCarlo   ? "monte-carlo"
                                                                             : "closed-form";
    return {{"value", e.value},
            {"det_error", e.det_error},
            {"stat_error", e.stat_error},
            {"method", method}};
}

json report_shell(const std::vector<std::string>& args, const ModelFile& mf,
                  std::uint64_t seed) {
    json rep;
    rep["command"] = args;
    rep["model_digest"] = mf.digest();
    rep["seed"] = seed;
    rep["version"] = kVersion;
    return rep;
}

struct ModelContext {
    ModelFile mf;
    LambdaTable lt;
    ClassReport report;
    std::optional<TransitionTable> table;  // when dense-capable
    std::optional<Degenerate> degenerate;  // Corollary cases, valid models only
};

ModelContext load_model(const std::string& path) {
    ModelContext ctx{ModelFile::load(path), {}, {}, {}, {}};
    ctx.lt = ctx.mf.to_lambda();
    if (ctx.mf.dense_capable()) {
        ctx.table = ctx.mf.to_table();
        ctx.report = check_class(*ctx.table);
    } else {
        ctx.report = check_class(ctx.lt);
    }
    return ctx;
}

// Resolves the Corollary degenerate cases; throws CertificationError when
// the model is outside class C or non-ergodic.
void certify(ModelContext& ctx) {
    // p(empty) = lambda(empty) = 1: delta_1, accepted only for p identically 1
    if (ctx.lt.at(0) == 1.0) {
        bool all_one = true;
        if (ctx.table) {
            for (double v : ctx.table->p) all_one = all_one && v == 1.0;
        } else {
            all_one = ctx.lt.lambda.size() == 1;
        }
        if (all_one) {
            ctx.degenerate = Degenerate::Delta1;
            return;
        }
    }
    if (!ctx.report.is_class_C)
        throw CertificationError("model is not in class C", ctx.report);
    if (ctx.report.D >= 1.0)
        throw CertificationError("model is not ergodic: p(I_r) = " +
                                     std::to_string(ctx.report.D) + " >= 1",
                                 ctx.report);
    if (ctx.lt.at(0) == 0.0) ctx.degenerate = Degenerate::Delta0;
}

std::unique_ptr<MuHatProvider> make_provider(const ModelContext& ctx, const std::string& method,
                                             int truncation, std::uint64_t replicas,
                                             std::uint64_t seed, std::size_t budget) {
    if (ctx.degenerate) return std::make_unique<DegenerateProvider>(*ctx.degenerate);
    DualKernel kernel = dual_kernel(ctx.lt);
    if (method == "mc") return std::make_unique<McProvider>(kernel, replicas, seed, env_threads());
    return std::make_unique<ExactProvider>(kernel, truncation, budget);
}

int cmd_check(const std::vector<std::string>& args, const std::string& model_path,
              std::ostream& out) {
    ModelContext ctx = load_model(model_path);
    const Neighborhood nb = ctx.mf.neighborhood();
    json rep = report_shell(args, ctx.mf, 0);
    rep["results"] = class_report_json(nb, ctx.report);
    rep["results"]["lambda"] = lambda_json(nb, ctx.lt);
    out << rep.dump(2) << "\n";
    return ctx.report.ergodic ? 0 : kExitCertification;
}

int cmd_measure(const std::vector<std::string>& args, const std::string& model_path,
                const std::string& pattern_text, std::string method, int truncation,
                std::uint64_t replicas, std::uint64_t seed, std::size_t budget,
                std::ostream& out) {
    ModelContext ctx = load_model(model_path);
    certify(ctx);
    const Pattern pattern = parse_pattern(pattern_text, ctx.mf.dimension);
    const CylinderCombination comb = decompose(pattern);

    MeasureEstimate est;
    std::unique_ptr<MuHatProvider> provider;
    if (method == "auto") {
        try {
            provider = make_provider(ctx, "exact", truncation, replicas, seed, budget);
            est = measure(comb, *provider);
        } catch (const ResourceError&) {
            method = "mc";
            provider.reset();
        }
    }
    if (!provider) {
        provider = make_provider(ctx, method, truncation, replicas, seed, budget);
        est = measure(comb, *provider);
    }

    json per_y = json::array();
    {
        std::unordered_map<SiteSet, int, SiteSetHash> coeffs;
        for (const auto& term : comb.terms) coeffs[term.set] += term.coeff;
        std::vector<std::pair<SiteSet, int>> work(coeffs.begin(), coeffs.end());
        std::sort(work.begin(), work.end());
        for (const auto& [set, coeff] : work) {
            if (coeff == 0) continue;
            json sites = json::array();
            for (const auto& z : set) {
                json c = json::array();
                for (int k = 0; k < ctx.mf.dimension; ++k) c.push_back(z[k]);
                sites.push_back(c);
            }
            per_y.push_back({{"coeff", coeff},
                             {"sites", sites},
                             {"mu_hat", estimate_json(provider->mu_hat(set))}});
        }
    }

    json rep = report_shell(args, ctx.mf, seed);
    rep["results"] = {{"pattern", pattern_text},
                      {"terms", comb.terms.size()},
                      {"per_set", per_y},
                      {"measure", estimate_json(est)}};
    if (auto* mc = dynamic_cast<McProvider*>(provider.get()))
        rep["results"]["aborted_replicas"] = mc->aborted();
    out << rep.dump(2) << "\n";
    return 0;
}

int cmd_correlate(const std::vector<std::string>& args, const std::string& model_path,
                  const std::string& u_text, const std::string& v_text, std::int64_t t_min,
                  std::int64_t t_max, const std::string& method, int truncation,
                  std::uint64_t replicas, std::uint64_t seed, std::size_t budget,
                  const std::string& csv_path, std::ostream& out) {
    ModelContext ctx = load_model(model_path);
    certify(ctx);
    if (ctx.mf.dimension != 1)
        throw ConfigError("correlate supports one-dimensional models only");
    const CylinderCombination comb_u = decompose(parse_pattern(u_text, 1));
    const CylinderCombination comb_v = decompose(parse_pattern(v_text, 1));

    json rep = report_shell(args, ctx.mf, seed);
    std::vector<CorrelationPoint> points;
    if (ctx.degenerate || ctx.report.D == 0.0) {
        // point-mass measure: every correlation vanishes
        for (std::int64_t t = t_min; t <= t_max; ++t)
            points.push_back({t, 0.0, 0.0, 0.0, false});
        rep["results"] = {{"degenerate", true}};
    } else {
        const DecayConstants constants =
            decay_constants(comb_u, comb_v, ctx.report.D, ctx.mf.radius);
        auto provider = make_provider(ctx, method, truncation, replicas, seed, budget);
        points = correlation_curve(comb_u, comb_v, t_min, t_max, *provider, constants);
        rep["results"] = {{"degenerate", false},
                          {"a", constants.a},
                          {"F", constants.F},
                          {"K", constants.K},
                          {"D", constants.D}};
    }
    const std::string csv = correlation_csv(points);
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw ConfigError("cannot open " + csv_path + " for writing");
        f << csv;
        rep["results"]["csv_path"] = csv_path;
    } else {
        rep["results"]["csv"] = csv;
    }
    json pts = json::array();
    for (const auto& pt : points)
        pts.push_back({{"t", pt.t},
                       {"corr", pt.corr},
                       {"err", pt.error},
                       {"envelope", pt.envelope},
                       {"below_resolution", pt.below_resolution}});
    rep["results"]["points"] = pts;
    out << rep.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const std::vector<std::string>& args, const std::string& model_path,
                 const std::string& pattern_text, std::int64_t side, std::int64_t burn_in,
                 std::int64_t samples, std::int64_t thin, std::uint64_t seed,
                 const std::string& pbm_path, int truncation, std::ostream& out) {
    ModelContext ctx = load_model(model_path);
    certify(ctx);
    if (!ctx.table) throw ConfigError("simulate needs a dense-capable model");
    const Pattern pattern = parse_pattern(pattern_text, ctx.mf.dimension);
    if (burn_in < 0) burn_in = default_burn_in(ctx.report.D);

    std::vector<std::vector<bool>> raster;
    FrequencyEstimate freq =
        estimate_frequency(*ctx.table, pattern, side, burn_in, samples, thin, seed,
                           pbm_path.empty() ? nullptr : &raster);
    if (!pbm_path.empty() && !raster.empty()) write_pbm(pbm_path, raster);

    json rep = report_shell(args, ctx.mf, seed);
    rep["results"] = {{"pattern", pattern_text},
                      {"frequency", freq.value},
                      {"stat_error", freq.stat_error},
                      {"burn_in", freq.burn_in},
                      {"samples", freq.samples},
                      {"L", freq.side}};

    // side-by-side dual check when the exact DP is feasible
    try {
        auto provider = make_provider(ctx, "exact", truncation, 0, seed, 2'000'000);
        const MeasureEstimate dual_est = measure(decompose(pattern), *provider);
        const double diff = std::abs(freq.value - dual_est.value);
        const double combined = freq.stat_error + dual_est.combined_error();
        rep["results"]["dual_measure"] = estimate_json(dual_est);
        rep["results"]["difference"] = diff;
        rep["results"]["agrees_3sigma"] = diff <= 3.0 * combined;
    } catch (const ResourceError&) {
        rep["results"]["dual_measure"] = nullptr;
    }
    out << rep.dump(2) << "\n";
    return 0;
}

}  // namespace

Pattern parse_pattern(const std::string& text, int dim) {
    if (text.empty()) throw ConfigError("empty pattern");
    if (dim == 1) {
        const auto at = text.find('@');
        const std::string bits = text.substr(0, at);
        std::int64_t base = 0;
        if (at != std::string::npos) {
            const std::string b = text.substr(at + 1);
            try {
                std::size_t pos = 0;
                base = std::stoll(b, &pos);
                if (pos != b.size()) throw std::invalid_argument(b);
            } catch (const std::exception&) {
                throw ConfigError("bad pattern base \"" + b + "\"");
            }
        }
        return Pattern::from_word(bits, base);
    }
    // d = 2: comma-separated x:y=v
    std::vector<std::pair<Coord, std::uint8_t>> cells;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        const auto colon = item.find(':');
        if (eq == std::string::npos || colon == std::string::npos || colon > eq)
            throw ConfigError("bad pattern cell \"" + item + "\"; expected x:y=v");
        try {
            const int x = std::stoi(item.substr(0, colon));
            const int y = std::stoi(item.substr(colon + 1, eq - colon - 1));
            const std::string v = item.substr(eq + 1);
            if (v != "0" && v != "1") throw std::invalid_argument(v);
            cells.emplace_back(site2(x, y), v == "1");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad pattern cell \"" + item + "\"");
        }
    }
    std::sort(cells.begin(), cells.end());
    Pattern p;
    p.dim = 2;
    for (const auto& [c, v] : cells) {
        p.support.push_back(c);
        p.values.push_back(v);
    }
    p.validate();
    return p;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-state PCA ergodicity certification and invariant-measure toolkit"};
    app.require_subcommand(1);

    std::string model_path, pattern_text, u_text, v_text, csv_path, pbm_path;
    std::string method = "auto";
    int truncation = 40;
    std::uint64_t replicas = 1'000'000;
    std::uint64_t seed = 1;
    std::size_t budget = 10'000'000;
    std::int64_t t_min = 2, t_max = 14;
    std::int64_t side = 1024, burn_in = -1, samples = 1000, thin = 1;

    auto* check = app.add_subcommand("check", "certify class-C membership and ergodicity");
    check->add_option("model", model_path)->required();

    auto* meas = app.add_subcommand("measure", "invariant measure of a cylinder");
    meas->add_option("model", model_path)->required();
    meas->add_option("--pattern", pattern_text)->required();
    meas->add_option("--method", method)->check(CLI::IsMember({"exact", "mc", "auto"}));
    meas->add_option("--truncation", truncation);
    meas->add_option("--replicas", replicas);
    meas->add_option("--seed", seed);
    meas->add_option("--budget", budget);

    auto* corr = app.add_subcommand("correlate", "correlation curve with decay envelope");
    corr->add_option("model", model_path)->required();
    corr->add_option("--u", u_text)->required();
    corr->add_option("--v", v_text)->required();
    corr->add_option("--tmin", t_min);
    corr->add_option("--tmax", t_max);
    corr->add_option("--method", method)->check(CLI::IsMember({"exact", "mc", "auto"}));
    corr->add_option("--truncation", truncation);
    corr->add_option("--replicas", replicas);
    corr->add_option("--seed", seed);
    corr->add_option("--budget", budget);
    corr->add_option("--csv", csv_path);

    auto* sim = app.add_subcommand("simulate", "forward lattice cross-validation");
    sim->add_option("model", model_path)->required();
    sim->add_option("--pattern", pattern_text)->required();
    sim->add_option("--L", side);
    sim->add_option("--burnin", burn_in);
    sim->add_option("--samples", samples);
    sim->add_option("--thin", thin);
    sim->add_option("--seed", seed);
    sim->add_option("--truncation", truncation);
    sim->add_option("--dump-pbm", pbm_path);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (check->parsed()) return cmd_check(args, model_path, out);
        if (meas->parsed())
            return cmd_measure(args, model_path, pattern_text, method, truncation, replicas,
                               seed, budget, out);
        if (corr->parsed())
            return cmd_correlate(args, model_path, u_text, v_text, t_min, t_max,
                                 method == "auto" ? "exact" : method, truncation, replicas, seed,
                                 budget, csv_path, out);
        if (sim->parsed())
            return cmd_simulate(args, model_path, pattern_text, side, burn_in, samples, thin,
                                seed, pbm_path, truncation, out);
    } catch (const CertificationError& e) {
        json rep = {{"error", e.what()}, {"kind", "certification"}};
        err << rep.dump(2) << "\n";
        return kExitCertification;
    } catch (const ResourceError& e) {
        err << json({{"error", e.what()}, {"kind", "resource"}}).dump(2) << "\n";
        return kExitResource;
    } catch (const DegenerateModelError& e) {
        err << json({{"error", e.what()}, {"kind", "config"}}).dump(2) << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        err << json({{"error", e.what()}, {"kind", "config"}}).dump(2) << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace pca::cli
