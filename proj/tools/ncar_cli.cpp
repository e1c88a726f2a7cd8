// Command-line front end: classify, simulate, moments, estimate, mc,
// forward-equiv. All randomness flows through an explicit --seed; outputs
// echo the effective configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ncar/montecarlo.hpp"
#include "ncar/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ncar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRegion = 3;
constexpr int kExitNumerical = 4;

Vector parse_theta(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw BadSpec("empty theta entry");
        vals.push_back(std::stod(item));
    }
    if (vals.empty()) throw BadSpec("theta must not be empty");
    return Eigen::Map<const Vector>(vals.data(), static_cast<long>(vals.size()));
}

NoiseFamily parse_family(const std::string& name) {
    if (name == "gaussian") return NoiseFamily::Gaussian;
    if (name == "rademacher") return NoiseFamily::Rademacher;
    if (name == "uniform") return NoiseFamily::UniformCentered;
    if (name == "student_t") return NoiseFamily::StudentT;
    throw BadSpec("unknown noise family: " + name);
}

StatisticKind parse_statistic(const std::string& name) {
    if (name == "mean_clt_u") return StatisticKind::MeanCltU;
    if (name == "mean_clt_y") return StatisticKind::MeanCltY;
    if (name == "h_clt") return StatisticKind::HClt;
    if (name == "lse_clt") return StatisticKind::LseClt;
    if (name == "corrected_clt") return StatisticKind::CorrectedClt;
    throw BadSpec("unknown statistic: " + name);
}

void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot open " + p.string() + " for writing");
    os << content;
}

json spec_json(const ModelSpec& spec, std::uint64_t seed) {
    json j;
    j["theta"] = std::vector<double>(spec.theta.data(), spec.theta.data() + spec.d());
    j["sigma2"] = spec.noise.sigma2;
    j["seed"] = seed;
    return j;
}

// Shared option bundle; config-file values are defaults, flags win.
struct Options {
    std::string theta_csv;
    double sigma2 = 1.0;
    std::string family = "gaussian";
    double nu = 5.0;
    int n = 1000;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tol = 1e-12;
    std::string out_dir = ".";
    std::string format = "csv";
    std::string config_file;
    std::string path_file;
    // mc
    int replications = 2000;
    std::string statistic = "mean_clt_y";
    std::string h_kind = "identity";
    int h_coordinate = 1;
    double tol_cov_rel = 0.10;
    int workers = 1;

    void apply_config() {
        if (config_file.empty()) return;
        std::ifstream is(config_file);
        if (!is) throw BadSpec("cannot read config file " + config_file);
        json j = json::parse(is);
        if (j.contains("theta")) {
            std::ostringstream os;
            for (std::size_t i = 0; i < j["theta"].size(); ++i) {
                if (i) os << ',';
                os << j["theta"][i].get<double>();
            }
            if (theta_csv.empty()) theta_csv = os.str();
        }
        auto pick = [&](const char* key, auto& slot) {
            if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
        };
        pick("sigma2", sigma2);
        pick("family", family);
        pick("nu", nu);
        pick("n", n);
        pick("tol", tol);
        pick("replications", replications);
        pick("statistic", statistic);
        pick("h_kind", h_kind);
        pick("h_coordinate", h_coordinate);
        pick("tol_cov_rel", tol_cov_rel);
        pick("workers", workers);
        if (j.contains("seed")) {
            seed = j["seed"].get<std::uint64_t>();
            seed_set = true;
        }
    }

    ModelSpec model() const {
        ModelSpec spec;
        spec.theta = parse_theta(theta_csv);
        spec.noise.family = parse_family(family);
        spec.noise.sigma2 = sigma2;
        spec.noise.nu = nu;
        spec.validate();
        return spec;
    }

    std::uint64_t require_seed() const {
        if (!seed_set) throw BadSpec("a --seed (or config seed) is required");
        return seed;
    }
};

int cmd_classify(const Options& opt) {
    Vector theta = parse_theta(opt.theta_csv);
    ModelSpec spec;
    spec.theta = theta;
    json out;
    out["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
    SpectralReport rep;
    if (theta(theta.size() - 1) == 0.0) {
        // B still exists; only the inverse does not.
        Matrix b = Matrix::Zero(theta.size(), theta.size());
        b.row(0) = theta.transpose();
        if (theta.size() > 1)
            b.block(1, 0, theta.size() - 1, theta.size() - 1).setIdentity();
        rep = spectral_info(b);
    } else {
        rep = build_companion(spec).spectral;
    }
    json eig = json::array();
    for (const auto& l : rep.eigenvalues) eig.push_back({{"re", l.real()}, {"im", l.imag()}});
    out["eigenvalues"] = eig;
    out["rho"] = rep.rho;
    out["rho_lower"] = rep.rho_lower;
    out["region"] = to_string(rep.region);
    out["boundary"] = rep.boundary;
    if (theta.size() == 2) {
        Region closed = classify_region_d2(theta);
        out["region_d2_closed_form"] = to_string(closed);
        out["region_agreement"] = (closed == rep.region);
    }
    std::cout << out.dump() << '\n';
    return kExitOk;
}

int cmd_simulate(const Options& opt) {
    ModelSpec spec = opt.model();
    SimulationPath path = simulate_stationary(spec, opt.n, opt.require_seed(), opt.tol);
    const fs::path dir(opt.out_dir);
    write_file(dir / "path.csv", path_to_csv(path));
    write_file(dir / "path.json", path_metadata_json(spec, path));
    std::cout << "wrote " << (dir / "path.csv").string() << " and metadata\n";
    return kExitOk;
}

int cmd_moments(const Options& opt) {
    ModelSpec spec = opt.model();
    std::cout << covariance_structure_json(spec) << '\n';
    return kExitOk;
}

int cmd_estimate(const Options& opt) {
    SimulationPath path;
    if (!opt.path_file.empty()) {
        std::ifstream is(opt.path_file);
        if (!is) throw BadSpec("cannot read path file " + opt.path_file);
        std::stringstream buf;
        buf << is.rdbuf();
        ParsedPathCsv parsed = parse_path_csv(buf.str());
        path.d = parsed.d;
        path.n = static_cast<int>(parsed.z.size());
        if (path.n < path.d + 1) throw PathTooShort("path file too short");
        path.y = parsed.y;
        path.noise.values = parsed.z;
        path.u.resize(static_cast<std::size_t>(path.n + 1));
        for (int k = 0; k <= path.n; ++k) {
            Vector u(path.d);
            for (int j = 0; j < path.d; ++j) u(j) = path.yat(k - j);
            path.u[static_cast<std::size_t>(k)] = u;
        }
    } else {
        ModelSpec spec = opt.model();
        path = simulate_stationary(spec, opt.n, opt.require_seed(), opt.tol);
    }
    EstimationResult r = lse(path);
    if (opt.format == "csv") {
        std::cout << estimation_result_csv(r);
    } else {
        std::cout << estimation_result_json(r) << '\n';
    }
    return kExitOk;
}

int cmd_mc(const Options& opt) {
    ExperimentConfig cfg;
    cfg.spec = opt.model();
    cfg.n = opt.n;
    cfg.replications = opt.replications;
    cfg.base_seed = opt.require_seed();
    cfg.statistic = parse_statistic(opt.statistic);
    cfg.tol_cov_rel = opt.tol_cov_rel;
    cfg.sim_tol = opt.tol;
    cfg.workers = opt.workers;
    if (cfg.statistic == StatisticKind::HClt) {
        if (opt.h_kind == "identity") {
            cfg.h.kind = HSpec::Kind::Identity;
        } else if (opt.h_kind == "projection") {
            cfg.h.kind = HSpec::Kind::Projection;
            cfg.h.coordinate = opt.h_coordinate;
        } else if (opt.h_kind == "proof_map") {
            cfg.h.kind = HSpec::Kind::ProofMap;
            cfg.h.theta_d = cfg.spec.theta(cfg.spec.d() - 1);
        } else if (opt.h_kind == "tanh") {
            cfg.h.kind = HSpec::Kind::TanhCoords;
        } else if (opt.h_kind == "constant") {
            cfg.h.kind = HSpec::Kind::Constant;
        } else {
            throw BadSpec("unknown h kind: " + opt.h_kind);
        }
    }
    MonteCarloReport rep = run_experiment(cfg);
    const fs::path dir(opt.out_dir);
    write_file(dir / "samples.csv", report_samples_csv(rep));
    write_file(dir / "summary.csv", report_summary_csv(rep));
    write_file(dir / "report.json", report_summary_json(cfg, rep));
    std::cout << report_summary_json(cfg, rep) << '\n';
    return kExitOk;
}

int cmd_forward_equiv(const Options& opt) {
    Vector theta = parse_theta(opt.theta_csv);
    NoiseSpec noise;
    noise.family = parse_family(opt.family);
    noise.sigma2 = opt.sigma2;
    noise.nu = opt.nu;
    EquivalenceReport rep =
        forward_backward_equivalence(theta, noise, opt.n, opt.require_seed(), opt.tol);
    json out;
    out["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
    out["n"] = opt.n;
    out["seed"] = opt.seed;
    out["max_discrepancy"] = rep.max_discrepancy;
    out["combined_bound"] = rep.combined_bound;
    std::cout << out.dump() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary solutions of purely explosive autoregressions"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config_file, "JSON config file (flags override)");
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--format", opt.format, "output format: csv|json");
    auto* seed_opt = app.add_option("--seed", opt.seed, "RNG seed (required for random ops)");

    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--theta", opt.theta_csv, "AR coefficients, comma separated");
        cmd->add_option("--sigma2", opt.sigma2, "noise variance");
        cmd->add_option("--family", opt.family, "gaussian|rademacher|uniform|student_t");
        cmd->add_option("--nu", opt.nu, "student_t degrees of freedom");
    };

    auto* classify = app.add_subcommand("classify", "spectral region of theta");
    add_model_flags(classify);

    auto* simulate = app.add_subcommand("simulate", "simulate the stationary path");
    add_model_flags(simulate);
    simulate->add_option("--n", opt.n, "path length");
    simulate->add_option("--tol", opt.tol, "truncation tolerance");

    auto* moments = app.add_subcommand("moments", "exact second-order structure");
    add_model_flags(moments);

    auto* estimate = app.add_subcommand("estimate", "least squares estimate");
    add_model_flags(estimate);
    estimate->add_option("--n", opt.n, "path length (inline simulation)");
    estimate->add_option("--tol", opt.tol, "truncation tolerance");
    estimate->add_option("--path-file", opt.path_file, "existing path CSV");

    auto* mc = app.add_subcommand("mc", "Monte Carlo experiment");
    add_model_flags(mc);
    mc->add_option("--n", opt.n, "path length per replication");
    mc->add_option("--tol", opt.tol, "truncation tolerance");
    mc->add_option("--replications", opt.replications, "replication count R");
    mc->add_option("--statistic", opt.statistic,
                   "mean_clt_u|mean_clt_y|h_clt|lse_clt|corrected_clt");
    mc->add_option("--h-kind", opt.h_kind, "identity|projection|proof_map|tanh|constant");
    mc->add_option("--h-coordinate", opt.h_coordinate, "projection coordinate");
    mc->add_option("--tol-cov-rel", opt.tol_cov_rel, "covariance pass threshold");
    mc->add_option("--workers", opt.workers, "worker threads");

    auto* fwd = app.add_subcommand("forward-equiv", "forward/backward equivalence check");
    add_model_flags(fwd);
    fwd->add_option("--n", opt.n, "comparison length");
    fwd->add_option("--tol", opt.tol, "truncation tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        opt.apply_config();
        if (seed_opt->count() > 0) opt.seed_set = true;
        if (classify->parsed()) return cmd_classify(opt);
        if (simulate->parsed()) return cmd_simulate(opt);
        if (moments->parsed()) return cmd_moments(opt);
        if (estimate->parsed()) return cmd_estimate(opt);
        if (mc->parsed()) return cmd_mc(opt);
        if (fwd->parsed()) return cmd_forward_equiv(opt);
        return kExitInvalid;
    } catch (const NotPurelyExplosive& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRegion;
    } catch (const NotStable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRegion;
    } catch (const HorizonOverflow& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}
