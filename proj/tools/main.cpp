#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "solwalk/harmonic_analysis.hpp"
#include "solwalk/io.hpp"

using namespace solwalk;
using nlohmann::json;

namespace {

// ---- argument parsing helpers ----------------------------------------------

double parse_double(const std::string& tok, const char* what) {
    const char* cs = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(cs, &end);
    if (end == cs || *end != '\0')
        throw validation_error(std::string(what) + ": bad number '" + tok + "'");
    return v;
}

long long parse_int(const std::string& tok, const char* what) {
    std::size_t pos = 0;
    long long v;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw validation_error(std::string(what) + ": bad integer '" + tok + "'");
    }
    if (pos != tok.size()) throw validation_error(std::string(what) + ": bad integer '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// "1,2.5,10" -> explicit grid; "lo:hi:n" -> n log-spaced points inclusive
std::vector<double> grid_from(const std::string& flat, const std::string& logspec, const char* what) {
    if (flat.empty() == logspec.empty())
        throw validation_error(std::string(what) + ": give exactly one of the list or log-grid form");
    std::vector<double> v;
    if (!flat.empty()) {
        for (const std::string& tok : split(flat, ',')) v.push_back(parse_double(tok, what));
        return v;
    }
    std::vector<std::string> parts = split(logspec, ':');
    if (parts.size() != 3) throw validation_error(std::string(what) + ": log grid must be lo:hi:n");
    double lo = parse_double(parts[0], what), hi = parse_double(parts[1], what);
    long long n = parse_int(parts[2], what);
    if (!(lo > 0) || !(hi > lo) || n < 2)
        throw validation_error(std::string(what) + ": log grid needs 0 < lo < hi and n >= 2");
    for (long long i = 0; i < n; ++i)
        v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1)));
    return v;
}

std::array<std::array<long long, 2>, 2> parse_matrix(const std::string& s) {
    std::vector<std::string> toks = split(s, ',');
    if (toks.size() != 4) throw validation_error("T: need four integers a,b,c,d");
    return {{{parse_int(toks[0], "T"), parse_int(toks[1], "T")},
             {parse_int(toks[2], "T"), parse_int(toks[3], "T")}}};
}

// "1:0.7,-1:0.3" -> vertical level atoms
std::vector<std::pair<long long, double>> parse_levels(const std::string& s) {
    std::vector<std::pair<long long, double>> out;
    for (const std::string& tok : split(s, ',')) {
        std::vector<std::string> kv = split(tok, ':');
        if (kv.size() != 2) throw validation_error("levels: each entry must be level:weight");
        out.push_back({parse_int(kv[0], "levels"), parse_double(kv[1], "levels")});
    }
    return out;
}

// "1,0,0:0.5;0,1,0:0.5" -> lattice atoms
LatticeMeasure parse_lattice_atoms(const std::string& s) {
    LatticeMeasure mu;
    for (const std::string& tok : split(s, ';')) {
        std::vector<std::string> kv = split(tok, ':');
        if (kv.size() != 2) throw validation_error("atoms: each entry must be r,p,q:weight");
        std::vector<std::string> c = split(kv[0], ',');
        if (c.size() != 3) throw validation_error("atoms: coordinates must be r,p,q");
        mu.atoms.push_back({{parse_int(c[0], "atoms"), bigint(parse_int(c[1], "atoms")),
                             bigint(parse_int(c[2], "atoms"))},
                            parse_double(kv[1], "atoms")});
    }
    return mu;
}

LatticeElement parse_element(const std::string& s) {
    std::vector<std::string> c = split(s, ',');
    if (c.size() != 3) throw validation_error("g: element must be r,p,q");
    return {parse_int(c[0], "g"), bigint(parse_int(c[1], "g")), bigint(parse_int(c[2], "g"))};
}

YRule parse_y_rule(const std::string& s) {
    if (s == "zero") return YRule::Zero;
    if (s == "independent") return YRule::IndependentSign;
    throw validation_error("y-rule: must be zero or independent");
}

// ---- config file merge ------------------------------------------------------

// defaults from a JSON object whose keys are long flag names; explicit flags win
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string cfg;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            cfg = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            cfg = args[i].substr(9);
    }
    if (cfg.empty()) return args;
    json j = load_json(cfg);
    if (!j.is_object()) throw validation_error("config file must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "config") continue;
        std::string flag = "--" + key;
        bool present = false;
        for (const std::string& a : args)
            present = present || a == flag || a.rfind(flag + "=", 0) == 0;
        if (present) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_string()) {
            args.push_back(flag);
            args.push_back(value.get<std::string>());
        } else {
            args.push_back(flag);
            args.push_back(value.dump());
        }
    }
    return args;
}

// ---- report plumbing --------------------------------------------------------

void emit_report(const std::string& out, const json& report) {
    if (out.empty())
        std::cout << report.dump(2) << '\n';
    else
        save_json(out, report);
}

json evaluation_rows(const std::vector<FourierEvaluation>& evs) {
    json rows = json::array();
    for (const FourierEvaluation& ev : evs)
        rows.push_back({{"t", ev.t},
                        {"value_re", ev.value.real()},
                        {"value_im", ev.value.imag()},
                        {"stat_err", ev.stat_err},
                        {"trunc_err", ev.trunc_err}});
    return rows;
}

json fit_to_json(const DecayFit& fit) {
    return {{"slope", fit.slope},
            {"slope_stderr", fit.slope_stderr},
            {"n_used", fit.n_used},
            {"resolved", fit.resolved}};
}

EmpiricalMeasure load_empirical(const std::string& path, double max_err) {
    EmpiricalMeasure em;
    em.samples = read_samples(path);
    std::sort(em.samples.begin(), em.samples.end());
    em.max_err = max_err;
    return em;
}

// walk stats once per run so every frequency shares one certificate
VerticalWalkStats walk_stats_for(const StepMeasure& mu, std::uint64_t seed) {
    VerticalMeasure vm = vertical_measure(mu);
    try {
        return return_probability(vm, ReturnMethod::Exact2Atom);
    } catch (const method_mismatch_error&) {
        std::uint64_t sub = seed ^ 0xa5a5a5a5a5a5a5a5ull;
        return return_probability(vm, ReturnMethod::MonteCarlo, 200'000, splitmix64(sub));
    }
}

// ---- subcommands ------------------------------------------------------------

struct ConstructOpts {
    std::string preset, out, poly, levels, T, atoms, y_rule = "zero", g = "1,0,0";
    double gamma = 0, p = 0, q0 = 0;
    long long l = 1;
};

int run_construct(const ConstructOpts& o) {
    json config = {{"preset", o.preset}, {"out", o.out}};
    json measure;
    if (o.preset == "solomyak") {
        config["gamma"] = o.gamma;
        config["p"] = o.p;
        config["y-rule"] = o.y_rule;
        measure = measure_to_json(make_solomyak(o.gamma, o.p, parse_y_rule(o.y_rule)));
    } else if (o.preset == "erdos") {
        config["poly"] = o.poly;
        config["q0"] = o.q0;
        config["levels"] = o.levels;
        config["y-rule"] = o.y_rule;
        PisotCertificate cert = certify_pisot(parse_poly(o.poly));
        double q1 = (1.0 - o.q0) / 2.0;
        measure = measure_to_json(
            make_erdos(cert, parse_levels(o.levels), o.q0, q1, parse_y_rule(o.y_rule)));
    } else if (o.preset == "speed-singular") {
        config["T"] = o.T;
        config["l"] = o.l;
        config["g"] = o.g;
        LatticeSpec spec = make_lattice(parse_matrix(o.T));
        LatticeMeasure base;
        for (const LatticeElement& e : standard_generators()) base.atoms.push_back({e, 1.0 / 6.0});
        LatticeMeasure mu = make_singular_by_speed(spec, base, parse_element(o.g),
                                                   static_cast<int>(o.l));
        measure = measure_to_json(spec, mu);
    } else if (o.preset == "lattice") {
        config["T"] = o.T;
        config["atoms"] = o.atoms;
        LatticeSpec spec = make_lattice(parse_matrix(o.T));
        measure = measure_to_json(spec, normalize_measure(spec, parse_lattice_atoms(o.atoms)));
    } else {
        throw validation_error("construct: unknown preset " + o.preset);
    }
    measure["op"] = "construct";
    measure["config"] = config;
    save_json(o.out, measure);
    return 0;
}

struct SampleOpts {
    std::string measure, samples, format = "binary", out;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    double eps = 1e-8, delta = 1e-8;
    unsigned threads = 0;
};

int run_sample(const SampleOpts& o) {
    unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    MeasureFile mf = load_measure(o.measure);
    EmpiricalMeasure em = sample_batch(mf.step, o.n, o.seed, o.eps, o.delta, threads);
    write_samples(o.samples, em.samples, o.format == "csv" ? SampleFormat::Csv : SampleFormat::Binary);
    json report = {{"op", "sample"},
                   {"config",
                    {{"measure", o.measure},
                     {"n", o.n},
                     {"seed", o.seed},
                     {"eps", o.eps},
                     {"delta", o.delta},
                     {"samples", o.samples},
                     {"format", o.format},
                     {"threads", threads},
                     {"out", o.out}}},
                   {"measure", measure_to_json(mf.step)},
                   {"count", em.samples.size()},
                   {"max_err", em.max_err},
                   {"err_confidence", em.err_confidence},
                   {"min", em.samples.front()},
                   {"max", em.samples.back()}};
    emit_report(o.out, report);
    return 0;
}

struct SpeedOpts {
    std::string measure, out;
    long long n = 10'000;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
};

int run_speed(const SpeedOpts& o) {
    MeasureFile mf = load_measure(o.measure);
    SpeedEstimate se = speed_estimate(mf.step, o.n, o.trials, o.seed);
    json report = {{"op", "speed"},
                   {"config",
                    {{"measure", o.measure},
                     {"n", o.n},
                     {"trials", o.trials},
                     {"seed", o.seed},
                     {"out", o.out}}},
                   {"measure", measure_to_json(mf.step)},
                   {"mean_speed", se.mean_speed},
                   {"std_error", se.std_error},
                   {"sandwich_lo", se.sandwich_lo},
                   {"sandwich_hi", se.sandwich_hi},
                   {"drift", drift(mf.step)},
                   {"entropy", shannon_entropy(mf.step)}};
    emit_report(o.out, report);
    return 0;
}

struct EcfOpts {
    std::string samples, t, t_log, out;
    double max_err = 0;
    bool fit = false;
};

int run_ecf(const EcfOpts& o) {
    EmpiricalMeasure em = load_empirical(o.samples, o.max_err);
    std::vector<double> grid = grid_from(o.t, o.t_log, "t");
    std::vector<FourierEvaluation> evals;
    for (double t : grid) evals.push_back(ecf(em, t));
    json report = {{"op", "ecf"},
                   {"config",
                    {{"samples", o.samples},
                     {"max-err", o.max_err},
                     {"t", o.t},
                     {"t-log", o.t_log},
                     {"fit", o.fit},
                     {"out", o.out}}},
                   {"count", em.samples.size()},
                   {"rows", evaluation_rows(evals)}};
    if (o.fit) report["decay_fit"] = fit_to_json(decay_exponent_fit(evals));
    emit_report(o.out, report);
    return 0;
}

struct FourierExactOpts {
    std::string measure, t, t_log, out;
    std::size_t n_paths = 100'000;
    std::uint64_t seed = 1;
    double eps = 1e-9, delta = 1e-6;
    bool fit = false;
};

int run_fourier_exact(const FourierExactOpts& o) {
    MeasureFile mf = load_measure(o.measure);
    std::vector<double> grid = grid_from(o.t, o.t_log, "t");
    VerticalWalkStats stats = walk_stats_for(mf.step, o.seed);
    std::vector<FourierEvaluation> evals;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::uint64_t sub_seed = Rng::stream(o.seed, i).next();
        evals.push_back(exact_ft_product(mf.step, grid[i], o.n_paths, sub_seed, o.eps, o.delta, &stats));
    }
    json report = {{"op", "fourier-exact"},
                   {"config",
                    {{"measure", o.measure},
                     {"t", o.t},
                     {"t-log", o.t_log},
                     {"n-paths", o.n_paths},
                     {"seed", o.seed},
                     {"eps", o.eps},
                     {"delta", o.delta},
                     {"fit", o.fit},
                     {"out", o.out}}},
                   {"measure", measure_to_json(mf.step)},
                   {"occupation_bound", stats.M},
                   {"rows", evaluation_rows(evals)}};
    if (o.fit) report["decay_fit"] = fit_to_json(decay_exponent_fit(evals));
    emit_report(o.out, report);
    return 0;
}

struct CertifySingularOpts {
    std::string measure, out;
    long long l_lo = 0, l_hi = 0;
    std::size_t n_paths = 100'000;
    std::uint64_t seed = 1;
};

int run_certify_singular(const CertifySingularOpts& o) {
    MeasureFile mf = load_measure(o.measure);
    if (mf.step.pisot_poly.empty())
        throw validation_error("certify-singular: the measure carries no pisot polynomial");
    PisotCertificate cert = certify_pisot(mf.step.pisot_poly);
    ProbeReport probe = singularity_probe(mf.step, cert, o.l_lo, o.l_hi, o.n_paths, o.seed);
    json rows = json::array();
    for (std::size_t i = 0; i < probe.ls.size(); ++i) {
        const FourierEvaluation& ev = probe.evaluations[i];
        rows.push_back({{"l", probe.ls[i]},
                        {"t", ev.t},
                        {"value_re", ev.value.real()},
                        {"stat_err", ev.stat_err},
                        {"trunc_err", ev.trunc_err}});
    }
    json report = {{"op", "certify-singular"},
                   {"config",
                    {{"measure", o.measure},
                     {"l-lo", o.l_lo},
                     {"l-hi", o.l_hi},
                     {"n-paths", o.n_paths},
                     {"seed", o.seed},
                     {"out", o.out}}},
                   {"measure", measure_to_json(mf.step)},
                   {"certificate",
                    {{"poly", mf.step.pisot_poly},
                     {"alpha", cert.alpha},
                     {"beta", probe.certificate.beta},
                     {"q0", probe.certificate.q0},
                     {"q1", probe.certificate.q1},
                     {"M", probe.certificate.M},
                     {"theta", probe.certificate.theta},
                     {"L", probe.certificate.L},
                     {"c", probe.certificate.c}}},
                   {"floor", probe.floor},
                   {"rows", rows},
                   {"verdict", probe.verdict}};
    emit_report(o.out, report);
    return 0;
}

struct DimensionOpts {
    std::string samples, measure, r, r_log, out;
    double max_err = 0;
    std::size_t probes = 200;
    std::uint64_t seed = 1;
    long long kmax = 8;
    std::size_t max_atoms = 10'000'000;
};

int run_dimension(const DimensionOpts& o) {
    if (o.samples.empty() && o.measure.empty())
        throw validation_error("dimension: need --samples, --measure, or both");
    json report = {{"op", "dimension"},
                   {"config",
                    {{"samples", o.samples},
                     {"measure", o.measure},
                     {"max-err", o.max_err},
                     {"r", o.r},
                     {"r-log", o.r_log},
                     {"probes", o.probes},
                     {"seed", o.seed},
                     {"kmax", o.kmax},
                     {"max-atoms", o.max_atoms},
                     {"out", o.out}}}};
    if (!o.samples.empty()) {
        EmpiricalMeasure em = load_empirical(o.samples, o.max_err);
        std::vector<double> grid = grid_from(o.r, o.r_log, "r");
        DimensionEstimate d = local_dimension(em, grid, o.probes, o.seed);
        report["estimate"] = {{"local_dim", d.local_dim},
                              {"local_stderr", d.local_stderr},
                              {"pair_dim", d.pair_dim},
                              {"probes_used", d.probes_used},
                              {"flagged", d.flagged}};
        report["atom_fraction"] = atom_diagnostic(em);
    }
    if (!o.measure.empty()) {
        MeasureFile mf = load_measure(o.measure);
        report["measure"] = mf.lattice ? measure_to_json(*mf.spec, *mf.lattice)
                                       : measure_to_json(mf.step);
        if (mf.lattice) {
            ConvolutionBudget budget{o.max_atoms};
            report["bound"] = {{"kmax", o.kmax},
                               {"value", dimension_bound(*mf.spec, *mf.lattice,
                                                         static_cast<int>(o.kmax), budget)}};
        } else {
            report["bound"] = {{"kmax", 1}, {"value", dimension_bound(mf.step)}};
        }
    }
    emit_report(o.out, report);
    return 0;
}

struct EntropyOpts {
    std::string measure, out;
    long long kmax = 8;
    std::size_t max_atoms = 10'000'000;
};

int run_entropy(const EntropyOpts& o) {
    MeasureFile mf = load_measure(o.measure);
    if (!mf.lattice)
        throw validation_error("entropy: exact convolution powers need a lattice measure");
    ConvolutionBudget budget{o.max_atoms};
    EntropySequence seq = entropy_sequence(*mf.spec, *mf.lattice, static_cast<int>(o.kmax), budget);
    json rows = json::array();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [k, h_over_k] : seq.h_over_k) {
        rows.push_back({{"k", k}, {"h_over_k", h_over_k}});
        best = std::min(best, h_over_k);
    }
    double alpha = lattice_drift(*mf.spec, *mf.lattice);
    json report = {{"op", "entropy"},
                   {"config",
                    {{"measure", o.measure},
                     {"kmax", o.kmax},
                     {"max-atoms", o.max_atoms},
                     {"out", o.out}}},
                   {"measure", measure_to_json(*mf.spec, *mf.lattice)},
                   {"rows", rows},
                   {"truncated", seq.truncated},
                   {"reached_k", seq.reached_k},
                   {"drift", alpha}};
    if (std::abs(alpha) >= 1e-15 * mf.spec->gamma)
        report["dimension_bound"] = std::min(1.0, best / std::abs(alpha));
    emit_report(o.out, report);
    return 0;
}

struct PisotOpts {
    std::string poly, out;
};

int run_pisot(const PisotOpts& o) {
    PisotCertificate cert = certify_pisot(parse_poly(o.poly));
    json report = {{"op", "pisot"},
                   {"config", {{"poly", o.poly}, {"out", o.out}}},
                   {"poly", cert.poly},
                   {"alpha", cert.alpha},
                   {"delta", cert.delta},
                   {"theta_tilde", cert.theta_tilde},
                   {"theta", cert.theta},
                   {"L", cert.L},
                   {"precision_budget", cert.precision_budget}};
    emit_report(o.out, report);
    return 0;
}

struct StationarityOpts {
    std::string measure, samples, out;
    double max_err = 0;
    std::size_t n_resample = 10'000;
    std::uint64_t seed = 1;
};

int run_stationarity(const StationarityOpts& o) {
    MeasureFile mf = load_measure(o.measure);
    EmpiricalMeasure em = load_empirical(o.samples, o.max_err);
    StationarityReport rep = stationarity_check(mf.step, em, o.n_resample, o.seed);
    json report = {{"op", "stationarity"},
                   {"config",
                    {{"measure", o.measure},
                     {"samples", o.samples},
                     {"max-err", o.max_err},
                     {"n-resample", o.n_resample},
                     {"seed", o.seed},
                     {"out", o.out}}},
                   {"measure", measure_to_json(mf.step)},
                   {"distance", rep.distance},
                   {"threshold", rep.threshold},
                   {"pass", rep.pass},
                   {"n_original", rep.n_original},
                   {"n_resampled", rep.n_resampled}};
    emit_report(o.out, report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete random walks on the Sol group: boundary sampling and analysis"};
    app.require_subcommand(1);

    ConstructOpts co;
    CLI::App* construct = app.add_subcommand("construct", "write a measure file from a preset");
    construct->add_option("--preset", co.preset, "solomyak | erdos | speed-singular | lattice")
        ->required()
        ->check(CLI::IsMember({"solomyak", "erdos", "speed-singular", "lattice"}));
    construct->add_option("--out", co.out, "measure file to write")->required();
    construct->add_option("--gamma", co.gamma, "vertical step size (solomyak)");
    construct->add_option("--p", co.p, "probability of the upward step (solomyak)");
    construct->add_option("--poly", co.poly, "Pisot polynomial, e.g. 1,-3,1 (erdos)");
    construct->add_option("--q0", co.q0, "weight of the zero horizontal step (erdos)");
    construct->add_option("--levels", co.levels, "vertical atoms level:weight,... (erdos)");
    construct->add_option("--T", co.T, "lattice matrix a,b,c,d (speed-singular, lattice)");
    construct->add_option("--l", co.l, "drift amplification power (speed-singular)");
    construct->add_option("--g", co.g, "amplified element r,p,q (speed-singular)");
    construct->add_option("--atoms", co.atoms, "lattice atoms r,p,q:w;... (lattice)");
    construct->add_option("--y-rule", co.y_rule, "second horizontal marginal: zero | independent");

    SampleOpts so;
    CLI::App* sample = app.add_subcommand("sample", "draw boundary points into a sample file");
    sample->add_option("--measure", so.measure, "measure file")->required();
    sample->add_option("--n", so.n, "number of samples")->required();
    sample->add_option("--seed", so.seed, "RNG seed");
    sample->add_option("--eps", so.eps, "per-sample truncation error bound");
    sample->add_option("--delta", so.delta, "per-sample bound failure probability");
    sample->add_option("--samples", so.samples, "sample file to write")->required();
    sample->add_option("--format", so.format, "sample file format")
        ->check(CLI::IsMember({"csv", "binary"}));
    sample->add_option("--threads", so.threads, "worker cap (0 = available parallelism)");
    sample->add_option("--out", so.out, "report file (default: stdout)");

    SpeedOpts spo;
    CLI::App* speed = app.add_subcommand("speed", "estimate escape speed and distance sandwich");
    speed->add_option("--measure", spo.measure, "measure file")->required();
    speed->add_option("--n", spo.n, "steps per trial");
    speed->add_option("--trials", spo.trials, "independent trials");
    speed->add_option("--seed", spo.seed, "RNG seed");
    speed->add_option("--out", spo.out, "report file (default: stdout)");

    EcfOpts eo;
    CLI::App* ecf_cmd = app.add_subcommand("ecf", "empirical characteristic function of samples");
    ecf_cmd->add_option("--samples", eo.samples, "sample file")->required();
    ecf_cmd->add_option("--max-err", eo.max_err, "per-sample error bound of the sample file");
    ecf_cmd->add_option("--t", eo.t, "frequencies t1,t2,...");
    ecf_cmd->add_option("--t-log", eo.t_log, "log-spaced frequencies lo:hi:n");
    ecf_cmd->add_flag("--fit", eo.fit, "append a decay-exponent fit");
    ecf_cmd->add_option("--out", eo.out, "report file (default: stdout)");

    FourierExactOpts fo;
    CLI::App* fourier = app.add_subcommand("fourier-exact",
                                           "factor-product transform over vertical paths");
    fourier->add_option("--measure", fo.measure, "product-form measure file")->required();
    fourier->add_option("--t", fo.t, "frequencies t1,t2,...");
    fourier->add_option("--t-log", fo.t_log, "log-spaced frequencies lo:hi:n");
    fourier->add_option("--n-paths", fo.n_paths, "Monte Carlo paths per frequency");
    fourier->add_option("--seed", fo.seed, "RNG seed");
    fourier->add_option("--eps", fo.eps, "factor truncation error");
    fourier->add_option("--delta", fo.delta, "level-window failure probability");
    fourier->add_flag("--fit", fo.fit, "append a decay-exponent fit");
    fourier->add_option("--out", fo.out, "report file (default: stdout)");

    CertifySingularOpts cso;
    CLI::App* certify = app.add_subcommand("certify-singular",
                                           "probe the Pisot frequency ladder against the "
                                           "positivity certificate");
    certify->add_option("--measure", cso.measure, "measure file with a pisot polynomial")->required();
    certify->add_option("--l-lo", cso.l_lo, "lowest ladder level (t_l = 2 pi beta^l)")->required();
    certify->add_option("--l-hi", cso.l_hi, "highest ladder level")->required();
    certify->add_option("--n-paths", cso.n_paths, "Monte Carlo paths per level");
    certify->add_option("--seed", cso.seed, "RNG seed");
    certify->add_option("--out", cso.out, "report file (default: stdout)");

    DimensionOpts dopt;
    CLI::App* dim = app.add_subcommand("dimension", "dimension estimators and entropy bound");
    dim->add_option("--samples", dopt.samples, "sample file for the estimators");
    dim->add_option("--max-err", dopt.max_err, "per-sample error bound of the sample file");
    dim->add_option("--r", dopt.r, "radii r1,r2,...");
    dim->add_option("--r-log", dopt.r_log, "log-spaced radii lo:hi:n");
    dim->add_option("--probes", dopt.probes, "Frostman probe centers");
    dim->add_option("--seed", dopt.seed, "RNG seed");
    dim->add_option("--measure", dopt.measure, "measure file for the entropy bound");
    dim->add_option("--kmax", dopt.kmax, "largest convolution power for the bound");
    dim->add_option("--max-atoms", dopt.max_atoms, "convolution atom budget");
    dim->add_option("--out", dopt.out, "report file (default: stdout)");

    EntropyOpts ento;
    CLI::App* entropy = app.add_subcommand("entropy", "exact H(mu^k)/k table for a lattice measure");
    entropy->add_option("--measure", ento.measure, "lattice measure file")->required();
    entropy->add_option("--kmax", ento.kmax, "largest convolution power");
    entropy->add_option("--max-atoms", ento.max_atoms, "convolution atom budget");
    entropy->add_option("--out", ento.out, "report file (default: stdout)");

    PisotOpts po;
    CLI::App* pisot = app.add_subcommand("pisot", "certify a Pisot polynomial");
    pisot->add_option("--poly", po.poly, "monic integer coefficients, e.g. 1,-1,-1")->required();
    pisot->add_option("--out", po.out, "report file (default: stdout)");

    StationarityOpts sto;
    CLI::App* stat = app.add_subcommand("stationarity", "KS check of mu * nu = nu on samples");
    stat->add_option("--measure", sto.measure, "measure file")->required();
    stat->add_option("--samples", sto.samples, "sample file")->required();
    stat->add_option("--max-err", sto.max_err, "per-sample error bound of the sample file");
    stat->add_option("--n-resample", sto.n_resample, "size of the resampled comparison set");
    stat->add_option("--seed", sto.seed, "RNG seed");
    stat->add_option("--out", sto.out, "report file (default: stdout)");

    std::string config_path;
    for (CLI::App* sc : app.get_subcommands({}))
        sc->add_option("--config", config_path, "JSON file of default flag values (flags win)");

    try {
        std::vector<std::string> args =
            merge_config(std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end());
        app.parse(args);
        if (construct->parsed()) return run_construct(co);
        if (sample->parsed()) return run_sample(so);
        if (speed->parsed()) return run_speed(spo);
        if (ecf_cmd->parsed()) return run_ecf(eo);
        if (fourier->parsed()) return run_fourier_exact(fo);
        if (certify->parsed()) return run_certify_singular(cso);
        if (dim->parsed()) return run_dimension(dopt);
        if (entropy->parsed()) return run_entropy(ento);
        if (pisot->parsed()) return run_pisot(po);
        if (stat->parsed()) return run_stationarity(sto);
        return 2;  // unreachable: require_subcommand(1)
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 2;
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
}
