#include "diforge/cli.hpp"

#include "diforge/decoder.hpp"
#include "diforge/experiments.hpp"
#include "diforge/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace diforge {

namespace {

using nlohmann::json;

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const RunConfig& cfg, const std::string& payload, std::ostream& out) {
    if (cfg.out_path.empty()) {
        out << payload;
    } else {
        atomic_write(cfg.out_path, payload);
    }
}

ChannelModel make_channel(const RunConfig& cfg, int n) {
    if (cfg.channel == "bernoulli") return bernoulli_channel(n);
    if (cfg.channel == "restricted-bernoulli") {
        return restricted_bernoulli_channel(n, cfg.a, cfg.b);
    }
    if (cfg.channel == "poisson") return poisson_channel(n, cfg.A);
    throw UsageError("unknown channel '" + cfg.channel +
                     "' (bernoulli, restricted-bernoulli, poisson)");
}

DecoderParams make_decoder(const RunConfig& cfg, int n) {
    if (cfg.t) return custom_decoder(*cfg.t);
    if (cfg.t_mode == "capacity") return capacity_decoder(n);
    if (cfg.t_mode == "poisson") return poisson_decoder(n, cfg.A);
    if (cfg.t_mode == "rate-reliability") {
        if (!cfg.E) throw UsageError("--t-mode rate-reliability needs --E");
        return rate_reliability_decoder(n, *cfg.E);
    }
    throw UsageError("unknown t-mode '" + cfg.t_mode + "'");
}

json meta_record(const RunConfig& cfg) {
    return {{"record", "meta"},
            {"tool", "di-forge"},
            {"command", cfg.command},
            {"timestamp", iso_timestamp()}};
}

int run_build(const RunConfig& cfg, std::ostream& out) {
    if (cfg.out_path.empty()) throw UsageError("build: --out is required");
    std::vector<int> branching = cfg.branching;
    if (branching.empty()) branching.assign(static_cast<std::size_t>(cfg.L), 4);

    PrimitiveCodebook cb;
    if (cfg.mode == "capacity") {
        cb = build_primitive(
            capacity_params(cfg.n, cfg.L, cfg.delta, branching, cfg.build_seed));
    } else if (cfg.mode == "rate-reliability") {
        if (!cfg.E) throw UsageError("build: rate-reliability mode needs --E");
        cb = rr_build(cfg.n, cfg.L, cfg.delta, *cfg.E, branching, cfg.build_seed,
                      cfg.gen_separation)
                 .codebook;
    } else if (cfg.mode == "custom") {
        if (cfg.radii.empty() || !cfg.d) {
            throw UsageError("build: custom mode needs --radii and --d");
        }
        CodebookParams p;
        p.n = cfg.n;
        p.L = cfg.L;
        p.delta = cfg.delta;
        p.radii = cfg.radii;
        p.min_proj_dist = *cfg.d;
        p.branching = branching;
        p.seed = cfg.build_seed;
        p.mode = BuildMode::Custom;
        cb = build_primitive(p);
    } else {
        throw UsageError("build: unknown mode '" + cfg.mode + "'");
    }

    save_codebook(cb, cfg.out_path);
    out << "built " << cb.leaf_ids.size() << " codewords (n=" << cb.params.n
        << ", L=" << cb.params.L << ") -> " << cfg.out_path << "\n";
    return 0;
}

int run_verify(const RunConfig& cfg, std::ostream& out) {
    PrimitiveCodebook cb = load_codebook(cfg.in_path);
    CodebookCheck check = verify_codebook(cb);

    if (cfg.format == "json") {
        json j = to_json(check);
        j["path"] = cfg.in_path;
        emit(cfg, j.dump(2) + "\n", out);
    } else {
        std::ostringstream table;
        auto row = [&table](const std::string& name, double value, bool ok) {
            table << std::left << std::setw(42) << name << std::scientific
                  << std::setprecision(3) << std::setw(14) << value
                  << (ok ? "ok" : "FAIL") << "\n";
        };
        row("path orthogonality (max |<e_i,e_j>|)", check.max_path_inner,
            check.max_path_inner <= 1e-10);
        row("layer radius rel. error (max)", check.max_radius_rel_err,
            check.max_radius_rel_err <= 1e-9);
        row("sphere radius identity rel. error (max)", check.max_word_radius_rel_err,
            check.max_word_radius_rel_err <= 1e-9);
        row("sibling min separation", check.min_sibling_sep,
            check.min_sibling_sep >=
                cb.params.min_proj_dist * (1.0 - kSepSlackRel));
        row("projective min separation", check.min_projective_sep,
            check.min_projective_sep >= check.projective_bound * (1.0 - kSepSlackRel));
        row("projective floor d - sqrt(2Ld)", check.projective_bound, true);
        table << std::left << std::setw(42) << "leaf count"
              << std::setw(14) << static_cast<double>(cb.leaf_ids.size())
              << (check.leaf_count_ok ? "ok" : "FAIL") << "\n";
        table << "overall: " << (check.ok ? "ok" : "FAIL") << "\n";
        emit(cfg, table.str(), out);
    }
    return check.ok ? 0 : 5;
}

std::string estimate_csv(const std::string& experiment, const ErrorEstimate& e) {
    std::ostringstream s;
    s << "experiment,p_hat,trials,failures,ci_lo,ci_hi,bound,zero_failure_regime,"
         "verdict\n";
    s << experiment << "," << std::setprecision(17) << e.p_hat << "," << e.trials << ","
      << e.failures << "," << e.ci_lo << "," << e.ci_hi << "," << e.bound << ","
      << (e.zero_failure_regime ? 1 : 0) << ","
      << (e.consistent ? "ok" : "violation") << "\n";
    return s.str();
}

int run_simulate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.trials < 1) throw UsageError("simulate: --trials must be >= 1");

    json inputs = {{"channel", cfg.channel},   {"experiment", cfg.experiment},
                   {"trials", cfg.trials},     {"trial_seed", cfg.trial_seed},
                   {"t_mode", cfg.t_mode}};
    if (cfg.channel == "poisson") inputs["A"] = cfg.A;
    if (cfg.channel == "restricted-bernoulli") {
        inputs["a"] = cfg.a;
        inputs["b"] = cfg.b;
    }

    ErrorEstimate est;
    if (cfg.experiment == "concentration") {
        int n = cfg.n;
        if (n == 0 && !cfg.in_path.empty()) n = load_codebook(cfg.in_path).params.n;
        if (n < 2) throw UsageError("simulate: concentration needs --n or --in");
        ChannelModel ch = make_channel(cfg, n);
        InputBox box = ch.input_box();

        Stream xs = stream_for(cfg.input_seed, 0);
        Vec x(static_cast<std::size_t>(n));
        for (auto& c : x) c = box.lo + (box.hi - box.lo) * xs.next_unit();
        Stream ds = stream_for(cfg.input_seed, 1);
        Vec direction = random_unit_vector(n, ds);

        double t = cfg.t ? *cfg.t : make_decoder(cfg, n).t;
        est = concentration_experiment(ch, x, direction, t, cfg.trials, cfg.trial_seed);
        inputs["n"] = n;
        inputs["t"] = t;
        inputs["input_seed"] = cfg.input_seed;
    } else if (cfg.experiment == "missed-id" || cfg.experiment == "false-id") {
        if (cfg.in_path.empty()) throw UsageError("simulate: --in codebook required");
        PrimitiveCodebook cb = load_codebook(cfg.in_path);
        if (cfg.affine_scale || cfg.affine_center) {
            double scale = cfg.affine_scale.value_or(1.0);
            Vec center = cb.center;
            if (cfg.affine_center) {
                center.assign(static_cast<std::size_t>(cb.params.n), *cfg.affine_center);
            }
            cb = affine_map(cb, scale, center);
        }
        ChannelModel ch = make_channel(cfg, cb.params.n);
        DecoderParams dec = make_decoder(cfg, cb.params.n);

        auto [retained, rep] =
            expurgate(cb, ch.input_box(), cfg.rotation_seed, cfg.use_rotation);
        PrimitiveCodebook sim_cb =
            cfg.use_rotation ? rotated_copy(cb, cfg.rotation_seed) : cb;
        inputs["n"] = cb.params.n;
        inputs["t"] = dec.t;
        inputs["expurgation"] = to_json(rep);
        inputs["use_rotation"] = cfg.use_rotation;
        if (cfg.use_rotation) inputs["rotation_seed"] = cfg.rotation_seed;

        if (cfg.experiment == "missed-id") {
            est = estimate_missed_id(sim_cb, ch, dec, retained, cfg.trials,
                                     cfg.trial_seed);
        } else {
            FalseIdOptions opts;
            if (!cfg.tested_id.empty() || !cfg.transmitted_id.empty()) {
                opts.sampling = PairSampling::Explicit;
                opts.pair = std::make_pair(CodewordId{cfg.tested_id},
                                           CodewordId{cfg.transmitted_id});
            } else {
                opts.sampling = cfg.adversarial ? PairSampling::AdversarialMinSep
                                                : PairSampling::Random;
            }
            est = estimate_false_id(sim_cb, ch, dec, retained, opts, cfg.trials,
                                    cfg.trial_seed);
            inputs["pair_sampling"] =
                opts.sampling == PairSampling::Explicit
                    ? "explicit"
                    : (opts.sampling == PairSampling::AdversarialMinSep ? "adversarial"
                                                                        : "random");
        }
    } else {
        throw UsageError("simulate: unknown experiment '" + cfg.experiment +
                         "' (concentration, missed-id, false-id)");
    }

    if (cfg.format == "csv") {
        emit(cfg, estimate_csv(cfg.experiment, est), out);
    } else {
        json record = to_json(est);
        record["record"] = "experiment";
        record["experiment"] = cfg.experiment;
        record["inputs"] = inputs;
        emit(cfg, meta_record(cfg).dump() + "\n" + record.dump() + "\n", out);
    }
    return 0;
}

int run_sweep_rr(const RunConfig& cfg, std::ostream& out) {
    if (cfg.E_grid.empty()) throw UsageError("sweep-rr: --E-grid is required");
    std::vector<int> branching = cfg.branching;
    if (branching.empty()) branching.assign(static_cast<std::size_t>(cfg.L), 4);

    json rows = json::array();
    for (double E : cfg.E_grid) {
        json row = {{"E", E}};
        try {
            RrBuild rb = rr_build(cfg.n, cfg.L, cfg.delta, E, branching, cfg.build_seed,
                                  cfg.gen_separation);
            auto [retained, rep] = expurgate(rb.codebook, InputBox{0.0, 1.0, cfg.n},
                                             cfg.rotation_seed, cfg.use_rotation);
            row["t"] = rb.catalog.t;
            row["lambda"] = rb.catalog.lambda;
            row["retained"] = rep.retained;
            if (rep.retained >= 1) {
                RateReport rr = rate_report(rb.codebook, rep, E);
                row["linear_rate"] = rr.linear_rate;
                row["rr_lower_bound"] = *rr.rr_lower_bound;
                row["rr_converse_bound"] = *rr.rr_upper_bound;
            }
            row["status"] = rep.retained >= 1 ? "ok" : "empty";
        } catch (const RegimeViolation& ex) {
            row["status"] = "regime-violation";
            row["message"] = ex.what();
        } catch (const PlacementExhausted& ex) {
            row["status"] = "placement-exhausted";
            row["message"] = ex.what();
        }
        rows.push_back(std::move(row));
    }

    if (cfg.format == "csv") {
        std::ostringstream s;
        s << "E,t,lambda,retained,linear_rate,rr_lower_bound,rr_converse_bound,status\n";
        for (const auto& row : rows) {
            auto cell = [&row](const char* key) -> std::string {
                if (!row.contains(key)) return "";
                std::ostringstream c;
                c << std::setprecision(17) << row[key].get<double>();
                return c.str();
            };
            s << row["E"].get<double>() << "," << cell("t") << "," << cell("lambda")
              << ","
              << (row.contains("retained")
                      ? std::to_string(row["retained"].get<long long>())
                      : "")
              << "," << cell("linear_rate") << "," << cell("rr_lower_bound") << ","
              << cell("rr_converse_bound") << "," << row["status"].get<std::string>()
              << "\n";
        }
        emit(cfg, s.str(), out);
    } else {
        json j = {{"meta", meta_record(cfg)}, {"rows", rows}};
        emit(cfg, j.dump(2) + "\n", out);
    }
    return 0;
}

int run_reduce_demo(const RunConfig& cfg, std::ostream& out) {
    std::vector<double> xs = cfg.x_values;
    if (xs.empty()) xs = {0.1, 0.5, 0.9};
    ReductionSpec spec = poisson_to_bernoulli_reduction(cfg.A);

    json rows = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ReductionCheck rc = reduction_check(cfg.A, xs[i], cfg.trials,
                                            stream_key(cfg.trial_seed, i));
        rows.push_back({{"x", rc.x},
                        {"p0", rc.p0},
                        {"trials", rc.trials},
                        {"pipeline_ones", rc.pipeline_ones},
                        {"direct_ones", rc.direct_ones},
                        {"pipeline_pvalue", rc.pipeline_pvalue},
                        {"direct_pvalue", rc.direct_pvalue}});
    }

    if (cfg.format == "csv") {
        std::ostringstream s;
        s << "x,p0,trials,pipeline_ones,direct_ones,pipeline_pvalue,direct_pvalue\n";
        for (const auto& r : rows) {
            s << std::setprecision(17) << r["x"].get<double>() << ","
              << r["p0"].get<double>() << "," << r["trials"].get<long long>() << ","
              << r["pipeline_ones"].get<long long>() << ","
              << r["direct_ones"].get<long long>() << ","
              << r["pipeline_pvalue"].get<double>() << ","
              << r["direct_pvalue"].get<double>() << "\n";
        }
        emit(cfg, s.str(), out);
    } else {
        json j = {{"meta", meta_record(cfg)},
                  {"A", cfg.A},
                  {"induced_interval", {spec.interval_lo(), ReductionSpec::interval_hi}},
                  {"rows", rows}};
        emit(cfg, j.dump(2) + "\n", out);
    }
    return 0;
}

int run_report(const RunConfig& cfg, std::ostream& out) {
    PrimitiveCodebook cb = load_codebook(cfg.in_path);
    ChannelModel ch = make_channel(cfg, cb.params.n);
    auto [retained, rep] =
        expurgate(cb, ch.input_box(), cfg.rotation_seed, cfg.use_rotation);

    json j = {{"meta", meta_record(cfg)},
              {"params",
               {{"n", cb.params.n},
                {"L", cb.params.L},
                {"delta", cb.params.delta},
                {"mode", to_string(cb.params.mode)}}},
              {"expurgation", to_json(rep)}};
    if (rep.retained >= 1) j["rate"] = to_json(rate_report(cb, rep, cfg.E));

    if (cb.params.mode == BuildMode::Capacity) {
        j["catalog"] = to_json(
            cfg.channel == "poisson"
                ? poisson_catalog(cb.params.n, cb.params.L, cb.params.delta, cfg.A)
                : capacity_catalog(cb.params.n, cb.params.L, cb.params.delta));
    } else if (cb.params.mode == BuildMode::RateReliability && cfg.E) {
        j["catalog"] =
            to_json(rr_catalog(cb.params.n, cb.params.L, cb.params.delta, *cfg.E));
    }
    emit(cfg, j.dump(2) + "\n", out);
    return 0;
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
    if (cfg.command == "build") return run_build(cfg, out);
    if (cfg.command == "verify") return run_verify(cfg, out);
    if (cfg.command == "simulate") return run_simulate(cfg, out);
    if (cfg.command == "sweep-rr") return run_sweep_rr(cfg, out);
    if (cfg.command == "reduce-demo") return run_reduce_demo(cfg, out);
    if (cfg.command == "report") return run_report(cfg, out);
    throw UsageError("unknown command '" + cfg.command + "'");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"deterministic-identification codebooks over Bernoulli, restricted-"
                 "Bernoulli, and Poisson channels"};
    app.name("di-forge");
    app.require_subcommand(1);

    auto add_common_build = [&cfg](CLI::App* cmd) {
        cmd->add_option("--n", cfg.n, "block length")->required();
        cmd->add_option("--L", cfg.L, "layer count (default 2)");
        cmd->add_option("--delta", cfg.delta, "radius exponent offset in (0,1)");
        cmd->add_option("--branching", cfg.branching,
                        "codewords per layer, comma separated (default 4 each)")
            ->delimiter(',');
        cmd->add_option("--seed", cfg.build_seed, "construction seed");
        cmd->add_option("--gen-separation", cfg.gen_separation,
                        "override the enforced generation separation");
    };
    auto add_channel = [&cfg](CLI::App* cmd) {
        cmd->add_option("--channel", cfg.channel,
                        "bernoulli | restricted-bernoulli | poisson");
        cmd->add_option("--a", cfg.a, "restricted-Bernoulli lower edge");
        cmd->add_option("--b", cfg.b, "restricted-Bernoulli upper edge");
        cmd->add_option("--A", cfg.A, "Poisson peak constraint");
    };
    auto add_output = [&cfg](CLI::App* cmd) {
        cmd->add_option("--out", cfg.out_path, "output path (stdout when absent)");
        cmd->add_option("--format", cfg.format, "json | csv");
    };

    CLI::App* bld = app.add_subcommand("build", "construct a codebook and save it");
    add_common_build(bld);
    bld->add_option("--mode", cfg.mode, "capacity | custom | rate-reliability");
    bld->add_option("--radii", cfg.radii, "custom-mode layer radii")->delimiter(',');
    bld->add_option("--d", cfg.d, "custom-mode minimum projective separation");
    bld->add_option("--E", cfg.E, "rate-reliability error exponent");
    bld->add_option("--out", cfg.out_path, "codebook file to write")->required();

    CLI::App* ver = app.add_subcommand("verify", "run the invariant suite on a codebook");
    ver->add_option("--in", cfg.in_path, "codebook file")->required();
    add_output(ver);

    CLI::App* sim = app.add_subcommand("simulate", "run an error-estimation campaign");
    sim->add_option("--in", cfg.in_path, "codebook file");
    sim->add_option("--n", cfg.n, "block length (concentration without --in)");
    add_channel(sim);
    sim->add_option("--experiment", cfg.experiment,
                    "concentration | missed-id | false-id");
    sim->add_option("--trials", cfg.trials, "Monte Carlo trials (default 100000)");
    sim->add_option("--t", cfg.t, "decoder acceptance radius (overrides --t-mode)");
    sim->add_option("--t-mode", cfg.t_mode, "capacity | poisson | rate-reliability");
    sim->add_option("--E", cfg.E, "error exponent for --t-mode rate-reliability");
    sim->add_option("--tested", cfg.tested_id, "explicit tested id, comma separated")
        ->delimiter(',');
    sim->add_option("--transmitted", cfg.transmitted_id,
                    "explicit transmitted id, comma separated")
        ->delimiter(',');
    sim->add_flag("--random-pairs{false},--adversarial{true}", cfg.adversarial,
                  "false-id pair choice (default adversarial)");
    sim->add_flag("--use-rotation", cfg.use_rotation, "expurgate after a Haar rotation");
    sim->add_option("--rotation-seed", cfg.rotation_seed, "rotation seed");
    sim->add_option("--trial-seed", cfg.trial_seed, "Monte Carlo seed");
    sim->add_option("--input-seed", cfg.input_seed,
                    "seed for the random (x, direction) of concentration");
    sim->add_option("--affine-scale", cfg.affine_scale, "rescale codebook first");
    sim->add_option("--affine-center", cfg.affine_center,
                    "recenter codebook at (c, ..., c) first");
    add_output(sim);

    CLI::App* swp = app.add_subcommand("sweep-rr", "rate-reliability sweep over E");
    add_common_build(swp);
    swp->add_option("--E-grid", cfg.E_grid, "error exponents, comma separated")
        ->delimiter(',')
        ->required();
    swp->add_flag("--use-rotation", cfg.use_rotation, "expurgate after a Haar rotation");
    swp->add_option("--rotation-seed", cfg.rotation_seed, "rotation seed");
    add_output(swp);

    CLI::App* red = app.add_subcommand("reduce-demo",
                                       "Poisson to restricted-Bernoulli reduction demo");
    red->add_option("--A", cfg.A, "Poisson peak constraint (default 1)");
    red->add_option("--x", cfg.x_values, "input levels, comma separated")
        ->delimiter(',');
    red->add_option("--trials", cfg.trials, "trials per level (default 100000)");
    red->add_option("--trial-seed", cfg.trial_seed, "Monte Carlo seed");
    add_output(red);

    CLI::App* rep = app.add_subcommand("report", "rates and bound catalog for a codebook");
    rep->add_option("--in", cfg.in_path, "codebook file")->required();
    add_channel(rep);
    rep->add_option("--E", cfg.E, "error exponent for rate-reliability bounds");
    rep->add_flag("--use-rotation", cfg.use_rotation, "expurgate after a Haar rotation");
    rep->add_option("--rotation-seed", cfg.rotation_seed, "rotation seed");
    add_output(rep);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        return dispatch(cfg, out);
    } catch (const UsageError& ex) {
        err << "error: " << ex.what() << "\n";
        return 2;
    } catch (const PlacementExhausted& ex) {
        err << "placement failure: " << ex.what() << "\n";
        return 3;
    } catch (const RegimeViolation& ex) {
        err << "regime violation: " << ex.what() << "\n";
        return 4;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace diforge
