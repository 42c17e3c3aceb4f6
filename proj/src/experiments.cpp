#include "diforge/experiments.hpp"

#include "diforge/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace diforge {

namespace {

constexpr double kZeroFailureScale = 1e-8;

// Salt for per-trial draws that are not channel coordinates (pair picks).
constexpr std::uint64_t kAuxIndex = 0x8000000000000000ull;

} // namespace

ErrorEstimate make_estimate(long long failures, long long trials, double bound) {
    if (trials < 1) throw UsageError("estimate: trials must be >= 1");
    ErrorEstimate e;
    e.failures = failures;
    e.trials = trials;
    e.p_hat = static_cast<double>(failures) / static_cast<double>(trials);
    auto ci = clopper_pearson(failures, trials, 0.99);
    e.ci_lo = ci.lo;
    e.ci_hi = ci.hi;
    e.level = ci.level;
    e.bound = bound;
    e.zero_failure_regime = bound < kZeroFailureScale;
    e.consistent = e.p_hat <= bound || bound >= e.ci_lo;
    return e;
}

int worker_count() {
    if (const char* env = std::getenv("DI_FORGE_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Runs `per_trial(k, counts)` for k in [0, trials) across workers, strided.
// Every accumulator is per-worker; totals are worker-count invariant because
// trial k derives all randomness from (seed, k) alone.
template <typename PerTrial>
std::vector<long long> run_sharded(long long trials, int n_counters,
                                   PerTrial&& per_trial) {
    int workers = worker_count();
    if (trials < workers) workers = static_cast<int>(std::max<long long>(trials, 1));

    std::vector<std::vector<long long>> local(
        static_cast<std::size_t>(workers),
        std::vector<long long>(static_cast<std::size_t>(n_counters), 0));

    if (workers == 1) {
        for (long long k = 0; k < trials; ++k) per_trial(k, local[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                auto& counts = local[static_cast<std::size_t>(w)];
                for (long long k = w; k < trials; k += workers) per_trial(k, counts);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<long long> total(static_cast<std::size_t>(n_counters), 0);
    for (const auto& l : local) {
        for (int c = 0; c < n_counters; ++c) {
            total[static_cast<std::size_t>(c)] += l[static_cast<std::size_t>(c)];
        }
    }
    return total;
}

} // namespace

std::vector<ErrorEstimate> concentration_experiment_multi(
    const ChannelModel& ch, const Vec& x, const Vec& direction,
    const std::vector<double>& ts, long long trials, std::uint64_t seed) {
    if (trials < 1) throw UsageError("concentration: trials must be >= 1");
    if (ts.empty()) throw UsageError("concentration: need at least one threshold");
    if (x.size() != direction.size()) {
        throw DimMismatch("concentration: x and direction dimensions differ");
    }
    InputBox box = ch.input_box();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < box.lo || x[i] > box.hi) {
            throw InputOutOfBox("concentration: x outside the channel input box");
        }
    }
    double dn = norm(direction);
    if (dn == 0.0) throw ZeroDirection("concentration: zero direction");

    const std::size_t n = x.size();
    Vec e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = direction[i] / dn;

    // <z, e> = <y, e> - <x, e>; only the y term varies per trial.
    double xe = dot(x, e);

    // Per-coordinate randomness is counter-based: coordinate i of trial k
    // hashes (trial_key ^ coord_mix[i]). The Bernoulli branch consumes the
    // hash directly as its uniform, which leaves no dependency between loop
    // iterations; the Poisson branch seeds a short Stream from it because a
    // Poisson draw consumes a variable number of uniforms.
    std::vector<std::uint64_t> coord_mix(n);
    for (std::size_t i = 0; i < n; ++i) {
        coord_mix[i] = detail::mix64(static_cast<std::uint64_t>(i) + detail::kGolden);
    }

    const auto nt = static_cast<int>(ts.size());
    std::vector<long long> counts;

    if (ch.kind == ChannelKind::Poisson) {
        std::vector<PoissonSampler> samplers;
        samplers.reserve(n);
        for (std::size_t i = 0; i < n; ++i) samplers.emplace_back(x[i]);
        bool one_uniform_each = true;
        for (const auto& s : samplers) {
            if (!s.single_uniform()) one_uniform_each = false;
        }
        const std::uint64_t* cm = coord_mix.data();
        const PoissonSampler* sp = samplers.data();
        if (one_uniform_each) {
            counts = run_sharded(trials, nt, [&](long long k, std::vector<long long>& c) {
                std::uint64_t trial_key = stream_key(seed, static_cast<std::uint64_t>(k));
                double ye = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double u = static_cast<double>(
                                   detail::mix64(trial_key ^ cm[i]) >> 11) * 0x1.0p-53;
                    ye += static_cast<double>(sp[i].draw_from_unit(u)) * e[i];
                }
                double proj = std::fabs(ye - xe);
                for (int t = 0; t < nt; ++t) {
                    if (proj > ts[static_cast<std::size_t>(t)]) {
                        ++c[static_cast<std::size_t>(t)];
                    }
                }
            });
        } else {
            counts = run_sharded(trials, nt, [&](long long k, std::vector<long long>& c) {
                std::uint64_t trial_key = stream_key(seed, static_cast<std::uint64_t>(k));
                double ye = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    Stream s(trial_key ^ cm[i]);
                    ye += static_cast<double>(sp[i].draw(s)) * e[i];
                }
                double proj = std::fabs(ye - xe);
                for (int t = 0; t < nt; ++t) {
                    if (proj > ts[static_cast<std::size_t>(t)]) {
                        ++c[static_cast<std::size_t>(t)];
                    }
                }
            });
        }
    } else {
        std::vector<std::uint64_t> thresholds(n);
        for (std::size_t i = 0; i < n; ++i) thresholds[i] = bernoulli_threshold(x[i]);
        std::vector<std::uint64_t> e_bits(n);
        for (std::size_t i = 0; i < n; ++i) e_bits[i] = std::bit_cast<std::uint64_t>(e[i]);
        const std::uint64_t* cm = coord_mix.data();
        const std::uint64_t* th = thresholds.data();
        const std::uint64_t* eb = e_bits.data();
        counts = run_sharded(trials, nt, [&](long long k, std::vector<long long>& c) {
            std::uint64_t trial_key = stream_key(seed, static_cast<std::uint64_t>(k));
            // Branchless select (mask the bit pattern, add +0.0 on miss) and
            // four independent partial sums; a data-dependent branch or a
            // single accumulator would serialize this loop.
            double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
            std::size_t i = 0;
            for (; i + 4 <= n; i += 4) {
                std::uint64_t m0 = -static_cast<std::uint64_t>(
                    detail::mix64(trial_key ^ cm[i]) < th[i]);
                std::uint64_t m1 = -static_cast<std::uint64_t>(
                    detail::mix64(trial_key ^ cm[i + 1]) < th[i + 1]);
                std::uint64_t m2 = -static_cast<std::uint64_t>(
                    detail::mix64(trial_key ^ cm[i + 2]) < th[i + 2]);
                std::uint64_t m3 = -static_cast<std::uint64_t>(
                    detail::mix64(trial_key ^ cm[i + 3]) < th[i + 3]);
                s0 += std::bit_cast<double>(m0 & eb[i]);
                s1 += std::bit_cast<double>(m1 & eb[i + 1]);
                s2 += std::bit_cast<double>(m2 & eb[i + 2]);
                s3 += std::bit_cast<double>(m3 & eb[i + 3]);
            }
            for (; i < n; ++i) {
                std::uint64_t m = -static_cast<std::uint64_t>(
                    detail::mix64(trial_key ^ cm[i]) < th[i]);
                s0 += std::bit_cast<double>(m & eb[i]);
            }
            double proj = std::fabs(((s0 + s1) + (s2 + s3)) - xe);
            for (int t = 0; t < nt; ++t) {
                if (proj > ts[static_cast<std::size_t>(t)]) {
                    ++c[static_cast<std::size_t>(t)];
                }
            }
        });
    }

    std::vector<ErrorEstimate> out;
    out.reserve(ts.size());
    for (int t = 0; t < nt; ++t) {
        double bound = ch.kind == ChannelKind::Poisson
                           ? poisson_tail_bound(ts[static_cast<std::size_t>(t)], ch.A)
                           : bernoulli_tail_bound(ts[static_cast<std::size_t>(t)]);
        out.push_back(
            make_estimate(counts[static_cast<std::size_t>(t)], trials, bound));
    }
    return out;
}

ErrorEstimate concentration_experiment(const ChannelModel& ch, const Vec& x,
                                       const Vec& direction, double t,
                                       long long trials, std::uint64_t seed) {
    return concentration_experiment_multi(ch, x, direction, {t}, trials, seed)[0];
}

double per_layer_lambda(const ChannelModel& ch, const DecoderParams& params, int n,
                        int L) {
    (void)L;
    switch (params.mode) {
        case DecoderMode::Poisson:
            if (ch.kind == ChannelKind::Poisson) {
                return std::exp(1.5 * ch.A * (1.5 - std::log(static_cast<double>(n))));
            }
            return bernoulli_tail_bound(params.t);
        case DecoderMode::RateReliability: {
            double E = params.t * params.t / static_cast<double>(n);
            return std::exp2(-static_cast<double>(n) * E);
        }
        default:
            return ch.kind == ChannelKind::Poisson
                       ? poisson_tail_bound(params.t, ch.A)
                       : bernoulli_tail_bound(params.t);
    }
}

ErrorEstimate estimate_missed_id(const PrimitiveCodebook& cb, const ChannelModel& ch,
                                 const DecoderParams& params,
                                 const std::vector<CodewordId>& ids, long long trials,
                                 std::uint64_t seed) {
    if (ids.empty()) throw EmptyCodebook("missed-id: no ids to sample");
    if (trials < 1) throw UsageError("missed-id: trials must be >= 1");

    InputBox box = ch.input_box();
    std::vector<Vec> words;
    words.reserve(ids.size());
    for (const auto& id : ids) {
        Vec w = codeword_vector(cb, id);
        if (!box.contains(w)) {
            throw InputOutOfBox("missed-id: codeword " + id.str() +
                                " outside the channel input box; expurgate first");
        }
        words.push_back(std::move(w));
    }

    auto counts = run_sharded(trials, 1, [&](long long k, std::vector<long long>& c) {
        const std::size_t pick = static_cast<std::size_t>(k) % ids.size();
        std::uint64_t trial_key = stream_key(seed, static_cast<std::uint64_t>(k));
        Vec y = transmit(ch, words[pick], trial_key);
        if (!identify(y, cb, ids[pick], params).accepted) ++c[0];
    });

    double lambda1 =
        static_cast<double>(cb.params.L) * per_layer_lambda(ch, params, cb.params.n,
                                                            cb.params.L);
    return make_estimate(counts[0], trials, lambda1);
}

ErrorEstimate estimate_false_id(const PrimitiveCodebook& cb, const ChannelModel& ch,
                                const DecoderParams& params,
                                const std::vector<CodewordId>& ids,
                                const FalseIdOptions& options, long long trials,
                                std::uint64_t seed) {
    if (ids.size() < 2) throw TooFewWords("false-id: need >= 2 ids");
    if (trials < 1) throw UsageError("false-id: trials must be >= 1");

    InputBox box = ch.input_box();
    std::vector<Vec> words;
    words.reserve(ids.size());
    for (const auto& id : ids) {
        Vec w = codeword_vector(cb, id);
        if (!box.contains(w)) {
            throw InputOutOfBox("false-id: codeword " + id.str() +
                                " outside the channel input box; expurgate first");
        }
        words.push_back(std::move(w));
    }

    std::size_t fixed_tested = 0, fixed_transmitted = 0;
    bool fixed_pair = options.sampling != PairSampling::Random;
    if (options.sampling == PairSampling::Explicit) {
        if (!options.pair) throw UsageError("false-id: explicit mode needs a pair");
        if (options.pair->first == options.pair->second) {
            throw SameIdPair("false-id: tested and transmitted ids coincide");
        }
        auto find = [&](const CodewordId& id) {
            for (std::size_t i = 0; i < ids.size(); ++i) {
                if (ids[i] == id) return i;
            }
            throw UnknownId("false-id: pair id " + id.str() + " not in the id set");
        };
        fixed_tested = find(options.pair->first);
        fixed_transmitted = find(options.pair->second);
    } else if (options.sampling == PairSampling::AdversarialMinSep) {
        auto sep = pairwise_projective_separation(cb, ids, std::nullopt);
        auto find = [&](const CodewordId& id) {
            for (std::size_t i = 0; i < ids.size(); ++i) {
                if (ids[i] == id) return i;
            }
            throw UnknownId("false-id: separation pair not in the id set");
        };
        fixed_tested = find(sep.tested);
        fixed_transmitted = find(sep.transmitted);
    }

    const auto n_ids = static_cast<std::uint64_t>(ids.size());
    auto counts = run_sharded(trials, 1, [&](long long k, std::vector<long long>& c) {
        std::uint64_t trial_key = stream_key(seed, static_cast<std::uint64_t>(k));
        std::size_t tested, transmitted;
        if (fixed_pair) {
            tested = fixed_tested;
            transmitted = fixed_transmitted;
        } else {
            Stream pick = stream_for(trial_key, kAuxIndex);
            tested = static_cast<std::size_t>(pick.next_u64() % n_ids);
            transmitted = static_cast<std::size_t>(pick.next_u64() % (n_ids - 1));
            if (transmitted >= tested) ++transmitted;
        }
        Vec y = transmit(ch, words[transmitted], trial_key);
        if (identify(y, cb, ids[tested], params).accepted) ++c[0];
    });

    double lambda2 = per_layer_lambda(ch, params, cb.params.n, cb.params.L);
    return make_estimate(counts[0], trials, lambda2);
}

RateReport rate_report(const PrimitiveCodebook& cb, const ExpurgationReport& expurgation,
                       std::optional<double> E) {
    if (expurgation.retained < 1) throw EmptyCodebook("rate report: nothing retained");
    const auto& p = cb.params;

    RateReport rep;
    rep.n = p.n;
    rep.L = p.L;
    rep.N_retained = expurgation.retained;
    rep.linear_rate =
        std::log2(static_cast<double>(expurgation.retained)) / static_cast<double>(p.n);
    rep.linearithmic_rate =
        rep.linear_rate / std::log2(static_cast<double>(p.n));
    for (int l = 1; l <= p.L; ++l) {
        rep.theoretical_primitive_log2N +=
            (static_cast<double>(p.n - l + 1) / 2.0) *
            std::log2(2.0 * p.radii[static_cast<std::size_t>(l - 1)] / p.min_proj_dist);
    }
    if (E) {
        rep.rr_lower_bound = rr_lower_bound_bits(p.n, p.L, p.delta, *E);
        rep.rr_upper_bound = rr_converse_bound_bits(*E);
    }
    return rep;
}

ReductionCheck reduction_check(double A, double x, long long trials,
                               std::uint64_t seed) {
    if (!(A > 0.0)) throw UsageError("reduction: A must be positive");
    if (x < 0.0 || x > A) throw InputOutOfBox("reduction: x outside [0, A]");
    if (trials < 1) throw UsageError("reduction: trials must be >= 1");

    ReductionSpec spec = poisson_to_bernoulli_reduction(A);
    PoissonSampler sampler(x);
    double p0 = spec.induced_param(x);
    std::uint64_t thr = bernoulli_threshold(p0);

    auto counts = run_sharded(trials, 2, [&](long long k, std::vector<long long>& c) {
        std::uint64_t trial_key = stream_key(seed, static_cast<std::uint64_t>(k));
        Stream pois = stream_for(trial_key, 0);
        Stream bern = stream_for(trial_key, 1);
        long raw = sampler.draw(pois);
        if (spec.post_process(static_cast<double>(raw)) == 1.0) ++c[0];
        if (draw_bernoulli(thr, bern)) ++c[1];
    });

    ReductionCheck out;
    out.x = x;
    out.p0 = p0;
    out.trials = trials;
    out.pipeline_ones = counts[0];
    out.direct_ones = counts[1];
    out.pipeline_pvalue = binomial_two_sided_pvalue(counts[0], trials, p0);
    out.direct_pvalue = binomial_two_sided_pvalue(counts[1], trials, p0);
    return out;
}

RrBuild rr_build(int n, int L, double delta, double E, std::vector<int> branching,
                 std::uint64_t seed, std::optional<double> gen_separation) {
    if (!(E > 0.0)) throw UsageError("rr_build: E must be positive");
    if (E >= rr_regime_limit(n, delta)) {
        throw RegimeViolation("rr_build: E = " + std::to_string(E) +
                              " is not below 1/(delta ln n) = " +
                              std::to_string(rr_regime_limit(n, delta)));
    }
    RrBuild out;
    out.catalog = rr_catalog(n, L, delta, E);

    CodebookParams p;
    p.n = n;
    p.L = L;
    p.delta = delta;
    p.radii = out.catalog.radii;
    p.min_proj_dist = gen_separation.value_or(out.catalog.d);
    p.branching = std::move(branching);
    p.seed = seed;
    p.mode = BuildMode::RateReliability;
    out.codebook = build_primitive(p);
    return out;
}

} // namespace diforge
