#include "veilaudit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace veilaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double percentile(std::vector<double> v, double q) {
    if (v.empty()) throw EmptySamples{};
    std::sort(v.begin(), v.end());
    // nearest-rank
    std::size_t idx = static_cast<std::size_t>(std::ceil(q * v.size()));
    if (idx == 0) idx = 1;
    return v[std::min(idx - 1, v.size() - 1)];
}

}  // namespace

BootstrapCi bootstrap_ci(const std::vector<double>& samples, std::uint32_t resamples,
                         std::uint64_t seed) {
    if (samples.empty()) throw EmptySamples{};
    BootstrapCi ci;
    ci.n = samples.size();
    ci.resamples = resamples;
    double sum = 0;
    for (double s : samples) sum += s;
    ci.mean = sum / samples.size();

    const std::size_t n = samples.size();
    double var = 0;
    for (double s : samples) var += (s - ci.mean) * (s - ci.mean);
    double se = n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
    if (se == 0.0) {
        ci.lo = ci.hi = ci.mean;
        return ci;
    }

    // studentized (bootstrap-t) interval: percentile intervals undercover
    // badly for small n, which the coverage tests exercise directly
    SeededRng rng(seed, "bootstrap");
    std::vector<double> pivots;
    pivots.reserve(resamples);
    std::vector<double> draw(n);
    for (std::uint32_t r = 0; r < resamples; ++r) {
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            draw[i] = samples[rng.uniform(n)];
            acc += draw[i];
        }
        double m = acc / n, v = 0;
        for (double d : draw) v += (d - m) * (d - m);
        double s = n > 1 ? std::sqrt(v / (n - 1) / n) : 0.0;
        pivots.push_back(s == 0.0 ? 0.0 : (m - ci.mean) / s);
    }
    ci.lo = ci.mean - percentile(pivots, 0.975) * se;
    ci.hi = ci.mean - percentile(pivots, 0.025) * se;
    return ci;
}

std::unique_ptr<Scenario> build_scenario(const WorkloadSpec& spec) {
    if (spec.latent_users == 0 || spec.total_tags == 0)
        throw BadConfig("workload needs users and tags");
    SeededRng rng(spec.seed, "scenario");
    auto env_rng = rng.fork("env");
    auto workload_rng = rng.fork("workload");

    EnvConfig cfg;  // two chains, 500 ms cadence, depth-1 bridge
    auto scenario = std::make_unique<Scenario>(Scenario{make_env(cfg, env_rng),
                                                        GroundTruth{},
                                                        {},
                                                        {},
                                                        spec.seed});
    auto user_rng = rng.fork("users");
    scenario->users.reserve(spec.latent_users);
    for (std::size_t i = 0; i < spec.latent_users; ++i) {
        scenario->users.push_back(MasterIdentity::generate(user_rng));
        for (auto& [cid, chain] : scenario->env.chains)
            chain.mint(scenario->users.back().funding_addr, 1'000'000'000);
    }

    for (std::size_t i = 0; i < spec.total_tags; ++i) {
        std::uint32_t sender = static_cast<std::uint32_t>(workload_rng.uniform(spec.latent_users));
        std::uint32_t receiver =
            static_cast<std::uint32_t>(workload_rng.uniform(spec.latent_users));
        TransferOutcome outcome =
            run_transfer(scenario->env, scenario->users[sender], scenario->users[receiver],
                         "src", "dst", 10, workload_rng);
        if (!outcome.append.ok()) throw Error("honest transfer rejected by ledger");
        scenario->truth.owner_a[outcome.append.key] = sender;
        scenario->truth.owner_b[outcome.append.key] = receiver;
        scenario->tag_commit_ms.push_back(outcome.tag_commit_ms);

        if (spec.pattern == WorkloadPattern::EscrowSettlement) {
            // Settlement leg: receiver routes the funds through the dst escrow
            // to a fresh session address after multi-party agreement.
            aip_run(scenario->users[receiver], scenario->env, "dst", 10, workload_rng);
        }
    }
    return scenario;
}

namespace {

WorkloadSpec regime_spec(AolRegime regime, std::uint64_t seed) {
    WorkloadSpec spec;
    spec.total_tags = regime == AolRegime::Low ? 10000 : 30000;
    spec.latent_users = regime == AolRegime::Low ? 2500 : 7500;
    spec.mean_tags_per_user = 4.0;
    spec.seed = seed;
    return spec;
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view label, std::uint64_t i) {
    Bytes b(label.begin(), label.end());
    for (int k = 0; k < 8; ++k) b.push_back(static_cast<std::uint8_t>(seed >> (8 * k)));
    for (int k = 0; k < 8; ++k) b.push_back(static_cast<std::uint8_t>(i >> (8 * k)));
    auto d = digest32(domains::kGlobal, b);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= std::uint64_t(d[k]) << (8 * k);
    return v;
}

}  // namespace

std::vector<AolPointReport> run_aol_sweep(AolRegime regime, const std::vector<double>& p_values,
                                          std::uint32_t repeats, std::uint32_t warmup,
                                          std::uint64_t seed) {
    if (repeats < 1) throw BadConfig("repeats must be >= 1");
    for (double p : p_values)
        if (!(p > 0.0) || p > 1.0) throw BadConfig("p values must be in (0, 1]");
    if (p_values.empty()) throw BadConfig("no p values");

    struct PerP {
        std::vector<double> ari, nmi, wall_ms, pairs_per_s;
        std::uint64_t n_pairs = 0;
    };
    std::vector<PerP> acc(p_values.size());

    // The corpus does not depend on p, so each repeat's scenario is shared
    // across the sweep.
    for (std::uint32_t rep = 0; rep < warmup + repeats; ++rep) {
        WorkloadSpec spec = regime_spec(regime, mix_seed(seed, "aol-rep", rep));
        auto scenario = build_scenario(spec);
        bool is_warmup = rep < warmup;
        for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
            SeededRng sample_rng(mix_seed(spec.seed, "visible", pi), "sample");
            VisibleSet visible = sample_visible(scenario->env.ledger, p_values[pi], sample_rng);
            ClusterReport report =
                cluster(visible, scenario->env.et.ask, scenario->truth, Party::A);
            if (is_warmup) continue;
            acc[pi].ari.push_back(report.ari);
            acc[pi].nmi.push_back(report.nmi);
            acc[pi].wall_ms.push_back(static_cast<double>(report.wall_ms));
            acc[pi].pairs_per_s.push_back(report.pairs_per_s);
            acc[pi].n_pairs = report.n_pairs_effective;
        }
    }

    WorkloadSpec echo = regime_spec(regime, seed);
    std::vector<AolPointReport> out;
    for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
        AolPointReport pr;
        pr.p = p_values[pi];
        pr.regime = regime;
        pr.report.label = regime == AolRegime::Low ? "low" : "high";
        pr.report.config = {
            {"B", std::to_string(echo.total_tags)},
            {"S", std::to_string(echo.latent_users)},
            {"k_bar", fmt(echo.mean_tags_per_user)},
            {"p", fmt(p_values[pi])},
            {"repeats", std::to_string(repeats)},
            {"warmup", std::to_string(warmup)},
            {"seed", std::to_string(seed)},
        };
        pr.report.metrics["ari"] = bootstrap_ci(acc[pi].ari, 1000, mix_seed(seed, "ci-ari", pi));
        pr.report.metrics["nmi"] = bootstrap_ci(acc[pi].nmi, 1000, mix_seed(seed, "ci-nmi", pi));
        pr.report.raw["ari"] = acc[pi].ari;
        pr.report.raw["nmi"] = acc[pi].nmi;
        pr.report.config["n_pairs_effective"] = std::to_string(acc[pi].n_pairs);
        double wall_sum = 0, pps_sum = 0;
        for (double w : acc[pi].wall_ms) wall_sum += w;
        for (double w : acc[pi].pairs_per_s) pps_sum += w;
        pr.report.timings["wall_ms_mean"] = wall_sum / acc[pi].wall_ms.size();
        pr.report.timings["pairs_per_s_mean"] = pps_sum / acc[pi].pairs_per_s.size();
        out.push_back(std::move(pr));
    }
    return out;
}

std::vector<LatencyPointReport> run_latency_bench(RecordMode mode,
                                                  const std::vector<double>& qps_values,
                                                  std::uint32_t n_senders,
                                                  std::uint64_t block_ms,
                                                  std::uint32_t duration_s, std::uint64_t seed) {
    if (qps_values.empty()) throw BadConfig("no qps values");
    if (block_ms == 0) throw BadConfig("block interval must be positive");
    if (duration_s == 0) throw BadConfig("duration must be positive");
    if (n_senders == 0) throw BadConfig("need at least one sender");

    std::vector<LatencyPointReport> out;
    for (double qps : qps_values) {
        if (!(qps > 0.0)) throw BadConfig("qps must be positive");
        SeededRng rng(mix_seed(seed, "latency", static_cast<std::uint64_t>(qps * 1000)), "lat");

        SimChain chain("l1", block_ms, 1);
        std::vector<Address> senders(n_senders);
        for (std::uint32_t i = 0; i < n_senders; ++i) {
            senders[i] = derive_address(mul_base(rng.nonzero_scalar()));
            chain.mint(senders[i], 1'000'000'000);
        }

        // Open loop at fixed aggregate rate, round-robin across senders, with
        // uniform jitter inside each inter-arrival slot.
        const std::uint64_t total = static_cast<std::uint64_t>(std::llround(duration_s * qps));
        const double interval = 1000.0 / qps;
        std::map<Hash32, std::uint64_t> submit_ms;
        std::map<Hash32, Bytes> store;  // store-mode persistence
        for (std::uint64_t i = 0; i < total; ++i) {
            double t = i * interval + rng.uniform_real() * interval;
            std::uint64_t at = static_cast<std::uint64_t>(t);
            Transaction tx;
            tx.sender = senders[i % n_senders];
            tx.dest = senders[(i + 1) % n_senders];
            tx.amount = 1;
            tx.nonce = rng.next_u64();
            if (mode == RecordMode::Store) tx.payload = rng.bytes(64);
            Hash32 txid = chain.submit_tx(tx, at);
            submit_ms[txid] = at;
            if (mode == RecordMode::Store) store[txid] = tx.payload;
        }
        chain.produce_until(static_cast<std::uint64_t>(duration_s) * 1000 + 2 * block_ms);

        std::vector<double> latencies;
        std::uint64_t included = 0;
        for (const auto& [txid, at] : submit_ms) {
            const TxRecord* rec = chain.find_tx(txid);
            if (!rec || !rec->included) continue;
            ++included;
            latencies.push_back(static_cast<double>(rec->inclusion_ms - at));
        }

        LatencyPointReport pr;
        pr.qps = qps;
        pr.mode = mode;
        pr.report.label = mode == RecordMode::Emit ? "emit" : "store";
        pr.report.config = {
            {"qps", fmt(qps)},
            {"n_senders", std::to_string(n_senders)},
            {"block_ms", std::to_string(block_ms)},
            {"duration_s", std::to_string(duration_s)},
            {"sent", std::to_string(total)},
            {"seed", std::to_string(seed)},
        };
        pr.report.p50_ms = percentile(latencies, 0.50);
        pr.report.p95_ms = percentile(latencies, 0.95);
        pr.report.tps_realized = static_cast<double>(included) / duration_s;
        pr.report.raw["latency_ms"] = latencies;
        out.push_back(std::move(pr));
    }
    return out;
}

std::vector<DepthPointReport> run_depth_sweep(const std::vector<std::uint32_t>& depths,
                                              std::uint64_t seed) {
    if (depths.empty()) throw BadConfig("no depths");
    for (auto d : depths)
        if (d < 1 || d > 64) throw BadConfig("depth must be in [1, 64]");

    constexpr std::size_t kTransfers = 24;
    constexpr std::size_t kUsers = 8;

    std::vector<DepthPointReport> out;
    for (auto depth : depths) {
        SeededRng rng(mix_seed(seed, "depth", depth), "depth");
        auto env_rng = rng.fork("env");
        EnvConfig cfg;
        cfg.bridge_depth = depth;
        SimEnv env = make_env(cfg, env_rng);

        auto user_rng = rng.fork("users");
        std::vector<MasterIdentity> users;
        for (std::size_t i = 0; i < kUsers; ++i) {
            users.push_back(MasterIdentity::generate(user_rng));
            for (auto& [cid, chain] : env.chains) chain.mint(users.back().funding_addr, 1'000'000);
        }

        std::vector<double> latencies;
        std::vector<std::size_t> handles;
        auto wl_rng = rng.fork("workload");
        for (std::size_t i = 0; i < kTransfers; ++i) {
            const auto& a = users[wl_rng.uniform(kUsers)];
            const auto& b = users[wl_rng.uniform(kUsers)];
            TransferOutcome res = run_transfer(env, a, b, "src", "dst", 5, wl_rng);
            if (!res.append.ok()) throw Error("honest transfer rejected in depth sweep");
            latencies.push_back(static_cast<double>(res.tag_commit_ms - res.src_commit_ms));
            handles.push_back(res.msg_handle);
        }

        DepthPointReport pr;
        pr.depth = depth;
        pr.report.label = "depth-" + std::to_string(depth);
        pr.report.config = {{"depth", std::to_string(depth)},
                            {"transfers", std::to_string(kTransfers)},
                            {"seed", std::to_string(seed)}};
        pr.report.metrics["latency_ms"] =
            bootstrap_ci(latencies, 1000, mix_seed(seed, "ci-depth", depth));
        pr.report.raw["latency_ms"] = latencies;

        // Replay battery at this depth: redundant relays and verbatim tag
        // resubmission, including across a simulated reorg-resubmission.
        for (std::size_t h : handles) {
            ++pr.replay_attempts;
            if (env.bridge.redeliver(h, env.chains, env.now_ms)) ++pr.replay_accepted;
        }
        for (const auto& key : env.ledger.keys()) {
            ++pr.replay_attempts;
            if (env.ledger.append(*env.ledger.find(key)).ok()) ++pr.replay_accepted;
        }
        out.push_back(std::move(pr));
    }
    return out;
}

// --- report serialization ----------------------------------------------------

std::string reports_to_csv(const std::vector<AolPointReport>& reports) {
    std::ostringstream os;
    os << "regime,p,B,S,k_bar,seed,repeats,ari_mean,ari_lo,ari_hi,nmi_mean,nmi_lo,nmi_hi,"
          "n_pairs_effective\n";
    for (const auto& r : reports) {
        const auto& ari = r.report.metrics.at("ari");
        const auto& nmi = r.report.metrics.at("nmi");
        os << r.report.label << ',' << fmt(r.p) << ',' << r.report.config.at("B") << ','
           << r.report.config.at("S") << ',' << r.report.config.at("k_bar") << ','
           << r.report.config.at("seed") << ',' << r.report.config.at("repeats") << ','
           << fmt(ari.mean) << ',' << fmt(ari.lo) << ',' << fmt(ari.hi) << ',' << fmt(nmi.mean)
           << ',' << fmt(nmi.lo) << ',' << fmt(nmi.hi) << ','
           << r.report.config.at("n_pairs_effective") << "\n";
    }
    return os.str();
}

std::string reports_to_csv(const std::vector<LatencyPointReport>& reports) {
    std::ostringstream os;
    os << "mode,qps,n_senders,block_ms,duration_s,sent,p50_ms,p95_ms,tps_realized\n";
    for (const auto& r : reports) {
        os << r.report.label << ',' << fmt(r.qps) << ',' << r.report.config.at("n_senders") << ','
           << r.report.config.at("block_ms") << ',' << r.report.config.at("duration_s") << ','
           << r.report.config.at("sent") << ',' << fmt(r.report.p50_ms) << ','
           << fmt(r.report.p95_ms) << ',' << fmt(r.report.tps_realized) << "\n";
    }
    return os.str();
}

std::string reports_to_csv(const std::vector<DepthPointReport>& reports) {
    std::ostringstream os;
    os << "depth,latency_ms_mean,latency_ms_lo,latency_ms_hi,replay_attempts,replay_accepted\n";
    for (const auto& r : reports) {
        const auto& lat = r.report.metrics.at("latency_ms");
        os << r.depth << ',' << fmt(lat.mean) << ',' << fmt(lat.lo) << ',' << fmt(lat.hi) << ','
           << r.replay_attempts << ',' << r.replay_accepted << "\n";
    }
    return os.str();
}

namespace {

ordered_json ci_json(const BootstrapCi& ci) {
    return ordered_json{{"mean", ci.mean}, {"lo", ci.lo}, {"hi", ci.hi},
                        {"n", ci.n},       {"resamples", ci.resamples}};
}

ordered_json base_json(const RunReport& r) {
    ordered_json j;
    j["label"] = r.label;
    j["config"] = r.config;
    for (const auto& [name, ci] : r.metrics) j["metrics"][name] = ci_json(ci);
    for (const auto& [name, samples] : r.raw) j["raw"][name] = samples;
    return j;
}

}  // namespace

std::string report_json(const std::vector<AolPointReport>& reports, std::uint64_t seed) {
    ordered_json j;
    j["verb"] = "aol-sweep";
    j["seed"] = seed;
    j["points"] = ordered_json::array();
    for (const auto& r : reports) {
        auto pj = base_json(r.report);
        pj["p"] = r.p;
        j["points"].push_back(std::move(pj));
    }
    return j.dump(2) + "\n";
}

std::string report_json(const std::vector<LatencyPointReport>& reports, std::uint64_t seed) {
    ordered_json j;
    j["verb"] = "latency-bench";
    j["seed"] = seed;
    j["points"] = ordered_json::array();
    for (const auto& r : reports) {
        auto pj = base_json(r.report);
        pj["qps"] = r.qps;
        pj["p50_ms"] = r.report.p50_ms;
        pj["p95_ms"] = r.report.p95_ms;
        pj["tps_realized"] = r.report.tps_realized;
        pj.erase("raw");  // latency raw vectors are large; CSV carries the summary
        j["points"].push_back(std::move(pj));
    }
    return j.dump(2) + "\n";
}

std::string report_json(const std::vector<DepthPointReport>& reports, std::uint64_t seed) {
    ordered_json j;
    j["verb"] = "depth-sweep";
    j["seed"] = seed;
    j["points"] = ordered_json::array();
    for (const auto& r : reports) {
        auto pj = base_json(r.report);
        pj["depth"] = r.depth;
        pj["replay_attempts"] = r.replay_attempts;
        pj["replay_accepted"] = r.replay_accepted;
        j["points"].push_back(std::move(pj));
    }
    return j.dump(2) + "\n";
}

std::string timing_csv(const std::vector<AolPointReport>& reports) {
    std::ostringstream os;
    os << "regime,p,wall_ms_mean,pairs_per_s_mean\n";
    for (const auto& r : reports) {
        os << r.report.label << ',' << fmt(r.p) << ','
           << fmt(r.report.timings.at("wall_ms_mean")) << ','
           << fmt(r.report.timings.at("pairs_per_s_mean")) << "\n";
    }
    return os.str();
}

}  // namespace veilaudit
