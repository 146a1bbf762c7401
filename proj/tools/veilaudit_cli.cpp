// Command-line driver: visibility sweeps, latency/throughput benches,
// confirmation-depth sweeps, a threshold-revelation demo, ledger
// verification, and the adversarial test battery.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "veilaudit/adversary.hpp"

namespace fs = std::filesystem;
using namespace veilaudit;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string hex(std::span<const std::uint8_t> b) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (auto v : b) {
        s += digits[v >> 4];
        s += digits[v & 15];
    }
    return s;
}

Bytes unhex(const std::string& s) {
    if (s.size() % 2) throw std::runtime_error("odd-length hex string");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::runtime_error("bad hex digit");
    };
    Bytes out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nib(s[2 * i]) << 4 | nib(s[2 * i + 1]));
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << content;
}

ordered_json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return ordered_json::parse(is);
}

// Config-file fallback: the file value applies only when the flag was not
// passed on the command line.
template <typename T>
void apply_config(const ordered_json& cfg, const CLI::Option* opt, const char* key, T& value) {
    if (opt->count() == 0 && cfg.contains(key)) value = cfg.at(key).get<T>();
}

int fail_assert(const std::string& what) {
    std::cerr << "ASSERT FAILED: " << what << "\n";
    return 2;
}

struct DemoCorpus {
    SimEnv env;
    std::vector<MasterIdentity> users;
    std::vector<std::uint32_t> owners;  // per committed tag, ledger order
};

DemoCorpus make_demo_corpus(const EnvConfig& cfg, std::size_t n_users, std::size_t n_transfers,
                            SeededRng& rng) {
    auto env_rng = rng.fork("env");
    DemoCorpus demo{make_env(cfg, env_rng), {}, {}};
    auto user_rng = rng.fork("users");
    for (std::size_t i = 0; i < n_users; ++i) {
        demo.users.push_back(MasterIdentity::generate(user_rng));
        for (auto& [cid, chain] : demo.env.chains)
            chain.mint(demo.users.back().funding_addr, 1'000'000);
    }
    auto wl_rng = rng.fork("workload");
    for (std::size_t i = 0; i < n_transfers; ++i) {
        std::uint32_t a = static_cast<std::uint32_t>(i % n_users);
        std::uint32_t b = static_cast<std::uint32_t>((i + 1) % n_users);
        auto res = run_transfer(demo.env, demo.users[a], demo.users[b], "src", "dst", 5, wl_rng);
        if (!res.append.ok()) throw std::runtime_error("demo transfer rejected");
        demo.owners.push_back(a);
    }
    return demo;
}

ordered_json context_json(const LedgerContext& ctx) {
    ordered_json j;
    j["t_relay"] = ctx.t_relay;
    j["relayer_publics"] = ordered_json::array();
    for (const auto& pk : ctx.relayer_publics) j["relayer_publics"].push_back(hex(pk.encode()));
    j["tpk"] = hex(ctx.tpk.encode());
    j["apk"] = hex(ctx.apk.encode());
    return j;
}

}  // namespace

static int cmd_aol_sweep(std::uint64_t seed, const std::string& out, bool do_assert,
                         const std::string& regime, const std::vector<double>& p_values,
                         std::uint32_t repeats, std::uint32_t warmup) {
    AolRegime r = regime == "high" ? AolRegime::High : AolRegime::Low;
    auto reports = run_aol_sweep(r, p_values, repeats, warmup, seed);
    fs::path dir(out);
    write_file(dir / ("aol_sweep_" + regime + ".csv"), reports_to_csv(reports));
    write_file(dir / ("aol_sweep_" + regime + ".json"), report_json(reports, seed));
    write_file(dir / ("aol_sweep_" + regime + ".timing.csv"), timing_csv(reports));
    {
        std::string plot = "x,mean,lo,hi\n";
        for (const auto& rep : reports) {
            const auto& ci = rep.report.metrics.at("ari");
            char buf[128];
            std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f\n", rep.p, ci.mean, ci.lo, ci.hi);
            plot += buf;
        }
        write_file(dir / ("aol_sweep_" + regime + ".plot.csv"), plot);
    }
    for (const auto& rep : reports) {
        const auto& ari = rep.report.metrics.at("ari");
        const auto& nmi = rep.report.metrics.at("nmi");
        std::cout << "aol " << regime << " p=" << rep.p << " ari=" << ari.mean
                  << " nmi=" << nmi.mean << "\n";
        if (!do_assert) continue;
        if (rep.p >= 0.6 && (ari.mean < 0.95 || nmi.mean < 0.97))
            return fail_assert("clustering scores below floor at p=" + std::to_string(rep.p));
        if (rep.p >= 0.9 && ari.mean < 0.999)
            return fail_assert("ari < 0.999 at p=" + std::to_string(rep.p));
        if (rep.p == 1.0 && (ari.mean != 1.0 || nmi.mean != 1.0))
            return fail_assert("scores not exactly 1.0 at full visibility");
    }
    return 0;
}

static int cmd_latency(std::uint64_t seed, const std::string& out, bool do_assert,
                       const std::string& mode, const std::vector<double>& qps,
                       std::uint64_t block_ms, std::uint32_t senders, std::uint32_t duration) {
    RecordMode m = mode == "store" ? RecordMode::Store : RecordMode::Emit;
    auto reports = run_latency_bench(m, qps, senders, block_ms, duration, seed);
    fs::path dir(out);
    write_file(dir / ("latency_" + mode + ".csv"), reports_to_csv(reports));
    write_file(dir / ("latency_" + mode + ".json"), report_json(reports, seed));
    for (const auto& rep : reports) {
        std::cout << "latency " << mode << " qps=" << rep.qps << " p50=" << rep.report.p50_ms
                  << " p95=" << rep.report.p95_ms << " tps=" << rep.report.tps_realized << "\n";
        if (!do_assert) continue;
        double T = static_cast<double>(block_ms);
        if (rep.report.p50_ms < 0.425 * T || rep.report.p50_ms > 0.575 * T)
            return fail_assert("p50 outside [0.425T, 0.575T]");
        if (rep.report.p95_ms < 0.85 * T || rep.report.p95_ms > 1.05 * T)
            return fail_assert("p95 outside [0.85T, 1.05T]");
        if (std::abs(rep.report.tps_realized - rep.qps) > 0.05 * rep.qps)
            return fail_assert("realized tps off by more than 5%");
    }
    return 0;
}

static int cmd_depth(std::uint64_t seed, const std::string& out, bool do_assert,
                     const std::vector<std::uint32_t>& depths) {
    auto reports = run_depth_sweep(depths, seed);
    fs::path dir(out);
    write_file(dir / "depth_sweep.csv", reports_to_csv(reports));
    write_file(dir / "depth_sweep.json", report_json(reports, seed));
    {
        std::string plot = "x,mean,lo,hi\n";
        for (const auto& rep : reports) {
            const auto& ci = rep.report.metrics.at("latency_ms");
            char buf[128];
            std::snprintf(buf, sizeof buf, "%u,%.6f,%.6f,%.6f\n", rep.depth, ci.mean, ci.lo,
                          ci.hi);
            plot += buf;
        }
        write_file(dir / "depth_sweep.plot.csv", plot);
    }
    for (const auto& rep : reports) {
        std::cout << "depth " << rep.depth
                  << " latency_ms=" << rep.report.metrics.at("latency_ms").mean << " replays "
                  << rep.replay_accepted << "/" << rep.replay_attempts << " accepted\n";
        if (do_assert && rep.replay_accepted != 0)
            return fail_assert("replay accepted at depth " + std::to_string(rep.depth));
    }
    return 0;
}

static int cmd_irp_demo(std::uint64_t seed, const std::string& out, bool do_assert,
                        std::uint32_t t, std::uint32_t n) {
    SeededRng rng(seed, "irp-demo");
    EnvConfig cfg;
    cfg.committee_t = t;
    cfg.committee_n = n;
    DemoCorpus demo = make_demo_corpus(cfg, 3, 6, rng);

    std::vector<Hash32> target;
    const auto& keys = demo.env.ledger.keys();
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (demo.owners[i] == 0) target.push_back(keys[i]);

    RevealCase rc;
    rc.case_id = Bytes{'d', 'e', 'm', 'o'};
    rc.tags = target;
    rc.cluster_evidence = LinkPseudonym{mul_base(demo.users[0].x)};
    for (std::uint32_t i = 1; i + 1 <= t; ++i) rc.approvals.insert(i);  // t-1 approvals

    auto irp_rng = rng.fork("irp");
    bool refused = !irp_run(rc, demo.env, irp_rng).has_value();

    rc.approvals.insert(t);  // now exactly t
    auto revealed = irp_run(rc, demo.env, irp_rng);
    bool exact = revealed && revealed->size() == 1 && revealed->front() == demo.users[0].pk_id;

    ordered_json j;
    j["verb"] = "irp-demo";
    j["seed"] = seed;
    j["t"] = t;
    j["n"] = n;
    j["case_tags"] = target.size();
    j["refused_below_threshold"] = refused;
    j["revealed_exact"] = exact;
    if (revealed) {
        j["revealed"] = ordered_json::array();
        for (const auto& pk : *revealed) j["revealed"].push_back(hex(pk.encode()));
    }
    fs::path dir(out);
    write_file(dir / "irp_demo.json", j.dump(2) + "\n");
    write_file(dir / "ledger.export", demo.env.ledger.export_lines());
    write_file(dir / "ledger.context.json", context_json(demo.env.ledger.context()).dump(2) + "\n");
    std::cout << "irp-demo t=" << t << " n=" << n << " refused_below_threshold=" << refused
              << " revealed_exact=" << exact << "\n";
    if (do_assert && !(refused && exact)) return fail_assert("irp demo expectations not met");
    return 0;
}

static int cmd_verify_ledger(const std::string& ledger_path, const std::string& context_path,
                             bool do_assert) {
    std::ifstream is(ledger_path);
    if (!is) {
        std::cerr << "cannot open " << ledger_path << "\n";
        return 1;
    }
    std::optional<LedgerContext> ctx;
    if (!context_path.empty()) {
        auto j = load_json(context_path);
        LedgerContext c;
        c.t_relay = j.at("t_relay").get<std::uint32_t>();
        for (const auto& h : j.at("relayer_publics"))
            c.relayer_publics.push_back(GroupElement::decode(unhex(h.get<std::string>())));
        c.tpk = GroupElement::decode(unhex(j.at("tpk").get<std::string>()));
        c.apk = GroupElement::decode(unhex(j.at("apk").get<std::string>()));
        ctx = std::move(c);
    }

    std::size_t n_tags = 0, n_reveals = 0, failures = 0;
    std::set<Hash32> seen_keys, seen_nullifiers;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.rfind("REVEAL ", 0) == 0) {
            ++n_reveals;
            continue;
        }
        if (line.rfind("ATAG ", 0) != 0) {
            std::cerr << "line " << lineno << ": unrecognized record\n";
            ++failures;
            continue;
        }
        try {
            Bytes enc = unhex(line.substr(5));
            AuditTag tag = AuditTag::deserialize(enc);
            if (tag.serialize() != enc) throw std::runtime_error("non-canonical encoding");
            Hash32 key = compute_dedup_key(tag.core.cid_dst, tag.core.txid_dst, tag.core.msg_id);
            if (!seen_keys.insert(key).second) throw std::runtime_error("duplicate dedup key");
            if (!seen_nullifiers.insert(tag.exec.nullifier).second)
                throw std::runtime_error("duplicate nullifier");
            Hash32 expect = compute_nullifier(tag.core.txid_src, tag.exec.bridge_nonce,
                                              tag.core.cid_src, tag.core.cid_dst);
            if (expect != tag.exec.nullifier) throw std::runtime_error("nullifier mismatch");
            if (ctx && !verify_tag(tag, *ctx)) throw std::runtime_error("tag verification failed");
            ++n_tags;
        } catch (const std::exception& e) {
            std::cerr << "line " << lineno << ": " << e.what() << "\n";
            ++failures;
        }
    }
    std::cout << "verified " << n_tags << " tags, " << n_reveals << " reveal records, "
              << failures << " failures" << (ctx ? " (full verification)" : " (structural only)")
              << "\n";
    if (failures != 0) return do_assert ? 2 : 1;
    return 0;
}

static int cmd_attack_suite(std::uint64_t seed, const std::string& out, bool do_assert,
                            const AttackSuiteConfig& cfg) {
    auto outcomes = run_attack_suite(cfg, seed);
    fs::path dir(out);
    write_file(dir / "attack_suite.csv", attacks_to_csv(outcomes));
    write_file(dir / "attack_suite.json", attacks_json(outcomes, seed));
    int rc = 0;
    for (const auto& o : outcomes) {
        std::cout << o.name << ": " << o.accepted << "/" << o.attempts << " accepted";
        for (const auto& [k, v] : o.stats) std::cout << ' ' << k << '=' << v;
        std::cout << "\n";
        if (!do_assert) continue;
        bool ok = true;
        if (o.name == "at-threshold-control")
            ok = o.accepted == o.attempts;
        else if (o.name == "aol-trapdoor")
            ok = o.stats.at("advantage") >= 0.48;
        else if (o.name.rfind("aol-", 0) == 0)
            ok = o.stats.at("advantage") <= 0.02;
        else if (o.name == "cluster-guessing")
            ok = o.stats.at("mean_ari_best") <= 0.02;
        else
            ok = o.accepted == 0;
        if (!ok) rc = fail_assert("attack expectation violated: " + o.name);
    }
    return rc;
}

int main(int argc, char** argv) {
    CLI::App app{"audit-ledger protocol bench and attack driver"};
    app.require_subcommand(1);
    app.fallthrough();  // --seed/--out/--config/--assert valid after the verb too

    std::uint64_t seed = 1;
    std::string out = ".";
    std::string config_path;
    bool do_assert = false;
    app.add_option("--seed", seed, "deterministic run seed")->capture_default_str();
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--config", config_path, "JSON config file (CLI flags take precedence)");
    app.add_flag("--assert", do_assert, "exit nonzero if acceptance expectations fail");

    // aol-sweep
    auto* aol = app.add_subcommand("aol-sweep", "visibility sweep with clustering scores");
    std::string regime = "low";
    std::vector<double> p_values = {0.6, 0.7, 0.8, 0.9, 1.0};
    std::uint32_t repeats = 5, warmup = 1;
    auto* o_regime = aol->add_option("--regime", regime, "low|high")->capture_default_str();
    auto* o_p = aol->add_option("--p", p_values, "visibility rates")->delimiter(',');
    auto* o_rep = aol->add_option("--repeats", repeats)->capture_default_str();
    auto* o_warm = aol->add_option("--warmup", warmup)->capture_default_str();

    // latency-bench
    auto* lat = app.add_subcommand("latency-bench", "open-loop inclusion-latency bench");
    std::string mode = "emit";
    std::vector<double> qps_values = {5, 10, 20, 40};
    std::uint64_t block_ms = 500;
    std::uint32_t senders = 10, duration = 30;
    auto* o_mode = lat->add_option("--mode", mode, "emit|store")->capture_default_str();
    auto* o_qps = lat->add_option("--qps", qps_values, "offered loads")->delimiter(',');
    auto* o_block = lat->add_option("--block-ms", block_ms)->capture_default_str();
    auto* o_send = lat->add_option("--senders", senders)->capture_default_str();
    auto* o_dur = lat->add_option("--duration", duration, "seconds")->capture_default_str();

    // depth-sweep
    auto* dep = app.add_subcommand("depth-sweep", "confirmation-depth latency/replay sweep");
    std::vector<std::uint32_t> depths = {1, 2, 4, 8};
    auto* o_depths = dep->add_option("--depths", depths)->delimiter(',');

    // irp-demo
    auto* irp = app.add_subcommand("irp-demo", "threshold revelation walk-through");
    std::uint32_t irp_t = 2, irp_n = 3;
    auto* o_t = irp->add_option("--t", irp_t, "committee threshold")->capture_default_str();
    auto* o_n = irp->add_option("--n", irp_n, "committee size")->capture_default_str();

    // verify-ledger
    auto* ver = app.add_subcommand("verify-ledger", "check an exported ledger stream");
    std::string ledger_path, context_path;
    ver->add_option("--ledger", ledger_path, "ledger export file")->required();
    ver->add_option("--context", context_path, "verification context JSON");

    // attack-suite
    auto* atk = app.add_subcommand("attack-suite", "adversarial battery");
    AttackSuiteConfig acfg;
    auto* o_forg = atk->add_option("--forgery-trials", acfg.forgery_trials)->capture_default_str();
    auto* o_repl = atk->add_option("--replay-trials", acfg.replay_trials)->capture_default_str();
    auto* o_aolt = atk->add_option("--aol-trials", acfg.aol_trials)->capture_default_str();
    auto* o_clus = atk->add_option("--cluster-trials", acfg.cluster_trials)->capture_default_str();
    auto* o_gues = atk->add_option("--reveal-guesses", acfg.reveal_guesses)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        ordered_json cfg = ordered_json::object();
        if (!config_path.empty()) cfg = load_json(config_path);
        if (cfg.contains("seed") && app.get_option("--seed")->count() == 0)
            seed = cfg.at("seed").get<std::uint64_t>();

        if (aol->parsed()) {
            apply_config(cfg, o_regime, "regime", regime);
            apply_config(cfg, o_p, "p", p_values);
            apply_config(cfg, o_rep, "repeats", repeats);
            apply_config(cfg, o_warm, "warmup", warmup);
            return cmd_aol_sweep(seed, out, do_assert, regime, p_values, repeats, warmup);
        }
        if (lat->parsed()) {
            apply_config(cfg, o_mode, "mode", mode);
            apply_config(cfg, o_qps, "qps", qps_values);
            apply_config(cfg, o_block, "block_ms", block_ms);
            apply_config(cfg, o_send, "senders", senders);
            apply_config(cfg, o_dur, "duration_s", duration);
            return cmd_latency(seed, out, do_assert, mode, qps_values, block_ms, senders,
                               duration);
        }
        if (dep->parsed()) {
            apply_config(cfg, o_depths, "depths", depths);
            return cmd_depth(seed, out, do_assert, depths);
        }
        if (irp->parsed()) {
            apply_config(cfg, o_t, "t", irp_t);
            apply_config(cfg, o_n, "n", irp_n);
            return cmd_irp_demo(seed, out, do_assert, irp_t, irp_n);
        }
        if (ver->parsed()) return cmd_verify_ledger(ledger_path, context_path, do_assert);
        if (atk->parsed()) {
            apply_config(cfg, o_forg, "forgery_trials", acfg.forgery_trials);
            apply_config(cfg, o_repl, "replay_trials", acfg.replay_trials);
            apply_config(cfg, o_aolt, "aol_trials", acfg.aol_trials);
            apply_config(cfg, o_clus, "cluster_trials", acfg.cluster_trials);
            apply_config(cfg, o_gues, "reveal_guesses", acfg.reveal_guesses);
            return cmd_attack_suite(seed, out, do_assert, acfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
