#pragma once

#include <memory>

#include "veilaudit/auditor.hpp"

// Benchmark and scenario driver: AOL visibility sweep, block-cadence latency
// bench, confirmation-depth sweep, bootstrap confidence intervals, CSV/JSON
// reports.

namespace veilaudit {

struct BadConfig : Error { explicit BadConfig(const std::string& what) : Error(what) {} };
struct EmptySamples : Error { EmptySamples() : Error("no samples") {} };

enum class WorkloadPattern { SimpleTransfer, EscrowSettlement };

struct WorkloadSpec {
    WorkloadPattern pattern = WorkloadPattern::SimpleTransfer;
    std::size_t total_tags = 10000;   // B
    std::size_t latent_users = 2500;  // S
    double mean_tags_per_user = 4.0;  // k_bar = B / S
    double qps = 20.0;
    std::uint32_t n_senders = 10;
    std::uint32_t duration_s = 30;
    std::uint64_t seed = 0;
};

struct BootstrapCi {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
    std::uint32_t resamples = 1000;
};

BootstrapCi bootstrap_ci(const std::vector<double>& samples, std::uint32_t resamples,
                         std::uint64_t seed);

struct RunReport {
    std::string label;
    std::map<std::string, std::string> config;       // config echo
    std::map<std::string, BootstrapCi> metrics;      // seed-deterministic metrics
    std::map<std::string, std::vector<double>> raw;  // raw samples per metric
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double tps_realized = 0.0;
    // Wall-clock measurements; reported separately, excluded from the
    // deterministic report files.
    std::map<std::string, double> timings;
};

// A generated corpus: environment, committed tags, ground truth.
struct Scenario {
    SimEnv env;
    GroundTruth truth;
    std::vector<MasterIdentity> users;
    std::vector<std::uint64_t> tag_commit_ms;
    std::uint64_t seed = 0;
};

// Runs the full pipeline (AIP -> transfers -> AUD) for the given workload;
// every committed tag is ledger-verified on append.
std::unique_ptr<Scenario> build_scenario(const WorkloadSpec& spec);

enum class AolRegime { Low, High };

struct AolPointReport {
    double p = 0.0;
    AolRegime regime = AolRegime::Low;
    RunReport report;
};

std::vector<AolPointReport> run_aol_sweep(AolRegime regime, const std::vector<double>& p_values,
                                          std::uint32_t repeats, std::uint32_t warmup,
                                          std::uint64_t seed);

enum class RecordMode { Emit, Store };

struct LatencyPointReport {
    double qps = 0.0;
    RecordMode mode = RecordMode::Emit;
    RunReport report;
};

std::vector<LatencyPointReport> run_latency_bench(RecordMode mode,
                                                  const std::vector<double>& qps_values,
                                                  std::uint32_t n_senders,
                                                  std::uint64_t block_ms,
                                                  std::uint32_t duration_s, std::uint64_t seed);

struct DepthPointReport {
    std::uint32_t depth = 0;
    RunReport report;
    std::uint64_t replay_attempts = 0;
    std::uint64_t replay_accepted = 0;
};

std::vector<DepthPointReport> run_depth_sweep(const std::vector<std::uint32_t>& depths,
                                              std::uint64_t seed);

// Report serialization; deterministic fields only go into csv/json, timings
// into a separate sidecar.
std::string reports_to_csv(const std::vector<AolPointReport>& reports);
std::string reports_to_csv(const std::vector<LatencyPointReport>& reports);
std::string reports_to_csv(const std::vector<DepthPointReport>& reports);
std::string report_json(const std::vector<AolPointReport>& reports, std::uint64_t seed);
std::string report_json(const std::vector<LatencyPointReport>& reports, std::uint64_t seed);
std::string report_json(const std::vector<DepthPointReport>& reports, std::uint64_t seed);
std::string timing_csv(const std::vector<AolPointReport>& reports);

}  // namespace veilaudit
