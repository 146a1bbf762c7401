#pragma once

#include <functional>

#include "veilaudit/protocols.hpp"

// The audit-and-analyze phase: sample the visible tag set at rate p, extract
// pseudonyms once per tag under the trapdoor, cluster via union-find, score
// against ground truth with ARI/NMI, and account equality throughput.

namespace veilaudit {

struct BadRate : Error { BadRate() : Error("visibility rate must be in (0, 1]") {} };
struct DomainMismatch : Error {
    DomainMismatch() : Error("partitions cover different element sets") {}
};

// tag key -> owning user index, per party role. Party A is the initiating
// user; each tag has exactly one ground-truth owner per role.
struct GroundTruth {
    std::map<Hash32, std::uint32_t> owner_a;
    std::map<Hash32, std::uint32_t> owner_b;
};

struct VisibleSet {
    std::vector<Hash32> keys;            // subset of ledger keys, ledger order
    const AuditLedger* ledger = nullptr;
    double p = 1.0;
    std::size_t total_tags = 0;          // B, the full batch size
};

VisibleSet sample_visible(const AuditLedger& ledger, double p, SeededRng& rng);

enum class Party { A, B };

struct ClusterReport {
    std::vector<std::vector<Hash32>> clusters;  // partition of visible tag keys
    std::vector<LinkPseudonym> pseudonyms;      // one per cluster
    double ari = 0.0;
    double nmi = 0.0;
    std::uint64_t n_pairs_effective = 0;  // p * B(B-1)/2, rounded
    std::uint64_t wall_ms = 0;
    double pairs_per_s = 0.0;
};

ClusterReport cluster(const VisibleSet& visible, const Scalar& ask, const GroundTruth& truth,
                      Party party = Party::A);

// Partition-similarity scores over label vectors aligned by element index.
double adjusted_rand_index(const std::vector<std::uint32_t>& labels_a,
                           const std::vector<std::uint32_t>& labels_b);
double normalized_mutual_info(const std::vector<std::uint32_t>& labels_a,
                              const std::vector<std::uint32_t>& labels_b);

using SuspicionRule = std::function<bool(const std::vector<Hash32>& cluster_keys)>;

inline SuspicionRule min_cluster_size(std::size_t threshold) {
    return [threshold](const std::vector<Hash32>& keys) { return keys.size() >= threshold; };
}

// One RevealCase draft per suspicious cluster; approvals left empty for the
// committee stage.
std::vector<RevealCase> escalate(const ClusterReport& report, const SuspicionRule& rule);

}  // namespace veilaudit
