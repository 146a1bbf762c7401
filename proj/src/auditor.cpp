#include "veilaudit/auditor.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace veilaudit {

VisibleSet sample_visible(const AuditLedger& ledger, double p, SeededRng& rng) {
    if (!(p > 0.0) || p > 1.0) throw BadRate{};
    VisibleSet v;
    v.ledger = &ledger;
    v.p = p;
    v.total_tags = ledger.size();
    for (const auto& key : ledger.keys()) {
        if (p >= 1.0 || rng.bernoulli(p)) v.keys.push_back(key);
    }
    return v;
}

namespace {

struct Dsu {
    std::vector<std::size_t> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

struct BytesHash {
    std::size_t operator()(const Bytes& b) const {
        std::size_t h = 1469598103934665603ull;
        for (auto c : b) h = (h ^ c) * 1099511628211ull;
        return h;
    }
};

// Sum of C(n,2) terms with wide intermediates.
unsigned __int128 pairs2(std::uint64_t n) {
    return static_cast<unsigned __int128>(n) * (n - 1) / 2;
}

}  // namespace

ClusterReport cluster(const VisibleSet& visible, const Scalar& ask, const GroundTruth& truth,
                      Party party) {
    auto t0 = std::chrono::steady_clock::now();

    // Decrypt-once pipeline: one trapdoor operation per visible tag, then
    // union-find keyed on the pseudonym encoding.
    const std::size_t n = visible.keys.size();
    Dsu dsu(n);
    std::unordered_map<Bytes, std::size_t, BytesHash> first_seen;
    std::vector<LinkPseudonym> tag_pseudonym(n);
    for (std::size_t i = 0; i < n; ++i) {
        const AuditTag* tag = visible.ledger->find(visible.keys[i]);
        const PartyBundle& bundle = party == Party::A ? tag->party_a : tag->party_b;
        tag_pseudonym[i] = extract_pseudonym(ask, bundle.ct_link);
        auto [it, fresh] = first_seen.try_emplace(tag_pseudonym[i].L.encode(), i);
        if (!fresh) dsu.unite(i, it->second);
    }

    ClusterReport report;
    std::unordered_map<std::size_t, std::size_t> root_to_cluster;
    std::vector<std::uint32_t> predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = dsu.find(i);
        auto [it, fresh] = root_to_cluster.try_emplace(root, report.clusters.size());
        if (fresh) {
            report.clusters.emplace_back();
            report.pseudonyms.push_back(tag_pseudonym[i]);
        }
        predicted[i] = static_cast<std::uint32_t>(it->second);
        report.clusters[it->second].push_back(visible.keys[i]);
    }

    auto t1 = std::chrono::steady_clock::now();
    report.wall_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());

    // Ground truth restricted to the visible set.
    const auto& owner = party == Party::A ? truth.owner_a : truth.owner_b;
    std::vector<std::uint32_t> actual(n);
    for (std::size_t i = 0; i < n; ++i) actual[i] = owner.at(visible.keys[i]);
    report.ari = adjusted_rand_index(actual, predicted);
    report.nmi = normalized_mutual_info(actual, predicted);

    const double total = static_cast<double>(visible.total_tags);
    report.n_pairs_effective =
        static_cast<std::uint64_t>(std::llround(visible.p * total * (total - 1.0) / 2.0));
    double wall_s = std::max(report.wall_ms / 1000.0, 1e-9);
    report.pairs_per_s = static_cast<double>(report.n_pairs_effective) / wall_s;
    return report;
}

namespace {

struct Contingency {
    std::vector<std::uint64_t> row, col;
    std::unordered_map<std::uint64_t, std::uint64_t> cells;  // (a<<32|b) -> count
    std::uint64_t n = 0;
};

Contingency contingency(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) throw DomainMismatch{};
    Contingency c;
    std::unordered_map<std::uint32_t, std::uint32_t> amap, bmap;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto ai = amap.try_emplace(a[i], static_cast<std::uint32_t>(amap.size())).first->second;
        auto bi = bmap.try_emplace(b[i], static_cast<std::uint32_t>(bmap.size())).first->second;
        if (ai >= c.row.size()) c.row.resize(ai + 1, 0);
        if (bi >= c.col.size()) c.col.resize(bi + 1, 0);
        ++c.row[ai];
        ++c.col[bi];
        ++c.cells[(static_cast<std::uint64_t>(ai) << 32) | bi];
        ++c.n;
    }
    return c;
}

}  // namespace

double adjusted_rand_index(const std::vector<std::uint32_t>& labels_a,
                           const std::vector<std::uint32_t>& labels_b) {
    Contingency c = contingency(labels_a, labels_b);
    if (c.n < 2) return 1.0;
    unsigned __int128 index = 0, sum_a = 0, sum_b = 0;
    for (const auto& [cell, count] : c.cells) index += pairs2(count);
    for (auto r : c.row) sum_a += pairs2(r);
    for (auto cc : c.col) sum_b += pairs2(cc);
    const unsigned __int128 total = pairs2(c.n);
    // Rational arithmetic until the final division.
    // ARI = (index - sum_a*sum_b/total) / ((sum_a+sum_b)/2 - sum_a*sum_b/total)
    long double expected = static_cast<long double>(sum_a) * static_cast<long double>(sum_b) /
                           static_cast<long double>(total);
    long double max_index = (static_cast<long double>(sum_a) + static_cast<long double>(sum_b)) / 2;
    long double denom = max_index - expected;
    if (denom == 0.0L) return 1.0;  // both partitions trivial and equal in structure
    return static_cast<double>((static_cast<long double>(index) - expected) / denom);
}

double normalized_mutual_info(const std::vector<std::uint32_t>& labels_a,
                              const std::vector<std::uint32_t>& labels_b) {
    Contingency c = contingency(labels_a, labels_b);
    if (c.n == 0) return 1.0;
    const long double n = static_cast<long double>(c.n);
    long double h_a = 0, h_b = 0, mi = 0;
    for (auto r : c.row)
        if (r) h_a -= (r / n) * std::log(static_cast<long double>(r) / n);
    for (auto cc : c.col)
        if (cc) h_b -= (cc / n) * std::log(static_cast<long double>(cc) / n);
    for (const auto& [cell, count] : c.cells) {
        std::uint64_t ai = cell >> 32, bi = cell & 0xffffffffull;
        long double pij = count / n;
        long double pi = c.row[ai] / n;
        long double pj = c.col[bi] / n;
        mi += pij * std::log(pij / (pi * pj));
    }
    long double norm = (h_a + h_b) / 2;  // arithmetic-mean normalization
    if (norm <= 0.0L) return 1.0;        // both partitions trivial
    return static_cast<double>(std::min(mi / norm, 1.0L));
}

std::vector<RevealCase> escalate(const ClusterReport& report, const SuspicionRule& rule) {
    std::vector<RevealCase> drafts;
    for (std::size_t i = 0; i < report.clusters.size(); ++i) {
        if (!rule(report.clusters[i])) continue;
        RevealCase rc;
        Bytes id_input = report.pseudonyms[i].L.encode();
        id_input.push_back('C');
        auto digest = digest32(domains::kGlobal, id_input);
        rc.case_id = Bytes(digest.begin(), digest.end());
        rc.tags = report.clusters[i];
        rc.cluster_evidence = report.pseudonyms[i];
        drafts.push_back(std::move(rc));
    }
    return drafts;
}

}  // namespace veilaudit
