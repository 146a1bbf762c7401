#pragma once

#include "veilaudit/bench.hpp"

// Active-adversary batteries: tag forgery and impersonation, replay in all
// its variants, the linkability guessing game with a trapdoor control arm,
// partition-guessing cluster attacks, and unauthorized-revelation attempts.

namespace veilaudit {

struct AttackOutcome {
    std::string name;
    std::uint64_t attempts = 0;
    std::uint64_t accepted = 0;  // adversary successes; 0 expected except control arms
    std::map<std::string, double> stats;
};

// Fabricated, transplanted, and bit-mutated tags against a live ledger, plus
// control-proof impersonation against the escrow. Two outcomes, `trials`
// attempts each.
std::vector<AttackOutcome> attack_forgery(std::uint64_t trials, std::uint64_t seed);

// Verbatim resubmission, timestamp-mutated copies, cross-chain rerouting, and
// bridge redelivery, round-robin over `trials` attempts.
AttackOutcome attack_replay(std::uint64_t trials, std::uint64_t seed);

// Same-owner guessing game over freshly issued tag bundles. Blind arms see
// only public bytes and synthetic metadata; the trapdoor arm holds the
// equality-test key. Advantage is signed: win_rate - 0.5, with a Wilson 95%
// interval in stats.
std::vector<AttackOutcome> game_aol(std::uint64_t trials, std::uint64_t seed);

// Partition guessing against small corpora without the trapdoor; stats carry
// the per-strategy mean ARI across trials.
AttackOutcome attack_cluster(std::uint32_t trials, std::uint64_t seed);

// Sub-threshold coalitions, corrupted decryption shares, and brute identity
// guessing against a 3-of-5 committee; includes an at-threshold control arm.
std::vector<AttackOutcome> attack_unauthorized_reveal(std::uint64_t guesses,
                                                      std::uint64_t seed);

// After one authorized revelation, checks that the remaining users' tags stay
// unlinkable and that no witness material leaked into the ledger stream.
AttackOutcome attack_post_disclosure(std::uint64_t seed);

struct AttackSuiteConfig {
    std::uint64_t forgery_trials = 1000;
    std::uint64_t replay_trials = 10000;
    std::uint64_t aol_trials = 10000;
    std::uint32_t cluster_trials = 100;
    std::uint64_t reveal_guesses = 1000;
};

std::vector<AttackOutcome> run_attack_suite(const AttackSuiteConfig& cfg, std::uint64_t seed);

std::string attacks_to_csv(const std::vector<AttackOutcome>& outcomes);
std::string attacks_json(const std::vector<AttackOutcome>& outcomes, std::uint64_t seed);

}  // namespace veilaudit
