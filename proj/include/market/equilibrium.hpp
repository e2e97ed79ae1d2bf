#pragma once

#include <optional>
#include <string>
#include <vector>

#include "market/game.hpp"

namespace market {

// Common garbling certificate: z ~ Pr(z|y) that every provider in T can
// simulate from his own features via f_j with matching state-conditional
// marginals.
struct GarblingSpec {
    std::vector<std::string> labels;                       // Z
    std::vector<std::vector<std::vector<double>>> maps;    // f[j][xp][z], one per provider in T
    std::vector<int> providers;                            // T
    std::vector<std::vector<double>> conditional;          // Pr(z | y), [y][z]

    int num_labels() const { return static_cast<int>(labels.size()); }
};

// z = the shared feature, for instances where every provider in T observes an
// identical feature space.
GarblingSpec garbling_identical_features(const GameInstance& g, const std::vector<int>& providers);
// Single constant label; valid for any provider set.
GarblingSpec garbling_trivial(const GameInstance& g, const std::vector<int>& providers);

struct GarblingCheck {
    bool pass = false;
    double max_violation = 0.0;
};

GarblingCheck validate_garbling(const GameInstance& g, const GarblingSpec& garbling,
                                double tol = 1e-9);

// User's best utility against any shared rule reading z over the given number
// of rounds. Full revelation of z when the provider turns can encode it;
// otherwise enumeration over deterministic shared signal maps.
double benchmark_shared(const GameInstance& g, int user, const GarblingSpec& garbling, int rounds,
                        std::uint64_t cap = 10'000'000);

struct DeviationClass {
    enum class Kind { DeterministicExhaustive, SharedRulesOnly, Custom };
    Kind kind = Kind::DeterministicExhaustive;
    const GarblingSpec* garbling = nullptr;      // for SharedRulesOnly
    std::vector<ProviderRule> custom;            // for Custom: same rules offered to every provider
    std::uint64_t cap = 10'000'000;

    std::string label() const;
};

// Candidate deviation rules for one provider under the class.
std::vector<ProviderRule> deviation_rules(const GameInstance& g, int provider,
                                          const DeviationClass& cls);

struct DeviationWitness {
    int provider = -1;
    int user = -1;  // personalized mode: which user's rule was replaced
    std::size_t deviation_index = 0;
    double gain = 0.0;
};

struct EquilibriumReport {
    std::vector<double> provider_max_gain;
    double max_gain = 0.0;
    std::vector<double> user_utilities;
    std::vector<double> provider_utilities;
    std::optional<DeviationWitness> witness;
    std::string deviation_class;
    double eps = 0.0;
    bool pass = false;
};

EquilibriumReport verify_personalized_NE(const GameInstance& g, const PersonalizedProfile& profile,
                                         const DeviationClass& cls, double eps = 1e-9);
EquilibriumReport verify_anonymous_NE(const GameInstance& g, const AnonymousProfile& profile,
                                      const DeviationClass& cls, double eps = 1e-9);

enum class GameMode { Personalized, Anonymous };

struct EnumeratedEquilibrium {
    std::vector<std::size_t> assignment;  // rule index per provider (anonymous) or per
                                          // provider*user slot (personalized, j*n+i)
    EquilibriumReport report;
};

// All pure profiles over the per-provider rule spaces whose class-relative
// max deviation gain is at most eps.
std::vector<EnumeratedEquilibrium> enumerate_pure_equilibria(
    const GameInstance& g, const std::vector<std::vector<ProviderRule>>& rule_spaces,
    GameMode mode, double eps = 1e-9, std::uint64_t cap = 10'000'000);

// Largest per-user gain of provider j's best R-round rule over the
// (R-1)-round shared benchmark.
double delta_R(const GameInstance& g, int provider, const GarblingSpec& garbling,
               const std::vector<ProviderRule>& rule_space, std::uint64_t cap = 10'000'000);

struct WeakAlignmentCert;
struct StrongAlignmentCert;

// Per-user equilibrium utility lower bounds from the alignment certificates.
std::vector<double> bounds_personalized(const GameInstance& g, const WeakAlignmentCert& cert,
                                        const GarblingSpec& garbling);
std::vector<double> bounds_anonymous_dominant(const GameInstance& g,
                                              const StrongAlignmentCert& cert,
                                              const GarblingSpec& garbling);
// delta_by_provider: Delta_R(j) for every provider in cert.providers.
std::vector<double> bounds_anonymous_general(const GameInstance& g,
                                             const StrongAlignmentCert& cert,
                                             const GarblingSpec& garbling,
                                             const std::vector<double>& delta_by_provider);

}  // namespace market
