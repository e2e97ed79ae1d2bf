#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "market/errors.hpp"

namespace market {

enum class ScoreRule { Linear, Log, Brier };

ScoreRule score_rule_from_string(const std::string& name);
std::string to_string(ScoreRule rule);

struct Question {
    std::string id;
    std::string wave;
    int options = 0;
};

struct OpinionDataset {
    std::vector<Question> questions;
    std::vector<std::string> groups;
    std::vector<std::string> models;
    std::vector<std::vector<std::vector<double>>> group_dist;  // [question][group][option]
    std::vector<std::vector<std::vector<double>>> model_dist;  // [question][model][option]

    int num_questions() const { return static_cast<int>(questions.size()); }
    int num_groups() const { return static_cast<int>(groups.size()); }
    int num_models() const { return static_cast<int>(models.size()); }
    void validate() const;
};

OpinionDataset load_dataset(const std::string& group_file, const std::string& model_file);
void save_dataset(const OpinionDataset& ds, const std::string& group_file,
                  const std::string& model_file);

// Per-action value of one predicted distribution under the scoring rule; all
// three rules map probability vectors into [0,1] coordinatewise.
std::vector<double> score_transform(const std::vector<double>& q_row, ScoreRule rule);

// Deterministic question-level fold assignment, stratified by wave.
std::vector<int> fold_assignment(const OpinionDataset& ds, int folds, std::uint64_t seed);

struct WeakFitReport {
    int user = -1;
    std::vector<int> providers;
    std::vector<double> weights;  // over `providers`, full-data fit
    double intercept = 0.0;
    double full_rmse = 0.0;
    std::vector<double> fold_train_rmse;
    std::vector<double> fold_test_rmse;
    double mean_train_rmse = 0.0;
    double mean_test_rmse = 0.0;
    double se_test_rmse = 0.0;
    ScoreRule score = ScoreRule::Linear;
    int folds = 0;
    std::uint64_t seed = 0;
};

struct StrongFitReport {
    int provider = -1;
    std::vector<int> users;
    std::vector<double> weights;  // lambda over `users`, full-data fit
    double intercept = 0.0;
    double full_rmse = 0.0;
    std::vector<double> fold_train_rmse;
    std::vector<double> fold_test_rmse;
    double mean_train_rmse = 0.0;
    double mean_test_rmse = 0.0;
    double se_test_rmse = 0.0;
    ScoreRule score = ScoreRule::Linear;
    int folds = 0;
    std::uint64_t seed = 0;
    int samples_per_question = 0;
};

WeakFitReport fit_weak_user(const OpinionDataset& ds, int user,
                            const std::vector<int>& provider_set, ScoreRule score, int folds,
                            std::uint64_t seed);

StrongFitReport fit_strong_provider(const OpinionDataset& ds, int provider,
                                    const std::vector<int>& user_set, ScoreRule score,
                                    int samples_per_question, int folds, std::uint64_t seed);

constexpr double kTransferFloor = 1e-12;

// Strong fits for every provider in the subset plus the per-user transfer
// factors 1 / max(lambda*_i, floor).
struct TransferReport {
    std::vector<int> providers;
    std::vector<int> users;
    std::vector<StrongFitReport> fits;          // one per provider
    std::vector<double> transfer;               // per user
    double mean_transfer = 0.0;
    double worst_transfer = 0.0;
    double mean_test_rmse = 0.0;
};

TransferReport transfer_for_subset(const OpinionDataset& ds, const std::vector<int>& providers,
                                   const std::vector<int>& users, ScoreRule score,
                                   int samples_per_question, int folds, std::uint64_t seed);

struct TransferCurvePoint {
    int K = 0;
    double mean_transfer = 0.0;
    double worst_transfer = 0.0;
};
std::vector<TransferCurvePoint> transfer_curve(const OpinionDataset& ds, ScoreRule score,
                                               const std::vector<int>& K_range,
                                               std::uint64_t seed,
                                               int samples_per_question = 64, int folds = 5);

struct SubsetPoint {
    int size = 0;
    double best = 0.0;   // smallest worst-user transfer over subsets
    double mean = 0.0;
    double worst = 0.0;  // largest
};
std::vector<SubsetPoint> subset_analysis(const OpinionDataset& ds, ScoreRule score,
                                         const std::vector<int>& sizes, std::uint64_t seed,
                                         int samples_per_question = 64, int folds = 5,
                                         std::uint64_t cap = 10'000);

struct TradeoffPoint {
    int users = 0;
    double epsilon_proxy_rmse = 0.0;  // mean held-out RMSE over providers
    double worst_transfer = 0.0;
};
std::vector<TradeoffPoint> user_count_tradeoff(const OpinionDataset& ds, ScoreRule score,
                                               const std::vector<int>& user_counts,
                                               std::uint64_t seed,
                                               int samples_per_question = 64, int folds = 5);

struct BaselineReport {
    double best_single_rmse = 0.0;
    int best_single_provider = -1;
    double equal_weight_rmse = 0.0;
};
BaselineReport baselines(const OpinionDataset& ds, int user, ScoreRule score);

}  // namespace market
