#include "market/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "market/nnls.hpp"

namespace market {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// Uniform double in [0,1) from the raw engine; avoids distribution classes so
// runs reproduce exactly.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_categorical(const std::vector<double>& p, std::mt19937_64& rng) {
    double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        acc += p[a];
        if (u < acc) return static_cast<int>(a);
    }
    return static_cast<int>(p.size()) - 1;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

struct RawFile {
    // label -> per-question rows
    std::vector<std::string> labels;
    std::vector<Question> questions;
    std::vector<std::vector<std::vector<double>>> dist;   // [question][label][option]
    std::vector<std::vector<long>> first_row;             // provenance for error messages
};

RawFile read_distribution_file(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    RawFile raw;
    std::map<std::string, int> qindex;
    std::map<std::string, int> lindex;
    struct Cell {
        long row;
        std::vector<std::pair<int, double>> probs;
    };
    std::map<std::pair<int, int>, Cell> cells;

    std::string line;
    long row = 0;
    if (!std::getline(in, line)) throw SchemaError(0, "empty file " + path);
    std::vector<std::string> header = split_csv(line);
    std::vector<std::string> expected = {"question_id", "wave", label_column, "option_index",
                                         "probability"};
    if (header != expected)
        throw SchemaError(0, "expected header question_id,wave," + label_column +
                                 ",option_index,probability in " + path);
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> f = split_csv(line);
        if (f.size() != 5) throw SchemaError(row, "expected 5 fields");
        int option;
        double prob;
        try {
            option = std::stoi(f[3]);
            prob = std::stod(f[4]);
        } catch (const std::exception&) {
            throw SchemaError(row, "malformed option_index or probability");
        }
        if (option < 0) throw SchemaError(row, "negative option_index");
        if (!std::isfinite(prob) || prob < -1e-12)
            throw SchemaError(row, "probability must be finite and nonnegative");
        auto [qit, qnew] = qindex.try_emplace(f[0], static_cast<int>(raw.questions.size()));
        if (qnew) raw.questions.push_back({f[0], f[1], 0});
        else if (raw.questions[qit->second].wave != f[1])
            throw SchemaError(row, "wave tag differs across rows of question " + f[0]);
        auto [lit, lnew] = lindex.try_emplace(f[2], static_cast<int>(raw.labels.size()));
        if (lnew) raw.labels.push_back(f[2]);
        Cell& cell = cells[{qit->second, lit->second}];
        if (cell.probs.empty()) cell.row = row;
        cell.probs.emplace_back(option, prob);
        raw.questions[qit->second].options =
            std::max(raw.questions[qit->second].options, option + 1);
    }
    int Q = static_cast<int>(raw.questions.size());
    int L = static_cast<int>(raw.labels.size());
    if (Q == 0 || L == 0) throw InsufficientData("no rows in " + path);
    raw.dist.assign(Q, std::vector<std::vector<double>>(L));
    raw.first_row.assign(Q, std::vector<long>(L, -1));
    for (int q = 0; q < Q; ++q)
        for (int l = 0; l < L; ++l) {
            auto it = cells.find({q, l});
            if (it == cells.end())
                throw SchemaError("missing distribution for question " + raw.questions[q].id +
                                  ", " + label_column + " " + raw.labels[l] + " in " + path);
            std::vector<double> d(raw.questions[q].options, 0.0);
            double sum = 0.0;
            for (auto [opt, p] : it->second.probs) {
                d[opt] = p;
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-3)
                throw SchemaError(it->second.row, "distribution sums to " + std::to_string(sum) +
                                                      " for question " + raw.questions[q].id);
            raw.dist[q][l] = std::move(d);
            raw.first_row[q][l] = it->second.row;
        }
    return raw;
}

double rmse_of(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& w,
               double c) {
    if (A.rows() == 0) return 0.0;
    Eigen::VectorXd r = A * w;
    r.array() += c;
    r -= b;
    return std::sqrt(r.squaredNorm() / static_cast<double>(A.rows()));
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& A, const std::vector<int>& rows) {
    Eigen::MatrixXd out(rows.size(), A.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = A.row(rows[r]);
    return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& b, const std::vector<int>& rows) {
    Eigen::VectorXd out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = b[rows[r]];
    return out;
}

struct CvStats {
    std::vector<double> train_rmse, test_rmse;
    double mean_train = 0.0, mean_test = 0.0, se_test = 0.0;
};

// Cross-validation given per-row question ids; trains on train-tagged rows of
// the complement and evaluates on test-tagged rows of the fold.
CvStats run_cv(const Eigen::MatrixXd& Atr, const Eigen::VectorXd& btr,
               const std::vector<int>& qtr, const Eigen::MatrixXd& Ate,
               const Eigen::VectorXd& bte, const std::vector<int>& qte,
               const std::vector<int>& fold_of, int folds) {
    CvStats s;
    for (int f = 0; f < folds; ++f) {
        std::vector<int> train, test;
        for (std::size_t r = 0; r < qtr.size(); ++r)
            if (fold_of[qtr[r]] != f) train.push_back(static_cast<int>(r));
        for (std::size_t r = 0; r < qte.size(); ++r)
            if (fold_of[qte[r]] == f) test.push_back(static_cast<int>(r));
        if (train.empty() || test.empty())
            throw InsufficientData("empty cross-validation fold");
        Eigen::MatrixXd At = take_rows(Atr, train);
        Eigen::VectorXd bt = take_rows(btr, train);
        NnlsResult fit = solve_nnls(At, bt);
        s.train_rmse.push_back(rmse_of(At, bt, fit.weights, fit.intercept));
        s.test_rmse.push_back(
            rmse_of(take_rows(Ate, test), take_rows(bte, test), fit.weights, fit.intercept));
    }
    for (double v : s.train_rmse) s.mean_train += v;
    for (double v : s.test_rmse) s.mean_test += v;
    s.mean_train /= folds;
    s.mean_test /= folds;
    double var = 0.0;
    for (double v : s.test_rmse) var += (v - s.mean_test) * (v - s.mean_test);
    if (folds > 1) s.se_test = std::sqrt(var / (folds - 1) / folds);
    return s;
}

}  // namespace

ScoreRule score_rule_from_string(const std::string& name) {
    if (name == "linear") return ScoreRule::Linear;
    if (name == "log") return ScoreRule::Log;
    if (name == "brier") return ScoreRule::Brier;
    throw ParameterViolation("unknown score rule: " + name);
}

std::string to_string(ScoreRule rule) {
    switch (rule) {
        case ScoreRule::Linear: return "linear";
        case ScoreRule::Log: return "log";
        case ScoreRule::Brier: return "brier";
    }
    return "unknown";
}

void OpinionDataset::validate() const {
    if (group_dist.size() != questions.size() || model_dist.size() != questions.size())
        throw DimensionMismatch("per-question tables must match the question list");
    for (std::size_t q = 0; q < questions.size(); ++q) {
        if (group_dist[q].size() != groups.size() || model_dist[q].size() != models.size())
            throw DimensionMismatch("per-question rows must cover every group and model");
        for (const auto& d : group_dist[q]) {
            if (static_cast<int>(d.size()) != questions[q].options)
                throw InconsistentOptions("option count mismatch in question " + questions[q].id);
            double sum = 0.0;
            for (double p : d) {
                if (!(p >= -1e-12)) throw ParameterViolation("negative probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-6)
                throw ParameterViolation("distribution does not sum to 1 in question " +
                                         questions[q].id);
        }
        for (const auto& d : model_dist[q])
            if (static_cast<int>(d.size()) != questions[q].options)
                throw InconsistentOptions("option count mismatch in question " + questions[q].id);
    }
}

OpinionDataset load_dataset(const std::string& group_file, const std::string& model_file) {
    RawFile gf = read_distribution_file(group_file, "group");
    RawFile mf = read_distribution_file(model_file, "model");
    OpinionDataset ds;
    ds.questions = gf.questions;
    ds.groups = gf.labels;
    ds.models = mf.labels;
    ds.group_dist = gf.dist;
    ds.model_dist.resize(ds.questions.size());
    for (std::size_t q = 0; q < ds.questions.size(); ++q) {
        auto it = std::find_if(mf.questions.begin(), mf.questions.end(),
                               [&](const Question& mq) { return mq.id == ds.questions[q].id; });
        if (it == mf.questions.end())
            throw SchemaError("question " + ds.questions[q].id + " missing from " + model_file);
        if (it->options != ds.questions[q].options)
            throw InconsistentOptions("option counts differ for question " + ds.questions[q].id);
        ds.model_dist[q] = mf.dist[it - mf.questions.begin()];
    }
    ds.validate();
    return ds;
}

void save_dataset(const OpinionDataset& ds, const std::string& group_file,
                  const std::string& model_file) {
    ds.validate();
    auto dump = [&](const std::string& path, const std::string& label_column,
                    const std::vector<std::string>& labels, const auto& table) {
        std::ofstream out(path);
        if (!out) throw SchemaError("cannot write " + path);
        out << "question_id,wave," << label_column << ",option_index,probability\n";
        out.precision(17);
        for (std::size_t q = 0; q < ds.questions.size(); ++q)
            for (std::size_t l = 0; l < labels.size(); ++l)
                for (int a = 0; a < ds.questions[q].options; ++a)
                    out << ds.questions[q].id << ',' << ds.questions[q].wave << ',' << labels[l]
                        << ',' << a << ',' << table[q][l][a] << '\n';
    };
    dump(group_file, "group", ds.groups, ds.group_dist);
    dump(model_file, "model", ds.models, ds.model_dist);
}

std::vector<double> score_transform(const std::vector<double>& q_row, ScoreRule rule) {
    std::vector<double> v(q_row.size());
    switch (rule) {
        case ScoreRule::Linear:
            v = q_row;
            break;
        case ScoreRule::Log: {
            constexpr double tau = 1e-6;
            const double denom = -std::log(tau);
            for (std::size_t a = 0; a < q_row.size(); ++a) {
                double q = std::min(1.0, std::max(q_row[a], tau));
                v[a] = (std::log(q) - std::log(tau)) / denom;
            }
            break;
        }
        case ScoreRule::Brier: {
            double sq = 0.0;
            for (double q : q_row) sq += q * q;
            for (std::size_t a = 0; a < q_row.size(); ++a)
                v[a] = 0.5 + q_row[a] - 0.5 * sq;
            break;
        }
    }
    return v;
}

std::vector<int> fold_assignment(const OpinionDataset& ds, int folds, std::uint64_t seed) {
    if (folds < 2) throw ParameterViolation("need at least 2 folds");
    std::vector<int> fold_of(ds.questions.size(), 0);
    std::vector<std::string> waves;
    for (const Question& q : ds.questions)
        if (std::find(waves.begin(), waves.end(), q.wave) == waves.end()) waves.push_back(q.wave);
    for (const std::string& w : waves) {
        std::vector<int> qs;
        for (std::size_t q = 0; q < ds.questions.size(); ++q)
            if (ds.questions[q].wave == w) qs.push_back(static_cast<int>(q));
        std::sort(qs.begin(), qs.end(), [&](int a, int b) {
            std::uint64_t ka = mix(fnv1a(ds.questions[a].id), seed);
            std::uint64_t kb = mix(fnv1a(ds.questions[b].id), seed);
            return ka != kb ? ka < kb : ds.questions[a].id < ds.questions[b].id;
        });
        for (std::size_t r = 0; r < qs.size(); ++r) fold_of[qs[r]] = static_cast<int>(r % folds);
    }
    return fold_of;
}

WeakFitReport fit_weak_user(const OpinionDataset& ds, int user,
                            const std::vector<int>& provider_set, ScoreRule score, int folds,
                            std::uint64_t seed) {
    ds.validate();
    if (user < 0 || user >= ds.num_groups()) throw DimensionMismatch("group index out of range");
    if (provider_set.empty()) throw ParameterViolation("empty provider set");
    for (int j : provider_set)
        if (j < 0 || j >= ds.num_models()) throw DimensionMismatch("model index out of range");
    if (ds.num_questions() < 2 * folds)
        throw InsufficientData("need at least 2 questions per fold");

    int rows = 0;
    for (const Question& q : ds.questions) rows += q.options;
    Eigen::MatrixXd A(rows, provider_set.size());
    Eigen::VectorXd b(rows);
    std::vector<int> qid(rows);
    int r = 0;
    for (int q = 0; q < ds.num_questions(); ++q) {
        std::vector<std::vector<double>> v;
        for (int j : provider_set) v.push_back(score_transform(ds.model_dist[q][j], score));
        for (int a = 0; a < ds.questions[q].options; ++a, ++r) {
            for (std::size_t c = 0; c < provider_set.size(); ++c) A(r, c) = v[c][a];
            b[r] = ds.group_dist[q][user][a];
            qid[r] = q;
        }
    }

    NnlsResult full = solve_nnls(A, b);
    std::vector<int> fold_of = fold_assignment(ds, folds, seed);
    CvStats cv = run_cv(A, b, qid, A, b, qid, fold_of, folds);

    WeakFitReport rep;
    rep.user = user;
    rep.providers = provider_set;
    rep.weights.assign(full.weights.data(), full.weights.data() + full.weights.size());
    rep.intercept = full.intercept;
    rep.full_rmse = rmse_of(A, b, full.weights, full.intercept);
    rep.fold_train_rmse = cv.train_rmse;
    rep.fold_test_rmse = cv.test_rmse;
    rep.mean_train_rmse = cv.mean_train;
    rep.mean_test_rmse = cv.mean_test;
    rep.se_test_rmse = cv.se_test;
    rep.score = score;
    rep.folds = folds;
    rep.seed = seed;
    return rep;
}

StrongFitReport fit_strong_provider(const OpinionDataset& ds, int provider,
                                    const std::vector<int>& user_set, ScoreRule score,
                                    int samples_per_question, int folds, std::uint64_t seed) {
    ds.validate();
    if (provider < 0 || provider >= ds.num_models())
        throw DimensionMismatch("model index out of range");
    if (user_set.empty()) throw ParameterViolation("empty user set");
    for (int i : user_set)
        if (i < 0 || i >= ds.num_groups()) throw DimensionMismatch("group index out of range");
    if (samples_per_question < 1) throw ParameterViolation("need samples_per_question >= 1");
    if (ds.num_questions() < 2 * folds)
        throw InsufficientData("need at least 2 questions per fold");

    int n = static_cast<int>(user_set.size());
    auto build = [&](std::uint64_t tag, Eigen::MatrixXd& A, Eigen::VectorXd& b,
                     std::vector<int>& qid) {
        int rows = ds.num_questions() * samples_per_question;
        A.resize(rows, n);
        b.resize(rows);
        qid.resize(rows);
        int r = 0;
        for (int q = 0; q < ds.num_questions(); ++q) {
            std::vector<double> v = score_transform(ds.model_dist[q][provider], score);
            std::mt19937_64 rng(mix(mix(fnv1a(ds.questions[q].id), seed), tag));
            for (int m = 0; m < samples_per_question; ++m, ++r) {
                double target = 0.0;
                for (int c = 0; c < n; ++c) {
                    const std::vector<double>& p = ds.group_dist[q][user_set[c]];
                    int a = sample_categorical(p, rng);
                    A(r, c) = p[a];
                    target += v[a];
                }
                b[r] = target / n;
                qid[r] = q;
            }
        }
    };

    Eigen::MatrixXd Atr, Ate;
    Eigen::VectorXd btr, bte;
    std::vector<int> qtr, qte;
    build(0, Atr, btr, qtr);
    build(1, Ate, bte, qte);

    NnlsResult full = solve_nnls(Atr, btr);
    std::vector<int> fold_of = fold_assignment(ds, folds, seed);
    CvStats cv = run_cv(Atr, btr, qtr, Ate, bte, qte, fold_of, folds);

    StrongFitReport rep;
    rep.provider = provider;
    rep.users = user_set;
    rep.weights.assign(full.weights.data(), full.weights.data() + full.weights.size());
    rep.intercept = full.intercept;
    rep.full_rmse = rmse_of(Atr, btr, full.weights, full.intercept);
    rep.fold_train_rmse = cv.train_rmse;
    rep.fold_test_rmse = cv.test_rmse;
    rep.mean_train_rmse = cv.mean_train;
    rep.mean_test_rmse = cv.mean_test;
    rep.se_test_rmse = cv.se_test;
    rep.score = score;
    rep.folds = folds;
    rep.seed = seed;
    rep.samples_per_question = samples_per_question;
    return rep;
}

TransferReport transfer_for_subset(const OpinionDataset& ds, const std::vector<int>& providers,
                                   const std::vector<int>& users, ScoreRule score,
                                   int samples_per_question, int folds, std::uint64_t seed) {
    TransferReport rep;
    rep.providers = providers;
    rep.users = users;
    for (int j : providers)
        rep.fits.push_back(
            fit_strong_provider(ds, j, users, score, samples_per_question, folds, seed));
    rep.transfer.resize(users.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
        double lam_star = 0.0;
        for (const StrongFitReport& f : rep.fits)
            lam_star = std::max(lam_star, f.weights[i]);
        rep.transfer[i] = 1.0 / std::max(lam_star, kTransferFloor);
        sum += rep.transfer[i];
        rep.worst_transfer = std::max(rep.worst_transfer, rep.transfer[i]);
    }
    rep.mean_transfer = sum / static_cast<double>(users.size());
    for (const StrongFitReport& f : rep.fits) rep.mean_test_rmse += f.mean_test_rmse;
    rep.mean_test_rmse /= static_cast<double>(rep.fits.size());
    return rep;
}

std::vector<TransferCurvePoint> transfer_curve(const OpinionDataset& ds, ScoreRule score,
                                               const std::vector<int>& K_range,
                                               std::uint64_t seed, int samples_per_question,
                                               int folds) {
    std::vector<int> all_users(ds.num_groups());
    std::iota(all_users.begin(), all_users.end(), 0);
    std::vector<TransferCurvePoint> out;
    for (int K : K_range) {
        if (K < 1 || K > ds.num_models())
            throw ParameterViolation("K outside available model range");
        std::vector<int> providers(K);
        std::iota(providers.begin(), providers.end(), 0);
        TransferReport rep = transfer_for_subset(ds, providers, all_users, score,
                                                 samples_per_question, folds, seed);
        out.push_back({K, rep.mean_transfer, rep.worst_transfer});
    }
    return out;
}

std::vector<SubsetPoint> subset_analysis(const OpinionDataset& ds, ScoreRule score,
                                         const std::vector<int>& sizes, std::uint64_t seed,
                                         int samples_per_question, int folds,
                                         std::uint64_t cap) {
    int K = ds.num_models();
    std::vector<int> all_users(ds.num_groups());
    std::iota(all_users.begin(), all_users.end(), 0);
    std::vector<SubsetPoint> out;
    for (int size : sizes) {
        if (size < 1 || size > K) throw ParameterViolation("subset size outside model range");
        std::uint64_t count = 1;
        for (int s = 0; s < size; ++s) {
            count = count * (K - s) / (s + 1);
            if (count > cap) throw SearchSpaceTooLarge(cap);
        }
        SubsetPoint point;
        point.size = size;
        point.best = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        std::uint64_t seen = 0;
        std::vector<int> subset(size);
        std::iota(subset.begin(), subset.end(), 0);
        while (true) {
            TransferReport rep = transfer_for_subset(ds, subset, all_users, score,
                                                     samples_per_question, folds, seed);
            point.best = std::min(point.best, rep.worst_transfer);
            point.worst = std::max(point.worst, rep.worst_transfer);
            sum += rep.worst_transfer;
            ++seen;
            int pos = size - 1;
            while (pos >= 0 && subset[pos] == K - size + pos) --pos;
            if (pos < 0) break;
            ++subset[pos];
            for (int s = pos + 1; s < size; ++s) subset[s] = subset[s - 1] + 1;
        }
        point.mean = sum / static_cast<double>(seen);
        out.push_back(point);
    }
    return out;
}

std::vector<TradeoffPoint> user_count_tradeoff(const OpinionDataset& ds, ScoreRule score,
                                               const std::vector<int>& user_counts,
                                               std::uint64_t seed, int samples_per_question,
                                               int folds) {
    std::vector<int> all_providers(ds.num_models());
    std::iota(all_providers.begin(), all_providers.end(), 0);
    std::vector<TradeoffPoint> out;
    for (int n : user_counts) {
        if (n < 1 || n > ds.num_groups())
            throw InsufficientData("user count outside available groups");
        std::vector<int> users(n);
        std::iota(users.begin(), users.end(), 0);
        TransferReport rep = transfer_for_subset(ds, all_providers, users, score,
                                                 samples_per_question, folds, seed);
        out.push_back({n, rep.mean_test_rmse, rep.worst_transfer});
    }
    return out;
}

BaselineReport baselines(const OpinionDataset& ds, int user, ScoreRule score) {
    ds.validate();
    if (user < 0 || user >= ds.num_groups()) throw DimensionMismatch("group index out of range");
    int rows = 0;
    for (const Question& q : ds.questions) rows += q.options;
    int K = ds.num_models();
    Eigen::MatrixXd A(rows, K);
    Eigen::VectorXd b(rows);
    int r = 0;
    for (int q = 0; q < ds.num_questions(); ++q) {
        std::vector<std::vector<double>> v;
        for (int j = 0; j < K; ++j) v.push_back(score_transform(ds.model_dist[q][j], score));
        for (int a = 0; a < ds.questions[q].options; ++a, ++r) {
            for (int j = 0; j < K; ++j) A(r, j) = v[j][a];
            b[r] = ds.group_dist[q][user][a];
        }
    }
    BaselineReport rep;
    rep.best_single_rmse = std::numeric_limits<double>::infinity();
    for (int j = 0; j < K; ++j) {
        double c = (b - A.col(j)).mean();
        double rmse = std::sqrt((A.col(j).array() + c - b.array()).square().mean());
        if (rmse < rep.best_single_rmse) {
            rep.best_single_rmse = rmse;
            rep.best_single_provider = j;
        }
    }
    Eigen::VectorXd avg = A.rowwise().mean();
    double c = (b - avg).mean();
    rep.equal_weight_rmse = std::sqrt((avg.array() + c - b.array()).square().mean());
    return rep;
}

}  // namespace market
