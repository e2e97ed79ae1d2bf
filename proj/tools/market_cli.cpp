#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "market/alignment.hpp"
#include "market/constructions.hpp"
#include "market/empirical.hpp"
#include "market/equilibrium.hpp"
#include "market/serialization.hpp"

namespace {

using namespace market;

std::string partition_stem(const std::string& group_file) {
    return std::filesystem::path(group_file).stem().string();
}

GarblingSpec resolve_garbling(const GameInstance& g, const std::string& arg) {
    std::vector<int> all(g.num_providers());
    for (int j = 0; j < g.num_providers(); ++j) all[j] = j;
    if (arg.empty() || arg == "identity") return garbling_identical_features(g, all);
    if (arg == "trivial") return garbling_trivial(g, all);
    return garbling_from_json(load_json(arg));
}

AnonymousProfile resolve_anonymous_profile(const GameInstance& g, const std::string& arg) {
    AnonymousProfile p;
    if (arg == "no-disclosure") {
        for (int j = 0; j < g.num_providers(); ++j) p.rules.push_back(constant_rule(g, j, 0));
        return p;
    }
    if (arg == "revelation") {
        for (int j = 0; j < g.num_providers(); ++j)
            p.rules.push_back(make_full_revelation_rule(g, j));
        return p;
    }
    return anonymous_profile_from_json(load_json(arg));
}

std::vector<int> parse_indices(const std::string& csv, int limit) {
    std::vector<int> out;
    if (csv.empty()) {
        for (int i = 0; i < limit; ++i) out.push_back(i);
        return out;
    }
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

void write_csv(const std::string& path, const std::string& headerline,
               const std::vector<std::string>& rows) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path);
    out << headerline << '\n';
    for (const std::string& r : rows) out << r << '\n';
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversation-market analysis toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("schema ") + kSchemaVersion);

    std::string instance_path, out_path, profile_arg = "no-disclosure";
    std::string garbling_arg, cert_path, class_arg = "det", mode_arg = "anonymous";
    std::string group_file, model_file, score_arg = "linear";
    std::string providers_arg, groups_arg, name, kind_arg = "personalized";
    std::string weak_path, strong_path, list_arg;
    double eps = 0.1, cval = 0.5, tol = 1e-9;
    int M = 6, D = 2, user = 0, provider = 0, folds = 5, samples = 64, rounds = -1;
    std::uint64_t seed = 0;

    auto* construct = app.add_subcommand("construct", "Generate a named game instance");
    construct->add_option("name", name, "public-example|strict-separation|public-adding-users")
        ->required();
    construct->add_option("--eps", eps);
    construct->add_option("--c", cval);
    construct->add_option("--M", M);
    construct->add_option("--D", D);
    construct->add_option("-o,--out", out_path)->required();

    auto* verify = app.add_subcommand("verify", "Deviation sweep for a claimed equilibrium");
    verify->add_option("--instance", instance_path)->required();
    verify->add_option("--profile", profile_arg,
                       "no-disclosure, revelation, or a profile JSON file");
    verify->add_option("--class", class_arg, "det|shared|custom:<file>");
    verify->add_option("--mode", mode_arg, "anonymous|personalized");
    verify->add_option("--garbling", garbling_arg, "identity|trivial|<file> (shared class)");
    verify->add_option("--tol", tol, "epsilon-NE tolerance");
    verify->add_option("-o,--out", out_path);

    auto* cert = app.add_subcommand("cert", "Alignment certificates");
    auto* cert_check = cert->add_subcommand("check", "Recompute certificate residuals");
    cert_check->add_option("--instance", instance_path)->required();
    cert_check->add_option("--weak", weak_path);
    cert_check->add_option("--strong", strong_path);
    auto* cert_fit = cert->add_subcommand("fit", "Minimax strong fit for one provider");
    cert_fit->add_option("--instance", instance_path)->required();
    cert_fit->add_option("--provider", provider);
    cert_fit->add_option("--users", groups_arg, "comma-separated user indices (default all)");
    cert_fit->add_option("-o,--out", out_path);
    cert->require_subcommand(1);

    auto* benchmark = app.add_subcommand("benchmark", "Optimal shared-rule user benchmark");
    benchmark->add_option("--instance", instance_path)->required();
    benchmark->add_option("--user", user);
    benchmark->add_option("--garbling", garbling_arg, "identity|trivial|<file>");
    benchmark->add_option("--rounds", rounds, "default: instance rounds");

    auto* bounds = app.add_subcommand("bounds", "Per-user equilibrium utility lower bounds");
    bounds->add_option("--instance", instance_path)->required();
    bounds->add_option("--cert", cert_path)->required();
    bounds->add_option("--kind", kind_arg, "personalized|dominant|general");
    bounds->add_option("--garbling", garbling_arg, "identity|trivial|<file>");
    bounds->add_option("--delta", list_arg, "comma-separated Delta_R per certified provider");
    bounds->add_option("-o,--out", out_path);

    auto add_dataset_opts = [&](CLI::App* cmd, bool with_samples) {
        cmd->add_option("--group-file", group_file)->required();
        cmd->add_option("--model-file", model_file)->required();
        cmd->add_option("--score", score_arg, "linear|log|brier");
        cmd->add_option("--folds", folds);
        cmd->add_option("--seed", seed);
        cmd->add_option("--providers", providers_arg, "comma-separated model indices");
        cmd->add_option("--groups", groups_arg, "comma-separated group indices");
        if (with_samples) cmd->add_option("--samples", samples);
        cmd->add_option("-o,--out", out_path, "output directory (default .)");
    };
    auto* fit_weak = app.add_subcommand("fit-weak", "NNLS weak fit for one group");
    fit_weak->add_option("--user", user);
    add_dataset_opts(fit_weak, false);
    auto* fit_strong = app.add_subcommand("fit-strong", "NNLS strong fit for one model");
    fit_strong->add_option("--provider", provider);
    add_dataset_opts(fit_strong, true);
    auto* transfer = app.add_subcommand("transfer", "Transfer factor vs provider count");
    transfer->add_option("--ks", list_arg, "comma-separated K values (default 1..K)");
    add_dataset_opts(transfer, true);
    auto* subsets = app.add_subcommand("subsets", "Transfer over all provider subsets");
    subsets->add_option("--sizes", list_arg, "comma-separated subset sizes (default 1..K)");
    add_dataset_opts(subsets, true);
    auto* tradeoff = app.add_subcommand("tradeoff", "Fit error vs transfer as users grow");
    tradeoff->add_option("--counts", list_arg, "comma-separated user counts (default 1..n)");
    add_dataset_opts(tradeoff, true);
    auto* base = app.add_subcommand("baselines", "Best-single and equal-weight baselines");
    base->add_option("--user", user);
    add_dataset_opts(base, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (construct->parsed()) {
            GameInstance g;
            if (name == "public-example") g = make_public_example(eps, cval, M, D);
            else if (name == "strict-separation") g = make_strict_separation();
            else if (name == "public-adding-users") g = make_public_adding_users();
            else throw ParameterViolation("unknown construction: " + name);
            save_json(to_json(g), out_path);
            std::cout << "wrote " << out_path << '\n';
            return 0;
        }
        if (verify->parsed()) {
            GameInstance g = game_from_json(load_json(instance_path));
            DeviationClass cls;
            GarblingSpec garbling;
            if (class_arg == "det") {
                cls.kind = DeviationClass::Kind::DeterministicExhaustive;
            } else if (class_arg == "shared") {
                cls.kind = DeviationClass::Kind::SharedRulesOnly;
                garbling = resolve_garbling(g, garbling_arg);
                cls.garbling = &garbling;
            } else if (class_arg.rfind("custom:", 0) == 0) {
                cls.kind = DeviationClass::Kind::Custom;
                for (const json& r : load_json(class_arg.substr(7)).at("rules"))
                    cls.custom.push_back(rule_from_json(r));
            } else {
                throw ParameterViolation("unknown deviation class: " + class_arg);
            }
            EquilibriumReport report;
            if (mode_arg == "anonymous") {
                report = verify_anonymous_NE(g, resolve_anonymous_profile(g, profile_arg), cls,
                                             tol);
            } else if (mode_arg == "personalized") {
                report = verify_personalized_NE(
                    g, personalized_profile_from_json(load_json(profile_arg)), cls, tol);
            } else {
                throw ParameterViolation("unknown mode: " + mode_arg);
            }
            json jr = to_json(report);
            if (!out_path.empty()) save_json(jr, out_path);
            std::cout << jr.dump(2) << '\n';
            return report.pass ? 0 : 2;
        }
        if (cert_check->parsed()) {
            GameInstance g = game_from_json(load_json(instance_path));
            json out = json::object();
            if (!weak_path.empty()) {
                auto [ep, eu] = check_weak(g, weak_cert_from_json(load_json(weak_path)));
                out["weak"] = {{"eps_provider", ep}, {"eps_user", eu}};
            }
            if (!strong_path.empty()) {
                out["strong"] = {
                    {"eps", check_strong(g, strong_cert_from_json(load_json(strong_path)))}};
            }
            if (out.empty()) throw ParameterViolation("give --weak and/or --strong");
            std::cout << out.dump(2) << '\n';
            return 0;
        }
        if (cert_fit->parsed()) {
            GameInstance g = game_from_json(load_json(instance_path));
            StrongAlignmentCert c =
                fit_strong_exact(g, provider, parse_indices(groups_arg, g.num_users()));
            json jc = to_json(c);
            if (!out_path.empty()) save_json(jc, out_path);
            std::cout << jc.dump(2) << '\n';
            return 0;
        }
        if (benchmark->parsed()) {
            GameInstance g = game_from_json(load_json(instance_path));
            GarblingSpec garbling = resolve_garbling(g, garbling_arg);
            double v = benchmark_shared(g, user, garbling, rounds < 0 ? g.rounds : rounds);
            std::cout << json{{"user", user}, {"benchmark", v}}.dump(2) << '\n';
            return 0;
        }
        if (bounds->parsed()) {
            GameInstance g = game_from_json(load_json(instance_path));
            GarblingSpec garbling = resolve_garbling(g, garbling_arg);
            std::vector<double> vals;
            if (kind_arg == "personalized") {
                vals = bounds_personalized(g, weak_cert_from_json(load_json(cert_path)),
                                           garbling);
            } else if (kind_arg == "dominant") {
                vals = bounds_anonymous_dominant(g, strong_cert_from_json(load_json(cert_path)),
                                                 garbling);
            } else if (kind_arg == "general") {
                std::vector<double> delta;
                std::stringstream ss(list_arg);
                std::string tok;
                while (std::getline(ss, tok, ',')) delta.push_back(std::stod(tok));
                vals = bounds_anonymous_general(g, strong_cert_from_json(load_json(cert_path)),
                                                garbling, delta);
            } else {
                throw ParameterViolation("unknown bound kind: " + kind_arg);
            }
            json jr = json{{"kind", kind_arg}, {"bounds", vals}};
            if (!out_path.empty()) save_json(jr, out_path);
            std::cout << jr.dump(2) << '\n';
            return 0;
        }

        // Dataset commands.
        OpinionDataset ds = load_dataset(group_file, model_file);
        ScoreRule score = score_rule_from_string(score_arg);
        std::string stem = partition_stem(group_file) + "_" + score_arg;
        std::filesystem::path dir = out_path.empty() ? "." : out_path;
        std::filesystem::create_directories(dir);
        if (fit_weak->parsed()) {
            WeakFitReport rep = fit_weak_user(
                ds, user, parse_indices(providers_arg, ds.num_models()), score, folds, seed);
            save_json(to_json(rep), (dir / ("fit-weak_" + stem + ".json")).string());
            std::vector<std::string> rows;
            for (std::size_t c = 0; c < rep.providers.size(); ++c)
                rows.push_back(std::to_string(rep.providers[c]) + "," + ds.models[rep.providers[c]] +
                               "," + fmt(rep.weights[c]));
            write_csv((dir / ("fit-weak_" + stem + ".csv")).string(), "provider,model,weight",
                      rows);
            std::cout << to_json(rep).dump(2) << '\n';
            return 0;
        }
        if (fit_strong->parsed()) {
            StrongFitReport rep =
                fit_strong_provider(ds, provider, parse_indices(groups_arg, ds.num_groups()),
                                    score, samples, folds, seed);
            save_json(to_json(rep), (dir / ("fit-strong_" + stem + ".json")).string());
            std::vector<std::string> rows;
            for (std::size_t c = 0; c < rep.users.size(); ++c)
                rows.push_back(std::to_string(rep.users[c]) + "," + ds.groups[rep.users[c]] + "," +
                               fmt(rep.weights[c]));
            write_csv((dir / ("fit-strong_" + stem + ".csv")).string(), "user,group,lambda",
                      rows);
            std::cout << to_json(rep).dump(2) << '\n';
            return 0;
        }
        if (transfer->parsed()) {
            std::vector<int> ks = parse_indices(list_arg, 0);
            if (ks.empty())
                for (int k = 1; k <= ds.num_models(); ++k) ks.push_back(k);
            auto curve = transfer_curve(ds, score, ks, seed, samples, folds);
            std::vector<std::string> rows;
            json jrows = json::array();
            for (const auto& p : curve) {
                rows.push_back(std::to_string(p.K) + "," + fmt(p.mean_transfer) + "," +
                               fmt(p.worst_transfer));
                jrows.push_back({{"K", p.K},
                                 {"mean_transfer", p.mean_transfer},
                                 {"worst_transfer", p.worst_transfer}});
            }
            write_csv((dir / ("transfer_" + stem + ".csv")).string(),
                      "K,mean_transfer,worst_transfer", rows);
            save_json(jrows, (dir / ("transfer_" + stem + ".json")).string());
            std::cout << jrows.dump(2) << '\n';
            return 0;
        }
        if (subsets->parsed()) {
            std::vector<int> sizes = parse_indices(list_arg, 0);
            if (sizes.empty())
                for (int s = 1; s <= ds.num_models(); ++s) sizes.push_back(s);
            auto table = subset_analysis(ds, score, sizes, seed, samples, folds);
            std::vector<std::string> rows;
            json jrows = json::array();
            for (const auto& p : table) {
                rows.push_back(std::to_string(p.size) + "," + fmt(p.best) + "," + fmt(p.mean) +
                               "," + fmt(p.worst));
                jrows.push_back({{"size", p.size},
                                 {"best", p.best},
                                 {"mean", p.mean},
                                 {"worst", p.worst}});
            }
            write_csv((dir / ("subsets_" + stem + ".csv")).string(), "size,best,mean,worst",
                      rows);
            save_json(jrows, (dir / ("subsets_" + stem + ".json")).string());
            std::cout << jrows.dump(2) << '\n';
            return 0;
        }
        if (tradeoff->parsed()) {
            std::vector<int> counts = parse_indices(list_arg, 0);
            if (counts.empty())
                for (int c = 1; c <= ds.num_groups(); ++c) counts.push_back(c);
            auto table = user_count_tradeoff(ds, score, counts, seed, samples, folds);
            std::vector<std::string> rows;
            json jrows = json::array();
            for (const auto& p : table) {
                rows.push_back(std::to_string(p.users) + "," + fmt(p.epsilon_proxy_rmse) + "," +
                               fmt(p.worst_transfer));
                jrows.push_back({{"users", p.users},
                                 {"epsilon_proxy_rmse", p.epsilon_proxy_rmse},
                                 {"worst_transfer", p.worst_transfer}});
            }
            write_csv((dir / ("tradeoff_" + stem + ".csv")).string(),
                      "users,epsilon_proxy_rmse,worst_transfer", rows);
            save_json(jrows, (dir / ("tradeoff_" + stem + ".json")).string());
            std::cout << jrows.dump(2) << '\n';
            return 0;
        }
        if (base->parsed()) {
            BaselineReport rep = baselines(ds, user, score);
            json jr = {{"user", user},
                       {"best_single_provider", rep.best_single_provider},
                       {"best_single_rmse", rep.best_single_rmse},
                       {"equal_weight_rmse", rep.equal_weight_rmse}};
            write_csv((dir / ("baselines_" + stem + ".csv")).string(),
                      "user,best_single_provider,best_single_rmse,equal_weight_rmse",
                      {std::to_string(user) + "," + std::to_string(rep.best_single_provider) +
                       "," + fmt(rep.best_single_rmse) + "," + fmt(rep.equal_weight_rmse)});
            save_json(jr, (dir / ("baselines_" + stem + ".json")).string());
            std::cout << jr.dump(2) << '\n';
            return 0;
        }
    } catch (const MarketError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
