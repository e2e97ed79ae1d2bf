#include "market/serialization.hpp"

#include <fstream>

namespace market {

namespace {

void require_version(const json& j, const char* type) {
    if (!j.is_object() || j.value("type", "") != type)
        throw SchemaError(std::string("expected a ") + type + " document");
    if (j.value("schema_version", "") != kSchemaVersion)
        throw SchemaError(std::string("unsupported schema_version for ") + type);
}

json header(const char* type) {
    return json{{"type", type}, {"schema_version", kSchemaVersion}};
}

}  // namespace

json to_json(const GameInstance& g) {
    json j = header("game_instance");
    j["states"] = g.states;
    j["user_features"] = g.user_features;
    j["provider_features"] = g.provider_features;
    j["prior"] = g.prior;  // row-major over (y, x^U_1..n, x^P_1..k), y slowest
    j["action_sets"] = g.action_sets;
    j["user_utils"] = g.user_utils;
    j["provider_utils"] = g.provider_utils;
    json sep = json::array();
    for (const auto& s : g.provider_utils_sep) {
        if (!s) {
            sep.push_back(nullptr);
        } else {
            sep.push_back(json{{"components", s->components},
                               {"weights", s->weights},
                               {"intercept", s->intercept}});
        }
    }
    j["provider_utils_sep"] = sep;
    j["messages"] = g.messages;
    j["rounds"] = g.rounds;
    j["action_order"] = g.action_order;
    j["provider_order"] = g.provider_order;
    return j;
}

GameInstance game_from_json(const json& j) {
    require_version(j, "game_instance");
    GameInstance g;
    try {
        j.at("states").get_to(g.states);
        j.at("user_features").get_to(g.user_features);
        j.at("provider_features").get_to(g.provider_features);
        j.at("prior").get_to(g.prior);
        j.at("action_sets").get_to(g.action_sets);
        j.at("user_utils").get_to(g.user_utils);
        j.at("provider_utils").get_to(g.provider_utils);
        for (const json& s : j.at("provider_utils_sep")) {
            if (s.is_null()) {
                g.provider_utils_sep.emplace_back(std::nullopt);
            } else {
                SeparableProviderUtility u;
                s.at("components").get_to(u.components);
                s.at("weights").get_to(u.weights);
                u.intercept = s.value("intercept", 0.0);
                g.provider_utils_sep.emplace_back(std::move(u));
            }
        }
        j.at("messages").get_to(g.messages);
        g.rounds = j.at("rounds").get<int>();
        if (j.contains("action_order")) j.at("action_order").get_to(g.action_order);
        if (j.contains("provider_order")) j.at("provider_order").get_to(g.provider_order);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed game_instance: ") + e.what());
    }
    g.validate();
    return g;
}

json to_json(const ProviderRule& rule) {
    json rows = json::array();
    for (const auto& [key, probs] : rule.rows)
        rows.push_back(json{{"feature", key.first}, {"prefix", key.second}, {"probs", probs}});
    json j = header("provider_rule");
    j["deterministic"] = rule.deterministic;
    j["rows"] = rows;
    return j;
}

ProviderRule rule_from_json(const json& j) {
    require_version(j, "provider_rule");
    ProviderRule rule;
    try {
        rule.deterministic = j.value("deterministic", false);
        for (const json& row : j.at("rows"))
            rule.set_row(row.at("feature").get<int>(),
                         row.at("prefix").get<std::vector<int>>(),
                         row.at("probs").get<Dist>());
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed provider_rule: ") + e.what());
    }
    return rule;
}

json to_json(const AnonymousProfile& p) {
    json j = header("anonymous_profile");
    json rules = json::array();
    for (const ProviderRule& r : p.rules) rules.push_back(to_json(r));
    j["rules"] = rules;
    return j;
}

AnonymousProfile anonymous_profile_from_json(const json& j) {
    require_version(j, "anonymous_profile");
    AnonymousProfile p;
    for (const json& r : j.at("rules")) p.rules.push_back(rule_from_json(r));
    return p;
}

json to_json(const PersonalizedProfile& p) {
    json j = header("personalized_profile");
    json rules = json::array();
    for (const auto& per_user : p.rules) {
        json row = json::array();
        for (const ProviderRule& r : per_user) row.push_back(to_json(r));
        rules.push_back(row);
    }
    j["rules"] = rules;
    return j;
}

PersonalizedProfile personalized_profile_from_json(const json& j) {
    require_version(j, "personalized_profile");
    PersonalizedProfile p;
    for (const json& per_user : j.at("rules")) {
        std::vector<ProviderRule> row;
        for (const json& r : per_user) row.push_back(rule_from_json(r));
        p.rules.push_back(std::move(row));
    }
    return p;
}

json to_json(const GarblingSpec& g) {
    json j = header("garbling");
    j["labels"] = g.labels;
    j["maps"] = g.maps;
    j["providers"] = g.providers;
    j["conditional"] = g.conditional;
    return j;
}

GarblingSpec garbling_from_json(const json& j) {
    require_version(j, "garbling");
    GarblingSpec g;
    try {
        j.at("labels").get_to(g.labels);
        j.at("maps").get_to(g.maps);
        j.at("providers").get_to(g.providers);
        j.at("conditional").get_to(g.conditional);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed garbling: ") + e.what());
    }
    return g;
}

json to_json(const WeakAlignmentCert& c) {
    json j = header("weak_cert");
    j["providers"] = c.providers;
    j["components"] = c.components;
    j["provider_weights"] = c.provider_weights;
    j["provider_intercepts"] = c.provider_intercepts;
    j["user_weights"] = c.user_weights;
    j["user_intercepts"] = c.user_intercepts;
    j["eps_provider"] = c.eps_provider;
    j["eps_user"] = c.eps_user;
    return j;
}

WeakAlignmentCert weak_cert_from_json(const json& j) {
    require_version(j, "weak_cert");
    WeakAlignmentCert c;
    try {
        j.at("providers").get_to(c.providers);
        j.at("components").get_to(c.components);
        j.at("provider_weights").get_to(c.provider_weights);
        j.at("provider_intercepts").get_to(c.provider_intercepts);
        j.at("user_weights").get_to(c.user_weights);
        j.at("user_intercepts").get_to(c.user_intercepts);
        c.eps_provider = j.at("eps_provider").get<double>();
        c.eps_user = j.at("eps_user").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed weak_cert: ") + e.what());
    }
    return c;
}

json to_json(const StrongAlignmentCert& c) {
    json j = header("strong_cert");
    j["providers"] = c.providers;
    j["weights"] = c.weights;
    j["intercepts"] = c.intercepts;
    j["eps"] = c.eps;
    return j;
}

StrongAlignmentCert strong_cert_from_json(const json& j) {
    require_version(j, "strong_cert");
    StrongAlignmentCert c;
    try {
        j.at("providers").get_to(c.providers);
        j.at("weights").get_to(c.weights);
        j.at("intercepts").get_to(c.intercepts);
        c.eps = j.at("eps").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed strong_cert: ") + e.what());
    }
    return c;
}

json to_json(const EquilibriumReport& r) {
    json j = header("equilibrium_report");
    j["provider_max_gain"] = r.provider_max_gain;
    j["max_gain"] = r.max_gain;
    j["user_utilities"] = r.user_utilities;
    j["provider_utilities"] = r.provider_utilities;
    j["deviation_class"] = r.deviation_class;
    j["eps"] = r.eps;
    j["pass"] = r.pass;
    if (r.witness) {
        j["witness"] = json{{"provider", r.witness->provider},
                            {"user", r.witness->user},
                            {"deviation_index", r.witness->deviation_index},
                            {"gain", r.witness->gain}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

json to_json(const WeakFitReport& r) {
    json j = header("weak_fit_report");
    j["user"] = r.user;
    j["providers"] = r.providers;
    j["weights"] = r.weights;
    j["intercept"] = r.intercept;
    j["full_rmse"] = r.full_rmse;
    j["fold_train_rmse"] = r.fold_train_rmse;
    j["fold_test_rmse"] = r.fold_test_rmse;
    j["mean_train_rmse"] = r.mean_train_rmse;
    j["epsilon_proxy_rmse"] = r.mean_test_rmse;
    j["se_test_rmse"] = r.se_test_rmse;
    j["score"] = to_string(r.score);
    j["folds"] = r.folds;
    j["seed"] = r.seed;
    return j;
}

json to_json(const StrongFitReport& r) {
    json j = header("strong_fit_report");
    j["provider"] = r.provider;
    j["users"] = r.users;
    j["weights"] = r.weights;
    j["intercept"] = r.intercept;
    j["full_rmse"] = r.full_rmse;
    j["fold_train_rmse"] = r.fold_train_rmse;
    j["fold_test_rmse"] = r.fold_test_rmse;
    j["mean_train_rmse"] = r.mean_train_rmse;
    j["epsilon_proxy_rmse"] = r.mean_test_rmse;
    j["se_test_rmse"] = r.se_test_rmse;
    j["score"] = to_string(r.score);
    j["folds"] = r.folds;
    j["seed"] = r.seed;
    j["samples_per_question"] = r.samples_per_question;
    return j;
}

json to_json(const TransferReport& r) {
    json j = header("transfer_report");
    j["providers"] = r.providers;
    j["users"] = r.users;
    json fits = json::array();
    json lambda = json::array();
    for (const StrongFitReport& f : r.fits) {
        fits.push_back(to_json(f));
        lambda.push_back(f.weights);
    }
    j["fits"] = fits;
    j["lambda"] = lambda;  // [provider][user]
    j["transfer"] = r.transfer;
    j["mean_transfer"] = r.mean_transfer;
    j["worst_transfer"] = r.worst_transfer;
    j["epsilon_proxy_rmse"] = r.mean_test_rmse;
    return j;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return j;
}

void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace market
