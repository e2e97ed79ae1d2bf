#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "market/constructions.hpp"
#include "market/nnls.hpp"
#include "market/serialization.hpp"

namespace py = pybind11;
using namespace market;

namespace {

py::object json_to_py(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return py::none();
        case json::value_t::boolean: return py::bool_(j.get<bool>());
        case json::value_t::number_integer: return py::int_(j.get<long long>());
        case json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
        case json::value_t::number_float: return py::float_(j.get<double>());
        case json::value_t::string: return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const json& v : j) out.append(json_to_py(v));
            return out;
        }
        case json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it)
                out[py::str(it.key())] = json_to_py(it.value());
            return out;
        }
        default: return py::none();
    }
}

DeviationClass exhaustive_class() { return DeviationClass{}; }

}  // namespace

PYBIND11_MODULE(_market, m) {
    m.doc() = "exact persuasion-market engine: equilibria, alignment certificates, "
              "survey fitting";

    py::register_exception<MarketError>(m, "MarketError");

    py::class_<GameInstance>(m, "GameInstance")
        .def(py::init<>())
        .def_readwrite("states", &GameInstance::states)
        .def_readwrite("user_features", &GameInstance::user_features)
        .def_readwrite("provider_features", &GameInstance::provider_features)
        .def_readwrite("prior", &GameInstance::prior)
        .def_readwrite("action_sets", &GameInstance::action_sets)
        .def_readwrite("user_utils", &GameInstance::user_utils)
        .def_readwrite("provider_utils", &GameInstance::provider_utils)
        .def_readwrite("messages", &GameInstance::messages)
        .def_readwrite("rounds", &GameInstance::rounds)
        .def_property_readonly("num_users", &GameInstance::num_users)
        .def_property_readonly("num_providers", &GameInstance::num_providers)
        .def_property_readonly("num_states", &GameInstance::num_states)
        .def("validate", &GameInstance::validate)
        .def("to_json", [](const GameInstance& g) { return to_json(g).dump(2); })
        .def_static("from_json",
                    [](const std::string& s) { return game_from_json(json::parse(s)); });

    py::class_<ProviderRule>(m, "ProviderRule")
        .def_readonly("deterministic", &ProviderRule::deterministic)
        .def("to_json", [](const ProviderRule& r) { return to_json(r).dump(2); })
        .def_static("from_json",
                    [](const std::string& s) { return rule_from_json(json::parse(s)); });

    m.def("make_public_example", &make_public_example, py::arg("eps"), py::arg("c"),
          py::arg("M"), py::arg("D"));
    m.def("make_strict_separation", &make_strict_separation);
    m.def("make_public_adding_users", &make_public_adding_users);

    m.def("constant_rule", &constant_rule, py::arg("game"), py::arg("provider"),
          py::arg("message"));
    m.def("full_revelation_rule", &make_full_revelation_rule, py::arg("game"),
          py::arg("provider"));
    m.def("deterministic_rules", &enumerate_deterministic_rules, py::arg("game"),
          py::arg("provider"), py::arg("cap") = std::uint64_t{10'000'000});

    m.def(
        "benchmark",
        [](const GameInstance& g, int user, const std::vector<int>& providers, int rounds) {
            GarblingSpec z = garbling_identical_features(g, providers);
            return benchmark_shared(g, user, z, rounds);
        },
        py::arg("game"), py::arg("user"), py::arg("providers"), py::arg("rounds"),
        "User's best utility against any shared rule over the providers' common feature.");

    m.def(
        "verify_anonymous",
        [](const GameInstance& g, const std::vector<ProviderRule>& rules, double eps) {
            EquilibriumReport rep = verify_anonymous_NE(g, {rules}, exhaustive_class(), eps);
            return json_to_py(to_json(rep));
        },
        py::arg("game"), py::arg("rules"), py::arg("eps") = 1e-9);
    m.def(
        "verify_personalized",
        [](const GameInstance& g, const std::vector<std::vector<ProviderRule>>& rules,
           double eps) {
            PersonalizedProfile prof;
            prof.rules = rules;
            EquilibriumReport rep = verify_personalized_NE(g, prof, exhaustive_class(), eps);
            return json_to_py(to_json(rep));
        },
        py::arg("game"), py::arg("rules"), py::arg("eps") = 1e-9);
    m.def(
        "pure_equilibria",
        [](const GameInstance& g, bool personalized, double eps) {
            std::vector<std::vector<ProviderRule>> spaces;
            for (int j = 0; j < g.num_providers(); ++j)
                spaces.push_back(enumerate_deterministic_rules(g, j));
            auto eqs = enumerate_pure_equilibria(
                g, spaces, personalized ? GameMode::Personalized : GameMode::Anonymous, eps);
            py::list out;
            for (const EnumeratedEquilibrium& e : eqs) {
                py::dict d;
                d["assignment"] = e.assignment;
                d["report"] = json_to_py(to_json(e.report));
                out.append(d);
            }
            return out;
        },
        py::arg("game"), py::arg("personalized") = false, py::arg("eps") = 1e-9);

    m.def(
        "fit_strong_exact",
        [](const GameInstance& g, int provider, const std::vector<int>& users) {
            return json_to_py(to_json(fit_strong_exact(g, provider, users)));
        },
        py::arg("game"), py::arg("provider"), py::arg("users"),
        "Minimax fit of one provider's utility as a nonnegative combination of user "
        "utilities.");
    m.def(
        "check_strong",
        [](const GameInstance& g, const std::string& cert_json) {
            return check_strong(g, strong_cert_from_json(json::parse(cert_json)));
        },
        py::arg("game"), py::arg("cert_json"));
    m.def(
        "check_weak",
        [](const GameInstance& g, const std::string& cert_json) {
            return check_weak(g, weak_cert_from_json(json::parse(cert_json)));
        },
        py::arg("game"), py::arg("cert_json"));

    m.def(
        "solve_nnls",
        [](const Eigen::MatrixXd& A, const Eigen::VectorXd& b, bool fit_intercept,
           const std::vector<bool>& nonneg) {
            NnlsOptions opts;
            opts.fit_intercept = fit_intercept;
            opts.nonneg = nonneg;
            NnlsResult r = solve_nnls(A, b, opts);
            py::dict d;
            d["weights"] = std::vector<double>(r.weights.data(),
                                               r.weights.data() + r.weights.size());
            d["intercept"] = r.intercept;
            d["objective"] = r.objective;
            d["kkt_violation"] = r.kkt_violation;
            d["degenerate"] = r.degenerate;
            d["iterations"] = r.iterations;
            return d;
        },
        py::arg("A"), py::arg("b"), py::arg("fit_intercept") = true,
        py::arg("nonneg") = std::vector<bool>{});

    py::class_<OpinionDataset>(m, "OpinionDataset")
        .def_property_readonly("num_questions", &OpinionDataset::num_questions)
        .def_readonly("groups", &OpinionDataset::groups)
        .def_readonly("models", &OpinionDataset::models);
    m.def("load_dataset", &load_dataset, py::arg("group_file"), py::arg("model_file"));
    m.def("score_transform",
          [](const std::vector<double>& q, const std::string& rule) {
              return score_transform(q, score_rule_from_string(rule));
          },
          py::arg("distribution"), py::arg("score"));
    m.def(
        "fit_weak_user",
        [](const OpinionDataset& ds, int user, const std::vector<int>& providers,
           const std::string& score, int folds, std::uint64_t seed) {
            return json_to_py(
                to_json(fit_weak_user(ds, user, providers, score_rule_from_string(score),
                                      folds, seed)));
        },
        py::arg("dataset"), py::arg("user"), py::arg("providers"),
        py::arg("score") = "linear", py::arg("folds") = 5, py::arg("seed") = 0);
    m.def(
        "fit_strong_provider",
        [](const OpinionDataset& ds, int provider, const std::vector<int>& users,
           const std::string& score, int samples, int folds, std::uint64_t seed) {
            return json_to_py(to_json(fit_strong_provider(
                ds, provider, users, score_rule_from_string(score), samples, folds, seed)));
        },
        py::arg("dataset"), py::arg("provider"), py::arg("users"),
        py::arg("score") = "linear", py::arg("samples_per_question") = 64,
        py::arg("folds") = 5, py::arg("seed") = 0);
    m.def(
        "transfer_for_subset",
        [](const OpinionDataset& ds, const std::vector<int>& providers,
           const std::vector<int>& users, const std::string& score, int samples, int folds,
           std::uint64_t seed) {
            return json_to_py(to_json(transfer_for_subset(
                ds, providers, users, score_rule_from_string(score), samples, folds, seed)));
        },
        py::arg("dataset"), py::arg("providers"), py::arg("users"),
        py::arg("score") = "linear", py::arg("samples_per_question") = 64,
        py::arg("folds") = 5, py::arg("seed") = 0);
    m.def(
        "baselines",
        [](const OpinionDataset& ds, int user, const std::string& score) {
            BaselineReport r = baselines(ds, user, score_rule_from_string(score));
            py::dict d;
            d["best_single_rmse"] = r.best_single_rmse;
            d["best_single_provider"] = r.best_single_provider;
            d["equal_weight_rmse"] = r.equal_weight_rmse;
            return d;
        },
        py::arg("dataset"), py::arg("user"), py::arg("score") = "linear");

    m.attr("schema_version") = kSchemaVersion;
}
