#pragma once

#include <string>

#include <json.hpp>

#include "market/alignment.hpp"
#include "market/empirical.hpp"
#include "market/equilibrium.hpp"
#include "market/game.hpp"

namespace market {

inline constexpr const char* kSchemaVersion = "1";

using nlohmann::json;

json to_json(const GameInstance& g);
GameInstance game_from_json(const json& j);

json to_json(const ProviderRule& rule);
ProviderRule rule_from_json(const json& j);

json to_json(const AnonymousProfile& p);
AnonymousProfile anonymous_profile_from_json(const json& j);
json to_json(const PersonalizedProfile& p);
PersonalizedProfile personalized_profile_from_json(const json& j);

json to_json(const GarblingSpec& g);
GarblingSpec garbling_from_json(const json& j);

json to_json(const WeakAlignmentCert& c);
WeakAlignmentCert weak_cert_from_json(const json& j);
json to_json(const StrongAlignmentCert& c);
StrongAlignmentCert strong_cert_from_json(const json& j);

json to_json(const EquilibriumReport& r);
json to_json(const WeakFitReport& r);
json to_json(const StrongFitReport& r);
json to_json(const TransferReport& r);

json load_json(const std::string& path);
void save_json(const json& j, const std::string& path);

}  // namespace market
