#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace market {

struct MarketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndefinedRuleRow : MarketError {
    using MarketError::MarketError;
};
struct DimensionMismatch : MarketError {
    using MarketError::MarketError;
};
struct EmptyActionSet : MarketError {
    using MarketError::MarketError;
};
struct SearchSpaceTooLarge : MarketError {
    explicit SearchSpaceTooLarge(std::uint64_t bound)
        : MarketError("search space exceeds cap of " + std::to_string(bound)), bound(bound) {}
    std::uint64_t bound;
};
struct ProfileSpaceTooLarge : MarketError {
    explicit ProfileSpaceTooLarge(std::uint64_t bound)
        : MarketError("action profile space exceeds cap of " + std::to_string(bound)),
          bound(bound) {}
    std::uint64_t bound;
};
struct MessageSpaceTooSmall : MarketError {
    using MarketError::MarketError;
};
struct NotApplicable : MarketError {
    using MarketError::MarketError;
};
struct CoverageViolation : MarketError {
    using MarketError::MarketError;
};
struct ParameterViolation : MarketError {
    using MarketError::MarketError;
};
struct NonFiniteInput : MarketError {
    using MarketError::MarketError;
};
struct SchemaError : MarketError {
    SchemaError(long row, const std::string& reason)
        : MarketError("schema error at row " + std::to_string(row) + ": " + reason), row(row) {}
    explicit SchemaError(const std::string& reason) : MarketError(reason), row(-1) {}
    long row;
};
struct InconsistentOptions : MarketError {
    using MarketError::MarketError;
};
struct InsufficientData : MarketError {
    using MarketError::MarketError;
};

}  // namespace market
