#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace crossinspect {

// Closed list of state-variable semantic categories.
enum class SemanticCategory : unsigned char {
  AmountUint, TimeUint, PriceUint, SupplyUint,
  NameString, SymbolString, UriString,
  BalanceMapping, AllowanceMapping,
  PausedBool, EnableBool, NonreentrantBool,
  OwnerAddress, WalletAddress,
  Unknown,
};

inline constexpr std::array<std::string_view, 15> kCategoryNames = {
    "AmountUint", "TimeUint", "PriceUint", "SupplyUint",
    "NameString", "SymbolString", "UriString",
    "BalanceMapping", "AllowanceMapping",
    "PausedBool", "EnableBool", "NonreentrantBool",
    "OwnerAddress", "WalletAddress",
    "Unknown",
};

inline std::string_view category_name(SemanticCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

inline std::optional<SemanticCategory> category_from_name(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
    if (kCategoryNames[i] == s) return static_cast<SemanticCategory>(i);
  return std::nullopt;
}

}  // namespace crossinspect
