#pragma once

#include "rvs/term_source.hpp"
#include "rvs/weight_family.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rvs {

enum class Expected { Converges, Diverges, Undocumented };

std::string to_string(Expected e);

struct CatalogEntry {
    std::string name;
    std::string formula;
    TermSource source;
    /// Regular-variation index of |a_n|, when it has one.
    std::optional<double> alpha;
    /// Behaviour of sum |a_n|.
    Expected verdict = Expected::Undocumented;
    /// Limit of n(alpha(n) - alpha), when known.
    std::optional<double> second_order;
    /// Weight family the entry is traditionally analyzed with.
    std::optional<WeightFamily> family;
    /// Strictly alternating signs; `alternating_verdict` is for sum a_n itself.
    bool alternating = false;
    Expected alternating_verdict = Expected::Undocumented;
    /// Where the documented values come from.
    std::string provenance;
};

/// All built-in entries in display order.
const std::vector<CatalogEntry>& catalog();

/// Exact name, or a parameterized family member such as "gamma_ratio(0.25)".
std::optional<CatalogEntry> find_entry(std::string_view name);

/// Closest catalog name by edit distance.
std::string nearest_name(std::string_view name);

/// Entry by name; throws std::invalid_argument naming the nearest match.
CatalogEntry entry_or_throw(std::string_view name);

/// Catalog name or formula text. Names win; anything that is not a catalog
/// name is parsed as an expression in n.
TermSource make_term_source(std::string_view spec);

/// Base name of a parameterized entry ("gamma_ratio(-1)" -> "gamma_ratio").
std::string base_name(std::string_view name);

nlohmann::json catalog_json();

} // namespace rvs
