#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "archpat/model.hpp"

namespace archpat {

/// One assignment of a family's quantified variables.
struct FamilyBinding {
  std::string suffix;                        // appended as `family@suffix`; empty for unquantified families
  std::map<std::string, std::string> values;  // variable -> DSL text substituted for `${variable}`
};

/// A universally quantified guarantee and its finite expansion domain.
struct PropertyFamily {
  std::string name;
  std::string template_text;  // LTL in property syntax with `${var}` placeholders
  std::string domain_text;    // human-readable description of the domain
  std::vector<FamilyBinding> domain;
};

struct PatternCatalogEntry {
  std::string id;  // singleton | mvc | broker
  PatternSpec spec;
  std::vector<PropertyFamily> property_families;
  std::vector<Property> alternatives;  // extra readings, not part of spec.properties
  std::string notes;
};

class UnknownPattern : public std::invalid_argument {
 public:
  explicit UnknownPattern(const std::string& id) : std::invalid_argument("unknown pattern '" + id + "'") {}
};

std::vector<std::string> pattern_ids();

/// Built-in pattern; throws UnknownPattern.
const PatternCatalogEntry& get_pattern(const std::string& id);

/// Instantiates every family over its domain, in family then domain order.
std::vector<Property> expand_properties(const PatternCatalogEntry& entry);

struct Mutant {
  std::string id;        // e.g. mvc_mutant_idle
  std::string pattern;   // base pattern id
  std::string description;
  PatternSpec spec;
};

std::vector<std::string> mutant_ids();

/// Throws UnknownPattern.
const Mutant& get_mutant(const std::string& id);

}  // namespace archpat
