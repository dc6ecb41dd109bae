#ifndef SELFGEN_CORPUS_MR_H_
#define SELFGEN_CORPUS_MR_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "selfgen/corpus/schema.h"

namespace selfgen {

struct Slot {
  std::string attribute;
  std::string value;

  friend bool operator==(const Slot&, const Slot&) = default;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

// A dialogue act plus an ordered multiset of slots.
struct MeaningRepresentation {
  std::string act;
  std::vector<Slot> slots;

  bool Has(std::string_view attribute) const;
  // First value of the attribute, or empty when absent.
  std::string ValueOf(std::string_view attribute) const;
  std::size_t Count(std::string_view attribute) const;

  friend bool operator==(const MeaningRepresentation&,
                         const MeaningRepresentation&) = default;
  friend auto operator<=>(const MeaningRepresentation&,
                          const MeaningRepresentation&) = default;
};

// Parses "act(attr[value], ...)" or the bare E2E form "attr[value], ...".
// Values are mapped to their schema spelling and slots are put in canonical
// order. Throws ParseError on bad syntax and SchemaError on unknown
// attributes, values, or repeat violations.
MeaningRepresentation ParseMr(std::string_view text, const DomainSchema& schema,
                              std::size_t line = 0);

// "act(attr[value], ...)" with slots in canonical order.
std::string SerializeMr(const MeaningRepresentation& mr);

// Stable sort of slots by the schema's attribute order.
void Canonicalize(MeaningRepresentation* mr, const DomainSchema& schema);

// Throws SchemaError describing the first violation.
void ValidateMr(const MeaningRepresentation& mr, const DomainSchema& schema);
bool IsValidMr(const MeaningRepresentation& mr, const DomainSchema& schema);

}  // namespace selfgen

#endif  // SELFGEN_CORPUS_MR_H_
