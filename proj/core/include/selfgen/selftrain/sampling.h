#ifndef SELFGEN_SELFTRAIN_SAMPLING_H_
#define SELFGEN_SELFTRAIN_SAMPLING_H_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/mr.h"
#include "selfgen/corpus/schema.h"
#include "selfgen/neural/rng.h"

namespace selfgen {

// Value counts per attribute over the training MRs (one count per example).
class AttributeFrequencyTable {
 public:
  static AttributeFrequencyTable Build(const Dataset& ds);

  std::size_t Count(const std::string& attribute, const std::string& value) const;
  // Proportional to 1 / max(count, 1), normalized within the attribute, in
  // vocabulary order.
  std::vector<double> InverseWeights(const AttributeDef& def) const;
  std::string SampleValue(const AttributeDef& def, RngStream& rng) const;

 private:
  std::map<std::string, std::map<std::string, std::size_t>> counts_;
};

// The default act's required attributes plus a uniform subset of the others
// (size S counts every slot, required ones included), values drawn with
// inverse-frequency weights. Throws ConfigError unless
// |required| + 1 <= S <= number of attributes.
MeaningRepresentation SampleE2eMr(const DomainSchema& schema, std::size_t size,
                                  const AttributeFrequencyTable& freq, RngStream& rng);

// (act, slot count) pairs observed in training data.
class LegalityTable {
 public:
  static LegalityTable Build(const Dataset& ds);
  bool IsLegal(const std::string& act, std::size_t size) const;
  const std::map<std::string, std::set<std::size_t>>& sizes() const { return sizes_; }

 private:
  std::map<std::string, std::set<std::size_t>> sizes_;
};

// Required attributes of `act`, then attributes drawn uniformly without
// replacement from the act's allowed set (each attribute available up to
// max_repeat times), values uniform over the vocabulary with repeated
// attributes taking distinct values. Throws ConfigError for an (act, size)
// pair the table does not license.
MeaningRepresentation SampleDaMr(const DomainSchema& schema, const std::string& act,
                                 std::size_t size, const LegalityTable& legal, RngStream& rng);

}  // namespace selfgen

#endif  // SELFGEN_SELFTRAIN_SAMPLING_H_
