#ifndef SELFGEN_TESTS_TEST_UTIL_H_
#define SELFGEN_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <ostream>
#include <string>

#include "selfgen/corpus/mr.h"
#include "selfgen/corpus/schema.h"

namespace selfgen {

inline void PrintTo(const MeaningRepresentation& mr, std::ostream* os) {
  *os << SerializeMr(mr);
}

}  // namespace selfgen

namespace selfgen::testing {

inline std::string DataPath(const std::string& rel) {
  return std::string(SELFGEN_DATA_DIR) + "/" + rel;
}

inline const DomainSchema& E2eSchema() {
  static const DomainSchema schema = DomainSchema::LoadFile(DataPath("e2e/schema.json"));
  return schema;
}

inline const DomainSchema& ToySchema() {
  static const DomainSchema schema = DomainSchema::LoadFile(DataPath("toy/schema.json"));
  return schema;
}

inline const DomainSchema& LaptopSchema() {
  static const DomainSchema schema = DomainSchema::LoadFile(DataPath("laptop/schema.json"));
  return schema;
}

inline std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("selfgen_test_" + name);
}

}  // namespace selfgen::testing

#endif  // SELFGEN_TESTS_TEST_UTIL_H_
