#pragma once

#include <stdexcept>
#include <string>

namespace ternkey {

/// Malformed or insufficient input data (measurement files, records, CSVs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checksum or consistency check on persisted helper data failed.
class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace ternkey
