#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrts {

// Precondition failures on otherwise well-formed input (wrong N, K out of
// range, exhaustive cap exceeded, ...). The CLI maps these to exit status 1.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input that does not even have the expected shape: unequal vector lengths,
// non-square or non-triangular matrices.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when collapsing (e, e+1) on a tree in which node e+1 is not a child
// of node e. Distinct from an out-of-range rank, which is a DomainError.
class EdgeNotPresent : public DomainError {
 public:
  explicit EdgeNotPresent(int edge)
      : DomainError("edge (" + std::to_string(edge) + "," +
                    std::to_string(edge + 1) + ") is not present in the tree"),
        edge_(edge) {}

  int edge() const noexcept { return edge_; }

 private:
  int edge_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)),
        reason_(what),
        offset_(offset) {}

  const std::string& reason() const noexcept { return reason_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string reason_;
  std::size_t offset_;
};

}  // namespace mrts
