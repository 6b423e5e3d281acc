#pragma once

#include <stdexcept>
#include <string>

namespace sucil {

// Root of the library's error hierarchy.  Everything thrown on purpose
// derives from this, so callers can catch one type at the boundary.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A supplied point set cannot anchor a secant fit: the augmented point
// matrix is (numerically) singular.
class NotPoisedError : public Error {
public:
  explicit NotPoisedError(const std::string& what) : Error(what) {}
};

// A query point sits on a cone boundary within tolerance, so cone
// membership cannot be decided one way or the other.
class AmbiguousMembershipError : public Error {
public:
  explicit AmbiguousMembershipError(const std::string& what) : Error(what) {}
};

// Vectors or point sets with inconsistent dimensions were mixed.
class DimensionMismatchError : public Error {
public:
  explicit DimensionMismatchError(const std::string& what) : Error(what) {}
};

// An operation that needs at least one active lattice point found none.
class EmptyActiveSetError : public Error {
public:
  explicit EmptyActiveSetError(const std::string& what) : Error(what) {}
};

// Requested problem name is not registered.
class UnknownProblemError : public Error {
public:
  explicit UnknownProblemError(const std::string& what) : Error(what) {}
};

// Problem family requires a larger dimension than requested.
class DimensionTooSmallError : public Error {
public:
  explicit DimensionTooSmallError(const std::string& what) : Error(what) {}
};

// The oracle was asked for a point it already evaluated; the solver is
// expected to cache function values, so this flags a bookkeeping bug.
class DuplicateEvaluationError : public Error {
public:
  explicit DuplicateEvaluationError(const std::string& what) : Error(what) {}
};

// The initial stencil around the start point leaves the box.
class StencilOutsideBoxError : public Error {
public:
  explicit StencilOutsideBoxError(const std::string& what) : Error(what) {}
};

// Requested lattice is too large to hold in memory.
class LatticeTooLargeError : public Error {
public:
  explicit LatticeTooLargeError(const std::string& what) : Error(what) {}
};

// MILP assembly found no poised subset among the evaluated points.
class NoPoisedSubsetError : public Error {
public:
  explicit NoPoisedSubsetError(const std::string& what) : Error(what) {}
};

// A cut facet has a (near-)zero normal and cannot be rationalized.
class ZeroNormalError : public Error {
public:
  explicit ZeroNormalError(const std::string& what) : Error(what) {}
};

// File could not be read or written.
class IoFailureError : public Error {
public:
  explicit IoFailureError(const std::string& what) : Error(what) {}
};

// A candidate assignment omits variables of the model it is checked against.
class IncompleteAssignmentError : public Error {
public:
  explicit IncompleteAssignmentError(const std::string& what) : Error(what) {}
};

// Benchmark table lacks a (solver, problem) record required by a profile.
class MissingPairError : public Error {
public:
  explicit MissingPairError(const std::string& what) : Error(what) {}
};

// External results file does not match the expected column schema.
class SchemaMismatchError : public Error {
public:
  explicit SchemaMismatchError(const std::string& what) : Error(what) {}
};

}  // namespace sucil
