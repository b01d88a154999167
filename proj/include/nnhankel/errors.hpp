#pragma once

#include <stdexcept>
#include <string>

namespace nnh {

/// A square matrix whose anti-diagonal k varies by more than the tolerance.
class NotHankelError : public std::runtime_error {
public:
    NotHankelError(int antidiag, double deviation)
        : std::runtime_error("matrix is not Hankel: anti-diagonal " + std::to_string(antidiag) +
                             " varies by " + std::to_string(deviation)),
          antidiag_(antidiag),
          deviation_(deviation) {}

    int antidiag() const noexcept { return antidiag_; }       // 1-based anti-diagonal index
    double deviation() const noexcept { return deviation_; }  // max minus min along it

private:
    int antidiag_;
    double deviation_;
};

class DimensionMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MaxIterationsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidEigenpairError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The enumeration oracle is restricted to 2n-1 <= 9 bound constraints.
class OracleTooLargeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EigDecompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed instance/result file (bad JSON, wrong schema, inconsistent sizes).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nnh
