#pragma once

#include <stdexcept>
#include <string>

namespace pisynth {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// expression layer
class UnboundSymbol : public Error {
 public:
  explicit UnboundSymbol(const std::string& name)
      : Error("unbound symbol '" + name + "'"), symbol(name) {}
  std::string symbol;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t pos)
      : Error(what + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

class DuplicateVariable : public Error {
 public:
  explicit DuplicateVariable(const std::string& name)
      : Error("duplicate variable '" + name + "'"), variable(name) {}
  std::string variable;
};

// models
class InvalidSystem : public Error {
 public:
  using Error::Error;
};

class SymbolMismatch : public Error {
 public:
  explicit SymbolMismatch(const std::string& name)
      : Error("law uses symbol '" + name + "' unknown to the system"), symbol(name) {}
  std::string symbol;
};

// geometry
class NotOnManifold : public Error {
 public:
  using Error::Error;
};

class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

class NonIntegrableConnection : public Error {
 public:
  NonIntegrableConnection(std::size_t i_, std::size_t j_)
      : Error("connection row not integrable: cross partials differ for (" +
              std::to_string(i_ + 1) + ", " + std::to_string(j_ + 1) + ")"),
        i(i_), j(j_) {}
  std::size_t i, j;  // zero-based state indices
};

class OrientationError : public Error {
 public:
  using Error::Error;
};

// synthesis
class NonpositiveRate : public Error {
 public:
  using Error::Error;
};

class UnactuatedManifold : public Error {
 public:
  using Error::Error;
};

class ZeroGain : public Error {
 public:
  explicit ZeroGain(std::size_t m)
      : Error("gain vartheta_" + std::to_string(m + 1) + " is zero"), index(m) {}
  std::size_t index;
};

class ConnectionSingular : public Error {
 public:
  using Error::Error;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

// catalog / analysis
class UnknownId : public Error {
 public:
  explicit UnknownId(const std::string& id) : Error("unknown catalog id '" + id + "'"), id(id) {}
  std::string id;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace pisynth
