#pragma once

#include <stdexcept>
#include <string>

namespace comprag {

/// Base class for all comprag errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// chunker
class MalformedRecord : public Error {
 public:
  using Error::Error;
};

class OversizedAtom : public Error {
 public:
  using Error::Error;
};

class ExternalSynthesizerUnavailable : public Error {
 public:
  using Error::Error;
};

// embedder / index
class EmbedderUnavailable : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DuplicateHash : public Error {
 public:
  using Error::Error;
};

class RelevanceViolation : public Error {
 public:
  using Error::Error;
};

class CorruptIndex : public Error {
 public:
  using Error::Error;
};

class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

// filtration / evaluator
class DuplicateKey : public Error {
 public:
  using Error::Error;
};

class NonFiniteScore : public Error {
 public:
  using Error::Error;
};

class PolicyInvalid : public Error {
 public:
  using Error::Error;
};

// recommender
class InvalidBounds : public Error {
 public:
  using Error::Error;
};

// pipeline
class GeneratorUnavailable : public Error {
 public:
  using Error::Error;
};

/// A generator cited a chunk hash that is not in its evidence list.
class GroundingViolation : public Error {
 public:
  using Error::Error;
};

// cli / config
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace comprag
