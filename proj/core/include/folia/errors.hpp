#pragma once

#include <stdexcept>
#include <string>

namespace folia {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry-core
class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

class DegenerateRestriction : public Error {
 public:
  using Error::Error;
};

/// A geodesic left a non-periodic chart domain at canonical parameter `s`.
class DomainExit : public Error {
 public:
  DomainExit(const std::string& what, double s) : Error(what), parameter(s) {}
  double parameter;
};

// foliation-models
class ModelError : public Error {
 public:
  using Error::Error;
};

class NotAnosov : public ModelError {
 public:
  using ModelError::ModelError;
};

class ZeroScale : public ModelError {
 public:
  using ModelError::ModelError;
};

// holonomy-transport
class PathLeavesLeaf : public Error {
 public:
  using Error::Error;
};

class DiskTooLarge : public Error {
 public:
  using Error::Error;
};

class TransferBreakdown : public Error {
 public:
  TransferBreakdown(const std::string& what, double at) : Error(what), parameter(at) {}
  double parameter;
};

class UnknownLeafClass : public Error {
 public:
  using Error::Error;
};

// graph-groupoid
class LeafMismatch : public Error {
 public:
  using Error::Error;
};

class EndpointMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidDecomposition : public Error {
 public:
  using Error::Error;
};

class NotPseudoRiemannian : public Error {
 public:
  using Error::Error;
};

// cli-runner
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace folia
