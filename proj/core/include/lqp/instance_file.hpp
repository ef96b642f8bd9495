#pragma once

#include <optional>
#include <string>

#include "lqp/instance.hpp"

namespace lqp {

/// Parsed instance file (JSON, schema_version "1").
struct InstanceFile {
  std::string schema_version;
  int n = 0;
  std::optional<RawGame> raw;
  QuadraticForm qf;
  std::string hypothesis_kind;
  EllipsoidalHypothesis hypothesis;
  PriorSpec prior;

  /// Base matrix C0 of the hypothesis family eps * C0 (C itself when no scale is recorded).
  Matrix base_C() const;
};

/// Throws Error(InputError) with a line number for syntax errors and a field path otherwise.
InstanceFile parse_instance(const std::string& text, const std::string& source = "<input>");
InstanceFile load_instance(const std::string& path);

}  // namespace lqp
