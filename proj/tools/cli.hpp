#pragma once

#include "llfit/estimation.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>

namespace llfit::cli {

struct Ingested
{
  Sample sample;
  std::size_t total = 0;    ///< values read
  std::size_t dropped = 0;  ///< values <= x_L
};

/// Read newline-separated decimals (or a single-column CSV with an optional
/// header line), keep values strictly above x_l.
/// @throws std::runtime_error naming the line on parse errors, or when fewer
///         than two values survive truncation.
Ingested ingest(const std::string& path, double x_l);

/// Entry point shared by the executable and the tests. Returns the exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace llfit::cli
