#ifndef KZMPS_IO_HPP
#define KZMPS_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "kzmps/umps.hpp"

namespace kzmps {

/// Versioned binary snapshot of a canonical state. Raw IEEE doubles are
/// written as-is; load reproduces the state bit-exactly.
void save_state(const CanonicalUMPS& psi, const std::string& path);
CanonicalUMPS load_state(const std::string& path);

/// Evolution checkpoint: state plus schedule position and the configuration
/// hash of the producing run.
struct Checkpoint {
  CanonicalUMPS state;
  double t = 0.0;
  std::uint64_t step = 0;
  std::uint64_t config_hash = 0;
};

void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// FNV-1a hash of a byte string; used for configuration identity.
std::uint64_t fnv1a(const std::string& bytes);

/// Minimal CSV writer: one header row then data rows, '%.17g' formatting.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& comments = {});

}  // namespace kzmps

#endif
