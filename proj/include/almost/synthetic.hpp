#pragma once

#include "almost/aig.hpp"

#include <cstdint>

namespace almost
{

struct SyntheticSpec
{
  uint32_t num_inputs = 16;
  /// Target number of AND nodes; generation stops at the first gate reaching it.
  uint32_t num_ands = 500;
  /// Minimum output count; every dangling signal also becomes an output.
  uint32_t num_outputs = 8;
  uint64_t seed = 1;
};

/*! \brief Seeded random combinational circuit.
 *
 * Gates (AND, OR, NAND, NOR, XOR, XNOR) pick operands from the existing
 * signals with a bias toward recent ones, which produces deep, reconvergent
 * logic with some redundancy for synthesis to remove.  Outputs are all
 * dangling signals, newest first, topped up with random signals.
 */
Aig generate_random_aig( const SyntheticSpec& spec );

} // namespace almost
