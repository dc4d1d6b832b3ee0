#pragma once

#include "almost/aig.hpp"

#include <cstdint>
#include <vector>

namespace almost
{

/*! \brief Bit-packed simulation patterns.
 *
 * Each row holds `num_words * 64` parallel values for one signal.
 */
struct SimBatch
{
  uint32_t num_words = 0;
  std::vector<std::vector<uint64_t>> rows;

  bool get( uint32_t row, uint32_t column ) const { return ( rows[row][column / 64] >> ( column % 64 ) ) & 1u; }
  void set( uint32_t row, uint32_t column, bool value )
  {
    auto& w = rows[row][column / 64];
    const uint64_t bit = uint64_t{ 1 } << ( column % 64 );
    w = value ? ( w | bit ) : ( w & ~bit );
  }
};

SimBatch random_batch( uint32_t num_rows, uint32_t num_words, uint64_t seed );

/// All 2^n assignments of n <= 20 inputs; column c assigns bit i of c to input i.
SimBatch exhaustive_batch( uint32_t num_inputs );

/// Output rows for the given input rows. Throws DataError on input-count mismatch.
SimBatch simulate( const Aig& g, const SimBatch& inputs );

/// Values of every node, flattened as `values[node * num_words + w]`.
std::vector<uint64_t> simulate_nodes( const Aig& g, const SimBatch& inputs );

} // namespace almost
