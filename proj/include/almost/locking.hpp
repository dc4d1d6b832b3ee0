/*!
  \file locking.hpp
  \brief Random logic locking with XOR/XNOR key-gates

  Key inputs are appended after the functional inputs.  A key-gate on host
  wire `w` with key input `k` computes `w ^ k` for bit 0 and `w ^ !k` (an
  XNOR) for bit 1, so the correct key restores `w`.  Both are lowered to the
  same three-node XOR cone; the bit decides the polarity of the key literal
  entering it.
*/

#pragma once

#include "almost/aig.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace almost
{

using Key = std::vector<bool>;

enum class Provenance : uint8_t
{
  original,
  relock
};

std::string_view to_string( Provenance p );

struct KeyGateRecord
{
  /// Node id of the key input (stable under synthesis).
  uint32_t key_input = 0;
  bool bit = false;
  /// Gated wire and key-gate output in the graph as locked (stale after synthesis).
  Literal host;
  Literal root;
  Provenance provenance = Provenance::original;
};

struct LockedDesign
{
  Aig aig;
  uint32_t num_functional_inputs = 0;
  Key key;
  std::vector<KeyGateRecord> key_gates;
  uint64_t lock_seed = 0;

  uint32_t key_size() const { return static_cast<uint32_t>( key.size() ); }
  /// Node id of key input `i`.
  uint32_t key_input_node( uint32_t i ) const { return aig.input_node( num_functional_inputs + i ); }
  /// Same design with the graph replaced (e.g. after synthesis); records are kept.
  LockedDesign with_aig( Aig g ) const;
};

/*! \brief Inserts `key_size` key-gates on distinct random wires.
 *
 * Candidate wires are AND outputs and functional-input fanouts.  Throws
 * std::invalid_argument for key_size 0 or more gates than wires.
 */
LockedDesign lock_rll( const Aig& g, uint32_t key_size, uint64_t seed );

/// Adds `extra_key_size` key-gates with relock provenance; existing key inputs keep their order.
LockedDesign relock( const LockedDesign& ld, uint32_t extra_key_size, uint64_t seed );

/// Ties every key input to its bit and returns the functional-input circuit.
Aig apply_key( const LockedDesign& ld, const Key& key );

/// Key sidecar file: "ALMOST-KEY v1 seed <n>" then one `key_input ... provenance ...` line per gate.
std::string write_key_file( const LockedDesign& ld );

/// Rebuilds a design from its graph and key file. Throws ParseError / DataError.
LockedDesign read_locked( Aig aig, std::string_view key_text );

} // namespace almost
