/*!
  \file npn.hpp
  \brief NPN classification of 4-input functions and a library of small AIG structures

  Every 16-bit truth table maps to a class representative (the smallest
  table in its orbit) and a transform that rebuilds the function from the
  representative.  For each class the library keeps the smallest AND-tree
  found by exhaustive enumeration up to `max_structure_size` nodes; classes
  that need more nodes have no entry.
*/

#pragma once

#include "almost/aig.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace almost
{

/*! \brief `f(x) = output_neg ^ rep(y)` with `y[j] = x[perm[j]] ^ bit j of input_neg`. */
struct NpnTransform
{
  std::array<uint8_t, 4> perm{ 0, 1, 2, 3 };
  uint8_t input_neg = 0;
  bool output_neg = false;
};

/// Truth table of `t` applied to `rep`.
uint16_t apply_npn( const NpnTransform& t, uint16_t rep );

class NpnLibrary
{
public:
  static constexpr uint32_t max_structure_size = 7;

  /// Enumerates the library from scratch.
  static NpnLibrary build();
  /// Process-wide instance, built on first use.
  static const NpnLibrary& instance();

  /// Reads a cache file, or builds and writes it when missing. Throws DataError on write failure.
  static NpnLibrary load_or_build( const std::filesystem::path& cache );
  static NpnLibrary parse( std::string_view text );
  std::string serialize() const;

  uint16_t representative( uint16_t tt ) const { return canon_[tt]; }
  const NpnTransform& transform( uint16_t tt ) const { return transform_[tt]; }
  std::size_t num_classes() const { return classes_.size(); }
  std::size_t num_structures() const;

  /// Structure for the class representative: 4 inputs, 1 output.
  const Aig* structure( uint16_t rep ) const;

  /*! \brief Builds `tt` over `leaves` into `b` using the class structure.
   *
   * Returns `nullopt` when the class has no stored structure.
   */
  std::optional<Literal> instantiate( AigBuilder& b, uint16_t tt, std::span<const Literal, 4> leaves ) const;

  /// Structure AND-node count for `tt`, if a structure exists.
  std::optional<uint32_t> size_of( uint16_t tt ) const;

private:
  void classify();

  std::vector<uint16_t> canon_;
  std::vector<NpnTransform> transform_;
  std::vector<uint16_t> classes_;
  std::unordered_map<uint16_t, Aig> structures_; // keyed by representative
};

/// Maps the leaves of a 4-input structure through a transform.
std::array<Literal, 4> transform_leaves( const NpnTransform& t, std::span<const Literal, 4> leaves );

} // namespace almost
