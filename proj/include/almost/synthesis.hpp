/*!
  \file synthesis.hpp
  \brief AIG transformations and synthesis recipes

  Seven transforms modelled on the classical ABC commands (balance, rewrite,
  refactor, resub and their zero-gain `-z` variants).  Every transform
  returns a functionally equivalent graph; node and depth gains are best
  effort.  No transform uses randomness, so a recipe is a pure function of
  the input graph.
*/

#pragma once

#include "almost/aig.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace almost
{

enum class TransformId : uint8_t
{
  balance,
  rewrite,
  rewrite_z,
  refactor,
  refactor_z,
  resub,
  resub_z
};

inline constexpr std::array<TransformId, 7> all_transform_ids = {
    TransformId::balance,    TransformId::rewrite, TransformId::rewrite_z, TransformId::refactor,
    TransformId::refactor_z, TransformId::resub,   TransformId::resub_z };

/// Short name: b, rw, rwz, rf, rfz, rs, rsz.
std::string_view mnemonic( TransformId t );
std::optional<TransformId> parse_mnemonic( std::string_view m );
/// Equivalent ABC command, e.g. "rewrite -z".
std::string_view abc_command( TransformId t );

struct Recipe
{
  std::vector<TransformId> steps;

  std::size_t size() const { return steps.size(); }
  bool operator==( const Recipe& ) const = default;

  /// Mnemonics joined by '.', e.g. "b.rw.rf.b".
  std::string to_string() const;
  /// Inverse of `to_string`. Throws DataError on unknown mnemonics.
  static Recipe from_string( std::string_view dotted );
};

inline constexpr std::size_t default_recipe_length = 10;

/// The classical resyn2 script: b; rw; rf; b; rw; rwz; b; rfz; rwz; b.
Recipe resyn2_baseline();

/// Uniform i.i.d. steps. Throws std::invalid_argument for length 0.
Recipe random_recipe( std::size_t length, uint64_t seed );

/// Number of distinct recipes, M^L.
uint64_t recipe_space_size( uint64_t num_transforms, uint64_t length );

/// Recipe file: one mnemonic per line, '#' comments.
Recipe parse_recipe_file( std::string_view text );
std::string write_recipe_file( const Recipe& r );

/// ABC command script for cross-checking a recipe with an external synthesizer.
std::string emit_abc_script( const Recipe& r );

struct StepStats
{
  TransformId transform;
  uint32_t nodes_before = 0, nodes_after = 0;
  uint32_t depth_before = 0, depth_after = 0;
};

struct SynthStats
{
  uint32_t nodes_before = 0, nodes_after = 0;
  uint32_t depth_before = 0, depth_after = 0;
  std::vector<StepStats> steps;
};

std::pair<Aig, SynthStats> apply_transform( const Aig& g, TransformId t );

/// Left fold of `apply_transform` over the recipe steps.
std::pair<Aig, SynthStats> apply_recipe( const Aig& g, const Recipe& r );

/// Individual passes, exposed for testing.
Aig balance( const Aig& g );
Aig rewrite( const Aig& g, bool zero_gain );
Aig refactor( const Aig& g, bool zero_gain );
Aig resub( const Aig& g, bool zero_gain );

} // namespace almost
