#pragma once

#include "almost/aig.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace almost
{

enum class CecMethod
{
  exhaustive,
  sat,
  sampled
};

const char* to_string( CecMethod m );

struct CecResult
{
  bool equivalent = false;
  /// Input assignment on which some output differs (set only when not equivalent).
  std::optional<std::vector<bool>> counterexample;
  CecMethod method = CecMethod::exhaustive;
};

struct CecBudget
{
  uint64_t conflicts = 200'000;
  uint32_t sample_vectors = 10'000;
  uint64_t seed = 0xcec;
};

/// Largest input count checked by full enumeration.
inline constexpr uint32_t exhaustive_input_limit = 14;

/*! \brief Combinational equivalence check of two AIGs over shared inputs.
 *
 * Up to 14 inputs: exhaustive simulation.  Otherwise a miter is solved by
 * `SatSolver`; if the conflict budget runs out, the answer falls back to
 * random simulation over at least `sample_vectors` patterns and
 * `equivalent == true` only means that no counterexample was found.
 *
 * Throws DataError when input or output counts differ.
 */
CecResult check_equiv( const Aig& a, const Aig& b, const CecBudget& budget = {} );

/// Output values of `g` under one input assignment.
std::vector<bool> evaluate( const Aig& g, const std::vector<bool>& assignment );

} // namespace almost
