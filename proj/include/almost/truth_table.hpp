/*!
  \file truth_table.hpp
  \brief Dense truth tables over up to 16 variables and Minato-Morreale ISOP
*/

#pragma once

#include <cstdint>
#include <vector>

namespace almost
{

/*! \brief Truth table of a function over `num_vars` variables.
 *
 * Always stores at least one 64-bit word; functions over fewer than six
 * variables are replicated across the word so that word-level operations stay
 * valid.
 */
class TruthTable
{
public:
  TruthTable() = default;
  explicit TruthTable( uint32_t num_vars ) : num_vars_( num_vars ), words_( num_words( num_vars ), 0 ) {}

  static uint32_t num_words( uint32_t num_vars ) { return num_vars <= 6 ? 1u : ( 1u << ( num_vars - 6 ) ); }
  static TruthTable nth_var( uint32_t num_vars, uint32_t var );
  static TruthTable constant( uint32_t num_vars, bool value );

  uint32_t num_vars() const { return num_vars_; }
  std::vector<uint64_t>& words() { return words_; }
  const std::vector<uint64_t>& words() const { return words_; }

  bool is_const0() const;
  bool is_const1() const;
  bool bit( uint64_t minterm ) const { return ( words_[minterm >> 6] >> ( minterm & 63 ) ) & 1u; }

  TruthTable operator~() const;
  TruthTable operator&( const TruthTable& o ) const;
  TruthTable operator|( const TruthTable& o ) const;
  TruthTable operator^( const TruthTable& o ) const;
  bool operator==( const TruthTable& o ) const { return words_ == o.words_; }

  /// Cofactor with `var` fixed, still expressed over all variables.
  TruthTable cofactor0( uint32_t var ) const;
  TruthTable cofactor1( uint32_t var ) const;
  bool depends_on( uint32_t var ) const { return !( cofactor0( var ) == cofactor1( var ) ); }

private:
  uint32_t num_vars_ = 0;
  std::vector<uint64_t> words_;
};

/// Product term: variable i appears positive if bit i of `pos`, negative if bit i of `neg`.
struct Cube
{
  uint32_t pos = 0;
  uint32_t neg = 0;

  uint32_t num_literals() const { return static_cast<uint32_t>( __builtin_popcount( pos ) + __builtin_popcount( neg ) ); }
  bool operator==( const Cube& ) const = default;
};

/*! \brief Irredundant sum-of-products cover of `f`.
 *
 * Minato-Morreale recursion on the interval [f, f]; the returned cubes cover
 * exactly the on-set of `f`.
 */
std::vector<Cube> isop( const TruthTable& f );

/// Truth table of a cover, for checking.
TruthTable cover_table( const std::vector<Cube>& cubes, uint32_t num_vars );

} // namespace almost
