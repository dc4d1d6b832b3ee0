/*!
  \file aig.hpp
  \brief And-inverter graph with complemented edges and structural hashing

  Node 0 is the constant-FALSE node, nodes 1..num_inputs are primary inputs
  and the remaining nodes are two-input AND gates stored in topological
  order.  An `Aig` is immutable once built; all construction goes through
  `AigBuilder`.
*/

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace almost
{

/*! \brief Edge into a node, optionally complemented.
 *
 * Encoded as `2 * node + complement`, the AIGER convention.
 */
class Literal
{
public:
  constexpr Literal() = default;
  constexpr explicit Literal( uint32_t raw ) : raw_( raw ) {}
  constexpr Literal( uint32_t node, bool complemented ) : raw_( ( node << 1 ) | ( complemented ? 1u : 0u ) ) {}

  static constexpr Literal constant( bool value ) { return Literal( value ? 1u : 0u ); }

  constexpr uint32_t raw() const { return raw_; }
  constexpr uint32_t node() const { return raw_ >> 1; }
  constexpr bool complemented() const { return ( raw_ & 1u ) != 0u; }
  constexpr bool is_constant() const { return node() == 0u; }

  constexpr Literal operator!() const { return Literal( raw_ ^ 1u ); }
  constexpr Literal operator^( bool c ) const { return Literal( raw_ ^ ( c ? 1u : 0u ) ); }
  constexpr Literal regular() const { return Literal( raw_ & ~1u ); }

  constexpr auto operator<=>( const Literal& ) const = default;

private:
  uint32_t raw_ = 0;
};

inline constexpr Literal lit_false = Literal::constant( false );
inline constexpr Literal lit_true = Literal::constant( true );

struct AndNode
{
  Literal fanin0;
  Literal fanin1;
};

enum class NodeKind : uint8_t
{
  constant,
  input,
  and_gate
};

class Aig
{
public:
  Aig() = default;

  uint32_t num_inputs() const { return num_inputs_; }
  uint32_t num_outputs() const { return static_cast<uint32_t>( outputs_.size() ); }
  uint32_t num_ands() const { return static_cast<uint32_t>( ands_.size() ); }
  /// Total node count including the constant and the inputs.
  uint32_t size() const { return 1u + num_inputs_ + num_ands(); }

  NodeKind kind( uint32_t node ) const
  {
    if ( node == 0 )
      return NodeKind::constant;
    return node <= num_inputs_ ? NodeKind::input : NodeKind::and_gate;
  }
  bool is_input( uint32_t node ) const { return node >= 1 && node <= num_inputs_; }
  bool is_and( uint32_t node ) const { return node > num_inputs_ && node < size(); }

  /// Node id of the i-th primary input.
  uint32_t input_node( uint32_t index ) const { return index + 1u; }
  Literal input( uint32_t index ) const { return Literal( index + 1u, false ); }
  uint32_t input_index( uint32_t node ) const { return node - 1u; }

  const AndNode& and_node( uint32_t node ) const { return ands_[node - num_inputs_ - 1u]; }
  Literal fanin0( uint32_t node ) const { return and_node( node ).fanin0; }
  Literal fanin1( uint32_t node ) const { return and_node( node ).fanin1; }
  uint32_t first_and() const { return num_inputs_ + 1u; }

  std::span<const AndNode> ands() const { return ands_; }
  std::span<const Literal> outputs() const { return outputs_; }
  Literal output( uint32_t index ) const { return outputs_[index]; }

  const std::string& input_name( uint32_t index ) const { return input_names_[index]; }
  const std::string& output_name( uint32_t index ) const { return output_names_[index]; }
  /// Input name, or the generated "n<id>" name for internal nodes.
  std::string node_name( uint32_t node ) const;

  /// Input index with the given name, if present.
  std::optional<uint32_t> find_input( std::string_view name ) const;

  /// Number of references to each node (AND fanins plus outputs).
  std::vector<uint32_t> fanout_counts() const;

  bool operator==( const Aig& other ) const;

private:
  friend class AigBuilder;

  uint32_t num_inputs_ = 0;
  std::vector<AndNode> ands_;
  std::vector<Literal> outputs_;
  std::vector<std::string> input_names_;
  std::vector<std::string> output_names_;
};

/*! \brief Incremental AIG construction with structural hashing.
 *
 * All inputs must be created before the first AND gate.
 */
class AigBuilder
{
public:
  AigBuilder() = default;

  Literal add_input( std::string name = {} );
  void add_output( Literal lit, std::string name = {} );

  /// AND with constant folding, idempotence, annihilation and hash lookup.
  Literal and_( Literal a, Literal b );
  Literal or_( Literal a, Literal b ) { return !and_( !a, !b ); }
  Literal xor_( Literal a, Literal b );
  Literal mux_( Literal sel, Literal then_lit, Literal else_lit );

  /*! \brief Result of `and_` if it needs no new node.
   *
   * Returns the literal that `and_(a, b)` would produce when it folds to a
   * constant, an operand, or an already existing node; `nullopt` when a new
   * node would be allocated.
   */
  std::optional<Literal> lookup_and( Literal a, Literal b ) const;

  uint32_t num_inputs() const { return num_inputs_; }
  uint32_t num_ands() const { return static_cast<uint32_t>( ands_.size() ); }
  uint32_t size() const { return 1u + num_inputs_ + num_ands(); }
  const AndNode& and_node( uint32_t node ) const { return ands_[node - num_inputs_ - 1u]; }
  bool is_and( uint32_t node ) const { return node > num_inputs_; }

  Aig build() &&;
  Aig build() const&;

private:
  static uint64_t key( Literal a, Literal b ) { return ( uint64_t( a.raw() ) << 32 ) | b.raw(); }

  uint32_t num_inputs_ = 0;
  std::vector<AndNode> ands_;
  std::vector<Literal> outputs_;
  std::vector<std::string> input_names_;
  std::vector<std::string> output_names_;
  std::unordered_map<uint64_t, uint32_t> table_;
};

/// Level of every node: inputs and constant at 0, AND = 1 + max(fanin levels).
std::vector<uint32_t> levels( const Aig& g );
/// Maximum level over all outputs.
uint32_t depth( const Aig& g );
/// Number of AND nodes.
inline uint32_t node_count( const Aig& g ) { return g.num_ands(); }

/// Copy of `g` without AND nodes unreachable from the outputs. Inputs are kept.
Aig cleanup( const Aig& g );

/// True when no two AND nodes share the same fanin pair and all fanins are canonical.
bool is_structurally_hashed( const Aig& g );

} // namespace almost
