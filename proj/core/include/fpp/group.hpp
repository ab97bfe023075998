#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <absl/container/inlined_vector.h>

namespace fpp {

enum class GroupKind : std::uint8_t {
  IntegerLattice = 1,
  Heisenberg = 2,
  RegularTree = 3,
  Product = 4,
};

/// A group element in its canonical integer code.
///
/// The meaning of the code depends on the kind:
///   IntegerLattice  the d coordinates
///   Heisenberg      (u, v, w), the upper-triangular entries of the unipotent matrix
///   RegularTree     a reduced word, one letter in [0, degree) per entry
///   Product         [len(left code), left code..., right code...]
///
/// Ordering is lexicographic on (kind, code). It is the canonical total order used
/// for tie-breaking; it is fixed and does not depend on the group parameters.
class Element {
 public:
  using Code = absl::InlinedVector<std::int64_t, 4>;

  Element() = default;
  Element(GroupKind kind, Code code) : kind_(kind), code_(std::move(code)) {}
  Element(GroupKind kind, std::initializer_list<std::int64_t> code) : kind_(kind), code_(code) {}

  GroupKind kind() const noexcept { return kind_; }
  const Code& code() const noexcept { return code_; }
  Code& mutable_code() noexcept { return code_; }
  std::size_t size() const noexcept { return code_.size(); }
  std::int64_t operator[](std::size_t i) const noexcept { return code_[i]; }

  friend bool operator==(const Element& a, const Element& b) noexcept {
    return a.kind_ == b.kind_ && a.code_ == b.code_;
  }
  friend std::strong_ordering operator<=>(const Element& a, const Element& b) noexcept {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    return std::lexicographical_compare_three_way(a.code_.begin(), a.code_.end(),
                                                  b.code_.begin(), b.code_.end());
  }

  template <typename H>
  friend H AbslHashValue(H h, const Element& e) {
    return H::combine(std::move(h), e.kind_, e.code_);
  }

 private:
  GroupKind kind_ = GroupKind::IntegerLattice;
  Code code_;
};

/// Bytes of the canonical element encoding. Inline storage covers every
/// lattice/Heisenberg key and tree words up to ~40 letters without allocating.
using KeyBytes = absl::InlinedVector<std::uint8_t, 48>;

/// A finitely generated group together with its symmetric generating set.
class GroupSpec {
 public:
  static GroupSpec lattice(int dimension);
  static GroupSpec heisenberg();
  /// The r-regular tree, realised as the free product of r copies of Z/2.
  static GroupSpec tree(int degree);
  static GroupSpec product(GroupSpec left, GroupSpec right);

  /// Parses "z<d>", "heisenberg", "tree<r>" or "product(<g>,<g>)".
  static GroupSpec parse(std::string_view text);

  GroupKind kind() const noexcept { return kind_; }
  /// Lattice dimension d, or tree degree r.
  int parameter() const noexcept { return parameter_; }
  const GroupSpec& left() const;
  const GroupSpec& right() const;

  const std::vector<Element>& generators() const noexcept { return generators_; }
  /// Cayley-graph degree k = |S|.
  int degree() const noexcept { return static_cast<int>(generators_.size()); }

  Element identity() const;
  /// Same notation as accepted by parse().
  std::string name() const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b);

 private:
  GroupSpec() = default;
  void build_generators();

  GroupKind kind_ = GroupKind::IntegerLattice;
  int parameter_ = 0;
  std::shared_ptr<const GroupSpec> left_;
  std::shared_ptr<const GroupSpec> right_;
  std::vector<Element> generators_;
};

// Constructors for concrete elements.
Element lattice_point(std::span<const std::int64_t> coords);
Element lattice_point(std::initializer_list<std::int64_t> coords);
Element heisenberg_element(std::int64_t u, std::int64_t v, std::int64_t w);
Element heisenberg_a();
Element heisenberg_b();
/// The central generator, fixed as commutator(a, b) = (0, 0, 1).
Element heisenberg_c();
/// Reduces the letter sequence (cancelling equal neighbours) before returning.
Element tree_word(std::span<const int> letters);
Element tree_word(std::initializer_list<int> letters);
Element product_element(const Element& left, const Element& right);
/// Factor of a product element, typed by the factor group of `group`.
Element product_left(const GroupSpec& group, const Element& g);
Element product_right(const GroupSpec& group, const Element& g);

/// True if g is a well-formed element of the group (correct kind, arity,
/// reduced tree word with letters in range).
bool is_member(const GroupSpec& group, const Element& g);

/// Group law. Throws InvalidArgument on mismatched kinds and
/// ArithmeticOverflow if a coordinate leaves the int64 range.
Element multiply(const GroupSpec& group, const Element& g, const Element& h);
Element invert(const GroupSpec& group, const Element& g);
/// [g, h] = g h g^-1 h^-1.
Element commutator(const GroupSpec& group, const Element& g, const Element& h);
/// g^n for any integer n.
Element power(const GroupSpec& group, const Element& g, std::int64_t n);

/// Image in the abelianization: Heisenberg (u, v), lattice itself.
std::vector<std::int64_t> abelianize(const GroupSpec& group, const Element& g);

/// A lower bound on the word length |g|_S that is 1-Lipschitz along Cayley
/// edges. Exact for lattices and trees; |u| + |v| for Heisenberg.
std::int64_t word_length_lower_bound(const GroupSpec& group, const Element& g);
/// word_length_lower_bound(x^-1 y) without forming the product where possible.
std::int64_t word_distance_lower_bound(const GroupSpec& group, const Element& x, const Element& y);

/// Canonical byte encoding: kind tag byte followed by
///   lattice/Heisenberg: fixed-width little-endian int64 coordinates;
///   tree: uint32 LE length, then one byte per letter;
///   product: uint32 LE byte length of the left encoding, left bytes, right bytes.
/// encode_into appends to `out`.
void encode_into(const GroupSpec& group, const Element& g, KeyBytes& out);
KeyBytes encode(const GroupSpec& group, const Element& g);
Element decode(const GroupSpec& group, std::span<const std::uint8_t> bytes);

/// Human-readable form: "(1,0,2)" for coordinates, "0.2.1" or "e" for tree
/// words, "(<left>;<right>)" for products.
std::string format_element(const GroupSpec& group, const Element& g);

}  // namespace fpp
