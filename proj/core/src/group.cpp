#include "fpp/group.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <sstream>

#include "fpp/error.hpp"

namespace fpp {
namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow("int64 overflow in group law");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow("int64 overflow in group law");
  return r;
}

std::int64_t checked_neg(std::int64_t a) {
  if (a == INT64_MIN) throw ArithmeticOverflow("int64 overflow in group law");
  return -a;
}

void require_kind(const GroupSpec& group, const Element& g) {
  if (g.kind() != group.kind()) {
    throw InvalidArgument("element of kind " + std::to_string(static_cast<int>(g.kind())) +
                          " used with group " + group.name());
  }
}

std::int64_t abs64(std::int64_t x) { return x < 0 ? checked_neg(x) : x; }

void put_u32(KeyBytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_i64(KeyBytes& out, std::int64_t v) {
  const auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  if (at + 4 > b.size()) throw InvalidArgument("truncated element encoding");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

std::int64_t get_i64(std::span<const std::uint8_t> b, std::size_t at) {
  if (at + 8 > b.size()) throw InvalidArgument("truncated element encoding");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
  return static_cast<std::int64_t>(v);
}

}  // namespace

// ---------------------------------------------------------------------------
// GroupSpec

GroupSpec GroupSpec::lattice(int dimension) {
  if (dimension < 1) throw InvalidArgument("lattice dimension must be positive");
  GroupSpec g;
  g.kind_ = GroupKind::IntegerLattice;
  g.parameter_ = dimension;
  g.build_generators();
  return g;
}

GroupSpec GroupSpec::heisenberg() {
  GroupSpec g;
  g.kind_ = GroupKind::Heisenberg;
  g.build_generators();
  return g;
}

GroupSpec GroupSpec::tree(int degree) {
  if (degree < 3) throw InvalidArgument("regular tree degree must be at least 3");
  if (degree > 255) throw InvalidArgument("regular tree degree must fit in one byte");
  GroupSpec g;
  g.kind_ = GroupKind::RegularTree;
  g.parameter_ = degree;
  g.build_generators();
  return g;
}

GroupSpec GroupSpec::product(GroupSpec left, GroupSpec right) {
  GroupSpec g;
  g.kind_ = GroupKind::Product;
  g.left_ = std::make_shared<const GroupSpec>(std::move(left));
  g.right_ = std::make_shared<const GroupSpec>(std::move(right));
  g.build_generators();
  return g;
}

namespace {

GroupSpec parse_group(std::string_view& s) {
  auto starts = [&](std::string_view p) { return s.substr(0, p.size()) == p; };
  auto read_int = [&](const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr == s.data()) {
      throw InvalidArgument(std::string("expected integer after '") + what + "' in group name");
    }
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
    return value;
  };
  if (starts("heisenberg")) {
    s.remove_prefix(10);
    return GroupSpec::heisenberg();
  }
  if (starts("product(")) {
    s.remove_prefix(8);
    GroupSpec left = parse_group(s);
    if (s.empty() || s.front() != ',') throw InvalidArgument("expected ',' in product group name");
    s.remove_prefix(1);
    GroupSpec right = parse_group(s);
    if (s.empty() || s.front() != ')') throw InvalidArgument("expected ')' in product group name");
    s.remove_prefix(1);
    return GroupSpec::product(std::move(left), std::move(right));
  }
  if (starts("tree")) {
    s.remove_prefix(4);
    return GroupSpec::tree(read_int("tree"));
  }
  if (starts("z")) {
    s.remove_prefix(1);
    return GroupSpec::lattice(read_int("z"));
  }
  throw InvalidArgument("unknown group name '" + std::string(s) + "'");
}

}  // namespace

GroupSpec GroupSpec::parse(std::string_view text) {
  std::string compact;
  for (char c : text) {
    if (c != ' ' && c != '\t') compact.push_back(c);
  }
  std::string_view s = compact;
  GroupSpec g = parse_group(s);
  if (!s.empty()) throw InvalidArgument("trailing characters in group name '" + std::string(text) + "'");
  return g;
}

const GroupSpec& GroupSpec::left() const {
  if (kind_ != GroupKind::Product) throw InvalidArgument("left() on a non-product group");
  return *left_;
}

const GroupSpec& GroupSpec::right() const {
  if (kind_ != GroupKind::Product) throw InvalidArgument("right() on a non-product group");
  return *right_;
}

Element GroupSpec::identity() const {
  switch (kind_) {
    case GroupKind::IntegerLattice:
      return Element(kind_, Element::Code(static_cast<std::size_t>(parameter_), 0));
    case GroupKind::Heisenberg:
      return Element(kind_, {0, 0, 0});
    case GroupKind::RegularTree:
      return Element(kind_, Element::Code{});
    case GroupKind::Product:
      return product_element(left_->identity(), right_->identity());
  }
  return {};
}

std::string GroupSpec::name() const {
  switch (kind_) {
    case GroupKind::IntegerLattice:
      return "z" + std::to_string(parameter_);
    case GroupKind::Heisenberg:
      return "heisenberg";
    case GroupKind::RegularTree:
      return "tree" + std::to_string(parameter_);
    case GroupKind::Product:
      return "product(" + left_->name() + "," + right_->name() + ")";
  }
  return {};
}

bool operator==(const GroupSpec& a, const GroupSpec& b) {
  if (a.kind_ != b.kind_ || a.parameter_ != b.parameter_) return false;
  if (a.kind_ == GroupKind::Product) return *a.left_ == *b.left_ && *a.right_ == *b.right_;
  return true;
}

void GroupSpec::build_generators() {
  generators_.clear();
  switch (kind_) {
    case GroupKind::IntegerLattice:
      for (int i = 0; i < parameter_; ++i) {
        for (int sign : {1, -1}) {
          Element::Code c(static_cast<std::size_t>(parameter_), 0);
          c[static_cast<std::size_t>(i)] = sign;
          generators_.emplace_back(kind_, std::move(c));
        }
      }
      break;
    case GroupKind::Heisenberg:
      generators_ = {heisenberg_a(), heisenberg_element(-1, 0, 0), heisenberg_b(),
                     heisenberg_element(0, -1, 0)};
      break;
    case GroupKind::RegularTree:
      for (int i = 0; i < parameter_; ++i) generators_.push_back(Element(kind_, {i}));
      break;
    case GroupKind::Product: {
      const Element le = left_->identity();
      const Element re = right_->identity();
      for (const auto& s : left_->generators()) generators_.push_back(product_element(s, re));
      for (const auto& s : right_->generators()) generators_.push_back(product_element(le, s));
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Element constructors

Element lattice_point(std::span<const std::int64_t> coords) {
  return Element(GroupKind::IntegerLattice, Element::Code(coords.begin(), coords.end()));
}

Element lattice_point(std::initializer_list<std::int64_t> coords) {
  return Element(GroupKind::IntegerLattice, coords);
}

Element heisenberg_element(std::int64_t u, std::int64_t v, std::int64_t w) {
  return Element(GroupKind::Heisenberg, {u, v, w});
}

Element heisenberg_a() { return heisenberg_element(1, 0, 0); }
Element heisenberg_b() { return heisenberg_element(0, 1, 0); }
Element heisenberg_c() { return heisenberg_element(0, 0, 1); }

Element tree_word(std::span<const int> letters) {
  Element::Code code;
  for (int l : letters) {
    if (!code.empty() && code.back() == l) {
      code.pop_back();
    } else {
      code.push_back(l);
    }
  }
  return Element(GroupKind::RegularTree, std::move(code));
}

Element tree_word(std::initializer_list<int> letters) {
  return tree_word(std::span<const int>(letters.begin(), letters.size()));
}

Element product_element(const Element& left, const Element& right) {
  Element::Code code;
  code.reserve(1 + left.size() + right.size());
  code.push_back(static_cast<std::int64_t>(left.size()));
  code.insert(code.end(), left.code().begin(), left.code().end());
  code.insert(code.end(), right.code().begin(), right.code().end());
  return Element(GroupKind::Product, std::move(code));
}

namespace {

// Product codes do not record the factor kinds; callers supply them.
Element product_part(const GroupSpec& factor, const Element& g, bool left_part) {
  if (g.kind() != GroupKind::Product || g.size() == 0) {
    throw InvalidArgument("not a product element");
  }
  const auto n = static_cast<std::size_t>(g[0]);
  if (n + 1 > g.size()) throw InvalidArgument("malformed product element");
  const auto& c = g.code();
  if (left_part) return Element(factor.kind(), Element::Code(c.begin() + 1, c.begin() + 1 + n));
  return Element(factor.kind(), Element::Code(c.begin() + 1 + n, c.end()));
}

}  // namespace

namespace {

Element left_of(const GroupSpec& group, const Element& g) { return product_part(group.left(), g, true); }
Element right_of(const GroupSpec& group, const Element& g) {
  return product_part(group.right(), g, false);
}

}  // namespace

Element product_left(const GroupSpec& group, const Element& g) { return left_of(group, g); }
Element product_right(const GroupSpec& group, const Element& g) { return right_of(group, g); }

// ---------------------------------------------------------------------------
// Group law

bool is_member(const GroupSpec& group, const Element& g) {
  if (g.kind() != group.kind()) return false;
  switch (group.kind()) {
    case GroupKind::IntegerLattice:
      return g.size() == static_cast<std::size_t>(group.parameter());
    case GroupKind::Heisenberg:
      return g.size() == 3;
    case GroupKind::RegularTree:
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < 0 || g[i] >= group.parameter()) return false;
        if (i > 0 && g[i] == g[i - 1]) return false;
      }
      return true;
    case GroupKind::Product: {
      if (g.size() == 0 || g[0] < 0 || static_cast<std::size_t>(g[0]) + 1 > g.size()) return false;
      return is_member(group.left(), left_of(group, g)) && is_member(group.right(), right_of(group, g));
    }
  }
  return false;
}

Element multiply(const GroupSpec& group, const Element& g, const Element& h) {
  require_kind(group, g);
  require_kind(group, h);
  switch (group.kind()) {
    case GroupKind::IntegerLattice: {
      if (g.size() != h.size()) throw InvalidArgument("lattice elements of different dimension");
      Element::Code c(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) c[i] = checked_add(g[i], h[i]);
      return Element(GroupKind::IntegerLattice, std::move(c));
    }
    case GroupKind::Heisenberg:
      return heisenberg_element(checked_add(g[0], h[0]), checked_add(g[1], h[1]),
                                checked_add(checked_add(g[2], h[2]), checked_mul(g[0], h[1])));
    case GroupKind::RegularTree: {
      const auto& a = g.code();
      const auto& b = h.code();
      std::size_t cancel = 0;
      while (cancel < a.size() && cancel < b.size() && a[a.size() - 1 - cancel] == b[cancel]) ++cancel;
      Element::Code c;
      c.reserve(a.size() + b.size() - 2 * cancel);
      c.insert(c.end(), a.begin(), a.end() - static_cast<std::ptrdiff_t>(cancel));
      c.insert(c.end(), b.begin() + static_cast<std::ptrdiff_t>(cancel), b.end());
      return Element(GroupKind::RegularTree, std::move(c));
    }
    case GroupKind::Product:
      return product_element(multiply(group.left(), left_of(group, g), left_of(group, h)),
                             multiply(group.right(), right_of(group, g), right_of(group, h)));
  }
  return {};
}

Element invert(const GroupSpec& group, const Element& g) {
  require_kind(group, g);
  switch (group.kind()) {
    case GroupKind::IntegerLattice: {
      Element::Code c(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) c[i] = checked_neg(g[i]);
      return Element(GroupKind::IntegerLattice, std::move(c));
    }
    case GroupKind::Heisenberg:
      // (u,v,w)^-1 = (-u, -v, -w + u v)
      return heisenberg_element(checked_neg(g[0]), checked_neg(g[1]),
                                checked_add(checked_neg(g[2]), checked_mul(g[0], g[1])));
    case GroupKind::RegularTree: {
      Element::Code c(g.code().rbegin(), g.code().rend());
      return Element(GroupKind::RegularTree, std::move(c));
    }
    case GroupKind::Product:
      return product_element(invert(group.left(), left_of(group, g)),
                             invert(group.right(), right_of(group, g)));
  }
  return {};
}

Element commutator(const GroupSpec& group, const Element& g, const Element& h) {
  const Element gh = multiply(group, g, h);
  return multiply(group, multiply(group, gh, invert(group, g)), invert(group, h));
}

Element power(const GroupSpec& group, const Element& g, std::int64_t n) {
  Element base = n < 0 ? invert(group, g) : g;
  std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  Element result = group.identity();
  while (k > 0) {
    if (k & 1U) result = multiply(group, result, base);
    k >>= 1U;
    if (k > 0) base = multiply(group, base, base);
  }
  return result;
}

std::vector<std::int64_t> abelianize(const GroupSpec& group, const Element& g) {
  require_kind(group, g);
  switch (group.kind()) {
    case GroupKind::IntegerLattice:
      return {g.code().begin(), g.code().end()};
    case GroupKind::Heisenberg:
      return {g[0], g[1]};
    default:
      throw InvalidArgument("abelianize is defined for lattices and the Heisenberg group, not " +
                            group.name());
  }
}

std::int64_t word_length_lower_bound(const GroupSpec& group, const Element& g) {
  switch (group.kind()) {
    case GroupKind::IntegerLattice: {
      std::int64_t s = 0;
      for (auto x : g.code()) s = checked_add(s, abs64(x));
      return s;
    }
    case GroupKind::Heisenberg:
      return checked_add(abs64(g[0]), abs64(g[1]));
    case GroupKind::RegularTree:
      return static_cast<std::int64_t>(g.size());
    case GroupKind::Product:
      return word_length_lower_bound(group.left(), left_of(group, g)) +
             word_length_lower_bound(group.right(), right_of(group, g));
  }
  return 0;
}

std::int64_t word_distance_lower_bound(const GroupSpec& group, const Element& x, const Element& y) {
  switch (group.kind()) {
    case GroupKind::IntegerLattice: {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < x.size(); ++i) s += abs64(checked_add(y[i], checked_neg(x[i])));
      return s;
    }
    case GroupKind::Heisenberg:
      // abelianization is a homomorphism, so |ab(x^-1 y)|_1 = |ab(y) - ab(x)|_1
      return abs64(checked_add(y[0], checked_neg(x[0]))) + abs64(checked_add(y[1], checked_neg(x[1])));
    case GroupKind::RegularTree: {
      std::size_t common = 0;
      while (common < x.size() && common < y.size() && x[common] == y[common]) ++common;
      return static_cast<std::int64_t>(x.size() + y.size() - 2 * common);
    }
    case GroupKind::Product:
      return word_distance_lower_bound(group.left(), left_of(group, x), left_of(group, y)) +
             word_distance_lower_bound(group.right(), right_of(group, x), right_of(group, y));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Canonical encoding

void encode_into(const GroupSpec& group, const Element& g, KeyBytes& out) {
  out.push_back(static_cast<std::uint8_t>(group.kind()));
  switch (group.kind()) {
    case GroupKind::IntegerLattice:
    case GroupKind::Heisenberg:
      for (auto x : g.code()) put_i64(out, x);
      break;
    case GroupKind::RegularTree:
      put_u32(out, static_cast<std::uint32_t>(g.size()));
      for (auto x : g.code()) out.push_back(static_cast<std::uint8_t>(x));
      break;
    case GroupKind::Product: {
      KeyBytes left;
      encode_into(group.left(), left_of(group, g), left);
      put_u32(out, static_cast<std::uint32_t>(left.size()));
      out.insert(out.end(), left.begin(), left.end());
      encode_into(group.right(), right_of(group, g), out);
      break;
    }
  }
}

KeyBytes encode(const GroupSpec& group, const Element& g) {
  require_kind(group, g);
  KeyBytes out;
  encode_into(group, g, out);
  return out;
}

namespace {

Element decode_at(const GroupSpec& group, std::span<const std::uint8_t> b) {
  if (b.empty() || b[0] != static_cast<std::uint8_t>(group.kind())) {
    throw InvalidArgument("element encoding has wrong kind tag for " + group.name());
  }
  switch (group.kind()) {
    case GroupKind::IntegerLattice:
    case GroupKind::Heisenberg: {
      const std::size_t n = group.kind() == GroupKind::Heisenberg
                                ? 3
                                : static_cast<std::size_t>(group.parameter());
      if (b.size() != 1 + 8 * n) throw InvalidArgument("element encoding has wrong length");
      Element::Code c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = get_i64(b, 1 + 8 * i);
      return Element(group.kind(), std::move(c));
    }
    case GroupKind::RegularTree: {
      const std::uint32_t n = get_u32(b, 1);
      if (b.size() != 5 + static_cast<std::size_t>(n)) throw InvalidArgument("element encoding has wrong length");
      Element::Code c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = b[5 + i];
      Element g(GroupKind::RegularTree, std::move(c));
      if (!is_member(group, g)) throw InvalidArgument("tree encoding is not a reduced word");
      return g;
    }
    case GroupKind::Product: {
      const std::uint32_t n = get_u32(b, 1);
      if (b.size() < 5 + static_cast<std::size_t>(n)) throw InvalidArgument("truncated product encoding");
      return product_element(decode_at(group.left(), b.subspan(5, n)),
                             decode_at(group.right(), b.subspan(5 + n)));
    }
  }
  return {};
}

}  // namespace

Element decode(const GroupSpec& group, std::span<const std::uint8_t> bytes) {
  return decode_at(group, bytes);
}

std::string format_element(const GroupSpec& group, const Element& g) {
  std::ostringstream os;
  switch (group.kind()) {
    case GroupKind::IntegerLattice:
    case GroupKind::Heisenberg:
      os << '(';
      for (std::size_t i = 0; i < g.size(); ++i) os << (i ? "," : "") << g[i];
      os << ')';
      break;
    case GroupKind::RegularTree:
      if (g.size() == 0) {
        os << 'e';
      }
      for (std::size_t i = 0; i < g.size(); ++i) os << (i ? "." : "") << g[i];
      break;
    case GroupKind::Product:
      os << '(' << format_element(group.left(), left_of(group, g)) << ';'
         << format_element(group.right(), right_of(group, g)) << ')';
      break;
  }
  return os.str();
}

}  // namespace fpp
