#pragma once

// Four-state value algebra: bits, packed vectors, operators, edge
// classification, net resolution and display formatting.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vsched {

enum class Bit : uint8_t { Zero, One, X, Z };

inline char bit_char(Bit b) {
  switch (b) {
    case Bit::Zero: return '0';
    case Bit::One: return '1';
    case Bit::X: return 'x';
    case Bit::Z: return 'z';
  }
  return '?';
}

inline std::optional<Bit> bit_from_char(char c) {
  switch (c) {
    case '0': return Bit::Zero;
    case '1': return Bit::One;
    case 'x': case 'X': return Bit::X;
    case 'z': case 'Z': case '?': return Bit::Z;
    default: return std::nullopt;
  }
}

inline bool is_known(Bit b) { return b == Bit::Zero || b == Bit::One; }

// A packed vector of four-state bits. Bits are held as characters from
// {0,1,x,z}, most significant first, so the %b rendering is the storage and
// short values stay in the small-string buffer.
class Value {
 public:
  Value() : bits_("x") {}

  static Value filled(uint32_t width, Bit b) {
    Value v;
    v.bits_.assign(std::max<uint32_t>(width, 1), bit_char(b));
    return v;
  }
  static Value x(uint32_t width) { return filled(width, Bit::X); }
  static Value z(uint32_t width) { return filled(width, Bit::Z); }

  static Value from_uint(uint32_t width, uint64_t n) {
    Value v = filled(width, Bit::Zero);
    for (uint32_t i = 0; i < width && i < 64; ++i)
      if ((n >> i) & 1u) v.set(i, Bit::One);
    return v;
  }

  // Parses an MSB-first digit string; returns nullopt on a foreign digit.
  static std::optional<Value> from_string(std::string_view digits) {
    if (digits.empty()) return std::nullopt;
    Value v;
    v.bits_.clear();
    for (char c : digits) {
      auto b = bit_from_char(c);
      if (!b) return std::nullopt;
      v.bits_.push_back(bit_char(*b));
    }
    return v;
  }

  static Value from_bool(bool b) { return filled(1, b ? Bit::One : Bit::Zero); }

  uint32_t width() const { return static_cast<uint32_t>(bits_.size()); }

  // Bit at position i, counted from the least significant end.
  Bit bit(uint32_t i) const { return *bit_from_char(bits_[bits_.size() - 1 - i]); }
  void set(uint32_t i, Bit b) { bits_[bits_.size() - 1 - i] = bit_char(b); }
  Bit lsb() const { return bit(0); }

  bool has_unknown() const {
    return bits_.find_first_of("xz") != std::string::npos;
  }
  bool has_x() const { return bits_.find('x') != std::string::npos; }
  bool has_z() const { return bits_.find('z') != std::string::npos; }
  bool all_z() const { return bits_.find_first_not_of('z') == std::string::npos; }

  // Zero-extends or truncates (keeping the low bits).
  Value resized(uint32_t width) const {
    width = std::max<uint32_t>(width, 1);
    if (width == this->width()) return *this;
    Value v;
    if (width < this->width()) {
      v.bits_ = bits_.substr(bits_.size() - width);
    } else {
      v.bits_ = std::string(width - bits_.size(), '0') + bits_;
    }
    return v;
  }

  std::optional<uint64_t> to_uint64() const {
    if (has_unknown()) return std::nullopt;
    uint64_t n = 0;
    for (uint32_t i = 0; i < width(); ++i) {
      if (bit(i) == Bit::One) {
        if (i >= 64) return std::nullopt;
        n |= uint64_t{1} << i;
      }
    }
    return n;
  }

  // MSB-first digit string, one character per bit.
  const std::string& str() const { return bits_; }

  bool operator==(const Value&) const = default;
  auto operator<=>(const Value&) const = default;

 private:
  std::string bits_;
};

// ---------------------------------------------------------------------------
// Truthiness and edges
// ---------------------------------------------------------------------------

// Condition semantics for `if` and `wait`: true iff some bit is 1.
inline bool truthy(const Value& v) { return v.str().find('1') != std::string::npos; }

enum class EdgeKind { None, Posedge, Negedge, Change };

inline const char* edge_name(EdgeKind e) {
  switch (e) {
    case EdgeKind::None: return "none";
    case EdgeKind::Posedge: return "posedge";
    case EdgeKind::Negedge: return "negedge";
    case EdgeKind::Change: return "change";
  }
  return "?";
}

// Classifies a value change by its least-significant bit. Any LSB
// transition toward 1 (0->1, 0->x, 0->z, x->1, z->1) is a posedge, the dual
// set is a negedge, and every other difference is a plain change.
inline EdgeKind edge_kind(const Value& before, const Value& after) {
  if (before.width() != after.width())
    throw std::invalid_argument("edge_kind: width mismatch");
  if (before == after) return EdgeKind::None;
  const Bit o = before.lsb();
  const Bit n = after.lsb();
  if ((o == Bit::Zero && n != Bit::Zero) || (o != Bit::One && o != Bit::Zero && n == Bit::One))
    return EdgeKind::Posedge;
  if ((o == Bit::One && n != Bit::One) || (o != Bit::One && o != Bit::Zero && n == Bit::Zero))
    return EdgeKind::Negedge;
  return EdgeKind::Change;
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

namespace detail {

inline Bit and_bit(Bit a, Bit b) {
  if (a == Bit::Zero || b == Bit::Zero) return Bit::Zero;
  if (a == Bit::One && b == Bit::One) return Bit::One;
  return Bit::X;
}
inline Bit or_bit(Bit a, Bit b) {
  if (a == Bit::One || b == Bit::One) return Bit::One;
  if (a == Bit::Zero && b == Bit::Zero) return Bit::Zero;
  return Bit::X;
}
inline Bit xor_bit(Bit a, Bit b) {
  if (!is_known(a) || !is_known(b)) return Bit::X;
  return a == b ? Bit::Zero : Bit::One;
}
inline Bit not_bit(Bit a) {
  if (a == Bit::Zero) return Bit::One;
  if (a == Bit::One) return Bit::Zero;
  return Bit::X;
}

template <class F>
Value bitwise(const Value& a, const Value& b, F f) {
  const uint32_t w = std::max(a.width(), b.width());
  Value l = a.resized(w), r = b.resized(w), out = Value::x(w);
  for (uint32_t i = 0; i < w; ++i) out.set(i, f(l.bit(i), r.bit(i)));
  return out;
}

// Three-valued reduction used by the logical operators: 1 if some bit is
// 1, 0 if every bit is 0, x otherwise.
inline Bit logic_level(const Value& v) {
  if (truthy(v)) return Bit::One;
  if (!v.has_unknown()) return Bit::Zero;
  return Bit::X;
}

}  // namespace detail

inline Value op_not(const Value& a) {
  Value out = a;
  for (uint32_t i = 0; i < a.width(); ++i) out.set(i, detail::not_bit(a.bit(i)));
  return out;
}

inline Value op_and(const Value& a, const Value& b) { return detail::bitwise(a, b, detail::and_bit); }
inline Value op_or(const Value& a, const Value& b) { return detail::bitwise(a, b, detail::or_bit); }
inline Value op_xor(const Value& a, const Value& b) { return detail::bitwise(a, b, detail::xor_bit); }

inline Value op_logical_not(const Value& a) {
  return Value::filled(1, detail::not_bit(detail::logic_level(a)));
}
inline Value op_logical_and(const Value& a, const Value& b) {
  return Value::filled(1, detail::and_bit(detail::logic_level(a), detail::logic_level(b)));
}
inline Value op_logical_or(const Value& a, const Value& b) {
  return Value::filled(1, detail::or_bit(detail::logic_level(a), detail::logic_level(b)));
}

inline Value op_add(const Value& a, const Value& b) {
  const uint32_t w = std::max(a.width(), b.width());
  if (a.has_unknown() || b.has_unknown()) return Value::x(w);
  Value l = a.resized(w), r = b.resized(w), out = Value::x(w);
  int carry = 0;
  for (uint32_t i = 0; i < w; ++i) {
    int s = (l.bit(i) == Bit::One) + (r.bit(i) == Bit::One) + carry;
    out.set(i, (s & 1) ? Bit::One : Bit::Zero);
    carry = s >> 1;
  }
  return out;
}

inline Value op_sub(const Value& a, const Value& b) {
  const uint32_t w = std::max(a.width(), b.width());
  if (a.has_unknown() || b.has_unknown()) return Value::x(w);
  // a - b == a + ~b + 1 modulo 2^w
  return op_add(op_add(a.resized(w), op_not(b.resized(w))), Value::from_uint(w, 1));
}

namespace detail {
// -1, 0, 1 for a < b, a == b, a > b; operands must be fully known.
inline int compare_known(const Value& a, const Value& b) {
  const uint32_t w = std::max(a.width(), b.width());
  Value l = a.resized(w), r = b.resized(w);
  for (uint32_t i = w; i-- > 0;) {
    if (l.bit(i) != r.bit(i)) return l.bit(i) == Bit::One ? 1 : -1;
  }
  return 0;
}
}  // namespace detail

inline Value op_eq(const Value& a, const Value& b) {
  if (a.has_unknown() || b.has_unknown()) return Value::x(1);
  return Value::from_bool(detail::compare_known(a, b) == 0);
}
inline Value op_ne(const Value& a, const Value& b) {
  if (a.has_unknown() || b.has_unknown()) return Value::x(1);
  return Value::from_bool(detail::compare_known(a, b) != 0);
}
inline Value op_lt(const Value& a, const Value& b) {
  if (a.has_unknown() || b.has_unknown()) return Value::x(1);
  return Value::from_bool(detail::compare_known(a, b) < 0);
}
inline Value op_gt(const Value& a, const Value& b) {
  if (a.has_unknown() || b.has_unknown()) return Value::x(1);
  return Value::from_bool(detail::compare_known(a, b) > 0);
}

// ---------------------------------------------------------------------------
// Net resolution
// ---------------------------------------------------------------------------

enum class NetType { Wire, Wand, Wor };

inline const char* net_type_name(NetType t) {
  switch (t) {
    case NetType::Wire: return "wire";
    case NetType::Wand: return "wand";
    case NetType::Wor: return "wor";
  }
  return "?";
}

namespace detail {
inline Bit resolve_bit(NetType type, std::span<const Bit> contributions) {
  bool any = false, any0 = false, any1 = false, anyx = false;
  for (Bit b : contributions) {
    if (b == Bit::Z) continue;
    any = true;
    any0 |= b == Bit::Zero;
    any1 |= b == Bit::One;
    anyx |= b == Bit::X;
  }
  if (!any) return Bit::Z;
  switch (type) {
    case NetType::Wire:
      if (anyx || (any0 && any1)) return Bit::X;
      return any1 ? Bit::One : Bit::Zero;
    case NetType::Wand:
      if (any0) return Bit::Zero;
      return anyx ? Bit::X : Bit::One;
    case NetType::Wor:
      if (any1) return Bit::One;
      return anyx ? Bit::X : Bit::Zero;
  }
  return Bit::X;
}
}  // namespace detail

// Per-bit resolution of a net's drivers. The empty driver set yields all-z
// of `width`; otherwise every driver must have the same width.
inline Value resolve_net(NetType type, std::span<const Value> drivers, uint32_t width = 1) {
  if (drivers.empty()) return Value::z(width);
  const uint32_t w = drivers.front().width();
  for (const Value& d : drivers)
    if (d.width() != w) throw std::invalid_argument("resolve_net: driver width mismatch");
  Value out = Value::x(w);
  std::vector<Bit> column(drivers.size());
  for (uint32_t i = 0; i < w; ++i) {
    for (size_t d = 0; d < drivers.size(); ++d) column[d] = drivers[d].bit(i);
    out.set(i, detail::resolve_bit(type, column));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

enum class Radix { Default, Binary, Decimal, Time };

inline std::string decimal_string(const Value& v) {
  if (v.has_x()) return "x";
  if (v.has_z()) return "z";
  // Repeated doubling on a base-10^9 digit vector; no width limit.
  std::vector<uint32_t> limbs{0};
  for (uint32_t i = v.width(); i-- > 0;) {
    uint64_t carry = v.bit(i) == Bit::One ? 1 : 0;
    for (auto& limb : limbs) {
      uint64_t cur = uint64_t{limb} * 2 + carry;
      limb = static_cast<uint32_t>(cur % 1000000000u);
      carry = cur / 1000000000u;
    }
    if (carry) limbs.push_back(static_cast<uint32_t>(carry));
  }
  std::string out = std::to_string(limbs.back());
  for (size_t i = limbs.size() - 1; i-- > 0;) {
    std::string part = std::to_string(limbs[i]);
    out += std::string(9 - part.size(), '0') + part;
  }
  return out;
}

inline std::string format_value(const Value& v, Radix radix = Radix::Default) {
  switch (radix) {
    case Radix::Binary: return v.str();
    case Radix::Decimal:
    case Radix::Time: return decimal_string(v);
    case Radix::Default: return v.width() == 1 ? v.str() : decimal_string(v);
  }
  return v.str();
}

}  // namespace vsched

template <>
struct std::hash<vsched::Value> {
  size_t operator()(const vsched::Value& v) const noexcept {
    return std::hash<std::string>{}(v.str());
  }
};
