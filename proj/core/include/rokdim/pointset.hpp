#pragma once

#include <cstdint>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace rokdim {

/// Subset of a sampled system's points, bitset semantics.
class PointSet {
public:
  PointSet() = default;
  explicit PointSet(std::size_t universe) : bits_(universe) {}

  static PointSet full(std::size_t universe) {
    PointSet s(universe);
    s.bits_.set();
    return s;
  }
  static PointSet singleton(std::size_t universe, std::uint32_t p) {
    PointSet s(universe);
    s.add(p);
    return s;
  }
  static PointSet of(std::size_t universe, const std::vector<std::uint32_t>& pts) {
    PointSet s(universe);
    for (auto p : pts) s.add(p);
    return s;
  }

  std::size_t universe() const { return bits_.size(); }
  std::size_t count() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }
  bool contains(std::uint32_t p) const { return bits_.test(p); }

  void add(std::uint32_t p) { bits_.set(p); }
  void remove(std::uint32_t p) { bits_.reset(p); }

  PointSet& operator|=(const PointSet& o) { bits_ |= o.bits_; return *this; }
  PointSet& operator&=(const PointSet& o) { bits_ &= o.bits_; return *this; }
  PointSet& operator-=(const PointSet& o) { bits_ -= o.bits_; return *this; }

  friend PointSet operator|(PointSet a, const PointSet& b) { return a |= b; }
  friend PointSet operator&(PointSet a, const PointSet& b) { return a &= b; }
  friend PointSet operator-(PointSet a, const PointSet& b) { return a -= b; }
  friend bool operator==(const PointSet& a, const PointSet& b) { return a.bits_ == b.bits_; }

  bool is_subset_of(const PointSet& o) const { return bits_.is_subset_of(o.bits_); }
  bool intersects(const PointSet& o) const { return bits_.intersects(o.bits_); }

  /// First member, or npos when empty.
  std::size_t first() const { return bits_.find_first(); }
  std::size_t next(std::size_t p) const { return bits_.find_next(p); }
  static constexpr std::size_t npos = boost::dynamic_bitset<>::npos;

  /// Sorted member indices (serialization order).
  std::vector<std::uint32_t> members() const {
    std::vector<std::uint32_t> out;
    out.reserve(count());
    for (std::size_t p = first(); p != npos; p = next(p))
      out.push_back(static_cast<std::uint32_t>(p));
    return out;
  }

private:
  boost::dynamic_bitset<> bits_;
};

} // namespace rokdim
