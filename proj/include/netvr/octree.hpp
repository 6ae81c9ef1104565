#pragma once

#include "geometry.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace netvr {

/// Barnes-Hut octree over a point set with a uniform per-point strength.
///
/// Cells are cubes; a child is the exact octant of its parent, and only
/// non-empty octants are materialised. Every point lands in exactly one leaf.
/// A leaf normally holds one point; points that stay together past
/// `kMaxDepth` levels (coincident or nearly so) share a leaf.
class Octree {
 public:
  static constexpr int kMaxDepth = 32;
  static constexpr std::int32_t kNone = -1;

  struct Cell {
    Vec3 corner = Vec3::Zero();  // minimum corner
    double width = 0.0;
    Vec3 center_of_mass = Vec3::Zero();
    double strength = 0.0;  // sum of point strengths in the cell
    std::uint32_t begin = 0, end = 0;  // range into point_order()
    std::array<std::int32_t, 8> children{kNone, kNone, kNone, kNone, kNone, kNone, kNone, kNone};
    bool leaf = true;

    std::uint32_t count() const { return end - begin; }
    bool contains(const Vec3& p) const {
      for (int a = 0; a < 3; ++a)
        if (p[a] < corner[a] || p[a] > corner[a] + width) return false;
      return true;
    }
  };

  Octree() = default;

  Octree(std::span<const Vec3> points, double strength_per_point) : strength_per_point_(strength_per_point) {
    order_.resize(points.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    if (points.empty()) return;

    Vec3 lo = points[0], hi = points[0];
    for (const auto& p : points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    double width = (hi - lo).maxCoeff();
    if (!(width > 0.0)) width = 1.0;
    width *= 1.0 + 1e-9;  // keeps points on the max faces inside after child-corner rounding
    cells_.reserve(2 * points.size());
    Cell root;
    root.corner = lo;
    root.width = width;
    root.begin = 0;
    root.end = static_cast<std::uint32_t>(points.size());
    cells_.push_back(root);
    build(0, points, 0);
  }

  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& root() const { return cells_.front(); }
  bool empty() const { return cells_.empty(); }
  std::span<const std::uint32_t> point_order() const { return order_; }
  std::span<const std::uint32_t> points_in(const Cell& c) const {
    return std::span<const std::uint32_t>(order_).subspan(c.begin, c.count());
  }
  double strength_per_point() const { return strength_per_point_; }

 private:
  static int octant(const Vec3& p, const Vec3& mid) {
    return (p.x() >= mid.x() ? 1 : 0) | (p.y() >= mid.y() ? 2 : 0) | (p.z() >= mid.z() ? 4 : 0);
  }

  void build(std::size_t ci, std::span<const Vec3> points, int depth) {
    {
      Cell& c = cells_[ci];
      Vec3 sum = Vec3::Zero();
      for (std::uint32_t k = c.begin; k < c.end; ++k) sum += points[order_[k]];
      c.center_of_mass = sum / static_cast<double>(c.count());
      c.strength = strength_per_point_ * c.count();
      if (c.count() <= 1 || depth >= kMaxDepth) return;
      c.leaf = false;
    }

    const Cell parent = cells_[ci];
    const double half = parent.width * 0.5;
    const Vec3 mid = parent.corner + Vec3::Constant(half);

    // counting sort of the cell's range by octant
    std::array<std::uint32_t, 8> counts{};
    for (std::uint32_t k = parent.begin; k < parent.end; ++k) ++counts[octant(points[order_[k]], mid)];
    std::array<std::uint32_t, 9> offsets{};
    for (int o = 0; o < 8; ++o) offsets[o + 1] = offsets[o] + counts[o];
    scratch_.resize(parent.count());
    auto cursor = offsets;
    for (std::uint32_t k = parent.begin; k < parent.end; ++k)
      scratch_[cursor[octant(points[order_[k]], mid)]++] = order_[k];
    std::copy(scratch_.begin(), scratch_.begin() + parent.count(), order_.begin() + parent.begin);

    for (int o = 0; o < 8; ++o) {
      if (counts[o] == 0) continue;
      Cell child;
      child.corner = parent.corner + Vec3((o & 1) ? half : 0.0, (o & 2) ? half : 0.0, (o & 4) ? half : 0.0);
      child.width = half;
      child.begin = parent.begin + offsets[o];
      child.end = parent.begin + offsets[o + 1];
      const auto idx = static_cast<std::int32_t>(cells_.size());
      cells_.push_back(child);
      cells_[ci].children[o] = idx;
      build(static_cast<std::size_t>(idx), points, depth + 1);
    }
  }

  double strength_per_point_ = 0.0;
  std::vector<Cell> cells_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> scratch_;
};

}  // namespace netvr
