// SPDX-License-Identifier: Apache-2.0
//
// mpgen: urban RF multipath dataset generator
// Copyright (C) 2026 mpgen contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mpgen/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace mpgen {

namespace {

// Same arithmetic for the BVH and the public single-triangle test, so both
// paths agree bit for bit.
std::optional<Hit> moller_trumbore(const Vec3& v0, const Vec3& e1, const Vec3& e2, const Ray& ray,
                                   double t_min) {
  const Vec3 pvec = ray.direction.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) <= 1e-12 * e1.norm() * e2.norm()) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tvec = ray.origin - v0;
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = ray.direction.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qvec) * inv;
  if (!(t > t_min) || t > ray.t_max) return std::nullopt;
  return Hit{t, -1, -1, u, v};
}

// Slab test, padded slightly so flat boxes around axis-aligned triangles are
// never missed through rounding.
bool hits_box(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, const Vec3& dir,
              double t_min, double t_max, double& t_entry) {
  double t0 = t_min, t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) {
      if (origin[a] < box.lo[a] || origin[a] > box.hi[a]) return false;
      continue;
    }
    double tn = (box.lo[a] - origin[a]) * inv_dir[a];
    double tf = (box.hi[a] - origin[a]) * inv_dir[a];
    if (tn > tf) std::swap(tn, tf);
    tf *= 1.0 + 1e-12;
    t0 = std::max(t0, tn);
    t1 = std::min(t1, tf);
    if (t0 > t1) return false;
  }
  t_entry = t0;
  return true;
}

}  // namespace

Aabb triangle_bounds(const Triangle& tri) {
  Aabb b;
  b.extend(tri.v0);
  b.extend(tri.v1);
  b.extend(tri.v2);
  return b;
}

std::optional<Hit> intersect_triangle(const Triangle& tri, const Ray& ray) {
  auto hit = moller_trumbore(tri.v0, tri.v1 - tri.v0, tri.v2 - tri.v0, ray, 0.0);
  if (hit) hit->face_id = tri.face_id;
  return hit;
}

Bvh::Bvh(const TriangleMesh& mesh) {
  const int n = static_cast<int>(mesh.triangles.size());
  std::vector<Aabb> boxes(static_cast<std::size_t>(n));
  std::vector<Vec3> centroids(static_cast<std::size_t>(n));
  order_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(i)];
    boxes[static_cast<std::size_t>(i)] = triangle_bounds(t);
    centroids[static_cast<std::size_t>(i)] = (t.v0 + t.v1 + t.v2) / 3.0;
    order_[static_cast<std::size_t>(i)] = i;
  }
  if (n > 0) {
    nodes_.reserve(static_cast<std::size_t>(2 * n));
    build(0, n, boxes, centroids, 0);
  }
  tris_.reserve(static_cast<std::size_t>(n));
  for (const int i : order_) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(i)];
    tris_.push_back({t.v0, t.v1 - t.v0, t.v2 - t.v0, t.face_id, i});
  }
}

int Bvh::build(int first, int last, const std::vector<Aabb>& boxes,
               const std::vector<Vec3>& centroids, int depth) {
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box, cbox;
  for (int i = first; i < last; ++i) {
    const int t = order_[static_cast<std::size_t>(i)];
    box.extend(boxes[static_cast<std::size_t>(t)]);
    cbox.extend(centroids[static_cast<std::size_t>(t)]);
  }
  nodes_[static_cast<std::size_t>(node_index)].box = box;

  const int count = last - first;
  if (count <= kMaxLeafSize) {
    nodes_[static_cast<std::size_t>(node_index)].first = first;
    nodes_[static_cast<std::size_t>(node_index)].count = count;
    return node_index;
  }

  const Vec3 extent = cbox.hi - cbox.lo;
  int axis = 0;
  if (extent.y() > extent[axis]) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;

  int mid = first + count / 2;
  bool split_done = false;

  // Past kMaxSahDepth only median splits are used, which bounds the traversal stack.
  if (extent[axis] > 0.0 && depth < kMaxSahDepth) {
    std::array<int, kBins> bin_count{};
    std::array<Aabb, kBins> bin_box{};
    auto bin_of = [&](int t) {
      const double rel = (centroids[static_cast<std::size_t>(t)][axis] - cbox.lo[axis]) / extent[axis];
      return std::min(kBins - 1, static_cast<int>(rel * kBins));
    };
    for (int i = first; i < last; ++i) {
      const int t = order_[static_cast<std::size_t>(i)];
      const int b = bin_of(t);
      ++bin_count[static_cast<std::size_t>(b)];
      bin_box[static_cast<std::size_t>(b)].extend(boxes[static_cast<std::size_t>(t)]);
    }
    // Sweep prefix/suffix areas and pick the cheapest split plane.
    std::array<double, kBins - 1> cost{};
    Aabb acc;
    int acc_count = 0;
    for (int b = 0; b < kBins - 1; ++b) {
      acc.extend(bin_box[static_cast<std::size_t>(b)]);
      acc_count += bin_count[static_cast<std::size_t>(b)];
      cost[static_cast<std::size_t>(b)] = acc_count > 0 ? acc_count * acc.surface_area() : 0.0;
    }
    acc = Aabb{};
    acc_count = 0;
    for (int b = kBins - 1; b > 0; --b) {
      acc.extend(bin_box[static_cast<std::size_t>(b)]);
      acc_count += bin_count[static_cast<std::size_t>(b)];
      cost[static_cast<std::size_t>(b - 1)] += acc_count > 0 ? acc_count * acc.surface_area() : 0.0;
    }
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    int left_count = 0;
    for (int b = 0; b < kBins - 1; ++b) {
      left_count += bin_count[static_cast<std::size_t>(b)];
      if (left_count == 0 || left_count == count) continue;
      if (cost[static_cast<std::size_t>(b)] < best_cost) {
        best_cost = cost[static_cast<std::size_t>(b)];
        best = b;
      }
    }
    if (best >= 0) {
      auto* begin = order_.data() + first;
      auto* end = order_.data() + last;
      auto* pivot = std::stable_partition(begin, end, [&](int t) { return bin_of(t) <= best; });
      mid = static_cast<int>(pivot - order_.data());
      split_done = mid > first && mid < last;
    }
  }
  if (!split_done) {
    // Degenerate centroid spread: median split, ties broken by index.
    mid = first + count / 2;
    std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + last,
                     [&](int a, int b) {
                       const double ca = centroids[static_cast<std::size_t>(a)][axis];
                       const double cb = centroids[static_cast<std::size_t>(b)][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
  }

  const int left = build(first, mid, boxes, centroids, depth + 1);
  const int right = build(mid, last, boxes, centroids, depth + 1);
  nodes_[static_cast<std::size_t>(node_index)].left = left;
  nodes_[static_cast<std::size_t>(node_index)].right = right;
  return node_index;
}

std::optional<Hit> Bvh::intersect(const Ray& ray) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv = ray.direction.cwiseInverse();
  std::optional<Hit> best;
  double best_t = ray.t_max;

  std::array<int, 128> stack{};
  int top = 0;
  stack[static_cast<std::size_t>(top++)] = 0;
  while (top > 0) {
    const auto& node = nodes_[static_cast<std::size_t>(stack[static_cast<std::size_t>(--top)])];
    double entry = 0.0;
    if (!hits_box(node.box, ray.origin, inv, ray.direction, 0.0, best_t, entry)) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& tri = tris_[static_cast<std::size_t>(i)];
        Ray clipped = ray;
        clipped.t_max = best_t;
        auto hit = moller_trumbore(tri.v0, tri.e1, tri.e2, clipped, 0.0);
        if (!hit) continue;
        if (!best || hit->t < best->t || (hit->t == best->t && tri.index < best->triangle)) {
          hit->triangle = tri.index;
          hit->face_id = tri.face_id;
          best = hit;
          best_t = hit->t;
        }
      }
      continue;
    }
    // Visit the nearer child first.
    const auto& l = nodes_[static_cast<std::size_t>(node.left)];
    const auto& r = nodes_[static_cast<std::size_t>(node.right)];
    double tl = 0.0, tr = 0.0;
    const bool hl = hits_box(l.box, ray.origin, inv, ray.direction, 0.0, best_t, tl);
    const bool hr = hits_box(r.box, ray.origin, inv, ray.direction, 0.0, best_t, tr);
    if (hl && hr) {
      if (tl <= tr) {
        stack[static_cast<std::size_t>(top++)] = node.right;
        stack[static_cast<std::size_t>(top++)] = node.left;
      } else {
        stack[static_cast<std::size_t>(top++)] = node.left;
        stack[static_cast<std::size_t>(top++)] = node.right;
      }
    } else if (hl) {
      stack[static_cast<std::size_t>(top++)] = node.left;
    } else if (hr) {
      stack[static_cast<std::size_t>(top++)] = node.right;
    }
  }
  return best;
}

bool Bvh::occluded(const Vec3& p, const Vec3& q, std::span<const int> ignore_faces) const {
  if (nodes_.empty()) return false;
  const Vec3 d = q - p;
  const double length = d.norm();
  if (!(length > 0.0)) return false;
  const double eps = kOcclusionEpsilon * length;
  Ray ray{p, d / length, length - eps};
  const Vec3 inv = ray.direction.cwiseInverse();

  std::array<int, 128> stack{};
  int top = 0;
  stack[static_cast<std::size_t>(top++)] = 0;
  while (top > 0) {
    const auto& node = nodes_[static_cast<std::size_t>(stack[static_cast<std::size_t>(--top)])];
    double entry = 0.0;
    if (!hits_box(node.box, ray.origin, inv, ray.direction, eps, ray.t_max, entry)) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& tri = tris_[static_cast<std::size_t>(i)];
        if (std::find(ignore_faces.begin(), ignore_faces.end(), tri.face_id) != ignore_faces.end())
          continue;
        if (moller_trumbore(tri.v0, tri.e1, tri.e2, ray, eps)) return true;
      }
      continue;
    }
    stack[static_cast<std::size_t>(top++)] = node.left;
    stack[static_cast<std::size_t>(top++)] = node.right;
  }
  return false;
}

}  // namespace mpgen
