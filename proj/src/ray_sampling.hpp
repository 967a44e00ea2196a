#pragma once

// Quadrature nodes along boundary rays and cubic-convolution stencils on a
// cap grid. Shared by the transform, its adjoint and the probe.

#include <array>
#include <vector>

#include "capxray/capgeo.hpp"
#include "capxray/xray.hpp"

namespace capxray::detail {

struct RayNode {
  double theta;
  double weight;  // Gauss-Legendre weight times half chord length
  Vec3 x;
  Vec3 xdot;
};

/// Quadrature nodes on the part of every ray above `level`. Nodes of ray r
/// are nodes[offset[r] .. offset[r+1]).
struct RayNodes {
  std::vector<RayNode> nodes;
  std::vector<int> offset;
};

RayNodes ray_nodes(const RayGrid& rays, double level, const TransformOptions& opt);

struct StencilEntry {
  int node;
  double w;
};

/// Up to 16 grid rows*columns, each row possibly expanded into three real
/// rows by the outer extrapolation. Entries may repeat a node.
struct Stencil {
  std::array<StencilEntry, 48> e;
  int n = 0;
};

void cubic_stencil(const CapGrid& g, const Vec3& x, Stencil& out);

}  // namespace capxray::detail
