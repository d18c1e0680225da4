#pragma once

#include "jacobi3d/poisson.hpp"

#include <optional>

namespace jacobi3d {

// Coordinate change between the x-frame and the y-frame. `forward` is
// written in the source frame, `inverse` in the image frame; the library
// verifies the round trip rather than inverting symbolically.
struct Diffeomorphism {
    std::array<Expr, 3> forward;
    std::array<Expr, 3> inverse;
    Domain domain;  // in the source frame
};

using Mat3Expr = std::array<std::array<Expr, 3>, 3>;

enum class MapDirection { Forward, Inverse };

// Entry (i, k) is the partial of component i with respect to source
// coordinate k (forward: dyi/dxk in x; inverse: dxi/dyk in y).
Mat3Expr jacobian(const Diffeomorphism& phi, MapDirection dir,
                  const Frame& source = Frame::x());

// Round-trip residual |inverse(forward(p)) - p| plus a Jacobian-determinant
// floor (|det| > 1e-12) at sampled points.
VerificationReport check_diffeomorphism(const Diffeomorphism& phi,
                                        const std::map<std::string, ParamSpec>& params = {},
                                        const SamplingConfig& cfg = {},
                                        const Frame& source = Frame::x());

// Tensor transformation rule J'(y) = (dy/dx) J(x) (dy/dx)^T with x
// substituted by the inverse map, producing a structure matrix in the
// opposite frame. The image domain defaults to the bounding box of
// forward-mapped sample points and can be overridden.
StructureMatrix pushforward(const StructureMatrix& S, const Diffeomorphism& phi,
                            std::optional<Domain> image_domain = {});

// The same map read backwards; usable to push a y-frame structure back to x.
Diffeomorphism inverse_of(const Diffeomorphism& phi, const Domain& image_domain);

}  // namespace jacobi3d
