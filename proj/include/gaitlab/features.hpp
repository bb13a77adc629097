#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "gaitlab/image.hpp"

namespace gaitlab {

// Freeman chain code of a closed boundary.
//
// Coordinates are mathematical: x grows right, y grows up. A pixel at image
// row r maps to y = height-1-r. Direction labels increase anticlockwise
// (0=E, 1=NE, 2=N, 3=NW, 4=W, 5=SW, 6=S, 7=SE) while the boundary itself is
// traversed clockwise, so the enclosed shoelace area of a traced chain is
// negative.
struct ChainCode {
    double start_x = 0.0;
    double start_y = 0.0;
    std::vector<std::uint8_t> links;

    std::size_t size() const { return links.size(); }
};

// Per-link displacement (math convention).
int link_dx(int a);
int link_dy(int a);

// Travel time of one link: 1 for axis moves, sqrt(2) for diagonals.
double link_time(int a);

// Net displacement of the chain; (0,0) for closed chains.
std::pair<int, int> chain_net_displacement(const ChainCode& chain);

// Signed shoelace area of the polyline the chain traces (negative for the
// clockwise traversal produced by trace_contour).
double chain_area(const ChainCode& chain);

// Moore-neighbor boundary trace of the largest 8-connected foreground
// component. Raises DegenerateContour for empty frames, single pixels, and
// zero-area (bare line) regions.
ChainCode trace_contour(const BinaryImage& frame);

struct EfdDescriptor {
    int n_harmonics = 0;
    double a0 = 0.0;  // DC of x(t), start point included
    double c0 = 0.0;  // DC of y(t), start point included
    double period = 0.0;
    std::vector<std::array<double, 4>> coeffs;  // {a_n, b_n, c_n, d_n}

    // [a0, c0, a1, b1, c1, d1, ...] -> length 4N+2
    Eigen::VectorXd flatten() const;
};

inline constexpr int kDefaultHarmonics = 12;

// Closed-form elliptic Fourier coefficients of the chain's x/y projections.
// The DC terms include the chain start so (a0, c0) is the path centroid.
EfdDescriptor efd_coefficients(const ChainCode& chain, int n_harmonics);

struct Point2d {
    double x = 0.0;
    double y = 0.0;
};

// Evaluate the truncated series at `samples` uniform parameter values.
std::vector<Point2d> efd_reconstruct(const EfdDescriptor& desc, int samples);

// Optional rotation/scale normalization (semi-major axis of the first
// harmonic aligned with x, scaled to 1). Off by default in every pipeline;
// classification uses raw coefficients.
EfdDescriptor normalize_descriptor(const EfdDescriptor& desc);

// Row sums followed by column sums; length height+width (480 for standard
// frames). Entry range [0, max(width,height)].
Eigen::VectorXd rcs_features(const BinaryImage& frame);

}  // namespace gaitlab
