#include "gaitlab/features.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "gaitlab/errors.hpp"

namespace gaitlab {

namespace {

inline int sgn(int v) { return (v > 0) - (v < 0); }

}  // namespace

// Displacements follow the label formulas dx = sgn(6-a)sgn(2-a),
// dy = sgn(4-a)sgn(a); spelled out as tables for clarity.
int link_dx(int a) {
    static constexpr int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    return dx[a & 7];
}

int link_dy(int a) {
    static constexpr int dy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    return dy[a & 7];
}

double link_time(int a) {
    // 1 + ((sqrt(2)-1)/2) * (1 - (-1)^a): 1 on even links, sqrt(2) on odd.
    return (a & 1) ? std::sqrt(2.0) : 1.0;
}

std::pair<int, int> chain_net_displacement(const ChainCode& chain) {
    int dx = 0, dy = 0;
    for (auto a : chain.links) {
        dx += link_dx(a);
        dy += link_dy(a);
    }
    return {dx, dy};
}

double chain_area(const ChainCode& chain) {
    double area = 0.0;
    double x = chain.start_x, y = chain.start_y;
    for (auto a : chain.links) {
        const double nx = x + link_dx(a);
        const double ny = y + link_dy(a);
        area += x * ny - nx * y;
        x = nx;
        y = ny;
    }
    return 0.5 * area;
}

namespace {

// Largest 8-connected foreground component as its own mask.
BinaryImage largest_component(const BinaryImage& frame) {
    const int w = frame.width, h = frame.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    int best_label = -1;
    std::size_t best_count = 0;
    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
        if (!frame.pixels[i] || label[i] >= 0) continue;
        std::size_t count = 0;
        stack.push_back(i);
        label[i] = next;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++count;
            const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = px + dx, ny = py + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
                    if (frame.pixels[q] && label[q] < 0) {
                        label[q] = next;
                        stack.push_back(q);
                    }
                }
            }
        }
        if (count > best_count) {
            best_count = count;
            best_label = next;
        }
        ++next;
    }
    BinaryImage out(w, h);
    if (best_label < 0) return out;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = (label[i] == best_label);
    return out;
}

}  // namespace

ChainCode trace_contour(const BinaryImage& frame) {
    const BinaryImage comp = largest_component(frame);
    const int w = comp.width, h = comp.height;

    // Start at the topmost-leftmost component pixel (image order); its west
    // neighbor is guaranteed background.
    int sx = -1, sy = -1;
    for (int y = 0; y < h && sx < 0; ++y) {
        for (int x = 0; x < w; ++x) {
            if (comp.at(x, y)) {
                sx = x;
                sy = y;
                break;
            }
        }
    }
    if (sx < 0) throw DegenerateContour("empty frame");

    // Moore neighborhood in clockwise image order, starting west.
    static constexpr int nbr[8][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1},
                                      {1, 0},  {1, 1},   {0, 1},  {-1, 1}};
    auto fg = [&](int x, int y) { return comp.in_bounds(x, y) && comp.at(x, y); };
    // Direction label (math convention) for an image-space move; image up
    // (dy_img = -1) is math north.
    auto label_of = [](int dx, int dy_img) {
        static constexpr int lut[3][3] = {
            // rows: dy_img = -1, 0, 1; cols: dx = -1, 0, 1
            {3, 2, 1},
            {4, -1, 0},
            {5, 6, 7},
        };
        return lut[dy_img + 1][dx + 1];
    };

    ChainCode chain;
    chain.start_x = sx;
    chain.start_y = (h - 1) - sy;

    int cx = sx, cy = sy;
    int bx = sx - 1, by = sy;  // backtrack (background) neighbor
    const int start_bx = bx, start_by = by;
    const std::size_t max_steps = 4 * comp.count() + 8;
    for (std::size_t step = 0; step < max_steps; ++step) {
        // Index of the backtrack in the neighbor ring.
        int bi = -1;
        for (int i = 0; i < 8; ++i) {
            if (cx + nbr[i][0] == bx && cy + nbr[i][1] == by) {
                bi = i;
                break;
            }
        }
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int i = (bi + k) & 7;
            const int nx = cx + nbr[i][0], ny = cy + nbr[i][1];
            if (fg(nx, ny)) {
                found = i;
                break;
            }
            bx = nx;
            by = ny;
        }
        if (found < 0) throw DegenerateContour("single-pixel region");
        const int nx = cx + nbr[found][0], ny = cy + nbr[found][1];
        chain.links.push_back(static_cast<std::uint8_t>(label_of(nx - cx, ny - cy)));
        cx = nx;
        cy = ny;
        // Jacob's criterion: stop on re-entering the start with the same
        // backtrack configuration.
        if (cx == sx && cy == sy && bx == start_bx && by == start_by) break;
    }

    if (chain_net_displacement(chain) != std::pair<int, int>{0, 0})
        throw DegenerateContour("trace did not close");
    if (std::abs(chain_area(chain)) < 0.5)
        throw DegenerateContour("zero-area region (bare line)");
    return chain;
}

Eigen::VectorXd EfdDescriptor::flatten() const {
    Eigen::VectorXd v(4 * n_harmonics + 2);
    v[0] = a0;
    v[1] = c0;
    for (int n = 0; n < n_harmonics; ++n) {
        for (int j = 0; j < 4; ++j) v[2 + 4 * n + j] = coeffs[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)];
    }
    return v;
}

EfdDescriptor efd_coefficients(const ChainCode& chain, int n_harmonics) {
    if (chain.links.empty()) throw GaitError("empty chain");
    if (n_harmonics < 1) throw GaitError("need at least one harmonic");
    if (chain_net_displacement(chain) != std::pair<int, int>{0, 0})
        throw GaitError("efd requires a closed chain");

    const std::size_t K = chain.links.size();
    std::vector<double> dt(K), t(K + 1, 0.0);
    std::vector<int> dx(K), dy(K);
    for (std::size_t p = 0; p < K; ++p) {
        const int a = chain.links[p];
        dt[p] = link_time(a);
        dx[p] = link_dx(a);
        dy[p] = link_dy(a);
        t[p + 1] = t[p] + dt[p];
    }
    const double T = t[K];

    EfdDescriptor desc;
    desc.n_harmonics = n_harmonics;
    desc.period = T;
    desc.coeffs.resize(static_cast<std::size_t>(n_harmonics));

    const double two_pi = 2.0 * M_PI;
    for (int n = 1; n <= n_harmonics; ++n) {
        const double w = two_pi * n / T;
        const double scale = T / (2.0 * n * n * M_PI * M_PI);
        double an = 0.0, bn = 0.0, cn = 0.0, dn = 0.0;
        for (std::size_t p = 0; p < K; ++p) {
            const double c1 = std::cos(w * t[p + 1]) - std::cos(w * t[p]);
            const double s1 = std::sin(w * t[p + 1]) - std::sin(w * t[p]);
            const double vx = dx[p] / dt[p];
            const double vy = dy[p] / dt[p];
            an += vx * c1;
            bn += vx * s1;
            cn += vy * c1;
            dn += vy * s1;
        }
        desc.coeffs[static_cast<std::size_t>(n - 1)] = {scale * an, scale * bn, scale * cn,
                                                        scale * dn};
    }

    // DC terms via the per-link accumulation; xi/delta carry the polyline
    // offset of link p relative to a straight-rate traversal.
    double a0 = 0.0, c0 = 0.0;
    double sum_dx = 0.0, sum_dy = 0.0;
    for (std::size_t p = 0; p < K; ++p) {
        const double xi = sum_dx - (dx[p] / dt[p]) * t[p];
        const double delta = sum_dy - (dy[p] / dt[p]) * t[p];
        a0 += (dx[p] / (2.0 * dt[p])) * (t[p + 1] * t[p + 1] - t[p] * t[p]) +
              xi * (t[p + 1] - t[p]);
        c0 += (dy[p] / (2.0 * dt[p])) * (t[p + 1] * t[p + 1] - t[p] * t[p]) +
              delta * (t[p + 1] - t[p]);
        sum_dx += dx[p];
        sum_dy += dy[p];
    }
    desc.a0 = a0 / T + chain.start_x;
    desc.c0 = c0 / T + chain.start_y;
    return desc;
}

std::vector<Point2d> efd_reconstruct(const EfdDescriptor& desc, int samples) {
    if (samples < 3) throw GaitError("need at least 3 samples");
    std::vector<Point2d> pts(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double s = static_cast<double>(k) / samples;  // t/T in [0,1)
        double x = desc.a0, y = desc.c0;
        for (int n = 1; n <= desc.n_harmonics; ++n) {
            const auto& h = desc.coeffs[static_cast<std::size_t>(n - 1)];
            const double arg = 2.0 * M_PI * n * s;
            const double c = std::cos(arg), si = std::sin(arg);
            x += h[0] * c + h[1] * si;
            y += h[2] * c + h[3] * si;
        }
        pts[static_cast<std::size_t>(k)] = {x, y};
    }
    return pts;
}

EfdDescriptor normalize_descriptor(const EfdDescriptor& desc) {
    // Kuhl-Giardina canonicalization: rotate the parameter so the first
    // harmonic's semi-major axis sits at t=0, rotate space onto that axis,
    // then scale it to unit length. DC terms are dropped (set to 0).
    EfdDescriptor out = desc;
    if (desc.n_harmonics < 1) return out;
    const auto& h1 = desc.coeffs[0];
    const double a = h1[0], b = h1[1], c = h1[2], d = h1[3];
    const double theta =
        0.5 * std::atan2(2.0 * (a * b + c * d), a * a + c * c - b * b - d * d);
    for (int n = 1; n <= desc.n_harmonics; ++n) {
        const auto& h = desc.coeffs[static_cast<std::size_t>(n - 1)];
        const double ct = std::cos(n * theta), st = std::sin(n * theta);
        out.coeffs[static_cast<std::size_t>(n - 1)] = {
            h[0] * ct + h[1] * st, -h[0] * st + h[1] * ct,
            h[2] * ct + h[3] * st, -h[2] * st + h[3] * ct};
    }
    const auto& g1 = out.coeffs[0];
    const double psi = std::atan2(g1[2], g1[0]);
    const double cp = std::cos(psi), sp = std::sin(psi);
    for (auto& h : out.coeffs) {
        const double ha = h[0], hb = h[1], hc = h[2], hd = h[3];
        h = {cp * ha + sp * hc, cp * hb + sp * hd, -sp * ha + cp * hc,
             -sp * hb + cp * hd};
    }
    const double mag = std::abs(out.coeffs[0][0]);
    if (mag > 0.0) {
        for (auto& h : out.coeffs)
            for (auto& v : h) v /= mag;
    }
    out.a0 = 0.0;
    out.c0 = 0.0;
    return out;
}

Eigen::VectorXd rcs_features(const BinaryImage& frame) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(frame.height + frame.width);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            if (!frame.at(x, y)) continue;
            v[y] += 1.0;
            v[frame.height + x] += 1.0;
        }
    }
    return v;
}

}  // namespace gaitlab
