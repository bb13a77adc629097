#include "gaitlab/preprocess.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaitlab/errors.hpp"

namespace gaitlab {

std::vector<double> gaussian_blur(const GrayImage& img, double sigma) {
    const int w = img.width, h = img.height;
    std::vector<double> out(img.pixels.begin(), img.pixels.end());
    if (sigma <= 0.0) return out;

    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] =
            std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[static_cast<std::size_t>(i + radius)];
    }
    for (auto& k : kernel) k /= sum;

    // horizontal pass, clamped borders
    std::vector<double> tmp(out.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sx = std::clamp(x + i, 0, w - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       out[static_cast<std::size_t>(y) * w + sx];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    // vertical pass
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sy = std::clamp(y + i, 0, h - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       tmp[static_cast<std::size_t>(sy) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

BinaryImage background_subtract(const GrayImage& frame, const GrayImage& background,
                                double blur_sigma, int threshold) {
    if (frame.width != background.width || frame.height != background.height)
        throw GaitError("background_subtract: dimension mismatch");
    const auto bf = gaussian_blur(frame, blur_sigma);
    const auto bb = gaussian_blur(background, blur_sigma);
    BinaryImage out(frame.width, frame.height);
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = std::abs(bf[i] - bb[i]) > threshold;
    return out;
}

BinaryImage normalize_silhouette(const BinaryImage& img) {
    const Box box = foreground_box(img);
    if (box.empty()) throw EmptySilhouette("normalize_silhouette: no foreground");

    const int bh = box.y1 - box.y0 + 1;
    const int bw = box.x1 - box.x0 + 1;
    const double scale = static_cast<double>(kFrameSize) / bh;
    const int out_w = std::max(1, static_cast<int>(std::lround(bw * scale)));

    // nearest-neighbor resample of the box into a kFrameSize-tall strip
    BinaryImage strip(out_w, kFrameSize);
    for (int y = 0; y < kFrameSize; ++y) {
        const int sy = box.y0 + std::min(bh - 1, static_cast<int>((y + 0.5) / scale));
        for (int x = 0; x < out_w; ++x) {
            const int sx = box.x0 + std::min(bw - 1, static_cast<int>((x + 0.5) * bw / out_w));
            strip.at(x, y) = img.at(sx, sy);
        }
    }

    // centroid column of the strip decides the horizontal placement
    long long cx_sum = 0, n = 0;
    for (int y = 0; y < kFrameSize; ++y) {
        for (int x = 0; x < out_w; ++x) {
            if (!strip.at(x, y)) continue;
            cx_sum += x;
            ++n;
        }
    }
    const double centroid = n ? static_cast<double>(cx_sum) / n : out_w / 2.0;
    const int shift = static_cast<int>(std::lround(kFrameSize / 2.0 - centroid));

    BinaryImage out(kFrameSize, kFrameSize);
    for (int y = 0; y < kFrameSize; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const int ox = x + shift;
            if (ox < 0 || ox >= kFrameSize) continue;
            out.at(ox, y) = strip.at(x, y);
        }
    }
    return out;
}

OscillationSignal lower_limb_signal(const std::vector<BinaryImage>& frames) {
    if (frames.empty()) throw GaitError("lower_limb_signal: no frames");
    OscillationSignal sig;
    sig.values.reserve(frames.size());
    for (const auto& f : frames) {
        long long count = 0;
        for (int y = f.height / 2; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x) count += f.at(x, y) ? 1 : 0;
        sig.values.push_back(static_cast<double>(count));
    }
    return sig;
}

OscillationSignal smooth_signal(const OscillationSignal& signal, int window,
                                int polyorder) {
    const int n = static_cast<int>(signal.size());
    if (window % 2 == 0 || window < 1) throw GaitError("smooth_signal: window must be odd");
    if (polyorder >= window) throw GaitError("smooth_signal: polyorder must be < window");
    if (window > n) throw GaitError("smooth_signal: window exceeds signal length");

    // least-squares fit coefficients for the window center
    const int m = window / 2;
    Eigen::MatrixXd A(window, polyorder + 1);
    for (int i = 0; i < window; ++i) {
        double p = 1.0;
        for (int j = 0; j <= polyorder; ++j) {
            A(i, j) = p;
            p *= (i - m);
        }
    }
    const Eigen::MatrixXd pinv =
        (A.transpose() * A).ldlt().solve(A.transpose());  // (p+1) x window
    const Eigen::VectorXd coeff = pinv.row(0);

    auto mirrored = [&](int idx) {
        // reflect about the endpoints without repeating them
        while (idx < 0 || idx >= n) {
            if (idx < 0) idx = -idx;
            if (idx >= n) idx = 2 * (n - 1) - idx;
        }
        return signal.values[static_cast<std::size_t>(idx)];
    };

    OscillationSignal out;
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = -m; k <= m; ++k) acc += coeff[k + m] * mirrored(i + k);
        out.values[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

namespace {

struct Trough {
    int index;
    double value;
};

// Strict local minima; a flat run counts once, at its middle sample.
std::vector<Trough> candidate_troughs(const std::vector<double>& s) {
    std::vector<Trough> out;
    const int n = static_cast<int>(s.size());
    int a = 0;
    while (a < n) {
        int b = a;
        while (b + 1 < n && s[static_cast<std::size_t>(b + 1)] == s[static_cast<std::size_t>(a)]) ++b;
        const bool left_ok = (a == 0) || s[static_cast<std::size_t>(a - 1)] > s[static_cast<std::size_t>(a)];
        const bool right_ok = (b == n - 1) || s[static_cast<std::size_t>(b + 1)] > s[static_cast<std::size_t>(b)];
        const bool interior = (a > 0) || (b < n - 1);
        if (left_ok && right_ok && interior && !(a == 0 && b == n - 1))
            out.push_back({(a + b) / 2, s[static_cast<std::size_t>(a)]});
        a = b + 1;
    }
    return out;
}

}  // namespace

CycleRange detect_gait_cycle(const OscillationSignal& smoothed) {
    auto cand = candidate_troughs(smoothed.values);
    if (cand.size() < 3)
        throw IncompleteCycle("fewer than three troughs in the oscillation signal");

    // reject doubles closer than 40% of the median inter-trough spacing
    std::vector<int> gaps;
    for (std::size_t i = 1; i < cand.size(); ++i)
        gaps.push_back(cand[i].index - cand[i - 1].index);
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
    const double min_gap = 0.4 * gaps[gaps.size() / 2];

    std::vector<Trough> kept;
    for (const auto& c : cand) {
        if (!kept.empty() && c.index - kept.back().index < min_gap) {
            if (c.value < kept.back().value) kept.back() = c;
        } else {
            kept.push_back(c);
        }
    }
    if (kept.size() < 3)
        throw IncompleteCycle("fewer than three troughs after spacing filter");
    return CycleRange{kept[0].index, kept[1].index, kept[2].index};
}

}  // namespace gaitlab
