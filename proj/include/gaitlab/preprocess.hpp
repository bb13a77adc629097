#pragma once

#include <vector>

#include "gaitlab/image.hpp"

namespace gaitlab {

// Lower-limb pixel count per frame; the oscillation carrying gait phase.
struct OscillationSignal {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

// Frame indices of three consecutive troughs; [start, end] brackets one full
// gait cycle with mid at the half-cycle.
struct CycleRange {
    int start = 0;
    int mid = 0;
    int end = 0;

    int length() const { return end - start + 1; }
};

// Separable Gaussian blur with replicated borders; sigma 0 is the identity.
std::vector<double> gaussian_blur(const GrayImage& img, double sigma);

// Foreground where |blur(frame) - blur(background)| > threshold.
BinaryImage background_subtract(const GrayImage& frame, const GrayImage& background,
                                double blur_sigma, int threshold);

// Scale the foreground bounding box to height 240 (aspect preserved) and
// paste into a 240x240 canvas with the foreground centroid on column 120.
BinaryImage normalize_silhouette(const BinaryImage& img);

// Sum of foreground pixels in the lower half (rows [h/2, h); rows [120,240)
// for normalized frames).
OscillationSignal lower_limb_signal(const std::vector<BinaryImage>& frames);

// Savitzky-Golay smoothing with mirror padding at the ends.
OscillationSignal smooth_signal(const OscillationSignal& signal, int window = 11,
                                int polyorder = 3);

// First three troughs of the smoothed signal. Raises IncompleteCycle when
// fewer than three survive the spacing filter.
CycleRange detect_gait_cycle(const OscillationSignal& smoothed);

}  // namespace gaitlab
