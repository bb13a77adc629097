#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gaitlab/image.hpp"

namespace gaitlab {

enum class TemplateKind { GEI, GEnI, AEI };

std::string template_kind_name(TemplateKind kind);
TemplateKind template_kind_from_name(const std::string& name);

// Real-valued [0,1] collation of one gait cycle.
struct GaitTemplate {
    TemplateKind kind = TemplateKind::GEI;
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Per-pixel mean of the binary frames.
GaitTemplate compute_gei(const std::vector<BinaryImage>& frames);

// Per-pixel mean of |B_t - B_(t-1)| with B_0 all-zero. The absolute value is
// load-bearing: signed differences cancel to nothing.
GaitTemplate compute_aei(const std::vector<BinaryImage>& frames);

// Per-pixel binary entropy (base 2) of the foreground frequency.
GaitTemplate compute_geni(const std::vector<BinaryImage>& frames);

GaitTemplate apply_mask(const GaitTemplate& tpl, const BinaryImage& mask);

// Row-major flattening (57600 entries for standard templates).
Eigen::VectorXd flatten(const GaitTemplate& tpl);
GaitTemplate reshape(const Eigen::VectorXd& v, int width, int height, TemplateKind kind);

// 8-bit grayscale export (value = round(255*v)) plus a JSON sidecar holding
// the kind; import reverses both.
void export_template(const GaitTemplate& tpl, const std::string& png_path);
GaitTemplate import_template(const std::string& png_path);

}  // namespace gaitlab
