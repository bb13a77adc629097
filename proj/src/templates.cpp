#include "gaitlab/templates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "gaitlab/errors.hpp"

namespace gaitlab {

std::string template_kind_name(TemplateKind kind) {
    switch (kind) {
        case TemplateKind::GEI: return "gei";
        case TemplateKind::GEnI: return "geni";
        case TemplateKind::AEI: return "aei";
    }
    return "gei";
}

TemplateKind template_kind_from_name(const std::string& name) {
    if (name == "gei") return TemplateKind::GEI;
    if (name == "geni") return TemplateKind::GEnI;
    if (name == "aei") return TemplateKind::AEI;
    throw GaitError("unknown template kind: " + name);
}

namespace {

void check_frames(const std::vector<BinaryImage>& frames) {
    if (frames.empty()) throw GaitError("template collation: empty cycle");
    for (const auto& f : frames) {
        if (f.width != frames[0].width || f.height != frames[0].height)
            throw GaitError("template collation: frame dimension mismatch");
    }
}

GaitTemplate blank_like(const BinaryImage& f, TemplateKind kind) {
    GaitTemplate tpl;
    tpl.kind = kind;
    tpl.width = f.width;
    tpl.height = f.height;
    tpl.values.assign(static_cast<std::size_t>(f.width) * f.height, 0.0);
    return tpl;
}

}  // namespace

GaitTemplate compute_gei(const std::vector<BinaryImage>& frames) {
    check_frames(frames);
    GaitTemplate tpl = blank_like(frames[0], TemplateKind::GEI);
    for (const auto& f : frames)
        for (std::size_t i = 0; i < tpl.values.size(); ++i) tpl.values[i] += f.pixels[i];
    const double n = static_cast<double>(frames.size());
    for (auto& v : tpl.values) v /= n;
    return tpl;
}

GaitTemplate compute_aei(const std::vector<BinaryImage>& frames) {
    check_frames(frames);
    GaitTemplate tpl = blank_like(frames[0], TemplateKind::AEI);
    const BinaryImage zero(frames[0].width, frames[0].height);
    const BinaryImage* prev = &zero;
    for (const auto& f : frames) {
        for (std::size_t i = 0; i < tpl.values.size(); ++i)
            tpl.values[i] += std::abs(static_cast<int>(f.pixels[i]) -
                                      static_cast<int>(prev->pixels[i]));
        prev = &f;
    }
    const double n = static_cast<double>(frames.size());
    for (auto& v : tpl.values) v /= n;
    return tpl;
}

GaitTemplate compute_geni(const std::vector<BinaryImage>& frames) {
    check_frames(frames);
    GaitTemplate tpl = blank_like(frames[0], TemplateKind::GEnI);
    for (const auto& f : frames)
        for (std::size_t i = 0; i < tpl.values.size(); ++i) tpl.values[i] += f.pixels[i];
    const double n = static_cast<double>(frames.size());
    for (auto& v : tpl.values) {
        const double z = v / n;
        double e = 0.0;
        if (z > 0.0) e -= z * std::log2(z);
        if (z < 1.0) e -= (1.0 - z) * std::log2(1.0 - z);
        v = e;
    }
    return tpl;
}

GaitTemplate apply_mask(const GaitTemplate& tpl, const BinaryImage& mask) {
    if (tpl.width != mask.width || tpl.height != mask.height)
        throw GaitError("apply_mask: dimension mismatch");
    GaitTemplate out = tpl;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] *= mask.pixels[i];
    return out;
}

Eigen::VectorXd flatten(const GaitTemplate& tpl) {
    return Eigen::Map<const Eigen::VectorXd>(tpl.values.data(),
                                             static_cast<Eigen::Index>(tpl.values.size()));
}

GaitTemplate reshape(const Eigen::VectorXd& v, int width, int height, TemplateKind kind) {
    if (v.size() != static_cast<Eigen::Index>(width) * height)
        throw GaitError("reshape: size mismatch");
    GaitTemplate tpl;
    tpl.kind = kind;
    tpl.width = width;
    tpl.height = height;
    tpl.values.assign(v.data(), v.data() + v.size());
    return tpl;
}

void export_template(const GaitTemplate& tpl, const std::string& png_path) {
    GrayImage img(tpl.width, tpl.height);
    for (std::size_t i = 0; i < tpl.values.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(
            std::lround(255.0 * std::clamp(tpl.values[i], 0.0, 1.0)));
    write_png(png_path, img);

    nlohmann::json meta{{"kind", template_kind_name(tpl.kind)},
                        {"width", tpl.width},
                        {"height", tpl.height}};
    std::ofstream out(png_path + ".json");
    if (!out) throw IoError("cannot write sidecar for " + png_path);
    out << meta.dump(2) << "\n";
}

GaitTemplate import_template(const std::string& png_path) {
    std::ifstream in(png_path + ".json");
    if (!in) throw IoError("missing sidecar for " + png_path);
    nlohmann::json meta = nlohmann::json::parse(in);

    const GrayImage img = read_png(png_path);
    GaitTemplate tpl;
    tpl.kind = template_kind_from_name(meta.at("kind").get<std::string>());
    tpl.width = img.width;
    tpl.height = img.height;
    tpl.values.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        tpl.values[i] = img.pixels[i] / 255.0;
    return tpl;
}

}  // namespace gaitlab
