// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#include "mmtk/pose_guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "mmtk/errors.hpp"
#include "mmtk/formats_io.hpp"

namespace mmtk {

namespace {

using nlohmann::json;

// Face contours in the 68-point layout; {first, last, closed}.
struct Contour {
    int first;
    int last;
    bool closed;
};
constexpr std::array<Contour, 9> kFaceContours = {{
    {0, 16, false},  // jaw
    {17, 21, false}, // right eyebrow
    {22, 26, false}, // left eyebrow
    {27, 30, false}, // nose bridge
    {31, 35, false}, // lower nose
    {36, 41, true},  // right eye
    {42, 47, true},  // left eye
    {48, 59, true},  // outer lip
    {60, 67, true},  // inner lip
}};

// Finger chains from the wrist, and their stroke colors.
constexpr std::array<std::array<int, 5>, 5> kHandChains = {{
    {0, 1, 2, 3, 4},
    {0, 5, 6, 7, 8},
    {0, 9, 10, 11, 12},
    {0, 13, 14, 15, 16},
    {0, 17, 18, 19, 20},
}};
constexpr std::array<int, 5> kHandChainColors = {0, 4, 8, 12, 16};

constexpr Rgb kFaceColor = {255, 255, 255};

std::vector<Keypoint> parse_group(const json& frame, const std::string& name, int frame_index,
                                  int expected_count) {
    const json& group = frame.at(name);
    if (!group.is_array()) {
        throw ParseError("keypoints: frame " + std::to_string(frame_index) + ": group '" + name +
                         "' is not a list");
    }
    if (static_cast<int>(group.size()) != expected_count) {
        throw ParseError("keypoints: frame " + std::to_string(frame_index) + ": group '" + name +
                         "' has " + std::to_string(group.size()) + " points, expected " +
                         std::to_string(expected_count));
    }
    std::vector<Keypoint> points;
    points.reserve(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) {
        const json& triple = group[i];
        if (!triple.is_array() || triple.size() != 3 || !triple[0].is_number() ||
            !triple[1].is_number() || !triple[2].is_number()) {
            throw ParseError("keypoints: frame " + std::to_string(frame_index) + ": group '" +
                             name + "' point " + std::to_string(i) +
                             " is not an [x, y, confidence] triple");
        }
        Keypoint kp{triple[0].get<double>(), triple[1].get<double>(), triple[2].get<double>()};
        if (!std::isfinite(kp.x) || !std::isfinite(kp.y) || !std::isfinite(kp.confidence) ||
            kp.confidence < 0.0 || kp.confidence > 1.0) {
            throw ParseError("keypoints: frame " + std::to_string(frame_index) + ": group '" +
                             name + "' point " + std::to_string(i) +
                             " has non-finite coordinates or confidence outside [0, 1]");
        }
        points.push_back(kp);
    }
    return points;
}

json group_to_json(const std::vector<Keypoint>& points) {
    json out = json::array();
    for (const Keypoint& kp : points) {
        out.push_back({kp.x, kp.y, kp.confidence});
    }
    return out;
}

bool passes(const Keypoint& kp, double threshold) { return kp.confidence >= threshold; }

// Polyline pass shared by face contours and finger chains; draws the segments
// whose both endpoints pass the threshold. Returns whether anything was drawn.
bool draw_chain(Image8& img, const std::vector<Keypoint>& pts, const int* indices, int count,
                bool closed, double thickness, const Rgb& color, double threshold) {
    bool drew = false;
    for (int i = 0; i + 1 < count; ++i) {
        const Keypoint& a = pts[indices[i]];
        const Keypoint& b = pts[indices[i + 1]];
        if (passes(a, threshold) && passes(b, threshold)) {
            draw_segment(img, a.x, a.y, b.x, b.y, thickness, color);
            drew = true;
        }
    }
    if (closed && count > 2) {
        const Keypoint& a = pts[indices[count - 1]];
        const Keypoint& b = pts[indices[0]];
        if (passes(a, threshold) && passes(b, threshold)) {
            draw_segment(img, a.x, a.y, b.x, b.y, thickness, color);
            drew = true;
        }
    }
    return drew;
}

bool draw_hand(Image8& img, const std::vector<Keypoint>& hand, double thickness, double threshold) {
    bool drew = false;
    for (std::size_t c = 0; c < kHandChains.size(); ++c) {
        drew |= draw_chain(img, hand, kHandChains[c].data(), static_cast<int>(kHandChains[c].size()),
                           false, thickness, kLimbColors[kHandChainColors[c]], threshold);
    }
    return drew;
}

} // namespace

std::vector<KeypointSet> parse_keypoints(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("keypoints: ") + e.what());
    }
    if (!doc.is_array()) {
        throw ParseError("keypoints: top level must be a list of frames");
    }

    std::vector<KeypointSet> sets;
    sets.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& frame = doc[i];
        const int frame_index = static_cast<int>(i);
        if (!frame.is_object()) {
            throw ParseError("keypoints: frame " + std::to_string(frame_index) + " is not an object");
        }
        if (!frame.contains("body")) {
            throw ParseError("keypoints: frame " + std::to_string(frame_index) +
                             ": required group 'body' is missing");
        }
        KeypointSet set;
        set.frame_index = frame_index;
        set.body = parse_group(frame, "body", frame_index, kBodyPointCount);
        if (frame.contains("face")) {
            set.face = parse_group(frame, "face", frame_index, kFacePointCount);
        }
        if (frame.contains("hand_left")) {
            set.left_hand = parse_group(frame, "hand_left", frame_index, kHandPointCount);
        }
        if (frame.contains("hand_right")) {
            set.right_hand = parse_group(frame, "hand_right", frame_index, kHandPointCount);
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

std::string write_keypoints(const std::vector<KeypointSet>& sets) {
    json doc = json::array();
    for (const KeypointSet& set : sets) {
        json frame;
        frame["body"] = group_to_json(set.body);
        if (set.face) {
            frame["face"] = group_to_json(*set.face);
        }
        if (set.left_hand) {
            frame["hand_left"] = group_to_json(*set.left_hand);
        }
        if (set.right_hand) {
            frame["hand_right"] = group_to_json(*set.right_hand);
        }
        doc.push_back(std::move(frame));
    }
    return doc.dump(2) + "\n";
}

PoseImage rasterize_pose(const KeypointSet& kp, int height, int width,
                         const RasterizeOptions& opts) {
    if (height < 1 || width < 1) {
        throw std::invalid_argument("rasterize_pose: canvas must be at least 1x1");
    }
    if (static_cast<int>(kp.body.size()) != kBodyPointCount) {
        throw std::invalid_argument("rasterize_pose: body group must have 17 points");
    }

    PoseImage out;
    out.image = Image8(width, height);
    const double thickness = std::max(1.0, std::round(std::min(height, width) / 256.0));
    const double radius = thickness + 1.0;
    const double thr = opts.conf_threshold;

    // Body points in the 18-point drawing layout, neck derived from shoulders.
    std::array<Keypoint, kDrawPointCount> pts{};
    for (int i = 0; i < kDrawPointCount; ++i) {
        const int coco = kCocoToDrawOrder[i];
        if (coco >= 0) {
            pts[i] = kp.body[coco];
        } else {
            const Keypoint& ls = kp.body[5];
            const Keypoint& rs = kp.body[6];
            pts[i] = Keypoint{(ls.x + rs.x) / 2.0, (ls.y + rs.y) / 2.0,
                              std::min(ls.confidence, rs.confidence)};
        }
    }

    for (std::size_t i = 0; i < kBodyLimbs.size(); ++i) {
        const Keypoint& a = pts[kBodyLimbs[i][0]];
        const Keypoint& b = pts[kBodyLimbs[i][1]];
        if (passes(a, thr) && passes(b, thr)) {
            draw_segment(out.image, a.x, a.y, b.x, b.y, thickness, kLimbColors[i]);
            out.drew_body = true;
        }
    }
    for (int i = 0; i < kDrawPointCount; ++i) {
        if (passes(pts[i], thr)) {
            draw_disc(out.image, pts[i].x, pts[i].y, radius, kLimbColors[i]);
            out.drew_body = true;
        }
    }

    if (opts.draw_face && kp.face) {
        for (const Contour& contour : kFaceContours) {
            std::array<int, kFacePointCount> indices{};
            const int count = contour.last - contour.first + 1;
            for (int i = 0; i < count; ++i) {
                indices[i] = contour.first + i;
            }
            out.drew_face |= draw_chain(out.image, *kp.face, indices.data(), count,
                                        contour.closed, thickness, kFaceColor, thr);
        }
    }
    if (opts.draw_hands && kp.left_hand) {
        out.drew_left_hand = draw_hand(out.image, *kp.left_hand, thickness, thr);
    }
    if (opts.draw_hands && kp.right_hand) {
        out.drew_right_hand = draw_hand(out.image, *kp.right_hand, thickness, thr);
    }
    return out;
}

GuidancePack pack_guidance(const Image8& ref_image, const PoseImage& ref_pose,
                           const std::vector<PoseImage>& driving) {
    const int w = ref_image.width;
    const int h = ref_image.height;
    if (w < 1 || h < 1) {
        throw std::invalid_argument("pack_guidance: reference image is empty");
    }
    auto check_size = [&](const Image8& img, const char* what) {
        if (img.width != w || img.height != h) {
            throw std::invalid_argument(std::string("pack_guidance: ") + what +
                                        " size does not match the reference image");
        }
    };
    check_size(ref_pose.image, "reference pose");
    for (const PoseImage& p : driving) {
        check_size(p.image, "driving pose");
    }

    GuidancePack pack;
    pack.height = h;
    pack.width = w;
    pack.driving_count = static_cast<int>(driving.size());
    pack.data.resize(static_cast<std::size_t>(pack.channels()) * h * w);

    const std::size_t plane = static_cast<std::size_t>(h) * w;
    auto write_image = [&](const Image8& img, int base_channel) {
        for (int c = 0; c < 3; ++c) {
            float* dst = pack.data.data() + (base_channel + c) * plane;
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    dst[static_cast<std::size_t>(y) * w + x] =
                        static_cast<float>(img.pixel(x, y)[c]) / 255.0f;
                }
            }
        }
    };
    write_image(ref_image, 0);
    write_image(ref_pose.image, 3);
    for (std::size_t i = 0; i < driving.size(); ++i) {
        write_image(driving[i].image, 6 + 3 * static_cast<int>(i));
    }
    return pack;
}

std::vector<Image8> unpack_guidance(const GuidancePack& pack) {
    if (pack.data.size() != static_cast<std::size_t>(pack.channels()) * pack.height * pack.width) {
        throw std::invalid_argument("unpack_guidance: data size does not match declared shape");
    }
    const std::size_t plane = static_cast<std::size_t>(pack.height) * pack.width;
    std::vector<Image8> images;
    images.reserve(2 + pack.driving_count);
    for (int img_idx = 0; img_idx < 2 + pack.driving_count; ++img_idx) {
        Image8 img(pack.width, pack.height);
        for (int c = 0; c < 3; ++c) {
            const float* src = pack.data.data() + (img_idx * 3 + c) * plane;
            for (int y = 0; y < pack.height; ++y) {
                for (int x = 0; x < pack.width; ++x) {
                    const float v = src[static_cast<std::size_t>(y) * pack.width + x];
                    const float scaled = std::clamp(v, 0.0f, 1.0f) * 255.0f;
                    img.pixel(x, y)[c] = static_cast<std::uint8_t>(std::lround(scaled));
                }
            }
        }
        images.push_back(std::move(img));
    }
    return images;
}

TensorContainer guidance_to_container(const GuidancePack& pack) {
    nlohmann::json order = nlohmann::json::array();
    order.push_back("ref_image");
    order.push_back("ref_pose");
    for (int i = 0; i < pack.driving_count; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "driving_%05d", i);
        order.push_back(name);
    }
    const std::string manifest = order.dump();

    TensorContainer container;
    container.add_f32("guidance",
                      {static_cast<std::uint64_t>(pack.channels()),
                       static_cast<std::uint64_t>(pack.height),
                       static_cast<std::uint64_t>(pack.width)},
                      pack.data);
    container.add_u8("channel_order", {manifest.size()},
                     std::vector<std::uint8_t>(manifest.begin(), manifest.end()));
    return container;
}

GuidancePack guidance_from_container(const TensorContainer& container) {
    const TensorEntry& entry = container.at("guidance");
    if (entry.dtype != TensorDType::F32 || entry.dims.size() != 3) {
        throw FormatError("guidance container: entry 'guidance' must be f32 with 3 dims");
    }
    const std::uint64_t c = entry.dims[0];
    if (c < 6 || (c - 6) % 3 != 0) {
        throw FormatError("guidance container: channel count must be 6 + 3M");
    }
    GuidancePack pack;
    pack.height = static_cast<int>(entry.dims[1]);
    pack.width = static_cast<int>(entry.dims[2]);
    pack.driving_count = static_cast<int>((c - 6) / 3);
    pack.data = entry.as_f32();
    return pack;
}

} // namespace mmtk
