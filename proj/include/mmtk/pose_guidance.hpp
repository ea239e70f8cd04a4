// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mmtk/image.hpp"
#include "mmtk/raster.hpp"

namespace mmtk {

struct TensorContainer;

struct Keypoint {
    double x = 0;
    double y = 0;
    double confidence = 0;
};

// Whole-body keypoints in pixel units of a declared canvas, COCO-WholeBody
// layout: 17 body points, optional 68 face points, optional 21 points per
// hand. Optional groups are wholly present or wholly absent.
struct KeypointSet {
    std::vector<Keypoint> body;
    std::optional<std::vector<Keypoint>> face;
    std::optional<std::vector<Keypoint>> left_hand;
    std::optional<std::vector<Keypoint>> right_hand;
    int frame_index = 0;
};

inline constexpr int kBodyPointCount = 17;
inline constexpr int kFacePointCount = 68;
inline constexpr int kHandPointCount = 21;

// Colored-stick drawing contract (see docs/formats.md). The 18-point drawing
// layout is the COCO body plus a derived neck (midpoint of the shoulders);
// limb i uses kLimbColors[i], joint j uses kLimbColors[j].
inline constexpr int kDrawPointCount = 18;
inline constexpr std::array<std::array<int, 2>, 17> kBodyLimbs = {{
    {1, 2}, {1, 5}, {2, 3}, {3, 4}, {5, 6}, {6, 7}, {1, 8}, {8, 9}, {9, 10},
    {1, 11}, {11, 12}, {12, 13}, {1, 0}, {0, 14}, {14, 15}, {0, 16}, {16, 17},
}};
inline constexpr std::array<Rgb, 18> kLimbColors = {{
    {255, 0, 0},   {255, 85, 0},  {255, 170, 0}, {255, 255, 0}, {170, 255, 0},
    {85, 255, 0},  {0, 255, 0},   {0, 255, 85},  {0, 255, 170}, {0, 255, 255},
    {0, 170, 255}, {0, 85, 255},  {0, 0, 255},   {85, 0, 255},  {170, 0, 255},
    {255, 0, 255}, {255, 0, 170}, {255, 0, 85},
}};
// Drawing-layout index -> COCO body index; -1 marks the derived neck.
inline constexpr std::array<int, 18> kCocoToDrawOrder = {
    0, -1, 6, 8, 10, 5, 7, 9, 12, 14, 16, 11, 13, 15, 2, 1, 4, 3,
};

struct RasterizeOptions {
    bool draw_face = true;
    bool draw_hands = true;
    double conf_threshold = 0.3;
};

// Rasterized guidance image plus a record of which groups were drawn.
struct PoseImage {
    Image8 image;
    bool drew_body = false;
    bool drew_face = false;
    bool drew_left_hand = false;
    bool drew_right_hand = false;
};

// Channel-stacked float tensor in [0, 1]: reference image (3), reference
// pose (3), then M driving poses (3 each). Layout (c * H + y) * W + x.
struct GuidancePack {
    int height = 0;
    int width = 0;
    int driving_count = 0;
    std::vector<float> data;

    int channels() const { return 6 + 3 * driving_count; }
};

// Parses a keypoint document (JSON, schema in docs/keypoints.schema.json):
// a list of frames, each with groups "body", "face", "hand_left",
// "hand_right" holding [x, y, confidence] triples. Throws ParseError with
// frame/group context on malformed documents or wrong point counts.
std::vector<KeypointSet> parse_keypoints(const std::string& text);

// Serializes keypoint sets back to the document format.
std::string write_keypoints(const std::vector<KeypointSet>& sets);

// Draws the body skeleton as colored sticks with joint discs, and face/hand
// polylines when present and enabled. Keypoints below the confidence
// threshold are skipped together with their incident segments.
// Stroke thickness is max(1, round(min(H, W) / 256)); joint disc radius is
// thickness + 1. Out-of-canvas geometry is clipped.
PoseImage rasterize_pose(const KeypointSet& kp, int height, int width,
                         const RasterizeOptions& opts = {});

// Stacks reference image, reference pose, and driving poses channel-wise,
// normalizing 8-bit planes to [0, 1]. All inputs must share one size.
GuidancePack pack_guidance(const Image8& ref_image, const PoseImage& ref_pose,
                           const std::vector<PoseImage>& driving);

// Splits a pack back into its 2 + M images (lossless for 8-bit inputs).
std::vector<Image8> unpack_guidance(const GuidancePack& pack);

// Tensor-container embedding of a pack: entry "guidance" (f32, C x H x W)
// plus a "channel_order" manifest (see docs/formats.md).
TensorContainer guidance_to_container(const GuidancePack& pack);
GuidancePack guidance_from_container(const TensorContainer& container);

} // namespace mmtk
