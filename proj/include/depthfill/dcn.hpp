#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "depthfill/geometry.hpp"
#include "depthfill/io.hpp"
#include "depthfill/tensor.hpp"

namespace depthfill {

// Two-pathway encoder-decoder. The dual-depth pathway (projected dense depth
// + sparse depth) fuses into the decoder by summation, the RGB-D pathway by
// concatenation. Four stride-2 stages give 1/16 resolution; the decoder
// up-projects (nearest 2x + 3x3 conv) back to full resolution.
struct DcnConfig {
    int base_channels = 16;    // width of the first encoder stage
    int blocks_per_stage = 2;  // residual blocks per stage
    static constexpr int stages = 4;

    void validate() const;
    int channels_at(int stage) const { return base_channels << stage; }
};

struct ConvLayer {
    Tensor w;  // O×C×k×k
    Tensor b;  // O
    int stride = 1;
};

// conv3 -> relu -> conv3 plus skip; 1x1 projection when extents or channel
// counts differ.
struct ResidualBlock {
    ConvLayer conv1, conv2;
    std::optional<ConvLayer> proj;
};

struct EncoderPath {
    std::vector<std::vector<ResidualBlock>> stages;
};

struct DecoderPath {
    ConvLayer bottleneck;  // 1x1 over the deepest feature(s)
    struct Up {
        ConvLayer up;    // 3x3 after nearest-2x upsample
        ConvLayer fuse;  // 1x1 after concat-fusion
    };
    std::vector<Up> ups;  // from 1/16 up to 1/2
    ConvLayer head_up;    // 3x3 after the final upsample
    ConvLayer head_out;   // 3x3 to a single linear channel
};

struct DcnParams {
    DcnConfig config;
    int in_left = 2, in_right = 4;
    EncoderPath left, right;
    DecoderPath decoder;

    std::vector<std::pair<std::string, Tensor>> named_params() const;
    std::vector<Tensor> tensors() const;
};

DcnParams dcn_init(const DcnConfig& config, uint64_t seed, int in_left = 2, int in_right = 4);
long long dcn_param_count(const DcnConfig& config, int in_left = 2, int in_right = 4);

// dual_depth: 2×H×W (projected dense depth, sparse depth), rgbd: 4×H×W
// (R, G, B, sparse depth), all normalized. H and W must be divisible by 16.
Tensor dcn_forward(const DcnParams& params, const Tensor& dual_depth, const Tensor& rgbd);

// Single-pathway all-concat encoder-decoder over a 6-channel input
// (ablation model 2), parameter budget matched to the full net within ±10%.
struct SinglePathParams {
    DcnConfig config;
    int in_channels = 6;
    EncoderPath enc;
    DecoderPath decoder;

    std::vector<std::pair<std::string, Tensor>> named_params() const;
    std::vector<Tensor> tensors() const;
};

SinglePathParams single_path_init(const DcnConfig& config, uint64_t seed, int in_channels = 6);
long long single_path_param_count(const DcnConfig& config, int in_channels = 6);
// Widens base channels until the single-path budget best matches the dual-path one.
DcnConfig single_path_matched_config(const DcnConfig& full_config);

Tensor single_path_forward(const SinglePathParams& params, const Tensor& input);

// Depth scaling: valid depths map to d/max_depth in (0,1], missing stays 0.
Tensor normalize_depth(const DepthImage& d, double max_depth);
// Inverts normalize_depth; negative predictions clamp to 0.
DepthImage denormalize_depth(const Tensor& t, double max_depth);
Tensor rgb_to_tensor(const Image3& rgb);

}  // namespace depthfill
