#include "depthfill/dcn.hpp"

#include <cmath>

#include "depthfill/rng.hpp"

namespace depthfill {

namespace {

// One conv declaration; init and parameter counting share this plan so the
// two can never drift apart.
struct ConvPlan {
    std::string name;
    int out_ch, in_ch, k, stride;
};

void plan_encoder(std::vector<ConvPlan>& plan, const std::string& prefix, int in_ch,
                  const DcnConfig& cfg) {
    int prev = in_ch;
    for (int s = 0; s < DcnConfig::stages; ++s) {
        const int ch = cfg.channels_at(s);
        for (int b = 0; b < cfg.blocks_per_stage; ++b) {
            const std::string base = prefix + ".s" + std::to_string(s) + "b" + std::to_string(b);
            const int stride = b == 0 ? 2 : 1;
            const int bin = b == 0 ? prev : ch;
            plan.push_back({base + ".c1", ch, bin, 3, stride});
            plan.push_back({base + ".c2", ch, ch, 3, 1});
            if (bin != ch || stride != 1) plan.push_back({base + ".proj", ch, bin, 1, stride});
        }
        prev = ch;
    }
}

void plan_decoder(std::vector<ConvPlan>& plan, const std::string& prefix, const DcnConfig& cfg,
                  bool dual) {
    const int c3 = cfg.channels_at(DcnConfig::stages - 1);
    plan.push_back({prefix + ".bottleneck", c3, dual ? 2 * c3 : c3, 1, 1});
    for (int s = DcnConfig::stages - 2; s >= 0; --s) {
        const int ch = cfg.channels_at(s);
        const int from = cfg.channels_at(s + 1);
        plan.push_back({prefix + ".up" + std::to_string(s), ch, from, 3, 1});
        plan.push_back({prefix + ".fuse" + std::to_string(s), ch, 2 * ch, 1, 1});
    }
    plan.push_back({prefix + ".head_up", cfg.base_channels, cfg.base_channels, 3, 1});
    plan.push_back({prefix + ".head_out", 1, cfg.base_channels, 3, 1});
}

long long plan_param_count(const std::vector<ConvPlan>& plan) {
    long long n = 0;
    for (const ConvPlan& c : plan)
        n += static_cast<long long>(c.out_ch) * c.in_ch * c.k * c.k + c.out_ch;
    return n;
}

ConvLayer realize(const ConvPlan& c, Rng& rng) {
    ConvLayer l;
    const int fan_in = c.in_ch * c.k * c.k;
    l.w = Tensor::uniform_he({c.out_ch, c.in_ch, c.k, c.k}, fan_in, rng, true);
    l.b = Tensor::zeros({c.out_ch}, true);
    l.stride = c.stride;
    return l;
}

// Consumes plan entries in the order plan_encoder / plan_decoder produced.
struct PlanCursor {
    const std::vector<ConvPlan>& plan;
    size_t i = 0;
    Rng& rng;
    ConvLayer next() { return realize(plan.at(i++), rng); }
    bool next_is(const std::string& suffix) const {
        return i < plan.size() && plan[i].name.size() >= suffix.size() &&
               plan[i].name.compare(plan[i].name.size() - suffix.size(), suffix.size(), suffix) ==
                   0;
    }
};

EncoderPath build_encoder(PlanCursor& cur, const DcnConfig& cfg) {
    EncoderPath enc;
    enc.stages.resize(DcnConfig::stages);
    for (int s = 0; s < DcnConfig::stages; ++s)
        for (int b = 0; b < cfg.blocks_per_stage; ++b) {
            ResidualBlock blk;
            blk.conv1 = cur.next();
            blk.conv2 = cur.next();
            if (cur.next_is(".proj")) blk.proj = cur.next();
            enc.stages[s].push_back(std::move(blk));
        }
    return enc;
}

DecoderPath build_decoder(PlanCursor& cur) {
    DecoderPath dec;
    dec.bottleneck = cur.next();
    for (int s = DcnConfig::stages - 2; s >= 0; --s) {
        DecoderPath::Up up;
        up.up = cur.next();
        up.fuse = cur.next();
        dec.ups.push_back(std::move(up));
    }
    dec.head_up = cur.next();
    dec.head_out = cur.next();
    return dec;
}

Tensor apply_conv(const ConvLayer& l, const Tensor& x) {
    return add_channel_bias(conv2d(x, l.w, l.stride), l.b);
}

Tensor apply_block(const ResidualBlock& b, const Tensor& x) {
    Tensor y = relu(apply_conv(b.conv1, x));
    y = apply_conv(b.conv2, y);
    Tensor skip = b.proj ? apply_conv(*b.proj, x) : x;
    return relu(add(y, skip));
}

std::vector<Tensor> encode(const EncoderPath& enc, const Tensor& input) {
    std::vector<Tensor> skips;
    Tensor x = input;
    for (const auto& stage : enc.stages) {
        for (const ResidualBlock& b : stage) x = apply_block(b, x);
        skips.push_back(x);
    }
    return skips;
}

// Decoder body shared by the dual-path and single-path nets; `deepest` is the
// bottleneck input, `sum_skips` empty for the all-concat variant.
Tensor decode(const DecoderPath& dec, const Tensor& deepest, const std::vector<Tensor>& sum_skips,
              const std::vector<Tensor>& cat_skips) {
    Tensor d = relu(apply_conv(dec.bottleneck, deepest));
    for (size_t i = 0; i < dec.ups.size(); ++i) {
        const int stage = DcnConfig::stages - 2 - static_cast<int>(i);
        d = relu(apply_conv(dec.ups[i].up, upsample_nearest2x(d)));
        if (!sum_skips.empty()) d = add(d, sum_skips[stage]);
        d = concat({d, cat_skips[stage]}, 0);
        d = relu(apply_conv(dec.ups[i].fuse, d));
    }
    d = relu(apply_conv(dec.head_up, upsample_nearest2x(d)));
    return apply_conv(dec.head_out, d);  // linear output
}

void check_input(const Tensor& t, int channels, const char* what) {
    const auto& s = t.shape();
    if (s.size() != 3 || s[0] != channels)
        throw DimensionError(std::string(what) + " must be " + std::to_string(channels) +
                             "×H×W, got " + shape_str(s));
    if (s[1] % 16 != 0 || s[2] % 16 != 0)
        throw DimensionError(std::string(what) + " extents must be divisible by 16, got " +
                             shape_str(s));
}

std::vector<ConvPlan> dual_plan(const DcnConfig& cfg, int in_left, int in_right) {
    std::vector<ConvPlan> plan;
    plan_encoder(plan, "dcn.left", in_left, cfg);
    plan_encoder(plan, "dcn.right", in_right, cfg);
    plan_decoder(plan, "dcn.dec", cfg, true);
    return plan;
}

std::vector<ConvPlan> single_plan(const DcnConfig& cfg, int in_channels) {
    std::vector<ConvPlan> plan;
    plan_encoder(plan, "sp.enc", in_channels, cfg);
    plan_decoder(plan, "sp.dec", cfg, false);
    return plan;
}

void collect(const std::vector<ConvPlan>& plan, const std::vector<const ConvLayer*>& layers,
             std::vector<std::pair<std::string, Tensor>>& out) {
    for (size_t i = 0; i < plan.size(); ++i) {
        out.emplace_back(plan[i].name + ".w", layers[i]->w);
        out.emplace_back(plan[i].name + ".b", layers[i]->b);
    }
}

void layer_ptrs(const EncoderPath& enc, std::vector<const ConvLayer*>& out) {
    for (const auto& stage : enc.stages)
        for (const ResidualBlock& b : stage) {
            out.push_back(&b.conv1);
            out.push_back(&b.conv2);
            if (b.proj) out.push_back(&*b.proj);
        }
}

void layer_ptrs(const DecoderPath& dec, std::vector<const ConvLayer*>& out) {
    out.push_back(&dec.bottleneck);
    for (const auto& up : dec.ups) {
        out.push_back(&up.up);
        out.push_back(&up.fuse);
    }
    out.push_back(&dec.head_up);
    out.push_back(&dec.head_out);
}

}  // namespace

void DcnConfig::validate() const {
    if (base_channels < 1) throw DimensionError("base_channels must be >= 1");
    if (blocks_per_stage < 1) throw DimensionError("blocks_per_stage must be >= 1");
}

std::vector<std::pair<std::string, Tensor>> DcnParams::named_params() const {
    std::vector<const ConvLayer*> layers;
    layer_ptrs(left, layers);
    layer_ptrs(right, layers);
    layer_ptrs(decoder, layers);
    std::vector<std::pair<std::string, Tensor>> out;
    collect(dual_plan(config, in_left, in_right), layers, out);
    return out;
}

std::vector<Tensor> DcnParams::tensors() const {
    std::vector<Tensor> out;
    for (auto& [name, t] : named_params()) out.push_back(t);
    return out;
}

DcnParams dcn_init(const DcnConfig& config, uint64_t seed, int in_left, int in_right) {
    config.validate();
    DcnParams p;
    p.config = config;
    p.in_left = in_left;
    p.in_right = in_right;
    Rng rng(derive_seed(seed, 0xdc0de));
    const auto plan = dual_plan(config, in_left, in_right);
    PlanCursor cur{plan, 0, rng};
    p.left = build_encoder(cur, config);
    p.right = build_encoder(cur, config);
    p.decoder = build_decoder(cur);
    return p;
}

long long dcn_param_count(const DcnConfig& config, int in_left, int in_right) {
    config.validate();
    return plan_param_count(dual_plan(config, in_left, in_right));
}

Tensor dcn_forward(const DcnParams& params, const Tensor& dual_depth, const Tensor& rgbd) {
    check_input(dual_depth, params.in_left, "dual-depth input");
    check_input(rgbd, params.in_right, "RGB-D input");
    if (dual_depth.shape()[1] != rgbd.shape()[1] || dual_depth.shape()[2] != rgbd.shape()[2])
        throw DimensionError("pathway inputs disagree: " + shape_str(dual_depth.shape()) +
                             " vs " + shape_str(rgbd.shape()));
    const auto l_skips = encode(params.left, dual_depth);
    const auto r_skips = encode(params.right, rgbd);
    const Tensor deepest = concat({l_skips.back(), r_skips.back()}, 0);
    return decode(params.decoder, deepest, l_skips, r_skips);
}

std::vector<std::pair<std::string, Tensor>> SinglePathParams::named_params() const {
    std::vector<const ConvLayer*> layers;
    layer_ptrs(enc, layers);
    layer_ptrs(decoder, layers);
    std::vector<std::pair<std::string, Tensor>> out;
    collect(single_plan(config, in_channels), layers, out);
    return out;
}

std::vector<Tensor> SinglePathParams::tensors() const {
    std::vector<Tensor> out;
    for (auto& [name, t] : named_params()) out.push_back(t);
    return out;
}

SinglePathParams single_path_init(const DcnConfig& config, uint64_t seed, int in_channels) {
    config.validate();
    SinglePathParams p;
    p.config = config;
    p.in_channels = in_channels;
    Rng rng(derive_seed(seed, 0x51e9a));
    const auto plan = single_plan(config, in_channels);
    PlanCursor cur{plan, 0, rng};
    p.enc = build_encoder(cur, config);
    p.decoder = build_decoder(cur);
    return p;
}

long long single_path_param_count(const DcnConfig& config, int in_channels) {
    config.validate();
    return plan_param_count(single_plan(config, in_channels));
}

DcnConfig single_path_matched_config(const DcnConfig& full_config) {
    const long long target = dcn_param_count(full_config);
    DcnConfig best = full_config;
    long long best_diff = -1;
    for (int base = full_config.base_channels; base <= 4 * full_config.base_channels; ++base) {
        DcnConfig c = full_config;
        c.base_channels = base;
        const long long diff = std::llabs(single_path_param_count(c) - target);
        if (best_diff < 0 || diff < best_diff) {
            best_diff = diff;
            best = c;
        }
    }
    return best;
}

Tensor single_path_forward(const SinglePathParams& params, const Tensor& input) {
    check_input(input, params.in_channels, "single-path input");
    const auto skips = encode(params.enc, input);
    return decode(params.decoder, skips.back(), {}, skips);
}

Tensor normalize_depth(const DepthImage& d, double max_depth) {
    if (max_depth <= 0.0) throw DimensionError("max_depth must be positive");
    std::vector<double> data(d.values.size());
    for (size_t i = 0; i < data.size(); ++i)
        data[i] = d.values[i] > 0.0 ? d.values[i] / max_depth : 0.0;
    return Tensor::from_data({1, d.height, d.width}, std::move(data), false);
}

DepthImage denormalize_depth(const Tensor& t, double max_depth) {
    const auto& s = t.shape();
    if (s.size() != 3 || s[0] != 1)
        throw DimensionError("denormalize_depth expects 1×H×W, got " + shape_str(s));
    DepthImage d(s[2], s[1]);
    for (size_t i = 0; i < d.values.size(); ++i) {
        const double v = t.data()[i] * max_depth;
        d.values[i] = v > 0.0 ? v : 0.0;
    }
    return d;
}

Tensor rgb_to_tensor(const Image3& rgb) {
    return Tensor::from_data({3, rgb.height, rgb.width}, rgb.data, false);
}

}  // namespace depthfill
