#pragma once

#include "fogkit/autodiff/attention.hpp"
#include "fogkit/image/frame.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fogkit::net {

using ad::Index;

struct TcvdConfig {
    Index input_size = 224;
    std::vector<Index> encoder_filters{32, 64, 128, 256};
    Index tpformer_stages = 3;
    Index heads = 4;
    Index triplet_len = 3;
    double loss_a = 1.0;
    double loss_b = 1.0;

    /// Full-size configuration: 224 px input, filters 32/64/128/256.
    static TcvdConfig paper();
    /// Reduced configuration used by tests: 64 px, filters 8/16/32/64, 2 heads.
    static TcvdConfig desk();

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
    /// key=value lines, one per field.
    std::string echo() const;
    static TcvdConfig parse_echo(std::string_view text);

    Index levels() const { return static_cast<Index>(encoder_filters.size()); }
    bool operator==(const TcvdConfig&) const = default;
};

/// Learnable parameters of the network, addressed by name.
class TcvdModel {
public:
    explicit TcvdModel(TcvdConfig config, std::uint64_t seed = 0);

    const TcvdConfig& config() const { return config_; }
    std::map<std::string, ad::Tensor>& parameters() { return params_; }
    const std::map<std::string, ad::Tensor>& parameters() const { return params_; }
    ad::Tensor& parameter(const std::string& name);
    /// Total number of scalar parameters.
    Index parameter_count() const;

private:
    TcvdConfig config_;
    std::map<std::string, ad::Tensor> params_;
};

using Params = std::map<std::string, ad::Var>;

/// Leaves for every parameter; backward fills the tensors' gradients.
Params watch_parameters(ad::Tape& tape, TcvdModel& model);
/// Constant copies of every parameter for inference.
Params constant_parameters(ad::Tape& tape, const TcvdModel& model);

struct TpFormerOutput {
    ad::Var mixed;      ///< transformer block output, [3B, H, W, C]
    ad::Var fused;      ///< merged with the spatial features, [3B, H, W, C]
    ad::Var attention;  ///< [B*H*W, heads, 3, 3]
};

/// Temporal transformer over the three frames at each spatial location.
/// `features` is [3B, H, W, C] with the frames of each triplet adjacent.
TpFormerOutput tpformer_block(const Params& params, Index stage, Index heads, ad::Var features);

struct Encoded {
    std::vector<ad::Var> spatial;    ///< per stage CNN output, [3B, h, w, C]
    std::vector<TpFormerOutput> temporal;  ///< stages 0 .. tpformer_stages-1
    ad::Var center_input;            ///< [B, S, S, 3]
};

/// `frames` is [3B, S, S, 3]: (prev, center, next) of each triplet in order.
Encoded encode(const Params& params, const TcvdConfig& config, ad::Var frames);
/// Restored center frames, [B, S, S, 3] in (0, 1).
ad::Var decode(const Params& params, const TcvdConfig& config, const Encoded& encoded);
ad::Var forward(const Params& params, const TcvdConfig& config, ad::Var frames);

/// Stacks frames into an [N, H, W, 3] tensor.
ad::Tensor stack_frames(std::span<const Frame* const> frames);
/// Frame `n` of an [N, H, W, 3] value.
Frame unstack_frame(const ad::Vector& value, const ad::Shape& shape, Index n);

/// Differentiable SSIM of two [B, H, W, 3] tensors, equal to the metrics
/// module's SSIM averaged over the batch.
ad::Var ssim(ad::Var pred, ad::Var target);
/// a (1 - SSIM) + b mean|pred - target|.
ad::Var tcvd_loss(ad::Var pred, ad::Var target, double a, double b);

}  // namespace fogkit::net
