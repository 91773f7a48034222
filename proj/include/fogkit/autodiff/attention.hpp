#pragma once

#include "fogkit/autodiff/ops.hpp"

namespace fogkit::ad {

/// Projection parameters of one attention layer; all matrices are [D, D]
/// applied as x * W, all biases [D].
struct AttentionWeights {
    Var w_query, b_query;
    Var w_key, b_key;
    Var w_value, b_value;
    Var w_out, b_out;
};

struct AttentionResult {
    Var output;   ///< same shape as the query
    Var weights;  ///< [B, heads, T, T] softmax rows, B = flattened leading dims
};

/// Scaled dot-product attention run over `heads` parallel subspaces of the
/// model dimension. Inputs are [..., T, D]; leading axes are independent
/// sequences. Throws ConfigError unless D is divisible by `heads`.
AttentionResult multi_head_attention(Var query, Var key, Var value, Index heads, const AttentionWeights& weights);

}  // namespace fogkit::ad
