#include "fogkit/errors.hpp"
#include "fogkit/net/tcvd.hpp"

#include <array>
#include <cmath>
#include <random>

namespace fogkit::net {
namespace {

using ad::Shape;
using ad::Tensor;
using ad::Var;

std::string stage_name(const char* prefix, Index s) { return prefix + std::to_string(s); }

Index filters_at(const TcvdConfig& c, Index i) { return c.encoder_filters[static_cast<std::size_t>(i)]; }

// Output channels of decoder level l (level 0 is full resolution).
Index decoder_width(const TcvdConfig& c, Index l) { return filters_at(c, std::max<Index>(l - 1, 0)); }
Index skip_width(const TcvdConfig& c, Index l) { return l == 0 ? 3 : filters_at(c, l - 1); }

class Initializer {
public:
    Initializer(std::map<std::string, Tensor>& out, std::uint64_t seed) : out_(out), rng_(seed) {}

    void uniform(const std::string& name, Shape shape, double limit) {
        Tensor t(std::move(shape), true);
        for (Index i = 0; i < t.size(); ++i) t.data()[i] = limit * (2.0 * unit() - 1.0);
        out_[name] = std::move(t);
    }
    void constant(const std::string& name, Index n, double value) {
        out_[name] = Tensor({n}, ad::Vector::Constant(n, value), true);
    }
    // He-uniform kernel plus zero bias.
    void conv(const std::string& name, Index k, Index cin, Index cout) {
        uniform(name + ".w", {k, k, cin, cout}, std::sqrt(6.0 / double(k * k * cin)));
        constant(name + ".b", cout, 0.0);
    }
    void up(const std::string& name, Index cin, Index cout) {
        uniform(name + ".w", {3, 3, cout, cin}, std::sqrt(6.0 / double(9 * cin)));
        constant(name + ".b", cout, 0.0);
    }
    // Xavier-uniform matrix plus zero bias.
    void dense(const std::string& name, Index in, Index out, bool bias = true) {
        uniform(name + ".w", {in, out}, std::sqrt(6.0 / double(in + out)));
        if (bias) constant(name + ".b", out, 0.0);
    }

private:
    double unit() { return double(rng_() >> 11) * 0x1.0p-53; }

    std::map<std::string, Tensor>& out_;
    std::mt19937_64 rng_;
};

const Var& get(const Params& p, const std::string& name) {
    auto it = p.find(name);
    if (it == p.end()) throw ContractError("tcvd: missing parameter " + name);
    return it->second;
}

Var conv(const Params& p, const std::string& name, Var x, Index stride = 1) {
    return ad::relu(ad::add(ad::conv2d(x, get(p, name + ".w"), stride, ad::Padding::same), get(p, name + ".b")));
}

Var linear(const Params& p, const std::string& name, Var x) {
    return ad::add(ad::matmul(x, get(p, name + ".w")), get(p, name + ".b"));
}

}  // namespace

TcvdModel::TcvdModel(TcvdConfig config, std::uint64_t seed) : config_(std::move(config)) {
    config_.validate();
    Initializer init(params_, seed);
    const Index levels = config_.levels();
    for (Index s = 0; s < levels; ++s) {
        const Index cin = s == 0 ? 3 : filters_at(config_, s - 1), c = filters_at(config_, s);
        const std::string e = stage_name("enc", s);
        init.conv(e + ".conv1", 3, cin, c);
        init.conv(e + ".conv2", 3, c, c);
        init.conv(e + ".down", 3, c, c);
    }
    for (Index s = 0; s < config_.tpformer_stages; ++s) {
        const Index c = filters_at(config_, s);
        const std::string t = stage_name("tp", s);
        init.constant(t + ".ln1.gamma", c, 1.0);
        init.constant(t + ".ln1.beta", c, 0.0);
        init.dense(t + ".attn.query", c, c);
        // The key bias would only shift every score of a row by the same
        // amount, which softmax ignores.
        init.dense(t + ".attn.key", c, c, false);
        init.dense(t + ".attn.value", c, c);
        init.dense(t + ".attn.out", c, c);
        init.constant(t + ".ln2.gamma", c, 1.0);
        init.constant(t + ".ln2.beta", c, 0.0);
        init.dense(t + ".mlp1", c, 2 * c);
        init.dense(t + ".mlp2", 2 * c, c);
        init.conv(t + ".fuse", 1, 2 * c, c);
    }
    for (Index l = levels - 1; l >= 0; --l) {
        const Index cin = l == levels - 1 ? filters_at(config_, levels - 1) : decoder_width(config_, l + 1);
        const Index c = decoder_width(config_, l);
        const std::string d = stage_name("dec", l);
        init.up(d + ".up", cin, c);
        init.conv(d + ".conv1", 3, c + skip_width(config_, l), c);
        init.conv(d + ".conv2", 3, c, c);
    }
    init.conv("head", 3, decoder_width(config_, 0), 3);
}

ad::Tensor& TcvdModel::parameter(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ContractError("tcvd: no parameter named " + name);
    return it->second;
}

Index TcvdModel::parameter_count() const {
    Index n = 0;
    for (const auto& [name, t] : params_) n += t.size();
    return n;
}

Params watch_parameters(ad::Tape& tape, TcvdModel& model) {
    Params p;
    for (auto& [name, t] : model.parameters()) p.emplace(name, tape.watch(t));
    return p;
}

Params constant_parameters(ad::Tape& tape, const TcvdModel& model) {
    Params p;
    for (const auto& [name, t] : model.parameters()) p.emplace(name, tape.constant(t));
    return p;
}

TpFormerOutput tpformer_block(const Params& p, Index stage, Index heads, Var features) {
    const Shape& s = features.shape();
    if (s.size() != 4 || s[0] % 3 != 0)
        throw ShapeError("tpformer: features must be [3B, H, W, C], got " + ad::to_string(s));
    const Index b = s[0] / 3, h = s[1], w = s[2], c = s[3];
    if (c % heads != 0)
        throw ConfigError("tpformer: width " + std::to_string(c) + " is not divisible by heads = " + std::to_string(heads));
    const std::string t = stage_name("tp", stage);

    // One token per frame at every spatial location: [B*H*W, 3, C].
    Var tokens = ad::reshape(ad::permute(ad::reshape(features, {b, 3, h, w, c}), {0, 2, 3, 1, 4}), {b * h * w, 3, c});

    Var normed = ad::layer_norm(tokens, -1, get(p, t + ".ln1.gamma"), get(p, t + ".ln1.beta"));
    Var zero_key_bias = tokens.tape().constant(ad::Tensor({c}));
    const ad::AttentionWeights weights{get(p, t + ".attn.query.w"), get(p, t + ".attn.query.b"),
                                       get(p, t + ".attn.key.w"),   zero_key_bias,
                                       get(p, t + ".attn.value.w"), get(p, t + ".attn.value.b"),
                                       get(p, t + ".attn.out.w"),   get(p, t + ".attn.out.b")};
    const ad::AttentionResult attn = ad::multi_head_attention(normed, normed, normed, heads, weights);
    Var x = ad::add(tokens, attn.output);
    Var hidden = ad::relu(linear(p, t + ".mlp1", ad::layer_norm(x, -1, get(p, t + ".ln2.gamma"), get(p, t + ".ln2.beta"))));
    x = ad::add(x, linear(p, t + ".mlp2", hidden));

    Var mixed = ad::reshape(ad::permute(ad::reshape(x, {b, h, w, 3, c}), {0, 3, 1, 2, 4}), {3 * b, h, w, c});
    const std::array<Var, 2> both{mixed, features};
    Var fused = conv(p, t + ".fuse", ad::concat(both, 3));
    return {mixed, fused, attn.weights};
}

Encoded encode(const Params& p, const TcvdConfig& config, Var frames) {
    const Shape& s = frames.shape();
    if (s.size() != 4 || s[0] % 3 != 0 || s[1] != config.input_size || s[2] != config.input_size || s[3] != 3)
        throw ShapeError("tcvd: expected [3B, " + std::to_string(config.input_size) + ", " +
                         std::to_string(config.input_size) + ", 3] frames, got " + ad::to_string(s));
    const Index b = s[0] / 3;
    Encoded out;
    out.center_input = ad::reshape(ad::slice(ad::reshape(frames, {b, 3, s[1], s[2], 3}), 1, 1, 1), {b, s[1], s[2], 3});
    Var x = frames;
    for (Index stage = 0; stage < config.levels(); ++stage) {
        const std::string e = stage_name("enc", stage);
        x = conv(p, e + ".down", conv(p, e + ".conv2", conv(p, e + ".conv1", x)), 2);
        out.spatial.push_back(x);
        if (stage < config.tpformer_stages) {
            out.temporal.push_back(tpformer_block(p, stage, config.heads, x));
            x = out.temporal.back().fused;
        }
    }
    return out;
}

namespace {

// Center frame of each triplet from a [3B, H, W, C] map.
Var center_of(Var x) {
    const Shape& s = x.shape();
    const Index b = s[0] / 3;
    return ad::reshape(ad::slice(ad::reshape(x, {b, 3, s[1], s[2], s[3]}), 1, 1, 1), {b, s[1], s[2], s[3]});
}

}  // namespace

Var decode(const Params& p, const TcvdConfig& config, const Encoded& enc) {
    const Index levels = config.levels();
    if (static_cast<Index>(enc.spatial.size()) != levels || static_cast<Index>(enc.temporal.size()) != config.tpformer_stages)
        throw ShapeError("tcvd decode: encoder pyramid has " + std::to_string(enc.spatial.size()) +
                         " stages, config expects " + std::to_string(levels));
    Var x = center_of(enc.spatial.back());
    for (Index l = levels - 1; l >= 0; --l) {
        const std::string d = stage_name("dec", l);
        x = ad::relu(ad::add(ad::transposed_conv2d(x, get(p, d + ".up.w"), 2), get(p, d + ".up.b")));
        const Var skip = l == 0 ? enc.center_input : center_of(enc.temporal[static_cast<std::size_t>(l - 1)].fused);
        if (skip.shape()[1] != x.shape()[1] || skip.shape()[2] != x.shape()[2])
            throw ShapeError("tcvd decode: skip " + ad::to_string(skip.shape()) + " does not match upsampled " +
                             ad::to_string(x.shape()));
        const std::array<Var, 2> both{x, skip};
        x = conv(p, d + ".conv2", conv(p, d + ".conv1", ad::concat(both, 3)));
    }
    return ad::sigmoid(ad::add(ad::conv2d(x, get(p, "head.w"), 1, ad::Padding::same), get(p, "head.b")));
}

Var forward(const Params& p, const TcvdConfig& config, Var frames) { return decode(p, config, encode(p, config, frames)); }

ad::Tensor stack_frames(std::span<const Frame* const> frames) {
    if (frames.empty()) throw ContractError("stack_frames: no frames");
    const Index h = frames[0]->height(), w = frames[0]->width();
    const auto n = static_cast<Index>(frames.size());
    ad::Vector v(n * h * w * 3);
    for (Index i = 0; i < n; ++i) {
        const Frame& f = *frames[static_cast<std::size_t>(i)];
        if (f.height() != h || f.width() != w) throw ShapeError("stack_frames: frames differ in size");
        for (Index y = 0; y < h; ++y)
            for (Index x = 0; x < w; ++x)
                for (std::size_t c = 0; c < 3; ++c) v[((i * h + y) * w + x) * 3 + Index(c)] = f[c](y, x);
    }
    return ad::Tensor({n, h, w, 3}, std::move(v));
}

Frame unstack_frame(const ad::Vector& value, const ad::Shape& shape, Index n) {
    if (shape.size() != 4 || shape[3] != 3 || n < 0 || n >= shape[0])
        throw ShapeError("unstack_frame: cannot take frame " + std::to_string(n) + " of " + ad::to_string(shape));
    const Index h = shape[1], w = shape[2];
    Frame f(h, w);
    for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x)
            for (std::size_t c = 0; c < 3; ++c) f[c](y, x) = value[((n * h + y) * w + x) * 3 + Index(c)];
    return f;
}

}  // namespace fogkit::net
