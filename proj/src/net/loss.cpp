#include "fogkit/errors.hpp"
#include "fogkit/metrics/metrics.hpp"
#include "fogkit/net/tcvd.hpp"

namespace fogkit::net {
namespace {

using ad::Var;

// [B, H, W, 3] -> [3B, H, W, 1], one plane per channel.
Var planes(Var x) {
    const ad::Shape& s = x.shape();
    return ad::reshape(ad::permute(x, {0, 3, 1, 2}), {s[0] * s[3], s[1], s[2], 1});
}

}  // namespace

Var ssim(Var pred, Var target) {
    const ad::Shape& s = pred.shape();
    if (s != target.shape()) throw ShapeError("ssim: shapes " + ad::to_string(s) + " and " + ad::to_string(target.shape()) + " differ");
    if (s.size() != 4 || s[3] != 3) throw ShapeError("ssim: expected [B, H, W, 3], got " + ad::to_string(s));
    const Index k = ssim_window_size(s[1], s[2]);
    const Eigen::ArrayXd taps = gaussian_taps(k);
    ad::Vector window(k * k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) window[i * k + j] = taps[i] * taps[j];
    ad::Tape& tape = pred.tape();
    const Var kernel = tape.constant({k, k, 1, 1}, std::move(window));
    auto blur = [&](Var v) { return ad::conv2d(v, kernel, 1, ad::Padding::valid); };

    const Var x = planes(pred), y = planes(target);
    const Var mx = blur(x), my = blur(y);
    const Var mxx = ad::mul(mx, mx), myy = ad::mul(my, my), mxy = ad::mul(mx, my);
    const Var sxx = ad::sub(blur(ad::mul(x, x)), mxx);
    const Var syy = ad::sub(blur(ad::mul(y, y)), myy);
    const Var sxy = ad::sub(blur(ad::mul(x, y)), mxy);
    const Var num = ad::mul(ad::add_scalar(ad::scale(mxy, 2.0), kSsimC1), ad::add_scalar(ad::scale(sxy, 2.0), kSsimC2));
    const Var den = ad::mul(ad::add_scalar(ad::add(mxx, myy), kSsimC1), ad::add_scalar(ad::add(sxx, syy), kSsimC2));
    return ad::mean(ad::div(num, den));
}

Var tcvd_loss(Var pred, Var target, double a, double b) {
    if (!(a >= 0.0 && b >= 0.0)) throw ContractError("tcvd_loss: coefficients must be >= 0");
    if (pred.shape() != target.shape())
        throw ShapeError("tcvd_loss: shapes " + ad::to_string(pred.shape()) + " and " + ad::to_string(target.shape()) +
                         " differ");
    const Var structural = ad::add_scalar(ad::scale(ssim(pred, target), -1.0), 1.0);
    const Var l1 = ad::mean(ad::abs(ad::sub(pred, target)));
    return ad::add(ad::scale(structural, a), ad::scale(l1, b));
}

}  // namespace fogkit::net
