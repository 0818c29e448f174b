#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "awnet/model/attention.hpp"
#include "awnet/model/resblock.hpp"

namespace awnet {

// Head probabilities are nudged off exact 0/1 so the open-interval output
// contract survives finite precision (the loss applies the same clamp).
template <typename T>
constexpr T probability_epsilon();
template <>
constexpr float probability_epsilon<float>() {
    return 1e-7f;
}
template <>
constexpr double probability_epsilon<double>() {
    return 1e-15;
}

// Two chained U-shaped branches over `levels` resolution scales. Residual
// blocks sit at every level; attention gates sit only on the skip joins of the
// two decoder phases. The second branch additionally receives the first
// branch's per-level decoder outputs as lateral additions on its way down.
// Output head is a 1x1 convolution to a single sigmoid probability channel.
template <typename T>
class AttentionWNet {
public:
    explicit AttentionWNet(const ModelConfig& cfg, std::uint64_t seed = 0) : cfg_(cfg), L_(cfg.levels - 1) {
        cfg_.validate();
        ch_.resize(L_ + 1);
        for (int i = 0; i <= L_; ++i) ch_[i] = cfg_.base_channels << i;

        in_conv_ = Conv2d<T>(cfg_.in_channels, ch_[0], cfg_.kernel, 1, cfg_.kernel / 2, true);
        in_block2_ = make_block(ch_[0]);
        bottom1_ = make_block(ch_[L_]);
        bottom2_ = make_block(ch_[L_]);
        for (int i = 0; i < L_; ++i) {
            d1_blocks_.push_back(make_block(ch_[i]));
            d2_blocks_.push_back(make_block(ch_[i]));
            d1_convs_.emplace_back(ch_[i], ch_[i + 1], cfg_.kernel, 2, cfg_.kernel / 2, true);
            d2_convs_.emplace_back(ch_[i], ch_[i + 1], cfg_.kernel, 2, cfg_.kernel / 2, true);
        }
        for (int j = 0; j < L_; ++j) {
            const int k = L_ - 1 - j;  // level the step lands on
            u1_tconvs_.emplace_back(ch_[k + 1], ch_[k], cfg_.kernel, 2, cfg_.kernel / 2, 1, true);
            u2_tconvs_.emplace_back(ch_[k + 1], ch_[k], cfg_.kernel, 2, cfg_.kernel / 2, 1, true);
            u1_blocks_.push_back(make_block(ch_[k]));
            u2_blocks_.push_back(make_block(ch_[k]));
            if (cfg_.attention != AttentionType::None) {
                u1_gates_.emplace_back(ch_[k], cfg_.attention);
                u2_gates_.emplace_back(ch_[k], cfg_.attention);
            }
        }
        head_ = Conv2d<T>(ch_[0], 1, 1, 1, 0, true);
        init_params(seed);
        index_params();
    }

    const ModelConfig& config() const { return cfg_; }

    // Probability maps in (0,1), same spatial size as the input.
    // `rng` is required only when training with dropout_rate > 0.
    Tensor<T> forward(const Tensor<T>& x, bool training = false, Rng* rng = nullptr) {
        const int div = cfg_.spatial_divisor();
        if (x.h() % div != 0 || x.w() % div != 0)
            throw InputError("input spatial size " + std::to_string(x.h()) + "x" + std::to_string(x.w()) +
                             " must be divisible by " + std::to_string(div));
        if (x.c() != cfg_.in_channels) throw InputError("input channel count mismatch");

        tr_ = Trace{};
        tr_.x_in = x;
        tr_.t0 = relu(in_conv_.forward(x));
        tr_.skip1.resize(L_);
        tr_.down1_act.resize(L_);
        tr_.skip2.resize(L_);
        tr_.down2_act.resize(L_);
        tr_.u1_feats.resize(L_ + 1);
        tr_.u2_feats.resize(L_ + 1);
        tr_.u2_lat.resize(L_);

        Tensor<T> cur = tr_.t0;
        for (int i = 0; i < L_; ++i) {
            tr_.skip1[i] = d1_blocks_[i].forward(cur, training, rng);
            tr_.down1_act[i] = relu(d1_convs_[i].forward(tr_.skip1[i]));
            cur = tr_.down1_act[i];
        }
        cur = bottom1_.forward(cur, training, rng);
        tr_.u1_feats[L_] = cur;
        for (int j = 0; j < L_; ++j) {
            const int k = L_ - 1 - j;
            Tensor<T> up = u1_tconvs_[j].forward(cur);
            Tensor<T> merged = merge_skip(u1_gates_, j, tr_.skip1[k], up);
            cur = u1_blocks_[j].forward(merged, training, rng);
            tr_.u1_feats[k] = cur;
        }

        cur = in_block2_.forward(tr_.u1_feats[0], training, rng);
        for (int i = 0; i < L_; ++i) {
            tr_.u2_lat[i] = cur + tr_.u1_feats[i];
            tr_.skip2[i] = d2_blocks_[i].forward(tr_.u2_lat[i], training, rng);
            tr_.down2_act[i] = relu(d2_convs_[i].forward(tr_.skip2[i]));
            cur = tr_.down2_act[i];
        }
        cur = bottom2_.forward(cur, training, rng);
        tr_.u2_feats[L_] = cur;
        for (int j = 0; j < L_; ++j) {
            const int k = L_ - 1 - j;
            Tensor<T> up = u2_tconvs_[j].forward(cur);
            Tensor<T> merged = merge_skip(u2_gates_, j, tr_.skip2[k], up);
            cur = u2_blocks_[j].forward(merged, training, rng);
            tr_.u2_feats[k] = cur;
        }
        tr_.prob = sigmoid(head_.forward(tr_.u2_feats[0]));
        constexpr T eps = probability_epsilon<T>();
        for (std::size_t i = 0; i < tr_.prob.size(); ++i)
            tr_.prob.data()[i] = std::min(std::max(tr_.prob.data()[i], eps), T(1) - eps);
        return tr_.prob;
    }

    // Gradient w.r.t. the input of the last forward() call; parameter
    // gradients accumulate into each Param's grad tensor.
    Tensor<T> backward(const Tensor<T>& gprob) {
        Tensor<T> glogits = sigmoid_backward(gprob, tr_.prob);
        Tensor<T> gchain = head_.backward(glogits, tr_.u2_feats[0]);

        std::vector<Tensor<T>> gskip2(L_);
        for (int j = L_ - 1; j >= 0; --j) {
            const int k = L_ - 1 - j;
            Tensor<T> gmerged = u2_blocks_[j].backward(gchain);
            auto [gs, gup] = split_skip(u2_gates_, j, gmerged);
            add_into(gskip2[k], gs);
            gchain = u2_tconvs_[j].backward(gup, tr_.u2_feats[k + 1]);
        }
        gchain = bottom2_.backward(gchain);

        std::vector<Tensor<T>> gfeat1(L_ + 1);
        for (int i = L_ - 1; i >= 0; --i) {
            Tensor<T> ga = relu_backward(gchain, tr_.down2_act[i]);
            add_into(gskip2[i], d2_convs_[i].backward(ga, tr_.skip2[i]));
            Tensor<T> glat = d2_blocks_[i].backward(gskip2[i]);
            add_into(gfeat1[i], glat);  // lateral branch
            gchain = glat;              // running branch
        }
        add_into(gfeat1[0], in_block2_.backward(gchain));

        std::vector<Tensor<T>> gskip1(L_);
        gchain = gfeat1[0];
        for (int j = L_ - 1; j >= 0; --j) {
            const int k = L_ - 1 - j;
            Tensor<T> gmerged = u1_blocks_[j].backward(gchain);
            auto [gs, gup] = split_skip(u1_gates_, j, gmerged);
            add_into(gskip1[k], gs);
            gchain = u1_tconvs_[j].backward(gup, tr_.u1_feats[k + 1]);
            if (!gfeat1[k + 1].empty()) gchain += gfeat1[k + 1];
        }
        gchain = bottom1_.backward(gchain);
        for (int i = L_ - 1; i >= 0; --i) {
            Tensor<T> ga = relu_backward(gchain, tr_.down1_act[i]);
            add_into(gskip1[i], d1_convs_[i].backward(ga, tr_.skip1[i]));
            gchain = d1_blocks_[i].backward(gskip1[i]);
        }
        Tensor<T> gt0 = relu_backward(gchain, tr_.t0);
        return in_conv_.backward(gt0, tr_.x_in);
    }

    ParamList<T>& params() { return params_; }
    StateList<T>& state() { return state_; }

    std::int64_t parameter_count() const {
        std::int64_t total = 0;
        for (const auto& p : params_) total += static_cast<std::int64_t>(p.param->size());
        return total;
    }

    void zero_grad() {
        for (auto& p : params_) p.param->zero_grad();
    }

    // Attention map of one decoder gate (branch 0/1, step j); empty when the
    // configuration has no gates. Valid after a forward pass.
    const Tensor<T>& attention_map(int branch, int j) const {
        return branch == 0 ? u1_gates_.at(j).attention_map() : u2_gates_.at(j).attention_map();
    }

private:
    ResBlock<T> make_block(int c) const { return ResBlock<T>(c, cfg_.kernel, cfg_.dropout_rate, cfg_.resblock); }

    Tensor<T> merge_skip(std::vector<AttentionGate<T>>& gates, int j, const Tensor<T>& g, const Tensor<T>& x) {
        if (cfg_.attention == AttentionType::None) {
            if (!g.same_shape(x)) throw ConfigError("skip join: feature shapes differ");
            return g + x;
        }
        return gates[j].forward(g, x);
    }

    std::pair<Tensor<T>, Tensor<T>> split_skip(std::vector<AttentionGate<T>>& gates, int j, const Tensor<T>& gy) {
        if (cfg_.attention == AttentionType::None) return {gy, gy};
        return gates[j].backward(gy);
    }

    static void add_into(Tensor<T>& acc, const Tensor<T>& g) {
        if (acc.empty())
            acc = g;
        else
            acc += g;
    }

    void init_params(std::uint64_t seed) {
        Rng rng(mix_seed(seed, 0x57ee7));
        in_conv_.init(rng);
        for (auto& b : d1_blocks_) b.init(rng);
        for (auto& c : d1_convs_) c.init(rng);
        bottom1_.init(rng);
        for (auto& t : u1_tconvs_) t.init(rng);
        for (auto& g : u1_gates_) g.init(rng);
        for (auto& b : u1_blocks_) b.init(rng);
        in_block2_.init(rng);
        for (auto& b : d2_blocks_) b.init(rng);
        for (auto& c : d2_convs_) c.init(rng);
        bottom2_.init(rng);
        for (auto& t : u2_tconvs_) t.init(rng);
        for (auto& g : u2_gates_) g.init(rng);
        for (auto& b : u2_blocks_) b.init(rng);
        head_.init(rng);
    }

    void index_params() {
        params_.clear();
        state_.clear();
        in_conv_.collect("u1.in_conv", params_);
        for (int i = 0; i < L_; ++i) {
            const std::string lv = "u1.level" + std::to_string(i);
            d1_blocks_[i].collect(lv + ".block", params_, state_);
            d1_convs_[i].collect(lv + ".down", params_);
        }
        bottom1_.collect("u1.bottom", params_, state_);
        for (int j = 0; j < L_; ++j) {
            const std::string up = "u1.up" + std::to_string(j);
            u1_tconvs_[j].collect(up + ".tconv", params_);
            if (cfg_.attention != AttentionType::None) u1_gates_[j].collect(up + ".gate", params_);
            u1_blocks_[j].collect(up + ".block", params_, state_);
        }
        in_block2_.collect("u2.in_block", params_, state_);
        for (int i = 0; i < L_; ++i) {
            const std::string lv = "u2.level" + std::to_string(i);
            d2_blocks_[i].collect(lv + ".block", params_, state_);
            d2_convs_[i].collect(lv + ".down", params_);
        }
        bottom2_.collect("u2.bottom", params_, state_);
        for (int j = 0; j < L_; ++j) {
            const std::string up = "u2.up" + std::to_string(j);
            u2_tconvs_[j].collect(up + ".tconv", params_);
            if (cfg_.attention != AttentionType::None) u2_gates_[j].collect(up + ".gate", params_);
            u2_blocks_[j].collect(up + ".block", params_, state_);
        }
        head_.collect("head", params_);
    }

    struct Trace {
        Tensor<T> x_in, t0, prob;
        std::vector<Tensor<T>> skip1, down1_act, skip2, down2_act;
        std::vector<Tensor<T>> u1_feats, u2_feats, u2_lat;
    };

    ModelConfig cfg_;
    int L_ = 0;
    std::vector<int> ch_;

    Conv2d<T> in_conv_;
    std::vector<ResBlock<T>> d1_blocks_, d2_blocks_;
    std::vector<Conv2d<T>> d1_convs_, d2_convs_;
    ResBlock<T> bottom1_, bottom2_, in_block2_;
    std::vector<ConvTranspose2d<T>> u1_tconvs_, u2_tconvs_;
    std::vector<AttentionGate<T>> u1_gates_, u2_gates_;
    std::vector<ResBlock<T>> u1_blocks_, u2_blocks_;
    Conv2d<T> head_;

    ParamList<T> params_;
    StateList<T> state_;
    Trace tr_;
};

// Total learnable scalars for a configuration (shared kernels counted once).
std::int64_t count_parameters(const ModelConfig& cfg);

}  // namespace awnet
