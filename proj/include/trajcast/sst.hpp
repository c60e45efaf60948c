#pragma once

#include <memory>
#include <string>
#include <vector>

#include "trajcast/attention.hpp"
#include "trajcast/nn.hpp"

namespace trajcast::sst {

using nn::Parameter;
using nn::Tensor;

struct SstConfig {
  std::size_t grid_size = 40;   // input resolution M
  std::size_t patch_size = 10;  // P
  std::size_t embed_dim = 64;   // C
  std::size_t heads = 4;
  std::vector<std::size_t> depths{2, 2};   // blocks per stage
  std::vector<std::size_t> windows{2, 2};  // window size per stage
  std::size_t mlp_ratio = 4;
  bool use_shift = false;      // shifted-window ablation variant
  bool rel_pos_bias = true;
  int shift_override = -1;     // >= 0 forces the shift amount

  std::size_t token_side() const { return grid_size / patch_size; }
  std::size_t final_dim() const {
    return embed_dim << depths.size();
  }

  void validate() const {
    if (grid_size == 0 || patch_size == 0 || grid_size % patch_size != 0) {
      throw ConfigError("grid size " + std::to_string(grid_size) +
                        " not divisible by patch size " +
                        std::to_string(patch_size));
    }
    if (depths.empty() || depths.size() != windows.size()) {
      throw ConfigError("depths and windows must be non-empty and equal-length");
    }
    if (mlp_ratio == 0) throw ConfigError("mlp_ratio must be positive");
    std::size_t side = token_side();
    std::size_t dim = embed_dim;
    for (std::size_t s = 0; s < depths.size(); ++s) {
      if (depths[s] == 0) throw ConfigError("stage with zero blocks");
      if (windows[s] == 0 || side % windows[s] != 0) {
        throw ConfigError("token side " + std::to_string(side) +
                          " not divisible by window " +
                          std::to_string(windows[s]) + " in stage " +
                          std::to_string(s));
      }
      if (dim % heads != 0) {
        throw ConfigError("stage dim " + std::to_string(dim) +
                          " not divisible by heads " + std::to_string(heads));
      }
      if (side % 2 != 0) {
        throw ConfigError("token side " + std::to_string(side) +
                          " is odd; cannot merge patches after stage " +
                          std::to_string(s));
      }
      side /= 2;
      dim *= 2;
    }
    if (side != 1) {
      throw ConfigError("token grid does not reduce to a single token (" +
                        std::to_string(side) + " left after all merges)");
    }
  }
};

// grids [batch, M*M] -> tokens [batch * s * s, P*P], s = M/P. Token (r, c)
// holds its P x P sub-block flattened row-major.
template <typename T>
Tensor<T> patch_partition(const Tensor<T>& grids, std::size_t grid_size,
                          std::size_t patch) {
  nn::require_cols(grids, grid_size * grid_size, "patch_partition");
  const std::size_t batch = grids.rows();
  const std::size_t side = grid_size / patch;
  Tensor<T> tokens({batch * side * side, patch * patch});
  for (std::size_t b = 0; b < batch; ++b) {
    const T* g = grids.data() + b * grid_size * grid_size;
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t c = 0; c < side; ++c) {
        T* tok = tokens.data() +
                 ((b * side + r) * side + c) * patch * patch;
        for (std::size_t pr = 0; pr < patch; ++pr) {
          for (std::size_t pc = 0; pc < patch; ++pc) {
            tok[pr * patch + pc] =
                g[(r * patch + pr) * grid_size + (c * patch + pc)];
          }
        }
      }
    }
  }
  return tokens;
}

template <typename T>
Tensor<T> inverse_patch_partition(const Tensor<T>& tokens,
                                  std::size_t grid_size, std::size_t patch) {
  const std::size_t side = grid_size / patch;
  const std::size_t batch = tokens.rows() / (side * side);
  Tensor<T> grids({batch, grid_size * grid_size});
  for (std::size_t b = 0; b < batch; ++b) {
    T* g = grids.data() + b * grid_size * grid_size;
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t c = 0; c < side; ++c) {
        const T* tok = tokens.data() +
                       ((b * side + r) * side + c) * patch * patch;
        for (std::size_t pr = 0; pr < patch; ++pr) {
          for (std::size_t pc = 0; pc < patch; ++pc) {
            g[(r * patch + pr) * grid_size + (c * patch + pc)] =
                tok[pr * patch + pc];
          }
        }
      }
    }
  }
  return grids;
}

// x [batch * side * side, dim] -> [batch * nw * w * w, dim], windows in
// row-major window order within each batch item (groups are batch-major).
template <typename T>
Tensor<T> window_partition(const Tensor<T>& x, std::size_t batch,
                           std::size_t side, std::size_t w) {
  const std::size_t dim = x.cols();
  const std::size_t per_axis = side / w;
  Tensor<T> out(std::vector<std::size_t>{x.rows(), dim});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t wr = 0; wr < per_axis; ++wr) {
      for (std::size_t wc = 0; wc < per_axis; ++wc) {
        const std::size_t g = (b * per_axis + wr) * per_axis + wc;
        for (std::size_t lr = 0; lr < w; ++lr) {
          const std::size_t src_row =
              b * side * side + (wr * w + lr) * side + wc * w;
          const std::size_t dst_row = g * w * w + lr * w;
          std::copy(x.data() + src_row * dim, x.data() + (src_row + w) * dim,
                    out.data() + dst_row * dim);
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> window_reverse(const Tensor<T>& wins, std::size_t batch,
                         std::size_t side, std::size_t w) {
  const std::size_t dim = wins.cols();
  const std::size_t per_axis = side / w;
  Tensor<T> out(std::vector<std::size_t>{wins.rows(), dim});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t wr = 0; wr < per_axis; ++wr) {
      for (std::size_t wc = 0; wc < per_axis; ++wc) {
        const std::size_t g = (b * per_axis + wr) * per_axis + wc;
        for (std::size_t lr = 0; lr < w; ++lr) {
          const std::size_t dst_row =
              b * side * side + (wr * w + lr) * side + wc * w;
          const std::size_t src_row = g * w * w + lr * w;
          std::copy(wins.data() + src_row * dim,
                    wins.data() + (src_row + w) * dim,
                    out.data() + dst_row * dim);
        }
      }
    }
  }
  return out;
}

// Cyclic shift of the token grid: out(r, c) = in((r + dr) mod side,
// (c + dc) mod side).
template <typename T>
Tensor<T> roll_tokens(const Tensor<T>& x, std::size_t batch, std::size_t side,
                      std::ptrdiff_t dr, std::ptrdiff_t dc) {
  const std::size_t dim = x.cols();
  const auto wrap = [side](std::ptrdiff_t v) {
    const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(side);
    return static_cast<std::size_t>(((v % s) + s) % s);
  };
  Tensor<T> out(std::vector<std::size_t>{x.rows(), dim});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t r = 0; r < side; ++r) {
      const std::size_t sr = wrap(static_cast<std::ptrdiff_t>(r) + dr);
      for (std::size_t c = 0; c < side; ++c) {
        const std::size_t sc = wrap(static_cast<std::ptrdiff_t>(c) + dc);
        const std::size_t dst = b * side * side + r * side + c;
        const std::size_t src = b * side * side + sr * side + sc;
        std::copy(x.data() + src * dim, x.data() + (src + 1) * dim,
                  out.data() + dst * dim);
      }
    }
  }
  return out;
}

// Attention mask for a shifted partition: within any window, tokens whose
// pre-roll position wrapped around the grid edge must not attend to tokens
// that did not (and vice versa). Shape [nw, w*w, w*w], entries 0 or -1e9.
template <typename T>
Tensor<T> shifted_window_mask(std::size_t side, std::size_t w,
                              std::size_t shift) {
  const std::size_t per_axis = side / w;
  const std::size_t nw = per_axis * per_axis;
  const std::size_t t = w * w;
  Tensor<T> mask({nw, t, t});
  const std::size_t cut = side - shift;
  for (std::size_t wr = 0; wr < per_axis; ++wr) {
    for (std::size_t wc = 0; wc < per_axis; ++wc) {
      const std::size_t g = wr * per_axis + wc;
      for (std::size_t i = 0; i < t; ++i) {
        const bool ri = wr * w + i / w >= cut;
        const bool ci = wc * w + i % w >= cut;
        for (std::size_t j = 0; j < t; ++j) {
          const bool rj = wr * w + j / w >= cut;
          const bool cj = wc * w + j % w >= cut;
          if (ri != rj || ci != cj) {
            mask[(g * t + i) * t + j] = T(-1e9);
          }
        }
      }
    }
  }
  return mask;
}

// One transformer block: x += W-MSA(LN(x)) per window, then x += MLP(LN(x)).
// shift > 0 cyclically displaces the window tiling (the traditional variant);
// the simplified model always uses shift 0.
template <typename T>
class SstBlock {
 public:
  SstBlock(std::string name, std::size_t side, std::size_t dim,
           std::size_t heads, std::size_t window, std::size_t mlp_ratio,
           std::size_t shift, bool rel_pos_bias)
      : ln1_(name + ".ln1", dim),
        ln2_(name + ".ln2", dim),
        attn_(name + ".attn", dim, heads),
        fc1_(name + ".mlp.fc1", dim, dim * mlp_ratio),
        fc2_(name + ".mlp.fc2", dim * mlp_ratio, dim),
        side_(side),
        window_(window),
        shift_(shift) {
    if (rel_pos_bias) attn_.enable_relative_bias(window);
    if (shift_ > 0) {
      attn_.set_mask(shifted_window_mask<T>(side, window, shift_));
    }
  }

  void init(Rng& rng) {
    attn_.init(rng);
    fc1_.init(rng);
    fc2_.init(rng);
  }

  Tensor<T> forward(const Tensor<T>& x, std::size_t batch) {
    batch_ = batch;
    const std::size_t nw = (side_ / window_) * (side_ / window_);
    const std::size_t tokens = window_ * window_;

    Tensor<T> y = ln1_.forward(x);
    if (shift_ > 0) {
      y = roll_tokens(y, batch, side_, static_cast<std::ptrdiff_t>(shift_),
                      static_cast<std::ptrdiff_t>(shift_));
    }
    y = window_partition(y, batch, side_, window_);
    y = attn_.forward(y, batch * nw, tokens);
    y = window_reverse(y, batch, side_, window_);
    if (shift_ > 0) {
      y = roll_tokens(y, batch, side_, -static_cast<std::ptrdiff_t>(shift_),
                      -static_cast<std::ptrdiff_t>(shift_));
    }
    Tensor<T> x1(x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i) x1[i] = x[i] + y[i];

    Tensor<T> m = fc2_.forward(act_.forward(fc1_.forward(ln2_.forward(x1))));
    for (std::size_t i = 0; i < m.numel(); ++i) m[i] += x1[i];
    return m;
  }

  Tensor<T> backward(const Tensor<T>& dout) {
    Tensor<T> dx1 =
        ln2_.backward(fc1_.backward(act_.backward(fc2_.backward(dout))));
    for (std::size_t i = 0; i < dx1.numel(); ++i) dx1[i] += dout[i];

    Tensor<T> da = dx1;
    if (shift_ > 0) {
      da = roll_tokens(da, batch_, side_,
                       static_cast<std::ptrdiff_t>(shift_),
                       static_cast<std::ptrdiff_t>(shift_));
    }
    da = window_partition(da, batch_, side_, window_);
    da = attn_.backward(da);
    da = window_reverse(da, batch_, side_, window_);
    if (shift_ > 0) {
      da = roll_tokens(da, batch_, side_,
                       -static_cast<std::ptrdiff_t>(shift_),
                       -static_cast<std::ptrdiff_t>(shift_));
    }
    Tensor<T> dx = ln1_.backward(da);
    for (std::size_t i = 0; i < dx.numel(); ++i) dx[i] += dx1[i];
    return dx;
  }

  void collect_params(std::vector<Parameter<T>*>& out) {
    ln1_.collect_params(out);
    attn_.collect_params(out);
    ln2_.collect_params(out);
    fc1_.collect_params(out);
    fc2_.collect_params(out);
  }

  nn::SelfAttention<T>& attention() { return attn_; }
  std::size_t shift() const { return shift_; }

 private:
  nn::LayerNorm<T> ln1_, ln2_;
  nn::SelfAttention<T> attn_;
  nn::Linear<T> fc1_, fc2_;
  nn::Gelu<T> act_;
  std::size_t side_, window_, shift_;
  std::size_t batch_ = 0;
};

// Concatenates each 2x2 token group (top-left, top-right, bottom-left,
// bottom-right), normalizes, and linearly reduces 4*dim -> 2*dim.
template <typename T>
class PatchMerging {
 public:
  PatchMerging(std::string name, std::size_t side, std::size_t dim)
      : norm_(name + ".norm", 4 * dim),
        reduce_(name + ".reduce", 4 * dim, 2 * dim),
        side_(side),
        dim_(dim) {
    if (side % 2 != 0) {
      throw ConfigError(name + ": token side " + std::to_string(side) +
                        " is odd");
    }
  }

  void init(Rng& rng) { reduce_.init(rng); }

  Tensor<T> forward(const Tensor<T>& x, std::size_t batch) {
    batch_ = batch;
    const std::size_t half = side_ / 2;
    Tensor<T> gathered({batch * half * half, 4 * dim_});
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t r = 0; r < half; ++r) {
        for (std::size_t c = 0; c < half; ++c) {
          T* dst =
              gathered.data() + ((b * half + r) * half + c) * 4 * dim_;
          for (std::size_t q = 0; q < 4; ++q) {
            const std::size_t sr = 2 * r + q / 2;
            const std::size_t sc = 2 * c + q % 2;
            const T* src =
                x.data() + (b * side_ * side_ + sr * side_ + sc) * dim_;
            std::copy(src, src + dim_, dst + q * dim_);
          }
        }
      }
    }
    return reduce_.forward(norm_.forward(gathered));
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dg = norm_.backward(reduce_.backward(dy));
    const std::size_t half = side_ / 2;
    Tensor<T> dx({batch_ * side_ * side_, dim_});
    for (std::size_t b = 0; b < batch_; ++b) {
      for (std::size_t r = 0; r < half; ++r) {
        for (std::size_t c = 0; c < half; ++c) {
          const T* src =
              dg.data() + ((b * half + r) * half + c) * 4 * dim_;
          for (std::size_t q = 0; q < 4; ++q) {
            const std::size_t dr = 2 * r + q / 2;
            const std::size_t dc = 2 * c + q % 2;
            T* dst =
                dx.data() + (b * side_ * side_ + dr * side_ + dc) * dim_;
            std::copy(src + q * dim_, src + (q + 1) * dim_, dst);
          }
        }
      }
    }
    return dx;
  }

  void collect_params(std::vector<Parameter<T>*>& out) {
    norm_.collect_params(out);
    reduce_.collect_params(out);
  }

 private:
  nn::LayerNorm<T> norm_;
  nn::Linear<T> reduce_;
  std::size_t side_, dim_;
  std::size_t batch_ = 0;
};

// Full hierarchical model: patch partition -> linear embedding -> stages of
// windowed attention blocks separated by patch merging, down to one token,
// then LN -> linear head -> sigmoid squash into [0,1]^2.
template <typename T>
class SstModel {
 public:
  explicit SstModel(const SstConfig& cfg, std::uint64_t seed = 1)
      : cfg_(cfg),
        embed_("embed", cfg.patch_size * cfg.patch_size, cfg.embed_dim),
        head_norm_("head.norm", cfg.final_dim()),
        head_("head.out", cfg.final_dim(), 2) {
    cfg_.validate();
    std::size_t side = cfg_.token_side();
    std::size_t dim = cfg_.embed_dim;
    for (std::size_t s = 0; s < cfg_.depths.size(); ++s) {
      const std::size_t w = cfg_.windows[s];
      Stage stage;
      for (std::size_t b = 0; b < cfg_.depths[s]; ++b) {
        // Alternate shifted blocks only in the traditional variant; a
        // window covering the whole grid has nothing to shift.
        std::size_t shift = 0;
        if (cfg_.use_shift && b % 2 == 1 && w < side) {
          shift = cfg_.shift_override >= 0
                      ? static_cast<std::size_t>(cfg_.shift_override)
                      : w / 2;
        }
        stage.blocks.push_back(std::make_unique<SstBlock<T>>(
            "stage" + std::to_string(s) + ".block" + std::to_string(b), side,
            dim, cfg_.heads, w, cfg_.mlp_ratio, shift, cfg_.rel_pos_bias));
      }
      stage.merge = std::make_unique<PatchMerging<T>>(
          "stage" + std::to_string(s) + ".merge", side, dim);
      stages_.push_back(std::move(stage));
      side /= 2;
      dim *= 2;
    }
    Rng rng(seed);
    embed_.init(rng);
    for (auto& st : stages_) {
      for (auto& blk : st.blocks) blk->init(rng);
      st.merge->init(rng);
    }
    head_.init(rng);
  }

  const SstConfig& config() const { return cfg_; }

  Tensor<T> forward(const Tensor<T>& grids) {
    batch_ = grids.rows();
    Tensor<T> x = patch_partition(grids, cfg_.grid_size, cfg_.patch_size);
    x = embed_.forward(x);
    for (auto& st : stages_) {
      for (auto& blk : st.blocks) x = blk->forward(x, batch_);
      x = st.merge->forward(x, batch_);
    }
    return squash_.forward(head_.forward(head_norm_.forward(x)));
  }

  void backward(const Tensor<T>& dpred) {
    Tensor<T> d = head_norm_.backward(head_.backward(squash_.backward(dpred)));
    for (std::size_t s = stages_.size(); s-- > 0;) {
      d = stages_[s].merge->backward(d);
      for (std::size_t b = stages_[s].blocks.size(); b-- > 0;) {
        d = stages_[s].blocks[b]->backward(d);
      }
    }
    embed_.backward(d);
  }

  std::vector<Parameter<T>*> params() {
    std::vector<Parameter<T>*> out;
    embed_.collect_params(out);
    for (auto& st : stages_) {
      for (auto& blk : st.blocks) blk->collect_params(out);
      st.merge->collect_params(out);
    }
    head_norm_.collect_params(out);
    head_.collect_params(out);
    return out;
  }

  SstBlock<T>& block(std::size_t stage, std::size_t index) {
    return *stages_[stage].blocks[index];
  }

 private:
  struct Stage {
    std::vector<std::unique_ptr<SstBlock<T>>> blocks;
    std::unique_ptr<PatchMerging<T>> merge;
  };

  SstConfig cfg_;
  nn::Linear<T> embed_;
  std::vector<Stage> stages_;
  nn::LayerNorm<T> head_norm_;
  nn::Linear<T> head_;
  nn::Sigmoid<T> squash_;
  std::size_t batch_ = 0;
};

}  // namespace trajcast::sst
