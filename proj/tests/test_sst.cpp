#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/random_fill.hpp"
#include "trajcast/grad_check.hpp"
#include "trajcast/sst.hpp"

using namespace trajcast;
using nn::Parameter;
using nn::Tensor;
using trajcast::testing::fill_uniform;
using trajcast::testing::random_tensor;
using namespace trajcast::sst;

namespace {

SstConfig toy_config() {
  SstConfig cfg;
  cfg.grid_size = 8;
  cfg.patch_size = 2;
  cfg.embed_dim = 8;
  cfg.heads = 2;
  return cfg;
}

template <typename T>
T dot(const Tensor<T>& a, const Tensor<T>& b) {
  T acc = T(0);
  for (std::size_t i = 0; i < a.numel(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

TEST_CASE("patch partition produces 16 tokens of 100 features at M=40") {
  Rng rng(1);
  Tensor<float> grids = random_tensor<float>({2, 1600}, rng, 0.0, 1.0);
  Tensor<float> tokens = patch_partition(grids, 40, 10);
  CHECK(tokens.rows() == 32);  // 2 samples x 16 tokens
  CHECK(tokens.cols() == 100);

  // token (0,0) holds the top-left 10x10 block row-major
  for (std::size_t pr = 0; pr < 10; ++pr) {
    for (std::size_t pc = 0; pc < 10; ++pc) {
      CHECK(tokens(0, pr * 10 + pc) == grids(0, pr * 40 + pc));
    }
  }
}

TEST_CASE("patch partition with M == P is the flattened grid") {
  Rng rng(2);
  Tensor<float> grids = random_tensor<float>({1, 16}, rng);
  Tensor<float> tokens = patch_partition(grids, 4, 4);
  CHECK(tokens.rows() == 1);
  CHECK(tokens.values() == grids.values());
}

TEST_CASE("patch partition round-trips losslessly") {
  Rng rng(3);
  Tensor<float> grids = random_tensor<float>({3, 1600}, rng);
  Tensor<float> tokens = patch_partition(grids, 40, 10);
  CHECK(inverse_patch_partition(tokens, 40, 10) == grids);
}

TEST_CASE("window partition: side 4, w 2 gives 4 windows of 4 tokens") {
  // token features = row-major token index, dim 1
  Tensor<float> x({16, 1});
  for (std::size_t i = 0; i < 16; ++i) x[i] = static_cast<float>(i);
  Tensor<float> wins = window_partition(x, 1, 4, 2);
  // window 0 holds tokens (0,0),(0,1),(1,0),(1,1) -> indices 0,1,4,5
  CHECK(wins[0] == 0.0f);
  CHECK(wins[1] == 1.0f);
  CHECK(wins[2] == 4.0f);
  CHECK(wins[3] == 5.0f);
  // window 3 holds tokens (2,2),(2,3),(3,2),(3,3) -> 10,11,14,15
  CHECK(wins[12] == 10.0f);
  CHECK(wins[13] == 11.0f);
  CHECK(wins[14] == 14.0f);
  CHECK(wins[15] == 15.0f);
}

TEST_CASE("window partition with w == side is global attention") {
  Rng rng(4);
  Tensor<float> x = random_tensor<float>({9, 3}, rng);
  Tensor<float> wins = window_partition(x, 1, 3, 3);
  CHECK(wins == x);
}

TEST_CASE("window partition round-trips for random tensors") {
  Rng rng(5);
  for (int iter = 0; iter < 20; ++iter) {
    const std::size_t side = 2 * (1 + rng.uniform_index(3));  // 2, 4, 6
    const std::size_t w = side % 4 == 0 && rng.uniform_index(2) ? 2 : side;
    const std::size_t batch = 1 + rng.uniform_index(3);
    Tensor<float> x =
        random_tensor<float>({batch * side * side, 5}, rng);
    Tensor<float> wins = window_partition(x, batch, side, w);
    CHECK(window_reverse(wins, batch, side, w) == x);
  }
}

TEST_CASE("roll_tokens shifts cyclically and inverts") {
  Tensor<float> x({16, 1});
  for (std::size_t i = 0; i < 16; ++i) x[i] = static_cast<float>(i);
  Tensor<float> rolled = roll_tokens(x, 1, 4, 1, 1);
  // out(0,0) = in(1,1) = 5
  CHECK(rolled[0] == 5.0f);
  // out(3,3) = in(0,0) = 0
  CHECK(rolled[15] == 0.0f);
  CHECK(roll_tokens(rolled, 1, 4, -1, -1) == x);
}

TEST_CASE("shifted window mask blocks wrapped pairs only") {
  Tensor<float> mask = shifted_window_mask<float>(4, 2, 1);
  CHECK(mask.shape() == std::vector<std::size_t>{4, 4, 4});
  // window (0,0): all tokens far from the wrap cut -> fully unmasked
  for (std::size_t i = 0; i < 16; ++i) CHECK(mask[i] == 0.0f);
  // window (1,1): rows/cols 2..3; tokens split by the cut at 3
  std::size_t masked = 0;
  for (std::size_t i = 0; i < 16; ++i) masked += mask[3 * 16 + i] != 0.0f;
  CHECK(masked == 12);  // each of 4 tokens attends only to itself
  // window (0,1): cols 2..3 split, rows unsplit -> same-column pairs allowed
  const float* w1 = mask.data() + 1 * 16;
  CHECK(w1[0 * 4 + 2] == 0.0f);  // (r0,c2)->(r1,c2): same flag
  CHECK(w1[0 * 4 + 1] != 0.0f);  // (r0,c2)->(r0,c3): wrapped pair
}

TEST_CASE("block with zeroed output projections is the identity") {
  Rng rng(6);
  SstBlock<float> block("blk", 4, 8, 2, 2, 4, 0, true);
  block.init(rng);
  std::vector<Parameter<float>*> params;
  block.collect_params(params);
  for (Parameter<float>* p : params) {
    // attn.proj.* and mlp.fc2.* hold the two residual-branch outputs
    if (p->name.find("proj") != std::string::npos ||
        p->name.find("fc2") != std::string::npos) {
      p->value.fill(0.0f);
    }
  }
  Tensor<float> x = random_tensor<float>({16, 8}, rng);
  CHECK(block.forward(x, 1) == x);
}

TEST_CASE("non-shifted block is local to its window") {
  Rng rng(7);
  SstBlock<double> block("blk", 4, 8, 2, 2, 4, 0, true);
  block.init(rng);
  Tensor<double> x = random_tensor<double>({16, 8}, rng);
  const Tensor<double> base = block.forward(x, 1);
  // token 0 lives in window 0 together with tokens 1, 4, 5
  x(0, 3) += 0.5;
  const Tensor<double> bumped = block.forward(x, 1);
  for (std::size_t tok : {2, 3, 6, 7, 8, 9, 12, 13, 10, 11, 14, 15}) {
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(bumped(tok, c) == base(tok, c));
    }
  }
  // and the window itself did change
  bool changed = false;
  for (std::size_t tok : {0, 1, 4, 5}) {
    for (std::size_t c = 0; c < 8; ++c) {
      changed |= bumped(tok, c) != base(tok, c);
    }
  }
  CHECK(changed);
}

TEST_CASE("sst block backward matches finite differences") {
  Rng rng(8);
  SstBlock<double> block("blk", 4, 8, 2, 2, 2, 0, true);
  block.init(rng);
  Parameter<double> input("input", {16, 8});
  fill_uniform(input.value, rng);
  const Tensor<double> probe = random_tensor<double>({16, 8}, rng);

  std::vector<Parameter<double>*> params;
  block.collect_params(params);
  params.push_back(&input);
  auto loss = [&] { return dot(block.forward(input.value, 1), probe); };
  auto grads = [&] {
    for (auto* p : params) p->zero_grad();
    block.forward(input.value, 1);
    input.grad = block.backward(probe);
  };
  auto report = nn::grad_check<double>(loss, grads, params, {1e-4});
  CHECK(report.passed());
}

TEST_CASE("shifted block backward matches finite differences") {
  Rng rng(9);
  SstBlock<double> block("blk", 4, 8, 2, 2, 2, 1, true);
  block.init(rng);
  CHECK(block.shift() == 1);
  Parameter<double> input("input", {16, 8});
  fill_uniform(input.value, rng);
  const Tensor<double> probe = random_tensor<double>({16, 8}, rng);

  std::vector<Parameter<double>*> params;
  block.collect_params(params);
  params.push_back(&input);
  auto loss = [&] { return dot(block.forward(input.value, 1), probe); };
  auto grads = [&] {
    for (auto* p : params) p->zero_grad();
    block.forward(input.value, 1);
    input.grad = block.backward(probe);
  };
  auto report = nn::grad_check<double>(loss, grads, params, {1e-4});
  CHECK(report.passed());
}

TEST_CASE("patch merging halves the side and doubles the dim") {
  Rng rng(10);
  PatchMerging<float> merge("merge", 4, 8);
  merge.init(rng);
  Tensor<float> x = random_tensor<float>({2 * 16, 8}, rng);
  Tensor<float> y = merge.forward(x, 2);
  CHECK(y.rows() == 2 * 4);
  CHECK(y.cols() == 16);

  PatchMerging<float> last("merge", 2, 8);
  last.init(rng);
  Tensor<float> z = last.forward(random_tensor<float>({4, 8}, rng), 1);
  CHECK(z.rows() == 1);
  CHECK(z.cols() == 16);

  CHECK_THROWS_AS(PatchMerging<float>("merge", 3, 8), ConfigError);
}

TEST_CASE("patch merging concatenates TL, TR, BL, BR in that order") {
  PatchMerging<double> merge("merge", 2, 1);
  std::vector<Parameter<double>*> params;
  merge.collect_params(params);  // norm.gamma, norm.beta, reduce.w, reduce.b
  // select slot 1 (top-right) and slot 2 (bottom-left) of the normalized row
  params[2]->value.fill(0.0);
  params[2]->value(1, 0) = 1.0;
  params[2]->value(2, 1) = 1.0;

  // tokens: TL=3, TR=1, BL=-1, BR=-3 -> standardized [3,1,-1,-3]/sqrt(5)
  Tensor<double> x({4, 1}, {3.0, 1.0, -1.0, -3.0});
  Tensor<double> y = merge.forward(x, 1);
  const double inv = 1.0 / std::sqrt(5.0 + 1e-5);
  CHECK(y[0] == doctest::Approx(1.0 * inv).epsilon(1e-6));
  CHECK(y[1] == doctest::Approx(-1.0 * inv).epsilon(1e-6));
}

TEST_CASE("patch merging backward matches finite differences") {
  Rng rng(11);
  PatchMerging<double> merge("merge", 4, 6);
  merge.init(rng);
  Parameter<double> input("input", {16, 6});
  fill_uniform(input.value, rng);
  const Tensor<double> probe = random_tensor<double>({4, 12}, rng);

  std::vector<Parameter<double>*> params;
  merge.collect_params(params);
  params.push_back(&input);
  auto loss = [&] { return dot(merge.forward(input.value, 1), probe); };
  auto grads = [&] {
    for (auto* p : params) p->zero_grad();
    merge.forward(input.value, 1);
    input.grad = merge.backward(probe);
  };
  auto report = nn::grad_check<double>(loss, grads, params, {1e-5});
  CHECK(report.passed());
}

TEST_CASE("config validation catches inconsistent geometry") {
  SstConfig bad = toy_config();
  bad.patch_size = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = toy_config();
  bad.windows = {3, 2};
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = toy_config();
  bad.heads = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = toy_config();
  bad.depths = {2};
  bad.windows = {2};
  CHECK_THROWS_AS(bad.validate(), ConfigError);  // side 4 -> 2, never reaches 1

  CHECK_NOTHROW(toy_config().validate());
  CHECK_NOTHROW(SstConfig{}.validate());
}

TEST_CASE("model output is two values in [0,1] and deterministic") {
  SstModel<float> model(toy_config(), 123);
  Rng rng(12);
  Tensor<float> grids = random_tensor<float>({3, 64}, rng, 0.0, 1.0);
  // duplicate row 0 into row 2
  std::copy(grids.data(), grids.data() + 64, grids.data() + 2 * 64);

  Tensor<float> pred = model.forward(grids);
  CHECK(pred.rows() == 3);
  CHECK(pred.cols() == 2);
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    CHECK(pred[i] >= 0.0f);
    CHECK(pred[i] <= 1.0f);
  }
  CHECK(pred(0, 0) == pred(2, 0));
  CHECK(pred(0, 1) == pred(2, 1));

  SstModel<float> again(toy_config(), 123);
  CHECK(again.forward(grids) == pred);
}

TEST_CASE("default config follows the 16 -> 4 -> 1 token hierarchy") {
  SstConfig cfg;  // M=40, P=10, C=64
  cfg.validate();
  CHECK(cfg.token_side() == 4);
  CHECK(cfg.final_dim() == 256);
  SstModel<float> model(cfg, 7);
  Rng rng(13);
  Tensor<float> grids = random_tensor<float>({2, 1600}, rng, 0.0, 1.0);
  Tensor<float> pred = model.forward(grids);
  CHECK(pred.rows() == 2);
  CHECK(pred.cols() == 2);
}

TEST_CASE("zero-shift override makes the shifted variant bit-identical") {
  SstConfig plain = toy_config();
  SstConfig shifted = toy_config();
  shifted.use_shift = true;
  shifted.shift_override = 0;

  Rng rng(14);
  Tensor<float> grids = random_tensor<float>({4, 64}, rng, 0.0, 1.0);
  SstModel<float> a(plain, 77);
  SstModel<float> b(shifted, 77);
  CHECK(a.forward(grids) == b.forward(grids));
}

TEST_CASE("shifted variant with a real shift differs from plain") {
  SstConfig plain = toy_config();
  SstConfig shifted = toy_config();
  shifted.use_shift = true;

  Rng rng(15);
  Tensor<float> grids = random_tensor<float>({2, 64}, rng, 0.0, 1.0);
  SstModel<float> a(plain, 77);
  SstModel<float> b(shifted, 77);
  CHECK(a.forward(grids) != b.forward(grids));
}

TEST_CASE("end-to-end gradient check on the 8x8 toy config") {
  SstModel<double> model(toy_config(), 321);
  Rng rng(16);
  const Tensor<double> grids = random_tensor<double>({2, 64}, rng, 0.0, 1.0);
  const Tensor<double> targets =
      random_tensor<double>({2, 2}, rng, 0.2, 0.8);

  std::vector<Parameter<double>*> params = model.params();
  auto loss = [&] { return nn::mse_loss(model.forward(grids), targets); };
  auto grads = [&] {
    for (auto* p : params) p->zero_grad();
    Tensor<double> dpred;
    nn::mse_loss(model.forward(grids), targets, &dpred);
    model.backward(dpred);
  };
  nn::GradCheckOptions opts;
  opts.tolerance = 1e-4;
  opts.samples_per_param = 10;
  auto report = nn::grad_check<double>(loss, grads, params, opts);
  CHECK(report.passed());
}
