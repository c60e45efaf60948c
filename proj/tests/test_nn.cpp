#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/random_fill.hpp"
#include "trajcast/attention.hpp"
#include "trajcast/grad_check.hpp"
#include "trajcast/nn.hpp"

using namespace trajcast;
using nn::Parameter;
using nn::Tensor;
using trajcast::testing::fill_uniform;
using trajcast::testing::random_tensor;

namespace {

// Scalar probe loss: dot(probe, output). A fixed probe makes the upstream
// gradient trivial while exercising every output coordinate.
template <typename T>
T dot(const Tensor<T>& a, const Tensor<T>& b) {
  T acc = T(0);
  for (std::size_t i = 0; i < a.numel(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

TEST_CASE("linear: identity weights pass input through") {
  nn::Linear<double> lin("lin", 3, 3);
  for (std::size_t i = 0; i < 3; ++i) lin.weight.value(i, i) = 1.0;
  Rng rng(1);
  Tensor<double> x = random_tensor<double>({2, 3}, rng);
  CHECK(lin.forward(x) == x);
}

TEST_CASE("linear: zero input yields broadcast bias") {
  nn::Linear<double> lin("lin", 3, 2);
  Rng rng(2);
  fill_uniform(lin.weight.value, rng);
  lin.bias.value[0] = 0.5;
  lin.bias.value[1] = -1.25;
  Tensor<double> x({4, 3});
  Tensor<double> y = lin.forward(x);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(y(r, 0) == 0.5);
    CHECK(y(r, 1) == -1.25);
  }
}

TEST_CASE("linear: shape mismatch names both shapes") {
  nn::Linear<double> lin("lin", 3, 2);
  Tensor<double> bad({2, 5});
  CHECK_THROWS_AS(lin.forward(bad), ShapeError);
}

TEST_CASE("linear backward matches finite differences") {
  Rng rng(3);
  nn::Linear<double> lin("lin", 3, 4);
  lin.init(rng);
  fill_uniform(lin.bias.value, rng);
  Parameter<double> input("input", {3, 3});
  fill_uniform(input.value, rng);
  const Tensor<double> probe = random_tensor<double>({3, 4}, rng);

  std::vector<Parameter<double>*> params{&lin.weight, &lin.bias, &input};
  auto loss = [&] { return dot(lin.forward(input.value), probe); };
  auto grads = [&] {
    for (auto* p : params) p->zero_grad();
    lin.forward(input.value);
    input.grad = lin.backward(probe);
  };
  auto report = nn::grad_check<double>(loss, grads, params, {1e-6});
  CHECK(report.passed());
  CHECK(report.max_rel_err < 1e-6);
}

TEST_CASE("layer_norm basics") {
  nn::LayerNorm<double> ln("ln", 4);

  SUBCASE("constant row maps to zeros") {
    Tensor<double> x({2, 4});
    x.fill(3.25);
    Tensor<double> y = ln.forward(x);
    for (std::size_t i = 0; i < y.numel(); ++i) {
      CHECK(y[i] == doctest::Approx(0.0).epsilon(1e-9));
    }
  }

  SUBCASE("already standardized row is preserved") {
    nn::LayerNorm<double> tight("ln", 2, 1e-12);
    Tensor<double> x({1, 2}, {-1.0, 1.0});
    Tensor<double> y = tight.forward(x);
    CHECK(y[0] == doctest::Approx(-1.0));
    CHECK(y[1] == doctest::Approx(1.0));
  }

  SUBCASE("rows are standardized before the affine map") {
    Rng rng(5);
    nn::LayerNorm<double> wide("ln", 16, 1e-12);
    Tensor<double> x = random_tensor<double>({8, 16}, rng, -3.0, 5.0);
    Tensor<double> y = wide.forward(x);
    for (std::size_t r = 0; r < 8; ++r) {
      double mean = 0.0, var = 0.0;
      for (std::size_t i = 0; i < 16; ++i) mean += y(r, i);
      mean /= 16.0;
      for (std::size_t i = 0; i < 16; ++i) {
        var += (y(r, i) - mean) * (y(r, i) - mean);
      }
      var /= 16.0;
      CHECK(std::abs(mean) < 1e-6);
      CHECK(std::abs(var - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("layer_norm backward matches finite differences") {
  Rng rng(7);
  nn::LayerNorm<double> ln("ln", 6);
  fill_uniform(ln.gamma.value, rng, 0.5, 1.5);
  fill_uniform(ln.beta.value, rng);
  Parameter<double> input("input", {4, 6});
  fill_uniform(input.value, rng, -2.0, 2.0);
  const Tensor<double> probe = random_tensor<double>({4, 6}, rng);

  std::vector<Parameter<double>*> params{&ln.gamma, &ln.beta, &input};
  auto loss = [&] { return dot(ln.forward(input.value), probe); };
  auto grads = [&] {
    for (auto* p : params) p->zero_grad();
    ln.forward(input.value);
    input.grad = ln.backward(probe);
  };
  auto report = nn::grad_check<double>(loss, grads, params, {1e-5});
  CHECK(report.passed());
}

TEST_CASE("softmax examples and properties") {
  Tensor<double> x({1, 2}, {0.0, 0.0});
  Tensor<double> y = nn::softmax(x);
  CHECK(y[0] == doctest::Approx(0.5));
  CHECK(y[1] == doctest::Approx(0.5));

  Tensor<double> huge({1, 2}, {1000.0, 0.0});
  Tensor<double> safe = nn::softmax(huge);
  CHECK(safe.all_finite());
  CHECK(safe[0] == doctest::Approx(1.0));
  CHECK(safe[1] == doctest::Approx(0.0));

  Rng rng(11);
  for (int iter = 0; iter < 50; ++iter) {
    Tensor<double> r = random_tensor<double>({3, 7}, rng, -30.0, 30.0);
    Tensor<double> s = nn::softmax(r);
    for (std::size_t row = 0; row < 3; ++row) {
      double sum = 0.0;
      for (std::size_t i = 0; i < 7; ++i) {
        CHECK(s(row, i) >= 0.0);
        sum += s(row, i);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("softmax backward matches finite differences") {
  Rng rng(13);
  Parameter<double> input("input", {3, 5});
  fill_uniform(input.value, rng, -2.0, 2.0);
  const Tensor<double> probe = random_tensor<double>({3, 5}, rng);

  std::vector<Parameter<double>*> params{&input};
  auto loss = [&] { return dot(nn::softmax(input.value), probe); };
  auto grads = [&] {
    input.zero_grad();
    const Tensor<double> y = nn::softmax(input.value);
    input.grad = nn::softmax_backward(y, probe);
  };
  auto report = nn::grad_check<double>(loss, grads, params, {1e-6});
  CHECK(report.passed());
}

TEST_CASE("activation backward passes match finite differences") {
  Rng rng(17);
  Parameter<double> input("input", {4, 5});
  fill_uniform(input.value, rng, -2.0, 2.0);
  const Tensor<double> probe = random_tensor<double>({4, 5}, rng);
  std::vector<Parameter<double>*> params{&input};

  SUBCASE("gelu") {
    nn::Gelu<double> act;
    auto loss = [&] { return dot(act.forward(input.value), probe); };
    auto grads = [&] {
      input.zero_grad();
      act.forward(input.value);
      input.grad = act.backward(probe);
    };
    CHECK(nn::grad_check<double>(loss, grads, params, {1e-6}).passed());
  }

  SUBCASE("sigmoid") {
    nn::Sigmoid<double> act;
    auto loss = [&] { return dot(act.forward(input.value), probe); };
    auto grads = [&] {
      input.zero_grad();
      act.forward(input.value);
      input.grad = act.backward(probe);
    };
    CHECK(nn::grad_check<double>(loss, grads, params, {1e-6}).passed());
  }
}

TEST_CASE("multi-head attention: single token reduces to two projections") {
  Rng rng(19);
  nn::SelfAttention<double> attn("attn", 4, 2);
  attn.init(rng);
  Tensor<double> x = random_tensor<double>({1, 4}, rng);
  Tensor<double> out = attn.forward(x, 1, 1);

  std::vector<Parameter<double>*> params;
  attn.collect_params(params);  // [qkv.w, qkv.b, proj.w, proj.b]
  // value projection = columns [2d, 3d) of the qkv weight; biases are zero
  Tensor<double> v({1, 4});
  auto qkv_w = nn::mat_view(params[0]->value);
  for (std::size_t j = 0; j < 4; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 4; ++i) acc += x[i] * qkv_w(i, 8 + j);
    v[j] = acc;
  }
  auto proj_w = nn::mat_view(params[2]->value);
  for (std::size_t j = 0; j < 4; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 4; ++i) acc += v[i] * proj_w(i, j);
    CHECK(out[j] == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("multi-head attention: identical tokens give identical rows") {
  Rng rng(23);
  nn::SelfAttention<double> attn("attn", 8, 2);
  attn.init(rng);
  Tensor<double> x({4, 8});
  const Tensor<double> row = random_tensor<double>({1, 8}, rng);
  for (std::size_t r = 0; r < 4; ++r) {
    std::copy(row.values().begin(), row.values().end(), x.data() + r * 8);
  }
  Tensor<double> out = attn.forward(x, 1, 4);
  for (std::size_t r = 1; r < 4; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(out(r, c) == doctest::Approx(out(0, c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("multi-head attention rejects indivisible head counts") {
  CHECK_THROWS_AS(nn::SelfAttention<double>("attn", 6, 4), ConfigError);
}

TEST_CASE("attention backward matches finite differences") {
  Rng rng(29);
  nn::SelfAttention<double> attn("attn", 8, 2);
  attn.init(rng);

  SUBCASE("with an external logit bias") {
    attn.set_logit_bias(random_tensor<double>({2, 4, 4}, rng));
  }
  SUBCASE("plain") {}

  Parameter<double> input("input", {4, 8});
  fill_uniform(input.value, rng);
  const Tensor<double> probe = random_tensor<double>({4, 8}, rng);

  std::vector<Parameter<double>*> params;
  attn.collect_params(params);
  params.push_back(&input);
  auto loss = [&] { return dot(attn.forward(input.value, 1, 4), probe); };
  auto grads = [&] {
    for (auto* p : params) p->zero_grad();
    attn.forward(input.value, 1, 4);
    input.grad = attn.backward(probe);
  };
  auto report = nn::grad_check<double>(loss, grads, params, {1e-4});
  CHECK(report.passed());
  CHECK(report.max_rel_err < 1e-4);
}

TEST_CASE("mse_loss examples") {
  Tensor<double> zero({1, 2});
  CHECK(nn::mse_loss<double>(zero, zero) == 0.0);

  Tensor<double> pred({1, 2}, {0.0, 0.0});
  Tensor<double> target({1, 2}, {3.0, 4.0});
  CHECK(nn::mse_loss<double>(pred, target) == doctest::Approx(12.5));

  Tensor<double> bad({2, 2});
  CHECK_THROWS_AS(nn::mse_loss<double>(pred, bad), ShapeError);
}

TEST_CASE("mse gradient is 2(pred-target)/n and matches finite differences") {
  Rng rng(31);
  Parameter<double> pred("pred", {3, 2});
  fill_uniform(pred.value, rng);
  const Tensor<double> target = random_tensor<double>({3, 2}, rng);

  Tensor<double> dpred;
  nn::mse_loss(pred.value, target, &dpred);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(dpred[i] ==
          doctest::Approx(2.0 * (pred.value[i] - target[i]) / 6.0));
  }

  std::vector<Parameter<double>*> params{&pred};
  auto loss = [&] { return nn::mse_loss(pred.value, target); };
  auto grads = [&] {
    pred.zero_grad();
    Tensor<double> d;
    nn::mse_loss(pred.value, target, &d);
    pred.grad = d;
  };
  CHECK(nn::grad_check<double>(loss, grads, params, {1e-7}).passed());
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Parameter<float> p("p", {4});
  Rng rng(37);
  fill_uniform(p.value, rng);
  const Tensor<float> before = p.value;
  nn::Adam<float> adam({&p});
  adam.step();
  CHECK(p.value == before);
}

TEST_CASE("adam: constant gradient approaches lr-sized signed steps") {
  Parameter<double> p("p", {2});
  nn::AdamConfig cfg;
  cfg.lr = 1e-3;
  nn::Adam<double> adam({&p}, cfg);
  double prev0 = p.value[0];
  double step0 = 0.0;
  for (int i = 0; i < 500; ++i) {
    p.grad[0] = 2.5;
    p.grad[1] = -0.75;
    adam.step();
    step0 = prev0 - p.value[0];
    prev0 = p.value[0];
  }
  CHECK(step0 == doctest::Approx(cfg.lr).epsilon(1e-3));
  CHECK(p.value[0] < 0.0);
  CHECK(p.value[1] > 0.0);
}

TEST_CASE("adam: identical runs are bit-identical") {
  auto run = [] {
    Rng rng(41);
    Parameter<float> p("p", {8});
    fill_uniform(p.value, rng);
    nn::Adam<float> adam({&p});
    for (int i = 0; i < 25; ++i) {
      for (std::size_t j = 0; j < 8; ++j) {
        p.grad[j] = static_cast<float>(rng.uniform(-1.0, 1.0));
      }
      adam.step();
    }
    return p.value;
  };
  CHECK(run() == run());
}

TEST_CASE("adam zeroes gradients after stepping") {
  Parameter<float> p("p", {2});
  p.grad[0] = 1.0f;
  p.grad[1] = -1.0f;
  nn::Adam<float> adam({&p});
  adam.step();
  CHECK(p.grad[0] == 0.0f);
  CHECK(p.grad[1] == 0.0f);
}

TEST_CASE("dropout: rate zero is the identity; inverted scaling otherwise") {
  Rng rng(43);
  Tensor<float> x = random_tensor<float>({8, 8}, rng);

  nn::Dropout<float> off(0.0);
  CHECK(off.forward(x, rng) == x);

  nn::Dropout<float> half(0.5);
  Tensor<float> y = half.forward(x, rng);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const bool zero = y[i] == 0.0f;
    const bool scaled = y[i] == doctest::Approx(2.0f * x[i]);
    CHECK((zero || scaled));
    kept += scaled;
  }
  CHECK(kept > 8);
  CHECK(kept < 56);
}

TEST_CASE("grad_check detects a sign-flipped backward") {
  Rng rng(47);
  nn::Linear<double> lin("lin", 3, 3);
  lin.init(rng);
  Parameter<double> input("input", {2, 3});
  fill_uniform(input.value, rng);
  const Tensor<double> probe = random_tensor<double>({2, 3}, rng);

  std::vector<Parameter<double>*> params{&lin.weight, &lin.bias};
  auto loss = [&] { return dot(lin.forward(input.value), probe); };
  auto corrupted = [&] {
    for (auto* p : params) p->zero_grad();
    lin.forward(input.value);
    lin.backward(probe);
    for (double& g : lin.weight.grad.values()) g = -g;  // deliberate corruption
  };
  auto report = nn::grad_check<double>(loss, corrupted, params, {1e-6});
  CHECK_FALSE(report.passed());
}
