#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "npm/approx/adam.hpp"
#include "npm/approx/checkpoint.hpp"
#include "npm/approx/mlp.hpp"
#include "npm/approx/softmax.hpp"
#include "npm/approx/tabular_fn.hpp"
#include "test_util.hpp"

namespace npm::approx {
namespace {

TEST(Softmax, UniformForEqualLogits) {
  const std::vector<double> p = softmax(std::vector<double>{0, 0, 0, 0});
  for (double v : p) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Softmax, ShiftInvariant) {
  const std::vector<double> a = softmax(std::vector<double>{0.3, -1.2, 2.0});
  const std::vector<double> b = softmax(std::vector<double>{100.3, 98.8, 102.0});
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  const std::vector<double> p = softmax(std::vector<double>{1000.0, 0.0});
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_GE(p[1], 0.0);
  EXPECT_LT(p[1], 1e-300);
  const std::vector<double> lp = log_softmax(std::vector<double>{1000.0, 0.0});
  EXPECT_DOUBLE_EQ(lp[1], -1000.0);
}

TEST(Softmax, SumsToOne) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> z(1 + rng.uniform_index(40));
    for (double& v : z) v = rng.uniform(-50.0, 50.0);
    double total = 0.0;
    for (double v : softmax(z)) total += v;
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Softmax, ColumnsMatchVectorForm) {
  Eigen::MatrixXd z(3, 2);
  z << 1, -2, 0, 0.5, 3, 4;
  const Eigen::MatrixXd p = softmax_columns(z);
  const Eigen::MatrixXd lp = log_softmax_columns(z);
  for (Eigen::Index c = 0; c < 2; ++c) {
    const std::vector<double> ref = softmax(std::span<const double>(z.col(c).data(), 3));
    for (Eigen::Index r = 0; r < 3; ++r) {
      EXPECT_NEAR(p(r, c), ref[r], 1e-15);
      EXPECT_NEAR(lp(r, c), std::log(ref[r]), 1e-12);
    }
  }
}

TEST(Mlp, ZeroNetOutputsZero) {
  Mlp net({3, 5, 2}, Activation::kTanh);
  const Eigen::VectorXd y = net.forward(std::vector<double>{1.0, -2.0, 0.5});
  EXPECT_TRUE(y.isZero(0.0));
}

TEST(Mlp, IdentityNet) {
  Mlp net({1, 1}, Activation::kTanh);
  net.weights()[0](0, 0) = 1.0;
  EXPECT_EQ(net.predict(std::vector<double>{0.37})(0), 0.37);
  EXPECT_EQ(net.predict(std::vector<double>{-4.0})(0), -4.0);
}

TEST(Mlp, SeededInitIsDeterministic) {
  Rng a(5), b(5);
  Mlp x({4, 8, 3}, Activation::kTanh, a);
  Mlp y({4, 8, 3}, Activation::kTanh, b);
  const std::vector<double> in{0.1, 0.2, -0.3, 0.4};
  const Eigen::VectorXd ox = x.forward(in), oy = y.forward(in);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(ox(i), oy(i));
}

TEST(Mlp, InitWithinGlorotRange) {
  Rng rng(2);
  Mlp net({10, 30, 4}, Activation::kRelu, rng);
  const double l0 = std::sqrt(6.0 / 40.0), l1 = std::sqrt(6.0 / 34.0);
  EXPECT_LE(net.weights()[0].cwiseAbs().maxCoeff(), l0);
  EXPECT_LE(net.weights()[1].cwiseAbs().maxCoeff(), l1);
  EXPECT_TRUE(net.biases()[0].isZero(0.0));
}

TEST(Mlp, ShapeMismatchAndMissingForward) {
  Rng rng(0);
  Mlp net({3, 4, 2}, Activation::kTanh, rng);
  EXPECT_THROW(net.forward(std::vector<double>{1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(net.backward(Eigen::MatrixXd::Zero(2, 1)), std::logic_error);
  net.forward(std::vector<double>{1.0, 2.0, 3.0});
  EXPECT_THROW(net.backward(Eigen::MatrixXd::Zero(3, 1)), std::invalid_argument);
}

TEST(Mlp, ZeroUpstreamZeroGradient) {
  Rng rng(0);
  Mlp net({4, 8, 3}, Activation::kTanh, rng);
  net.forward(Eigen::MatrixXd::Random(4, 5));
  EXPECT_EQ(net.backward(Eigen::MatrixXd::Zero(3, 5)).squared_norm(), 0.0);
}

TEST(Mlp, GradientIsLinearOverSamples) {
  Rng rng(9);
  Mlp net({4, 8, 3}, Activation::kTanh, rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
  Eigen::MatrixXd g = Eigen::MatrixXd::Random(3, 2);
  net.forward(x);
  const std::vector<double> both = flatten(net.backward(g));
  net.forward(x.col(0));
  MlpGradients sum = net.backward(g.col(0));
  net.forward(x.col(1));
  sum += net.backward(g.col(1));
  const std::vector<double> split = flatten(sum);
  for (std::size_t i = 0; i < both.size(); ++i) EXPECT_NEAR(both[i], split[i], 1e-13);
}

class MlpGradientCheck : public ::testing::TestWithParam<Activation> {};

TEST_P(MlpGradientCheck, MatchesCentralDifferences) {
  Rng rng(17);
  for (int point = 0; point < 10; ++point) {
    Mlp net({4, 8, 3}, GetParam(), rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 3);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Random(3, 3);
    auto loss = [&] { return (net.predict(x).array() * w.array()).sum(); };
    net.forward(x);
    const MlpGradients g = net.backward(w);
    EXPECT_LT(testing::max_relative_error(net, loss, g), 1e-4) << "point " << point;
  }
}

INSTANTIATE_TEST_SUITE_P(Activations, MlpGradientCheck, ::testing::Values(Activation::kTanh, Activation::kRelu));

TEST(Mlp, FlatParametersRoundTrip) {
  Rng rng(4);
  Mlp net({3, 5, 2}, Activation::kRelu, rng);
  std::vector<double> theta = net.flat_parameters();
  ASSERT_EQ(theta.size(), net.parameter_count());
  EXPECT_EQ(theta.size(), 3u * 5 + 5 + 5 * 2 + 2);
  theta[0] = 42.0;
  net.set_flat_parameters(theta);
  EXPECT_EQ(net.flat_parameters(), theta);
}

TEST(Mlp, ClipGradientNorm) {
  Rng rng(4);
  Mlp net({3, 5, 2}, Activation::kTanh, rng);
  net.forward(Eigen::MatrixXd::Random(3, 4));
  MlpGradients g = net.backward(100.0 * Eigen::MatrixXd::Ones(2, 4));
  clip_gradient_norm(g, 0.5);
  EXPECT_NEAR(std::sqrt(g.squared_norm()), 0.5, 1e-12);
  MlpGradients small = g;
  clip_gradient_norm(small, 10.0);
  EXPECT_EQ(flatten(small), flatten(g));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Mlp net({2, 2}, Activation::kTanh);
  AdamState st(net, {0.01});
  MlpGradients g = net.zero_gradients();
  g.weights[0].setConstant(3.7);
  g.biases[0].setConstant(-0.2);
  ASSERT_TRUE(adam_step(net, g, st));
  // m_hat = g and v_hat = g^2 after one step, so each update is lr * g / (|g| + eps).
  for (double v : net.weights()[0].reshaped()) EXPECT_NEAR(v, -0.01 * 3.7 / (3.7 + 1e-8), 1e-15);
  for (double v : net.biases()[0]) EXPECT_NEAR(v, 0.01 * 0.2 / (0.2 + 1e-8), 1e-15);
  EXPECT_EQ(st.steps(), 1);
}

TEST(Adam, ZeroGradientKeepsParameters) {
  Rng rng(0);
  Mlp net({3, 4, 2}, Activation::kTanh, rng);
  const std::vector<double> before = net.flat_parameters();
  AdamState st(net, {});
  adam_step(net, net.zero_gradients(), st);
  EXPECT_EQ(net.flat_parameters(), before);
}

TEST(Adam, NonFiniteGradientSkipped) {
  Rng rng(0);
  Mlp net({3, 4, 2}, Activation::kTanh, rng);
  const std::vector<double> before = net.flat_parameters();
  AdamState st(net, {});
  MlpGradients g = net.zero_gradients();
  g.weights[1](0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(adam_step(net, g, st));
  EXPECT_EQ(st.skipped(), 1);
  EXPECT_EQ(st.steps(), 0);
  EXPECT_EQ(net.flat_parameters(), before);
}

TEST(Adam, DeterministicAcrossCopies) {
  Rng r1(8), r2(8);
  Mlp a({3, 4, 2}, Activation::kTanh, r1), b({3, 4, 2}, Activation::kTanh, r2);
  AdamState sa(a, {}), sb(b, {});
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 6), up = Eigen::MatrixXd::Random(2, 6);
  for (int k = 0; k < 20; ++k) {
    a.forward(x);
    b.forward(x);
    adam_step(a, a.backward(up), sa);
    adam_step(b, b.backward(up), sb);
  }
  EXPECT_EQ(a.flat_parameters(), b.flat_parameters());
}

TEST(Checkpoint, BitExactRoundTripWithOptimizer) {
  Rng rng(21);
  Mlp net({5, 7, 3}, Activation::kRelu, rng);
  AdamState opt(net, {0.003});
  for (int k = 0; k < 3; ++k) {
    net.forward(Eigen::MatrixXd::Random(5, 4));
    adam_step(net, net.backward(Eigen::MatrixXd::Random(3, 4)), opt);
  }
  const auto path = std::filesystem::temp_directory_path() / "npm_checkpoint_roundtrip.json";
  write_json_file(path, to_json(net, &opt));
  const nlohmann::json doc = read_json_file(path);
  std::filesystem::remove(path);

  EXPECT_EQ(doc.at("format_version"), kCheckpointFormatVersion);
  const Mlp back = mlp_from_json(doc);
  EXPECT_EQ(back.layer_sizes(), net.layer_sizes());
  EXPECT_EQ(back.activation(), net.activation());
  EXPECT_EQ(back.flat_parameters(), net.flat_parameters());
  const std::optional<AdamState> opt_back = adam_from_json(doc, back);
  ASSERT_TRUE(opt_back.has_value());
  EXPECT_EQ(opt_back->steps(), opt.steps());
  EXPECT_EQ(opt_back->config().learning_rate, opt.config().learning_rate);
  EXPECT_EQ(flatten(opt_back->first_moment()), flatten(opt.first_moment()));
  EXPECT_EQ(flatten(opt_back->second_moment()), flatten(opt.second_moment()));
}

TEST(Checkpoint, OptimizerOptionalAndVersionChecked) {
  Rng rng(0);
  Mlp net({2, 2}, Activation::kTanh, rng);
  nlohmann::json doc = to_json(net);
  EXPECT_FALSE(adam_from_json(doc, net).has_value());
  doc["format_version"] = kCheckpointFormatVersion + 1;
  EXPECT_THROW(mlp_from_json(doc), std::invalid_argument);
}

TEST(TabularFn, UnseenIsZeroAndAddAccumulates) {
  TabularFn f(3);
  EXPECT_EQ(f.get("s", 1), (std::vector<double>{0, 0, 0}));
  f.add("s", 1, {1, 2, 3});
  f.add("s", 1, {1, 1, 1});
  EXPECT_EQ(f.get("s", 1), (std::vector<double>{2, 3, 4}));
  EXPECT_EQ(f.get("s", 0), (std::vector<double>{0, 0, 0}));
  EXPECT_THROW(f.set("s", 0, {1.0}), std::invalid_argument);
  EXPECT_EQ(f.size(), 1u);
}

}  // namespace
}  // namespace npm::approx
