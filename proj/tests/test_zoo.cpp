// Copyright (c) 2026 The svkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <filesystem>
#include <string>

#include "oracles.hpp"
#include "svkit/error.hpp"
#include "svkit/io/binary.hpp"
#include "svkit/nn/gradcheck.hpp"
#include "svkit/zoo/checkpoint.hpp"
#include "svkit/zoo/models.hpp"
#include "test_util.hpp"
#include "zoo_oracle.hpp"

using namespace svkit;
using nn::Index;
using nn::Mode;
using nn::Rng;
using nn::Shape;
using nn::TensorD;

namespace {

zoo::Cnn3dOptions reduced_options() {
  zoo::Cnn3dOptions o;
  o.depth = zoo::DepthMode::same;
  o.channels = {2, 2, 3, 3};
  o.embedding_dim = 6;
  return o;
}

// Runs one train-mode batch so batchnorm layers hold running statistics.
void warm_up(nn::Network& net, Rng& rng, int batch = 2) {
  nn::Batch xs;
  for (int i = 0; i < batch; ++i) {
    xs.push_back(testing::random_tensor(net.spec().input_shape, rng));
  }
  net.forward(xs, Mode::train);
}

struct Block {
  Index kd, kh, kw, cin, cout;
};

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "svkit_test_zoo";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("3D-CNN layer extents at zeta 20") {
  Rng rng(11);
  auto net = zoo::build_3dcnn(20, 20, rng);
  struct Row {
    const char* name;
    Index depth, time, freq, channels;
  };
  const Row rows[] = {
      {"conv1_1", 18, 80, 36, 16}, {"conv1_2", 16, 36, 36, 16},
      {"pool1", 16, 36, 18, 16},   {"conv2_1", 14, 36, 15, 32},
      {"conv2_2", 12, 15, 15, 32}, {"pool2", 12, 15, 7, 32},
      {"conv3_1", 10, 15, 5, 64},  {"conv3_2", 8, 9, 5, 64},
      {"conv4_1", 6, 9, 3, 128},   {"conv4_2", 4, 3, 3, 128},
  };
  nn::Batch x{testing::random_tensor({20, 80, 40, 1}, rng)};
  std::size_t next = 0;
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    x = net.layer(i).forward(x, Mode::train);
    if (next < std::size(rows) && net.layer(i).spec().name == rows[next].name) {
      const auto& r = rows[next];
      const Shape want{r.depth, r.time, r.freq, r.channels};
      INFO(r.name, " ", nn::shape_string(x.front().shape()));
      CHECK(x.front().shape() == want);
      ++next;
    }
    if (net.layer(i).spec().name == "fc5") break;
  }
  CHECK(next == std::size(rows));
  CHECK(net.layer(0).spec().pad_depth == false);
  CHECK(zoo::embedding_dim(net) == 128);

  const auto& fc5 = [&]() -> const nn::Layer& {
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
      if (net.layer(i).spec().name == "fc5") return net.layer(i);
    }
    throw std::runtime_error("fc5 missing");
  }();
  CHECK(fc5.parameter("weight").value.shape() == Shape{128, 4 * 3 * 3 * 128});
  CHECK(fc5.input_shape() == Shape{4, 3, 3, 128});
}

TEST_CASE("3D-CNN depth handling") {
  Rng rng(3);
  SUBCASE("same padding at zeta 5 keeps depth 5") {
    const auto spec = zoo::cnn3d_spec(5, 10, {});
    nn::Network net(spec);
    const auto trace = net.shape_trace();
    CHECK(net.layer(0).spec().pad_depth);
    for (std::size_t i = 0; i < trace.size() && trace[i].size() == 4; ++i) {
      CHECK(trace[i][0] == 5);
    }
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
      if (net.layer(i).spec().name == "fc5") {
        CHECK(nn::shape_size(net.layer(i).input_shape()) == 5760);
      }
    }
  }
  SUBCASE("auto picks valid from zeta 17") {
    CHECK(zoo::pads_depth(16, zoo::DepthMode::automatic));
    CHECK_FALSE(zoo::pads_depth(17, zoo::DepthMode::automatic));
    CHECK_THROWS_AS(zoo::pads_depth(10, zoo::DepthMode::valid), ConfigError);
    CHECK(zoo::pads_depth(40, zoo::DepthMode::same));
  }
  SUBCASE("parse") {
    CHECK(zoo::parse_depth_mode("same") == zoo::DepthMode::same);
    CHECK_THROWS_AS(zoo::parse_depth_mode("full"), ConfigError);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(zoo::cnn3d_spec(0, 10), ConfigError);
    CHECK_THROWS_AS(zoo::cnn3d_spec(5, 1), ConfigError);
  }
}

TEST_CASE("3D-CNN layer order and parameter count") {
  const auto spec = zoo::cnn3d_spec(20, 511);
  nn::Network net(spec);
  // conv -> batchnorm -> prelu triples, then PReLU after fc5 and a plain head.
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (spec.layers[i].kind == nn::LayerKind::conv3d) {
      CHECK(spec.layers[i + 1].kind == nn::LayerKind::batchnorm);
      CHECK(spec.layers[i + 2].kind == nn::LayerKind::prelu);
    }
  }
  CHECK(spec.layers.back().kind == nn::LayerKind::softmax);
  CHECK(spec.layers[spec.layers.size() - 2].units == 511);
  CHECK(spec.layers[static_cast<std::size_t>(spec.embedding_end) - 1].kind ==
        nn::LayerKind::prelu);

  const Block blocks[] = {{3, 1, 5, 1, 16},   {3, 9, 1, 16, 16}, {3, 1, 4, 16, 32},
                          {3, 8, 1, 32, 32},  {3, 1, 3, 32, 64}, {3, 7, 1, 64, 64},
                          {3, 1, 3, 64, 128}, {3, 7, 1, 128, 128}};
  Index expected = 0;
  for (const auto& b : blocks) {
    expected += b.kd * b.kh * b.kw * b.cin * b.cout + b.cout;  // conv
    expected += 2 * b.cout;                                    // bn scale, shift
    expected += b.cout;                                        // prelu
  }
  expected += 4608 * 128 + 128 + 128;  // fc5 + prelu
  expected += 128 * 511 + 511;         // head
  CHECK(net.learnable_count() == expected);
}

TEST_CASE("LCN baseline") {
  Rng rng(5);
  const Index n = 20;
  auto net = zoo::build_lcn_baseline(n, rng);
  const auto trace = net.shape_trace();
  CHECK(trace[0] == Shape{10, 5, 16});
  CHECK(nn::shape_size(trace[0]) == 800);
  std::vector<Index> dense_widths;
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    if (net.layer(i).spec().kind == nn::LayerKind::fully_connected) {
      dense_widths.push_back(nn::shape_size(net.layer(i).output_shape()));
    }
  }
  CHECK(dense_widths == std::vector<Index>{256, 256, 256, n});
  CHECK(zoo::embedding_dim(net) == 256);

  const Index lc = 50 * 16 * 64 + 800 + 16;
  const Index fc1 = 800 * 256 + 256 + 256;
  const Index fc23 = 2 * (256 * 256 + 256 + 256);
  const Index head = 256 * n + n;
  CHECK(net.learnable_count() == lc + fc1 + fc23 + head);

  SUBCASE("zero input with zero biases gives a uniform softmax") {
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
      for (auto& p : net.layer(i).parameters()) {
        if (p.name == "bias") p.value.values().setZero();
      }
    }
    const auto probs = net.infer({TensorD({80, 40})}).front();
    for (Index k = 0; k < n; ++k) CHECK(probs[k] == doctest::Approx(1.0 / n).epsilon(1e-15));
  }
  CHECK_THROWS_AS(zoo::build_lcn_baseline(1, rng), ConfigError);
}

TEST_CASE("forward and embed") {
  Rng rng(21);
  auto net = zoo::build_3dcnn(3, 4, rng, reduced_options());
  warm_up(net, rng);
  const TensorD x = testing::random_tensor(net.spec().input_shape, rng);

  const TensorD logits = zoo::forward(net, x);
  CHECK(logits.size() == 4);
  CHECK(zoo::forward(net, x) == logits);

  SUBCASE("matches layer-by-layer composition") {
    const TensorD manual = oracle::compose_infer(net, x, net.logits_end());
    CHECK(testing::relative_error(logits, manual) < 1e-12);
    const TensorD probs = net.infer({x}).front();
    const TensorD manual_probs = oracle::compose_infer(net, x, net.layer_count());
    CHECK(testing::relative_error(probs, manual_probs) < 1e-12);
  }
  SUBCASE("embedding is the normalized truncated forward") {
    const auto e = zoo::embed(net, x);
    CHECK(e.normalized);
    CHECK(e.values.size() == 6);
    CHECK(std::abs(e.values.norm() - 1.0) < 1e-12);
    const TensorD raw =
        oracle::compose_infer(net, x, static_cast<std::size_t>(net.spec().embedding_end));
    const Eigen::VectorXd expected = raw.values() / raw.values().norm();
    CHECK((e.values - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("LCN embedding composition") {
    auto lcn = zoo::build_lcn_baseline(3, rng);
    const TensorD m = testing::random_tensor({80, 40}, rng);
    const auto e = zoo::embed(lcn, m);
    const TensorD raw = oracle::compose_infer(
        lcn, m, static_cast<std::size_t>(lcn.spec().embedding_end));
    CHECK((e.values - raw.values() / raw.values().norm()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(zoo::forward(net, TensorD({2, 80, 40, 1})), DimensionError);
    CHECK_THROWS_AS(zoo::embed(net, TensorD({3, 80, 41, 1})), DimensionError);
  }
  SUBCASE("untrained batchnorm refuses inference") {
    auto fresh = zoo::build_3dcnn(3, 4, rng, reduced_options());
    CHECK_THROWS_AS(zoo::embed(fresh, x), ConfigError);
  }
}

TEST_CASE("network inputs") {
  Rng rng(8);
  auto net = zoo::build_3dcnn(4, 3, rng, reduced_options());
  dsp::FeatureMap map = dsp::FeatureMap::Random(80, 40);
  const TensorD rep = zoo::network_input(net, map);
  CHECK(rep.shape() == Shape{4, 80, 40, 1});
  for (Index d = 0; d < 4; ++d) CHECK(rep(d, 17, 23, 0) == map(17, 23));

  std::vector<dsp::Utterance> utts;
  for (int i = 0; i < 3; ++i) utts.push_back({"spk", "u" + std::to_string(i), map});
  const auto cube = dsp::build_feature_cube(utts);
  CHECK_THROWS_AS(zoo::network_input(net, cube), ConfigError);

  auto lcn = zoo::build_lcn_baseline(3, rng);
  CHECK(zoo::network_input(lcn, map).shape() == Shape{80, 40});
  CHECK_THROWS_AS(zoo::network_input(lcn, dsp::FeatureMap(79, 40)), DimensionError);
}

TEST_CASE("reduced 3D-CNN gradient check") {
  Rng rng(13);
  zoo::Cnn3dOptions o = reduced_options();
  o.channels = {2, 2, 2, 2};
  o.embedding_dim = 4;
  auto net = zoo::build_3dcnn(2, 3, rng, o);
  const nn::Batch xs{testing::random_tensor(net.spec().input_shape, rng)};
  Rng probe(14);
  const auto report = nn::finite_diff_check(net, xs, 1e-6, probe);
  INFO("worst " << report.worst);
  CHECK(report.max_error() < 1e-4);
}

TEST_CASE("checkpoint round trip") {
  Rng rng(31);
  auto net = zoo::build_3dcnn(3, 5, rng, reduced_options());
  warm_up(net, rng);
  const zoo::Checkpoint ck{net, {77, 12}};
  const auto path = temp_path("ck.sv3d");
  zoo::save_checkpoint(ck, path);
  const auto loaded = zoo::load_checkpoint(path);
  CHECK(loaded.meta.seed == 77);
  CHECK(loaded.meta.epoch == 12);
  CHECK(loaded.network.spec().zeta == 3);
  CHECK(loaded.network.spec().layers == net.spec().layers);
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    const auto& a = net.layer(i).parameters();
    const auto& b = loaded.network.layer(i).parameters();
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].value == b[k].value);
  }
  const auto path2 = temp_path("ck2.sv3d");
  zoo::save_checkpoint(loaded, path2);
  CHECK(io::read_file(path) == io::read_file(path2));

  const TensorD x = testing::random_tensor(net.spec().input_shape, rng);
  CHECK(zoo::forward(loaded.network, x) == zoo::forward(net, x));

  auto lcn = zoo::build_lcn_baseline(4, rng);
  const auto bytes = zoo::serialize_checkpoint({lcn, {1, 0}});
  CHECK(zoo::serialize_checkpoint(zoo::deserialize_checkpoint(bytes)) == bytes);
}

TEST_CASE("checkpoint errors are distinct") {
  Rng rng(32);
  auto net = zoo::build_lcn_baseline(3, rng);
  const std::string good = zoo::serialize_checkpoint({net, {}});

  CHECK_THROWS_AS(zoo::deserialize_checkpoint(""), TruncatedError);
  CHECK_THROWS_AS(zoo::deserialize_checkpoint(good.substr(0, good.size() - 9)),
                  TruncatedError);
  std::string bad = good;
  bad[good.size() / 2] = static_cast<char>(bad[good.size() / 2] ^ 0x10);
  CHECK_THROWS_AS(zoo::deserialize_checkpoint(bad), ChecksumError);
  bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(zoo::deserialize_checkpoint(bad), FormatError);
  bad = good;
  bad[4] = 9;
  CHECK_THROWS_AS(zoo::deserialize_checkpoint(bad), VersionError);
  CHECK_THROWS_AS(zoo::load_checkpoint(temp_path("absent.sv3d")), IoError);

  const auto path = temp_path("empty.sv3d");
  io::write_file(path, "");
  CHECK_THROWS_AS(zoo::load_checkpoint(path), TruncatedError);
}

TEST_CASE("model summary mirrors the layer table") {
  const nn::Network net(zoo::cnn3d_spec(20, 511));
  const std::string s = zoo::model_summary(net);
  CHECK(s.find("conv1_1") != std::string::npos);
  CHECK(s.find("3x1x5") != std::string::npos);
  CHECK(s.find("4x3x3x128") != std::string::npos);
  CHECK(s.find("128 values") != std::string::npos);
}
