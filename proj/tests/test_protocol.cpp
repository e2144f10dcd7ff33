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

#include <cmath>
#include <filesystem>

#include "metric_oracle.hpp"
#include "svkit/error.hpp"
#include "svkit/io/binary.hpp"
#include "svkit/protocol/evaluation.hpp"
#include "svkit/protocol/metrics.hpp"
#include "svkit/protocol/speaker_model.hpp"
#include "svkit/protocol/training.hpp"
#include "svkit/zoo/checkpoint.hpp"
#include "test_util.hpp"

using namespace svkit;
using namespace svkit::protocol;
using nn::Index;
using nn::Rng;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "svkit_test_protocol";
  fs::create_directories(dir);
  return dir / name;
}

Eigen::VectorXd random_unit(Index n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v / v.norm();
}

zoo::LcnOptions tiny_lcn() {
  zoo::LcnOptions o;
  o.units_per_patch = 2;
  o.hidden = 12;
  o.hidden_layers = 2;
  return o;
}

zoo::Cnn3dOptions tiny_cnn() {
  zoo::Cnn3dOptions o;
  o.depth = zoo::DepthMode::same;
  o.channels = {2, 2, 3, 3};
  o.embedding_dim = 8;
  return o;
}

// Speaker k's maps carry a +2 offset on one half of the bands plus noise.
std::vector<corpus::SpeakerUtterances> separable_speakers(int per_speaker, Rng& rng) {
  std::vector<corpus::SpeakerUtterances> out;
  for (int s = 0; s < 2; ++s) {
    corpus::SpeakerUtterances su{"spk" + std::to_string(s), {}};
    for (int u = 0; u < per_speaker; ++u) {
      dsp::FeatureMap m(80, 40);
      for (Index r = 0; r < 80; ++r)
        for (Index c = 0; c < 40; ++c) m(r, c) = rng.normal() + ((c < 20) == (s == 0) ? 2.0 : 0.0);
      su.utterances.push_back({su.speaker_id, su.speaker_id + "#" + std::to_string(u), m});
    }
    out.push_back(std::move(su));
  }
  return out;
}

std::vector<dsp::Utterance> random_utterances(const std::string& speaker, int n, Rng& rng) {
  std::vector<dsp::Utterance> out;
  for (int i = 0; i < n; ++i) {
    dsp::FeatureMap m(80, 40);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = rng.normal();
    out.push_back({speaker, speaker + "#" + std::to_string(i), m});
  }
  return out;
}

nn::Network warmed(nn::Network net, Rng& rng) {
  nn::Batch xs{testing::random_tensor(net.spec().input_shape, rng),
               testing::random_tensor(net.spec().input_shape, rng)};
  net.forward(xs, nn::Mode::train);
  return net;
}

}  // namespace

TEST_CASE("roc fixtures") {
  const std::vector<double> gen{0.9, 0.8}, imp{0.1, 0.2};
  const auto perfect = compute_roc(gen, imp);
  CHECK(perfect.eer == 0.0);
  CHECK(perfect.auc == 1.0);
  CHECK(perfect.points.front().tpr == 0.0);
  CHECK(perfect.points.back().far == 1.0);
  CHECK(std::isinf(perfect.points.front().tau));

  const auto chance = compute_roc(gen, gen);
  CHECK(chance.eer == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(chance.auc == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("PR points") {
    CHECK(perfect.pr.front().precision == 1.0);
    CHECK(perfect.pr[2].precision == 1.0);
    CHECK(perfect.pr[2].recall == 1.0);
    CHECK(perfect.pr.back().precision == 0.5);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(compute_roc(gen, std::vector<double>{}), MetricPreconditionError);
    CHECK_THROWS_AS(compute_roc(std::vector<double>{}, imp), MetricPreconditionError);
    CHECK_THROWS_AS(compute_roc(std::vector<double>{NAN}, imp), NumericError);
  }
}

TEST_CASE("roc agrees with exhaustive thresholds") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n_gen = 1 + rng.uniform_int(300);
    const auto n_imp = 1 + rng.uniform_int(300);
    const bool coarse = trial % 3 == 0;  // forces ties
    auto draw = [&](double mean) {
      const double v = rng.normal(mean, 1.0);
      return coarse ? std::round(v * 4.0) / 4.0 : v;
    };
    std::vector<double> gen, imp;
    for (std::uint64_t i = 0; i < n_gen; ++i) gen.push_back(draw(1.0));
    for (std::uint64_t i = 0; i < n_imp; ++i) imp.push_back(draw(0.0));
    const auto roc = compute_roc(gen, imp);
    const auto ref = oracle::roc_bruteforce(gen, imp);
    CHECK(std::abs(roc.eer - ref.eer) < 1e-9);
    CHECK(std::abs(roc.auc - ref.auc) < 1e-9);
    for (std::size_t k = 1; k < roc.points.size(); ++k) {
      CHECK(roc.points[k].tau < roc.points[k - 1].tau);
      CHECK(roc.points[k].tpr >= roc.points[k - 1].tpr);
      CHECK(roc.points[k].far >= roc.points[k - 1].far);
    }
    // AUC is a rank statistic.
    std::vector<double> gen2, imp2;
    for (double g : gen) gen2.push_back(std::exp(3.0 * g) + 1.0);
    for (double i : imp) imp2.push_back(std::exp(3.0 * i) + 1.0);
    CHECK(compute_roc(gen2, imp2).auc == doctest::Approx(roc.auc).epsilon(1e-12));
  }
}

TEST_CASE("identical distributions give EER near one half") {
  Rng rng(9);
  std::vector<double> gen(10000), imp(10000);
  for (auto& g : gen) g = rng.normal();
  for (auto& i : imp) i = rng.normal();
  const auto roc = compute_roc(gen, imp);
  CHECK(std::abs(roc.eer - 0.5) < 0.02);
  CHECK(std::abs(roc.auc - 0.5) < 0.02);
}

TEST_CASE("roc and score exports") {
  Rng rng(4);
  ScoreSet scores;
  for (int i = 0; i < 40; ++i) {
    const bool g = i % 4 == 0;
    scores.push_back({{"u" + std::to_string(i), "spk" + std::to_string(i % 3),
                       g ? TrialLabel::genuine : TrialLabel::impostor},
                      rng.uniform(-1.0, 1.0) + (g ? 0.5 : 0.0)});
  }
  const auto roc = compute_roc(scores);
  write_roc_csv(scratch("roc.csv"), roc);
  const auto back = read_roc_csv(scratch("roc.csv"));
  REQUIRE(back.points.size() == roc.points.size());
  for (std::size_t k = 0; k < roc.points.size(); ++k) {
    CHECK(back.points[k].tau == roc.points[k].tau);
    CHECK(back.points[k].tpr == roc.points[k].tpr);
    CHECK(back.points[k].far == roc.points[k].far);
  }
  CHECK(back.eer == roc.eer);
  CHECK(back.auc == roc.auc);
  CHECK(std::abs(eer_from_points(back.points) - back.eer) < 1e-9);
  CHECK(std::abs(auc_from_points(back.points) - back.auc) < 1e-9);

  write_score_log(scratch("scores.csv"), scores);
  const auto log = read_score_log(scratch("scores.csv"));
  REQUIRE(log.size() == scores.size());
  for (std::size_t k = 0; k < log.size(); ++k) {
    CHECK(log[k].trial.utterance_id == scores[k].trial.utterance_id);
    CHECK(log[k].trial.claimed_id == scores[k].trial.claimed_id);
    CHECK(log[k].trial.label == scores[k].trial.label);
    CHECK(log[k].score == scores[k].score);
  }
  io::write_file(scratch("bad.csv"), "u,c,maybe,0.5\n");
  CHECK_THROWS_AS(read_score_log(scratch("bad.csv")), ParseError);
}

TEST_CASE("cosine scoring") {
  Rng rng(12);
  const auto a = random_unit(128, rng);
  const auto b = random_unit(128, rng);
  SpeakerModel m{"x", a, 1, ModelKind::d_vector_avg};
  zoo::Embedding same{a, "x", {}, true};
  CHECK(score_trial(m, same) == doctest::Approx(1.0).epsilon(1e-15));
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(128), e2 = e1;
  e1[0] = 1.0;
  e2[1] = 1.0;
  CHECK(cosine_score(e1, e2) == 0.0);
  double direct = 0.0;
  for (Index i = 0; i < 128; ++i) direct += a[i] * b[i];
  CHECK(std::abs(cosine_score(a, b) - direct) < 1e-15);
  CHECK(cosine_score(a, b) == cosine_score(b, a));
  CHECK_THROWS_AS(cosine_score(2.0 * a, b), ConfigError);
  CHECK_THROWS_AS(cosine_score(a, Eigen::VectorXd(b.head(64) / b.head(64).norm())),
                  ConfigError);
}

TEST_CASE("averaging unit vectors") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4), e2 = e1;
  e1[0] = 1.0;
  e2[1] = 1.0;
  const std::vector<Eigen::VectorXd> pair{e1, e2};
  const auto avg = average_unit_vectors(pair);
  CHECK(avg[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(avg[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(avg[2] == 0.0);
  CHECK_THROWS_AS(average_unit_vectors(std::vector<Eigen::VectorXd>{}), ConfigError);
  CHECK_THROWS_AS(average_unit_vectors(std::vector<Eigen::VectorXd>{e1, -e1}), NumericError);
}

TEST_CASE("d-vector enrollment") {
  Rng rng(17);
  const auto net = zoo::build_lcn_baseline(3, rng, tiny_lcn());
  auto utts = random_utterances("alice", 5, rng);
  const auto single = enroll_dvector(net, std::span(utts).first(1));
  const auto own = zoo::embed(net, zoo::network_input(net, utts[0].map));
  CHECK((single.embedding - own.values).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(single.kind == ModelKind::d_vector_avg);
  CHECK(single.speaker_id == "alice");

  const std::vector<dsp::Utterance> same(4, utts[0]);
  CHECK((enroll_dvector(net, same).embedding - own.values).cwiseAbs().maxCoeff() < 1e-15);

  const auto forward = enroll_dvector(net, utts);
  std::reverse(utts.begin(), utts.end());
  const auto backward = enroll_dvector(net, utts);
  CHECK((forward.embedding - backward.embedding).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(forward.embedding.norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(enroll_dvector(net, std::vector<dsp::Utterance>{}), ConfigError);
}

TEST_CASE("one-shot enrollment") {
  Rng rng(19);
  const auto net = warmed(zoo::build_3dcnn(3, 3, rng, tiny_cnn()), rng);
  const auto utts = random_utterances("bob", 7, rng);
  const auto model = enroll_one_shot(net, std::span(utts).first(3));
  const auto cube = dsp::build_feature_cube(std::span(utts).first(3));
  CHECK(model.embedding == zoo::embed(net, cube.data).values);
  CHECK(model.kind == ModelKind::one_shot_3d);
  CHECK(model.zeta == 3);
  CHECK(model.speaker_id == "bob");
  CHECK_THROWS_AS(enroll_one_shot(net, std::span(utts).first(2)), ConfigError);
  CHECK_THROWS_AS(enroll_one_shot(net, utts), ConfigError);

  // Order defines the cube; a permutation yields a different input.
  std::vector<dsp::Utterance> permuted{utts[2], utts[0], utts[1]};
  CHECK_FALSE(dsp::build_feature_cube(permuted).data == cube.data);

  const auto two = enroll_one_shot_averaged(net, utts, 0);
  const auto second = enroll_one_shot(net, std::span(utts).subspan(3, 3));
  const std::vector<Eigen::VectorXd> both{model.embedding, second.embedding};
  CHECK((two.embedding - average_unit_vectors(both)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(enroll_one_shot_averaged(net, utts, 1) == model);

  const auto lcn = zoo::build_lcn_baseline(3, rng, tiny_lcn());
  CHECK_THROWS_AS(enroll_one_shot(lcn, std::span(utts).first(1)), ConfigError);
}

TEST_CASE("one-vs-all evaluation") {
  Rng rng(23);
  const auto net = zoo::build_lcn_baseline(3, rng, tiny_lcn());
  std::vector<corpus::SpeakerUtterances> enrolled;
  std::vector<dsp::Utterance> tests;
  for (const char* id : {"a", "b", "c", "d"}) {
    enrolled.push_back({id, random_utterances(id, 2, rng)});
    auto t = random_utterances(id, 3, rng);
    tests.insert(tests.end(), t.begin(), t.end());
  }
  const auto models = enroll_speakers(net, enrolled, {EnrollMode::d_vector, 0});
  REQUIRE(models.size() == 4);
  const auto result = run_evaluation(models, tests, net);
  CHECK(result.scores.size() == 4 * 12);
  CHECK(result.roc.n_genuine == 12);
  CHECK(result.roc.n_impostor == 36);
  for (const auto& s : result.scores) {
    const bool own = s.trial.utterance_id.substr(0, 1) == s.trial.claimed_id;
    CHECK(own == (s.trial.label == TrialLabel::genuine));
  }

  const std::vector<SpeakerModel> partial(models.begin(), models.begin() + 3);
  CHECK_THROWS_AS(run_evaluation(partial, tests, net), ConfigError);
  const std::vector<SpeakerModel> solo{models[0]};
  const std::vector<dsp::Utterance> solo_tests{tests[0]};
  CHECK_THROWS_AS(run_evaluation(solo, solo_tests, net), MetricPreconditionError);
}

TEST_CASE("development training") {
  Rng data_rng(31);
  const auto speakers = separable_speakers(12, data_rng);
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.learning_rate = 0.001;
  cfg.batch_size = 4;
  cfg.seed = 5;

  SUBCASE("baseline separates a linearly separable fixture") {
    Rng rng(5);
    const auto net = zoo::build_lcn_baseline(2, rng, tiny_lcn());
    const auto result = train_development(net, speakers, cfg);
    REQUIRE(result.history.size() == 15);
    CHECK(result.history.back().accuracy > 0.95);
    CHECK(result.history.back().loss < result.history.front().loss);
  }
  SUBCASE("3D-CNN separates a linearly separable fixture") {
    Rng rng(5);
    const auto net = zoo::build_3dcnn(2, 2, rng, tiny_cnn());
    cfg.learning_rate = 0.01;
    cfg.batch_size = 2;
    const auto result = train_development(net, speakers, cfg);
    CHECK(result.history.back().accuracy > 0.95);
  }
  SUBCASE("zero epochs return the initialization") {
    Rng rng(5);
    const auto net = zoo::build_lcn_baseline(2, rng, tiny_lcn());
    cfg.epochs = 0;
    const auto result = train_development(net, speakers, cfg);
    CHECK(result.history.empty());
    CHECK(zoo::serialize_checkpoint(result.checkpoint) ==
          zoo::serialize_checkpoint({net, {cfg.seed, 0}}));
  }
  SUBCASE("fixed seed reproduces the loss history") {
    Rng r1(5), r2(5);
    cfg.epochs = 3;
    const auto a = train_development(zoo::build_lcn_baseline(2, r1, tiny_lcn()), speakers, cfg);
    const auto b = train_development(zoo::build_lcn_baseline(2, r2, tiny_lcn()), speakers, cfg);
    for (std::size_t k = 0; k < 3; ++k) CHECK(a.history[k].loss == b.history[k].loss);
    CHECK(zoo::serialize_checkpoint(a.checkpoint) == zoo::serialize_checkpoint(b.checkpoint));
  }
  SUBCASE("preconditions") {
    Rng rng(5);
    CHECK_THROWS_AS(train_development(zoo::build_lcn_baseline(3, rng, tiny_lcn()), speakers, cfg),
                    ConfigError);
    auto few = speakers;
    few[1].utterances.resize(1);
    CHECK_THROWS_AS(train_development(zoo::build_3dcnn(2, 2, rng, tiny_cnn()), few, cfg),
                    ConfigError);
  }
}

TEST_CASE("speaker model files") {
  Rng rng(41);
  std::vector<SpeakerModel> models;
  for (int i = 0; i < 10; ++i) {
    models.push_back({"spk" + std::to_string(i), random_unit(128, rng), 10,
                      i % 2 ? ModelKind::one_shot_3d : ModelKind::d_vector_avg});
  }
  write_speaker_models(scratch("models.svsm"), models);
  const auto back = read_speaker_models(scratch("models.svsm"));
  CHECK(back == models);
  write_speaker_models(scratch("models2.svsm"), back);
  CHECK(io::read_file(scratch("models.svsm")) == io::read_file(scratch("models2.svsm")));

  const std::string good = serialize_speaker_models(models);
  std::string bad = good;
  bad[good.size() - 100] = static_cast<char>(bad[good.size() - 100] ^ 1);
  CHECK_THROWS_AS(deserialize_speaker_models(bad), ChecksumError);
  CHECK_THROWS_AS(deserialize_speaker_models(""), TruncatedError);
  CHECK_THROWS_AS(deserialize_speaker_models(good.substr(0, good.size() - 3)), TruncatedError);
  bad = good;
  bad[4] = 2;
  CHECK_THROWS_AS(deserialize_speaker_models(bad), VersionError);
}
