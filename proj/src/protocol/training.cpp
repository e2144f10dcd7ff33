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

#include "svkit/protocol/training.hpp"

#include <cmath>

#include "svkit/error.hpp"
#include "svkit/nn/optim.hpp"
#include "svkit/zoo/models.hpp"

namespace svkit::protocol {

namespace {

struct Example {
  nn::TensorD input;
  Index label;
};

std::vector<Example> epoch_examples(const nn::Network& net,
                                    const std::vector<corpus::SpeakerUtterances>& speakers,
                                    nn::Rng& rng) {
  const bool cubes = net.spec().architecture == nn::Architecture::cnn3d;
  const Index zeta = net.spec().zeta;
  std::vector<Example> out;
  for (std::size_t s = 0; s < speakers.size(); ++s) {
    const auto& utts = speakers[s].utterances;
    if (!cubes) {
      for (const auto& u : utts) {
        out.push_back({zoo::network_input(net, u.map), static_cast<Index>(s)});
      }
      continue;
    }
    std::vector<std::size_t> order(utts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t start = 0; start + static_cast<std::size_t>(zeta) <= order.size();
         start += static_cast<std::size_t>(zeta)) {
      std::vector<dsp::Utterance> group;
      for (Index k = 0; k < zeta; ++k) group.push_back(utts[order[start + static_cast<std::size_t>(k)]]);
      out.push_back({zoo::network_input(net, dsp::build_feature_cube(group)),
                     static_cast<Index>(s)});
    }
  }
  rng.shuffle(out);
  return out;
}

}  // namespace

TrainResult train_development(nn::Network network,
                              const std::vector<corpus::SpeakerUtterances>& speakers,
                              const TrainConfig& config, const EpochCallback& on_epoch) {
  const auto& spec = network.spec();
  if (speakers.size() < 2) throw ConfigError("development needs at least 2 speakers");
  if (spec.n_classes != static_cast<Index>(speakers.size())) {
    throw ConfigError("network has " + std::to_string(spec.n_classes) +
                      " classes but the development set has " +
                      std::to_string(speakers.size()) + " speakers");
  }
  const Index need = spec.architecture == nn::Architecture::cnn3d ? spec.zeta : 1;
  for (const auto& s : speakers) {
    if (static_cast<Index>(s.utterances.size()) < need) {
      throw ConfigError("speaker " + s.speaker_id + " has " +
                        std::to_string(s.utterances.size()) +
                        " utterances, fewer than zeta=" + std::to_string(need));
    }
  }
  if (config.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (config.epochs < 0) throw ConfigError("epochs must be >= 0");

  nn::SgdMomentum optimizer({config.learning_rate, config.momentum});
  const nn::Rng root(config.seed);
  const std::size_t head = network.logits_end();
  TrainResult result{{network, {config.seed, 0}}, {}};

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    nn::Rng rng = root.fork(static_cast<std::uint64_t>(epoch) + 1);
    const auto examples = epoch_examples(network, speakers, rng);
    EpochStats stats;
    double loss_sum = 0.0;
    Index correct = 0;
    for (std::size_t start = 0; start < examples.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(examples.size(), start + static_cast<std::size_t>(config.batch_size));
      nn::Batch inputs;
      for (std::size_t i = start; i < end; ++i) inputs.push_back(examples[i].input);
      const nn::Batch logits = network.forward(std::move(inputs), nn::Mode::train, head);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      nn::Batch grads;
      for (std::size_t i = start; i < end; ++i) {
        const auto& z = logits[i - start];
        const auto x = nn::softmax_xent(z, examples[i].label);
        if (!std::isfinite(x.loss)) {
          throw NumericError("non-finite training loss at epoch " + std::to_string(epoch + 1));
        }
        loss_sum += x.loss;
        Eigen::Index arg = 0;
        z.values().maxCoeff(&arg);
        if (arg == examples[i].label) ++correct;
        nn::TensorD g = x.probs;
        g[examples[i].label] -= 1.0;
        g.values() *= inv_b;
        grads.push_back(std::move(g));
      }
      network.zero_grad();
      network.backward(std::move(grads), head);
      optimizer.step(network);
    }
    stats.examples = static_cast<Index>(examples.size());
    stats.loss = examples.empty() ? 0.0 : loss_sum / static_cast<double>(examples.size());
    stats.accuracy =
        examples.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(examples.size());
    result.history.push_back(stats);
    if (on_epoch) on_epoch(epoch + 1, stats);
  }
  result.checkpoint = {std::move(network), {config.seed, static_cast<std::uint32_t>(config.epochs)}};
  return result;
}

}  // namespace svkit::protocol
