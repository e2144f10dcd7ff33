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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "svkit/corpus/dataset.hpp"
#include "svkit/corpus/manifest.hpp"
#include "svkit/corpus/split.hpp"
#include "svkit/corpus/synth.hpp"
#include "svkit/error.hpp"
#include "svkit/io/binary.hpp"
#include "svkit/protocol/evaluation.hpp"
#include "svkit/protocol/speaker_model.hpp"
#include "svkit/protocol/training.hpp"
#include "svkit/zoo/checkpoint.hpp"
#include "svkit/zoo/models.hpp"

namespace svkit::cli {
namespace {

namespace fs = std::filesystem;

const std::map<std::string, ModelChoice> kModelNames{{"cnn3d", ModelChoice::cnn3d},
                                                     {"lcn_dvector", ModelChoice::lcn_dvector}};
const std::map<std::string, protocol::EnrollMode> kEnrollModes{
    {"one-shot", protocol::EnrollMode::one_shot}, {"d-vector", protocol::EnrollMode::d_vector}};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Splices key=value lines from --config between the subcommand and its flags.
// Keys given on the command line are skipped, so flags take precedence.
std::vector<std::string> merge_config_file(const std::vector<std::string>& args) {
  std::optional<std::string> config;
  std::set<std::string> given;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") {
      if (eq != std::string::npos) {
        config = a.substr(eq + 1);
      } else if (i + 1 < args.size()) {
        config = args[i + 1];
      }
    }
  }
  if (!config || args.size() < 2) return args;
  if (!fs::is_regular_file(*config)) throw ConfigError("config file not found: " + *config);

  std::vector<std::string> merged{args[0], args[1]};
  std::istringstream in(io::read_file(*config));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(*config, line_no, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() || key == "config") throw ParseError(*config, line_no, "invalid key");
    if (given.contains(key)) continue;
    merged.push_back("--" + key);
    merged.push_back(trim(line.substr(eq + 1)));
  }
  merged.insert(merged.end(), args.begin() + 2, args.end());
  return merged;
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw ConfigError(std::string(what) + " not found: " + path.string());
  }
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) ensure_directory(file.parent_path());
}

void validate(const RunConfig& c) {
  if (c.zeta < 1) throw ConfigError("zeta must be >= 1");
  if (!(c.learning_rate > 0.0)) throw ConfigError("lr must be > 0");
  if (c.momentum < 0.0 || c.momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
  if (c.batch_size < 1) throw ConfigError("batch must be >= 1");
  if (c.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (c.max_slices < 0) throw ConfigError("max-slices must be >= 0");
}

// Seed precedence: --seed flag, then config file, then SVKIT_SEED, then 0.
void resolve_seed(const CLI::Option* opt, RunConfig& c) {
  if (opt->count() > 0) return;
  const char* env = std::getenv("SVKIT_SEED");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') {
    throw ConfigError(std::string("SVKIT_SEED is not an unsigned integer: ") + env);
  }
  c.seed = v;
}

corpus::ExperimentData load_experiment(const RunConfig& c) {
  require_file(c.manifest, "manifest");
  const auto entries = corpus::load_manifest(c.manifest);
  const auto plan = corpus::split_enroll_eval(entries, c.seed);
  corpus::ExtractConfig ec;
  ec.max_slices_per_recording = c.max_slices;
  return corpus::prepare_experiment(entries, plan, ec);
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

nn::Network build_network(const RunConfig& c, nn::Index n_classes) {
  nn::Rng rng(c.seed);
  if (c.model == ModelChoice::lcn_dvector) return zoo::build_lcn_baseline(n_classes, rng);
  zoo::Cnn3dOptions opts;
  opts.depth = zoo::parse_depth_mode(c.depth);
  return zoo::build_3dcnn(c.zeta, n_classes, rng, opts);
}

zoo::Checkpoint train_and_save(const RunConfig& c, const corpus::ExperimentData& data,
                               const fs::path& checkpoint, const fs::path& loss_log,
                               std::ostream& out) {
  const auto n_classes = static_cast<nn::Index>(data.development.size());
  if (n_classes < 2) throw ConfigError("training needs at least 2 development speakers");
  const auto net = build_network(c, n_classes);

  ensure_parent(checkpoint);
  ensure_parent(loss_log);
  std::ofstream log(loss_log, std::ios::trunc);
  if (!log) throw IoError("cannot write " + loss_log.string());
  log << "epoch,loss,accuracy,examples\n";

  protocol::TrainConfig tc;
  tc.learning_rate = c.learning_rate;
  tc.momentum = c.momentum;
  tc.batch_size = c.batch_size;
  tc.epochs = c.epochs;
  tc.seed = c.seed;
  const auto result = protocol::train_development(
      net, data.development, tc, [&](int epoch, const protocol::EpochStats& s) {
        log << epoch << ',' << fmt("%.17g", s.loss) << ',' << fmt("%.17g", s.accuracy) << ','
            << s.examples << '\n';
        log.flush();
        out << "epoch " << epoch << " loss " << fmt("%.6f", s.loss) << " accuracy "
            << fmt("%.4f", s.accuracy) << '\n';
      });
  if (!log) throw IoError("cannot write " + loss_log.string());
  zoo::save_checkpoint(result.checkpoint, checkpoint);
  return result.checkpoint;
}

void write_report(const fs::path& dir, const protocol::EvaluationResult* eval,
                  const protocol::RocSummary& roc, long zeta, const std::string& kind) {
  ensure_directory(dir);
  io::write_file(dir / "metrics.json", format_metrics_json(roc, zeta, kind));
  protocol::write_roc_csv(dir / "roc.csv", roc);
  io::write_file(dir / "roc.svg", render_roc_svg(roc));
  if (eval != nullptr) protocol::write_score_log(dir / "scores.csv", eval->scores);
}

protocol::EvaluationResult evaluate_models(const nn::Network& net,
                                           const std::vector<protocol::SpeakerModel>& models,
                                           const corpus::ExperimentData& data) {
  if (models.empty()) throw ConfigError("no speaker models to evaluate");
  return protocol::run_evaluation(models, data.evaluation, net);
}

// ----- command bodies -----

void cmd_synth(const RunConfig& c, int speakers, int utterances, std::ostream& out) {
  if (speakers < 2) throw ConfigError("synth needs at least 2 speakers");
  if (utterances < 1) throw ConfigError("synth needs at least 1 utterance per speaker");
  corpus::SynthConfig sc;
  sc.n_development = c.n_dev_speakers;
  const auto entries = corpus::make_synthetic_corpus(speakers, utterances, c.seed, c.out, sc);
  out << "wrote " << entries.size() << " recordings to "
      << (c.out / corpus::kManifestFileName).string() << '\n';
}

void cmd_train(const RunConfig& c, fs::path loss_log, std::ostream& out) {
  if (loss_log.empty()) loss_log = fs::path(c.out.string() + ".loss.csv");
  const auto data = load_experiment(c);
  train_and_save(c, data, c.out, loss_log, out);
  out << "checkpoint " << c.out.string() << '\n';
}

void cmd_enroll(const RunConfig& c, bool zeta_given, const std::string& mode_name,
                long max_cubes, std::ostream& out) {
  require_file(c.checkpoint, "checkpoint");
  require_file(c.manifest, "manifest");
  const auto ckpt = zoo::load_checkpoint(c.checkpoint);
  const auto& spec = ckpt.network.spec();
  const bool is_3d = spec.architecture == nn::Architecture::cnn3d;
  if (zeta_given && is_3d && c.zeta != spec.zeta) {
    throw ConfigError("zeta " + std::to_string(c.zeta) + " does not match checkpoint zeta " +
                      std::to_string(spec.zeta));
  }
  if (max_cubes < 0) throw ConfigError("max-cubes must be >= 0");
  protocol::EnrollConfig ec;
  ec.mode = is_3d ? protocol::EnrollMode::one_shot : protocol::EnrollMode::d_vector;
  if (!mode_name.empty()) ec.mode = kEnrollModes.at(mode_name);
  ec.max_cubes = max_cubes;
  const auto data = load_experiment(c);
  const auto models = protocol::enroll_speakers(ckpt.network, data.enrollment, ec);
  ensure_parent(c.out);
  protocol::write_speaker_models(c.out, models);
  out << "enrolled " << models.size() << " speakers into " << c.out.string() << '\n';
}

void cmd_evaluate(const RunConfig& c, const fs::path& scores_path, std::ostream& out) {
  if (!scores_path.empty()) {
    require_file(scores_path, "score log");
    const auto scores = protocol::read_score_log(scores_path);
    write_report(c.out, nullptr, protocol::compute_roc(scores), -1, "");
    out << "eer " << fmt("%.6f", protocol::compute_roc(scores).eer) << '\n';
    return;
  }
  require_file(c.checkpoint, "checkpoint");
  require_file(c.models, "speaker-model file");
  require_file(c.manifest, "manifest");
  const auto ckpt = zoo::load_checkpoint(c.checkpoint);
  const auto models = protocol::read_speaker_models(c.models);
  const auto data = load_experiment(c);
  const auto result = evaluate_models(ckpt.network, models, data);
  write_report(c.out, &result, result.roc, static_cast<long>(ckpt.network.spec().zeta),
               protocol::to_string(models.front().kind));
  out << "eer " << fmt("%.6f", result.roc.eer) << " auc " << fmt("%.6f", result.roc.auc) << '\n';
}

void cmd_zeta_sweep(RunConfig c, std::vector<long> zetas, long max_cubes, std::ostream& out) {
  if (zetas.empty()) throw ConfigError("zeta-sweep needs at least one zeta");
  if (max_cubes < 0) throw ConfigError("max-cubes must be >= 0");
  std::sort(zetas.begin(), zetas.end());
  zetas.erase(std::unique(zetas.begin(), zetas.end()), zetas.end());
  for (long z : zetas) {
    if (z < 1) throw ConfigError("zeta must be >= 1");
    zoo::pads_depth(z, zoo::parse_depth_mode(c.depth));
  }
  c.model = ModelChoice::cnn3d;
  const auto data = load_experiment(c);
  ensure_directory(c.out);

  std::string table = "zeta  EER(%)  AUC(%)\n";
  for (long z : zetas) {
    c.zeta = z;
    const fs::path dir = c.out / ("zeta_" + std::to_string(z));
    out << "zeta " << z << '\n';
    const auto ckpt = train_and_save(c, data, dir / "checkpoint.sv3d", dir / "loss.csv", out);
    const auto models = protocol::enroll_speakers(
        ckpt.network, data.enrollment, {protocol::EnrollMode::one_shot, max_cubes});
    protocol::write_speaker_models(dir / "models.svsm", models);
    const auto result = evaluate_models(ckpt.network, models, data);
    write_report(dir, &result, result.roc, z, protocol::to_string(models.front().kind));
    char row[64];
    std::snprintf(row, sizeof row, "%4ld  %6.2f  %6.2f\n", z, 100.0 * result.roc.eer,
                  100.0 * result.roc.auc);
    table += row;
  }
  io::write_file(c.out / "zeta_sweep.txt", table);
  out << table;
}

// ----- flag wiring -----

void add_seed(CLI::App* cmd, RunConfig& c, CLI::Option** seed_opt) {
  *seed_opt = cmd->add_option("--seed", c.seed, "Random seed (fallback: SVKIT_SEED, then 0)");
  cmd->add_option("--config", "Optional key=value file; command-line flags take precedence");
}

void add_training_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--depth", c.depth, "Depth padding: auto, valid or same")
      ->check(CLI::IsMember({"auto", "valid", "same"}))
      ->capture_default_str();
  cmd->add_option("--lr", c.learning_rate, "SGD learning rate")->capture_default_str();
  cmd->add_option("--momentum", c.momentum, "SGD momentum")->capture_default_str();
  cmd->add_option("--batch", c.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
}

void add_data_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--manifest", c.manifest, "Corpus manifest.csv")->required();
  cmd->add_option("--max-slices", c.max_slices, "Slices kept per recording (0 keeps all)")
      ->capture_default_str();
}

int dispatch(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  CLI::App app{"svkit: text-independent speaker verification toolkit", "svkit"};
  app.require_subcommand(1);
  RunConfig c;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus and manifest");
  int speakers = 0, utterances = 0;
  synth->add_option("--speakers", speakers, "Number of speakers")->required();
  synth->add_option("--utterances", utterances, "Recordings per speaker")->required();
  synth->add_option("--development", c.n_dev_speakers,
                    "Speakers tagged for development (default: two thirds)");
  synth->add_option("--out", c.out, "Output directory")->required();
  CLI::Option* synth_seed = nullptr;
  add_seed(synth, c, &synth_seed);

  auto* train = app.add_subcommand("train", "Train a network on the development speakers");
  std::string model_name = "cnn3d";
  fs::path loss_log;
  train->add_option("--model", model_name, "cnn3d or lcn_dvector")
      ->check(CLI::IsMember({"cnn3d", "lcn_dvector"}))
      ->capture_default_str();
  train->add_option("--zeta", c.zeta, "Utterances per feature cube")->capture_default_str();
  add_training_flags(train, c);
  add_data_flags(train, c);
  train->add_option("--out", c.out, "Checkpoint path")->required();
  train->add_option("--loss-log", loss_log, "Per-epoch loss log (default: <out>.loss.csv)");
  CLI::Option* train_seed = nullptr;
  add_seed(train, c, &train_seed);

  auto* enroll = app.add_subcommand("enroll", "Build speaker models for enrollment speakers");
  std::string mode_name;
  long max_cubes = 1;
  auto* enroll_zeta = enroll->add_option("--zeta", c.zeta, "Expected checkpoint zeta");
  enroll->add_option("--checkpoint", c.checkpoint, "Trained checkpoint")->required();
  enroll->add_option("--mode", mode_name, "one-shot or d-vector (default follows the model)")
      ->check(CLI::IsMember({"one-shot", "d-vector"}));
  enroll->add_option("--max-cubes", max_cubes, "One-shot cubes averaged (0 uses all)")
      ->capture_default_str();
  add_data_flags(enroll, c);
  enroll->add_option("--out", c.out, "Speaker-model file")->required();
  CLI::Option* enroll_seed = nullptr;
  add_seed(enroll, c, &enroll_seed);

  auto* evaluate = app.add_subcommand("evaluate", "Score evaluation trials and write reports");
  fs::path scores_path;
  auto* ev_scores = evaluate->add_option("--scores", scores_path,
                                         "Recompute reports from an existing score log");
  auto* ev_manifest = evaluate->add_option("--manifest", c.manifest, "Corpus manifest.csv");
  auto* ev_ckpt = evaluate->add_option("--checkpoint", c.checkpoint, "Trained checkpoint");
  auto* ev_models = evaluate->add_option("--models", c.models, "Speaker-model file");
  evaluate->add_option("--max-slices", c.max_slices, "Slices kept per recording (0 keeps all)");
  evaluate->add_option("--out", c.out, "Report directory")->required();
  ev_scores->excludes(ev_manifest)->excludes(ev_ckpt)->excludes(ev_models);
  CLI::Option* eval_seed = nullptr;
  add_seed(evaluate, c, &eval_seed);

  auto* sweep = app.add_subcommand("zeta-sweep", "Train, enroll and evaluate per zeta");
  std::vector<long> zetas;
  sweep->add_option("--zetas", zetas, "Comma-separated zeta list")->required()->delimiter(',');
  sweep->add_option("--max-cubes", max_cubes, "One-shot cubes averaged (0 uses all)")
      ->capture_default_str();
  add_training_flags(sweep, c);
  add_data_flags(sweep, c);
  sweep->add_option("--out", c.out, "Output directory")->required();
  CLI::Option* sweep_seed = nullptr;
  add_seed(sweep, c, &sweep_seed);

  std::vector<std::string> args;
  try {
    args = merge_config_file(raw);
  } catch (const Error& e) {
    err << "svkit: error: " << e.what() << '\n';
    return kExitConfig;
  }
  // CLI11 takes the arguments reversed and without the program name.
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "svkit: error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (evaluate->parsed() && scores_path.empty() &&
      (c.manifest.empty() || c.checkpoint.empty() || c.models.empty())) {
    err << "svkit: error: evaluate needs --manifest, --checkpoint and --models, or --scores\n";
    return kExitConfig;
  }
  c.model = kModelNames.at(model_name);

  if (synth->parsed()) {
    resolve_seed(synth_seed, c);
    cmd_synth(c, speakers, utterances, out);
  } else if (train->parsed()) {
    resolve_seed(train_seed, c);
    validate(c);
    cmd_train(c, loss_log, out);
  } else if (enroll->parsed()) {
    resolve_seed(enroll_seed, c);
    validate(c);
    cmd_enroll(c, enroll_zeta->count() > 0, mode_name, max_cubes, out);
  } else if (evaluate->parsed()) {
    resolve_seed(eval_seed, c);
    cmd_evaluate(c, scores_path, out);
  } else if (sweep->parsed()) {
    resolve_seed(sweep_seed, c);
    validate(c);
    cmd_zeta_sweep(c, zetas, max_cubes, out);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> full{"svkit"};
  full.insert(full.end(), args.begin(), args.end());
  try {
    return dispatch(full, out, err);
  } catch (const NumericError& e) {
    err << "svkit: numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "svkit: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "svkit: error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "svkit: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "svkit: error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "svkit: internal error: " << e.what() << '\n';
    return 1;
  }
}

std::string render_roc_svg(const protocol::RocSummary& roc) {
  constexpr double kSize = 400.0, kMargin = 50.0, kPlot = kSize - 2.0 * kMargin;
  auto px = [&](double far) { return kMargin + kPlot * far; };
  auto py = [&](double tpr) { return kSize - kMargin - kPlot * tpr; };
  std::ostringstream s;
  char buf[128];
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" "
       "viewBox=\"0 0 400 400\">\n"
    << "<rect width=\"400\" height=\"400\" fill=\"white\"/>\n"
    << "<rect x=\"50\" y=\"50\" width=\"300\" height=\"300\" fill=\"none\" stroke=\"black\"/>\n"
    << "<line x1=\"50\" y1=\"350\" x2=\"350\" y2=\"50\" stroke=\"gray\" "
       "stroke-dasharray=\"4 4\"/>\n"
    << "<text x=\"200\" y=\"385\" text-anchor=\"middle\" font-size=\"14\">FAR</text>\n"
    << "<text x=\"15\" y=\"200\" text-anchor=\"middle\" font-size=\"14\" "
       "transform=\"rotate(-90 15 200)\">TPR</text>\n"
    << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < roc.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", px(roc.points[i].far),
                  py(roc.points[i].tpr));
    s << buf;
  }
  s << "\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"4\" fill=\"crimson\"/>\n", px(roc.eer),
                py(1.0 - roc.eer));
  s << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"200\" y=\"35\" text-anchor=\"middle\" font-size=\"14\">"
                "EER %.2f%%  AUC %.2f%%</text>\n",
                100.0 * roc.eer, 100.0 * roc.auc);
  s << buf << "</svg>\n";
  return s.str();
}

std::string format_metrics_json(const protocol::RocSummary& roc, long zeta,
                                const std::string& model_kind) {
  nlohmann::ordered_json j;
  j["eer"] = roc.eer;
  j["auc"] = roc.auc;
  j["n_genuine"] = roc.n_genuine;
  j["n_impostor"] = roc.n_impostor;
  j["zeta"] = zeta > 0 ? nlohmann::ordered_json(zeta) : nlohmann::ordered_json(nullptr);
  j["model_kind"] =
      model_kind.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(model_kind);
  return j.dump(2) + "\n";
}

}  // namespace svkit::cli
