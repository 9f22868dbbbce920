// Copyright 2026 The embprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "embprobe/corpus.hpp"
#include "embprobe/error.hpp"
#include "embprobe/probes.hpp"
#include "embprobe/projection.hpp"
#include "embprobe/report.hpp"
#include "embprobe/rng.hpp"
#include "embprobe/simmetrics.hpp"
#include "embprobe/synthbench.hpp"

namespace embprobe::cli {
namespace fs = std::filesystem;
namespace {

constexpr std::size_t kClosestPairs = 5;

int DefaultThreads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

EmbeddingInput ParseEmbeddingInput(const std::string &text) {
  const auto eq = text.find('=');
  if (eq != std::string::npos && eq > 0 && text.find('/') > eq)
    return {text.substr(0, eq), text.substr(eq + 1)};
  return {fs::path(text).stem().string(), text};
}

std::string SafeFileName(const std::string &name) {
  std::string out = name;
  for (char &c : out)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

void RequireFile(const std::string &path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kIo, "no such file: " + path);
}

void EnsureDir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorCode::kIo, "cannot create output directory " + dir.string());
}

// Per-architecture state shared by the pipeline stages.
struct Workspace {
  const Plan &plan;
  EvaluationDataset dataset;
  fs::path dir;
  ArchitectureResults results;
  std::optional<TrialList> trials;
  std::optional<std::vector<double>> scores;
  std::ostream &out;
  std::ostream &err;

  const TrialList &Trials() {
    if (!trials) {
      if (!plan.trials.empty()) {
        RequireFile(plan.trials);
        trials = ReadTrials(dataset, plan.trials, fs::path(plan.trials).replace_extension(".json"));
      } else {
        trials = SampleTrials(dataset, plan.per_speaker, plan.same, DeriveSeed(plan.seed, "trials"));
      }
    }
    return *trials;
  }

  const std::vector<double> &Scores() {
    if (!scores) scores = ScoreTrials(dataset, Trials().trials, plan.threads);
    return *scores;
  }

  void Save() { WriteResults(results, dir / "results.json"); }
};

Workspace OpenWorkspace(const Plan &plan, const EmbeddingInput &input, std::ostream &out,
                        std::ostream &err) {
  RequireFile(plan.manifest);
  RequireFile(input.path);
  auto records = LoadManifest(plan.manifest);
  auto embeddings = LoadEmbeddings(input.path, FormatFromPath(input.path), input.name);
  Workspace ws{plan, BuildDataset(std::move(records), embeddings), {}, {}, {}, {}, out, err};
  if (!plan.out.empty()) {
    ws.dir = fs::path(plan.out) / SafeFileName(input.name);
    EnsureDir(ws.dir);
    if (fs::is_regular_file(ws.dir / "results.json")) ws.results = ReadResults(ws.dir / "results.json");
  }
  ws.results.architecture = input.name;
  return ws;
}

void StageValidate(Workspace &ws) {
  const auto &ds = ws.dataset;
  ws.out << fmt::format("{}: {} utterances, {} speakers, dim {}\n", ds.architecture(), ds.size(),
                        ds.speakers().size(), ds.dim());
}

void StageTrials(Workspace &ws) {
  const auto &t = ws.Trials();
  WriteTrials(t, ws.dataset, ws.dir / "trials.csv", ws.dir / "trials.json");
  ws.out << fmt::format("{}: {} trials ({} same-speaker)\n", ws.dataset.architecture(),
                        t.trials.size(), t.CountSame());
}

void StageEer(Workspace &ws) {
  const auto groups = StandardGroups(ws.dataset);
  ws.results.eer = AggregateEer(ws.dataset, ws.Trials(), ws.Scores(), groups);
  for (const auto &g : ws.results.eer)
    ws.out << fmt::format("{}: eer[{}] = {}\n", ws.dataset.architecture(), g.group,
                          g.value ? FormatCell(g.value, 3) : std::string("n/a"));
  ws.Save();
}

void StageSimilarity(Workspace &ws) {
  const auto groups = StandardGroups(ws.dataset);
  const auto intra = IntraSpeakerMeans(ws.dataset, ws.plan.threads);
  const auto matrix = InterSpeakerMatrix(ws.dataset, ws.Trials(), ws.Scores(), intra);
  ws.results.intra = AggregateSpeakerMeans(ws.dataset, intra, groups);
  ws.results.inter = AggregateInter(ws.dataset, matrix, groups);
  ws.results.closest_pairs = ClosestPairs(matrix, kClosestPairs);
  WriteSimilarityMatrix(matrix, ws.dir / "similarity_matrix.csv");
  std::string text = "speaker,intra_mean\n";
  for (const auto &[speaker, mean] : intra) text += speaker + "," + FormatCell(mean, 6) + "\n";
  std::ofstream(ws.dir / "intra_speaker.csv", std::ios::binary) << text;
  for (const auto &p : ws.results.closest_pairs)
    ws.out << fmt::format("{}: closest {}\n", ws.dataset.architecture(), FormatSpeakerPair(p));
  ws.Save();
}

void StageProbe(Workspace &ws) {
  BatteryOptions options;
  options.split = {ws.plan.train_fraction, DeriveSeed(ws.plan.seed, "split")};
  options.threads = ws.plan.threads;
  for (const auto &name : ws.plan.tasks) options.only.push_back(*TargetFromName(name));
  std::vector<std::string> warnings;
  ws.results.probes = RunBattery(ws.dataset, options, &warnings);
  std::erase_if(ws.results.warnings, [](const std::string &w) { return w.starts_with("probe: "); });
  for (const auto &w : warnings) {
    ws.results.warnings.push_back("probe: " + w);
    ws.err << "warning: " << w << '\n';
  }
  for (const auto &p : ws.results.probes)
    ws.out << fmt::format("{}: {} {} = {:.3f}\n", ws.dataset.architecture(), p.task.name, p.metric,
                          p.score);
  ws.Save();
}

Projection Subset(const Projection &p, const std::vector<std::size_t> &rows) {
  Projection out;
  out.coords = Matrix(rows.size(), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.keys.push_back(p.keys[rows[i]]);
    out.coords(i, 0) = p.coords(rows[i], 0);
    out.coords(i, 1) = p.coords(rows[i], 1);
  }
  return out;
}

std::string SessionLabel(const UtteranceRecord &r) { return r.session_id.value_or("unknown"); }

void StageTsne(Workspace &ws) {
  const auto &ds = ws.dataset;
  const Plan &plan = ws.plan;
  if (plan.scope != "global" && plan.scope != "per-speaker")
    throw Error(ErrorCode::kInvalidArgument, "scope must be global or per-speaker");
  TsneConfig config;
  config.iterations = plan.iterations;
  config.seed = DeriveSeed(plan.seed, "tsne");
  config.threads = plan.threads;

  std::erase_if(ws.results.warnings, [](const std::string &w) { return w.starts_with("tsne: "); });
  auto warn = [&](const std::string &w) {
    ws.results.warnings.push_back("tsne: " + w);
    ws.err << "warning: " << w << '\n';
  };
  auto perplexity_for = [&](std::size_t n, const std::string &what) {
    const double limit = MaxPerplexity(n);
    if (plan.perplexity <= limit) return plan.perplexity;
    warn(fmt::format("perplexity {} too large for {} ({} points); using {:.4f}", plan.perplexity,
                     what, n, limit));
    return limit;
  };

  const fs::path tsne_dir = ws.dir / "tsne";
  EnsureDir(tsne_dir);
  ws.results.projections.clear();
  std::vector<std::string> keys;
  std::map<std::string, std::string> speaker_of, session_of;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto &r = ds.record(i);
    keys.push_back(r.utterance_key);
    speaker_of[r.utterance_key] = r.speaker_id;
    session_of[r.utterance_key] = SessionLabel(r);
  }

  if (plan.scope == "global") {
    config.perplexity = perplexity_for(ds.size(), "the full set");
    const Projection global = TsneEmbed(ds.embeddings(), keys, config);
    WriteProjection(global, config, tsne_dir / "global.csv", tsne_dir / "global.json");
    EmitScatterSvg(global, speaker_of, tsne_dir / "global.svg", ds.architecture() + " (speakers)");
    ws.results.projections.push_back({"global", "tsne/global.csv", "tsne/global.svg"});
    EnsureDir(tsne_dir / "speakers");
    for (std::size_t s = 0; s < ds.speakers().size(); ++s) {
      const auto &speaker = ds.speakers()[s];
      const auto rows = ds.utterances_of(s);
      const Projection view = Subset(global, {rows.begin(), rows.end()});
      const std::string svg = "tsne/speakers/" + SafeFileName(speaker) + ".svg";
      EmitScatterSvg(view, session_of, ws.dir / svg, speaker + " (sessions)");
      ws.results.projections.push_back({speaker, "tsne/global.csv", svg});
    }
    ws.out << fmt::format("{}: t-SNE final KL {:.4f}\n", ds.architecture(),
                          global.kl_trace.back().kl);
  } else {
    EnsureDir(tsne_dir / "speakers");
    for (std::size_t s = 0; s < ds.speakers().size(); ++s) {
      const auto &speaker = ds.speakers()[s];
      const auto rows = ds.utterances_of(s);
      if (rows.size() < 4 || MaxPerplexity(rows.size()) < 1.0) {
        warn(fmt::format("speaker {} has {} utterances; projection skipped", speaker, rows.size()));
        continue;
      }
      Matrix x(rows.size(), ds.dim());
      std::vector<std::string> sub_keys;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = ds.embedding(rows[i]);
        std::copy(src.begin(), src.end(), x.row(i).begin());
        sub_keys.push_back(ds.record(rows[i]).utterance_key);
      }
      TsneConfig local = config;
      local.perplexity = perplexity_for(rows.size(), "speaker " + speaker);
      const Projection p = TsneEmbed(x, sub_keys, local);
      const std::string stem = "tsne/speakers/" + SafeFileName(speaker);
      WriteProjection(p, local, ws.dir / (stem + ".csv"), ws.dir / (stem + ".json"));
      EmitScatterSvg(p, session_of, ws.dir / (stem + ".svg"), speaker + " (sessions)");
      ws.results.projections.push_back({speaker, stem + ".csv", stem + ".svg"});
    }
  }
  ws.Save();
}

void RunReport(const fs::path &out_dir, std::vector<ArchitectureResults> results,
               std::ostream &out) {
  EmitReport(results, out_dir);
  out << "report written to " << (out_dir / "report.json").string() << '\n';
}

std::vector<ArchitectureResults> CollectResults(const fs::path &out_dir) {
  if (!fs::is_directory(out_dir)) throw Error(ErrorCode::kIo, "no such directory: " + out_dir.string());
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(out_dir))
    if (entry.is_directory() && fs::is_regular_file(entry.path() / "results.json"))
      files.push_back(entry.path() / "results.json");
  std::sort(files.begin(), files.end());
  std::vector<ArchitectureResults> results;
  for (const auto &f : files) results.push_back(ReadResults(f));
  return results;
}

}  // namespace

std::string_view ToString(Command command) {
  switch (command) {
    case Command::kValidate: return "validate";
    case Command::kTrials: return "trials";
    case Command::kEer: return "eer";
    case Command::kSimilarity: return "similarity";
    case Command::kProbe: return "probe";
    case Command::kTsne: return "tsne";
    case Command::kSynth: return "synth";
    case Command::kReport: return "report";
    case Command::kAll: return "all";
  }
  return "?";
}

Plan ParseArgs(const std::vector<std::string> &args) {
  Plan plan;
  plan.threads = DefaultThreads();
  CLI::App app{"Evaluate speaker embeddings: EER, similarity, probes and t-SNE.", "embprobe"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::vector<std::string> embedding_args, leakage_args;
  auto add_inputs = [&](CLI::App *sub) {
    sub->add_option("--manifest", plan.manifest, "Utterance manifest CSV")->required();
    sub->add_option("--embeddings", embedding_args,
                    "Embedding file, NAME=PATH or PATH (name = file stem); repeatable")
        ->required();
  };
  auto add_out = [&](CLI::App *sub, bool required) {
    auto *opt = sub->add_option("--out", plan.out, "Output directory");
    if (required) opt->required();
  };
  auto add_seed = [&](CLI::App *sub) {
    sub->add_option("--seed", plan.seed, "Base random seed")->capture_default_str();
  };
  auto add_threads = [&](CLI::App *sub) {
    sub->add_option("--threads", plan.threads, "Worker threads")
        ->envname("EMBPROBE_THREADS")
        ->check(CLI::PositiveNumber);
  };
  auto add_trials = [&](CLI::App *sub) {
    sub->add_option("--per-speaker", plan.per_speaker, "Trials anchored by each speaker")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--same", plan.same, "Same-speaker trials per anchor speaker")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
  };
  auto add_probe = [&](CLI::App *sub) {
    sub->add_option("--train-fraction", plan.train_fraction, "Training share of the split")
        ->capture_default_str();
    sub->add_option("--tasks", plan.tasks, "Probe tasks to run (default: all)")->delimiter(',');
  };
  auto add_tsne = [&](CLI::App *sub) {
    sub->add_option("--perplexity", plan.perplexity, "t-SNE perplexity")->capture_default_str();
    sub->add_option("--iterations", plan.iterations, "t-SNE iterations")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--scope", plan.scope, "global (with filtered per-speaker views) or per-speaker")
        ->capture_default_str()
        ->check(CLI::IsMember({"global", "per-speaker"}));
  };

  std::map<CLI::App *, Command> commands;
  auto sub = [&](Command c, const std::string &help) {
    CLI::App *s = app.add_subcommand(std::string(ToString(c)), help);
    commands[s] = c;
    return s;
  };

  CLI::App *validate = sub(Command::kValidate, "Load and cross-check manifest and embeddings");
  add_inputs(validate);
  add_out(validate, false);

  CLI::App *trials = sub(Command::kTrials, "Sample verification trials");
  add_inputs(trials);
  add_out(trials, true);
  add_seed(trials);
  add_trials(trials);

  for (auto [c, help] : {std::pair{Command::kEer, "Equal error rate per group"},
                         std::pair{Command::kSimilarity, "Intra- and inter-speaker similarity"}}) {
    CLI::App *s = sub(c, help);
    add_inputs(s);
    add_out(s, true);
    add_seed(s);
    add_threads(s);
    add_trials(s);
    s->add_option("--trials", plan.trials, "Use this trials CSV (JSON sidecar alongside)");
  }

  CLI::App *probe = sub(Command::kProbe, "Probing battery");
  add_inputs(probe);
  add_out(probe, true);
  add_seed(probe);
  add_threads(probe);
  add_probe(probe);

  CLI::App *tsne = sub(Command::kTsne, "t-SNE projection and scatter plots");
  add_inputs(tsne);
  add_out(tsne, true);
  add_seed(tsne);
  add_threads(tsne);
  add_tsne(tsne);

  CLI::App *synth = sub(Command::kSynth, "Generate a synthetic corpus with planted leakage");
  add_out(synth, true);
  add_seed(synth);
  synth->add_option("--speakers", plan.synth.n_speakers, "Number of speakers")->capture_default_str();
  synth->add_option("--utts", plan.synth.utts_per_speaker, "Utterances per speaker")
      ->capture_default_str();
  synth->add_option("--dim", plan.synth.dim, "Embedding dimension")->capture_default_str();
  synth->add_option("--spread", plan.synth.speaker_spread, "Within-speaker noise sd")
      ->capture_default_str();
  synth->add_option("--session-spread", plan.synth.session_spread, "Session offset sd")
      ->capture_default_str();
  synth->add_option("--sessions", plan.synth.session_clusters, "Sessions per speaker")
      ->capture_default_str();
  synth->add_option("--leakage", leakage_args,
                    "FACTOR=COEF with FACTOR in duration, condition, content, f0, snr; repeatable");

  CLI::App *report = sub(Command::kReport, "Merge per-architecture results into report files");
  add_out(report, true);

  CLI::App *all = sub(Command::kAll, "validate, trials, eer, similarity, probe, tsne, report");
  add_inputs(all);
  add_out(all, true);
  add_seed(all);
  add_threads(all);
  add_trials(all);
  add_probe(all);
  add_tsne(all);

  std::vector<const char *> argv = {"embprobe"};
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    throw UsageError("", app.help());
  } catch (const CLI::CallForAllHelp &) {
    throw UsageError("", app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError &e) {
    const auto subs = app.get_subcommands();
    throw UsageError(e.what(), subs.empty() ? app.help() : subs.front()->help());
  }
  plan.command = commands.at(app.get_subcommands().front());

  for (const auto &e : embedding_args) plan.embeddings.push_back(ParseEmbeddingInput(e));
  std::map<std::string, int> names;
  for (const auto &e : plan.embeddings)
    if (++names[SafeFileName(e.name)] > 1)
      throw UsageError("duplicate embedding name: " + e.name, app.help());
  for (const auto &name : plan.tasks)
    if (!TargetFromName(name)) throw UsageError("unknown probe task: " + name, app.help());
  for (const auto &l : leakage_args) {
    const auto eq = l.find('=');
    const auto factor = eq == std::string::npos ? std::nullopt : SynthFactorFromName(l.substr(0, eq));
    if (!factor) throw UsageError("bad --leakage value: " + l, synth->help());
    try {
      std::size_t used = 0;
      plan.synth.leak(*factor) = std::stod(l.substr(eq + 1), &used);
      if (used != l.size() - eq - 1) throw std::invalid_argument(l);
    } catch (const std::exception &) {
      throw UsageError("bad --leakage value: " + l, synth->help());
    }
  }
  return plan;
}

void Execute(const Plan &plan, std::ostream &out, std::ostream &err) {
  if (plan.command == Command::kSynth) {
    SynthSpec spec = plan.synth;
    spec.seed = DeriveSeed(plan.seed, "synth");
    const SynthCorpus corpus = Generate(spec);
    EnsureDir(plan.out);
    WriteSynthCorpus(corpus, plan.out);
    out << fmt::format("synthetic corpus: {} speakers x {} utterances, dim {} -> {}\n",
                       spec.n_speakers, spec.utts_per_speaker, spec.dim, plan.out);
    return;
  }
  if (plan.command == Command::kReport) {
    RunReport(plan.out, CollectResults(plan.out), out);
    return;
  }
  if (!plan.out.empty()) EnsureDir(plan.out);

  std::vector<ArchitectureResults> collected;
  for (const auto &input : plan.embeddings) {
    Workspace ws = OpenWorkspace(plan, input, out, err);
    switch (plan.command) {
      case Command::kValidate: StageValidate(ws); break;
      case Command::kTrials: StageTrials(ws); break;
      case Command::kEer: StageEer(ws); break;
      case Command::kSimilarity: StageSimilarity(ws); break;
      case Command::kProbe: StageProbe(ws); break;
      case Command::kTsne: StageTsne(ws); break;
      case Command::kAll:
        ws.results = ArchitectureResults{input.name, {}, {}, {}, {}, {}, {}, {}};
        StageValidate(ws);
        StageTrials(ws);
        StageEer(ws);
        StageSimilarity(ws);
        StageProbe(ws);
        StageTsne(ws);
        collected.push_back(ws.results);
        break;
      default: break;
    }
  }
  if (plan.command == Command::kAll) RunReport(plan.out, std::move(collected), out);
}

int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  try {
    Execute(ParseArgs(args), out, err);
    return 0;
  } catch (const UsageError &e) {
    if (std::string(e.what()).empty()) {
      out << e.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n\n" << e.help();
    return 2;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace embprobe::cli
