#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabsniper/tabsniper.hpp"

namespace fs = std::filesystem;
using namespace tabsniper;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnbalanced = 2;

struct SpreadArgs {
  std::string input;
  std::string out;
  std::string nb_models;
  std::string synonyms;
  std::string thresholds;
  std::optional<int> year;
  unsigned jobs = 1;
};

void add_spread_options(CLI::App* cmd, SpreadArgs& a) {
  cmd->add_option("--input", a.input, "ingestion JSON file or a directory of them")->required()->check(CLI::ExistingPath);
  cmd->add_option("--out", a.out, "output directory")->required();
  cmd->add_option("--nb-models", a.nb_models, "directory with header/caption/header_caption models")
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--synonyms", a.synonyms, "extra header synonyms (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--thresholds", a.thresholds, "structure threshold overrides (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--year", a.year, "statement year for dates printed without one");
  cmd->add_option("--jobs", a.jobs, "documents processed in parallel")->check(CLI::PositiveNumber);
}

PipelineConfig make_config(const SpreadArgs& a) {
  PipelineConfig cfg;
  if (!a.nb_models.empty()) cfg.models = load_nb_models(a.nb_models);
  if (!a.synonyms.empty()) cfg.synonyms = load_synonyms(a.synonyms);
  if (!a.thresholds.empty()) cfg.thresholds = load_thresholds(a.thresholds);
  cfg.statement_year = a.year;
  return cfg;
}

std::vector<fs::path> input_documents(const fs::path& input) {
  if (!fs::is_directory(input)) return {input};
  std::vector<fs::path> docs;
  for (const auto& e : fs::directory_iterator(input))
    if (e.is_regular_file() && e.path().extension() == ".json") docs.push_back(e.path());
  std::sort(docs.begin(), docs.end());
  return docs;
}

struct DocOutcome {
  int code = kExitOk;
  std::string message;
};

DocOutcome spread_one(const fs::path& doc_path, const fs::path& out, const PipelineConfig& cfg, bool render) {
  std::ostringstream msg;
  try {
    const auto parsed = parse_document(doc_path);
    const auto result = run_pipeline(parsed.document, cfg);
    write_pipeline_outputs(result, out, render);
    for (const auto& w : parsed.warnings) msg << doc_path.string() << ": warning: " << w << "\n";
    for (const auto& w : result.warnings) msg << doc_path.string() << ": warning: " << w << "\n";
    msg << doc_path.string() << ": " << result.transactions.size() << " transactions, " << result.discards.size()
        << " discarded rows, checksum " << result.checksum_cents << "\n";
    return {result.balanced() ? kExitOk : kExitUnbalanced, msg.str()};
  } catch (const std::exception& e) {
    msg << doc_path.string() << ": error: " << e.what() << "\n";
    return {kExitError, msg.str()};
  }
}

int run_spread(const SpreadArgs& a, bool render) {
  PipelineConfig cfg;
  try {
    cfg = make_config(a);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  const fs::path input(a.input);
  const auto docs = input_documents(input);
  if (docs.empty()) {
    std::cerr << "error: no .json documents in " << input << "\n";
    return kExitError;
  }
  const bool single = !fs::is_directory(input);
  std::vector<DocOutcome> outcomes(docs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < docs.size(); i = next++)
      outcomes[i] = spread_one(docs[i], single ? fs::path(a.out) : fs::path(a.out) / docs[i].stem(), cfg, render);
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(std::max(1u, a.jobs), docs.size());
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kExitOk;
  for (const auto& o : outcomes) {
    (o.code == kExitError ? std::cerr : std::cout) << o.message;
    if (o.code == kExitError) code = kExitError;
    else if (o.code == kExitUnbalanced && code == kExitOk) code = kExitUnbalanced;
  }
  return code;
}

int run_train_nb(const std::string& input, const std::string& out) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + input + "'");
  const auto corpus = read_text_corpus(in);
  save_nb_models(train_nb_models(corpus), out);
  std::cout << "trained 3 models on " << corpus.size() << " samples into " << out << "\n";
  return kExitOk;
}

nlohmann::json metrics_json(const DetectionMetrics& m) {
  nlohmann::json j{{"AP50", m.ap50}, {"AP75", m.ap75}, {"AP", m.ap}, {"AR", m.ar}};
  for (const auto& [name, c] : m.per_class)
    j["per_class"][name] = {{"gt_count", c.gt_count}, {"AP50", c.ap50}, {"AP75", c.ap75}, {"AP", c.ap}, {"AR", c.ar}};
  return j;
}

int run_eval_detect(const std::string& gt_path, const std::string& pred_path, const std::string& out) {
  nlohmann::json report;
  for (auto tax : {Taxonomy::TDC, Taxonomy::TSR}) {
    const auto gt = parse_detections(gt_path, tax);
    const auto pred = parse_detections(pred_path, tax);
    const std::vector<EvalPair> pairs{{gt, pred}};
    const std::string key = tax == Taxonomy::TDC ? "tdc" : "tsr";
    report[key] = metrics_json(detection_metrics(pairs));
    report[key]["k_alpha_iou50"] = krippendorff_alpha(gt, pred, 0.5);
  }
  const auto text = report.dump(1) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out, std::ios::binary);
    os << text;
  }
  return kExitOk;
}

int run_gen(const GenConfig& cfg, const std::string& out, const std::string& nb_corpus) {
  const auto s = generate_statement(cfg);
  write_statement(s, out);
  if (!nb_corpus.empty()) {
    std::ofstream os(nb_corpus, std::ios::binary);
    write_text_corpus(os, synthetic_text_corpus());
  }
  std::cout << "wrote " << s.expected.size() << " expected transactions on " << cfg.pages << " page(s) to " << out
            << "\n";
  return kExitOk;
}

int run_validate(const std::string& input) {
  const auto parsed = parse_document(input);
  auto warnings = parsed.warnings;
  const auto more = validate_document(parsed.document);
  warnings.insert(warnings.end(), more.begin(), more.end());
  for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
  const auto& d = parsed.document;
  std::cout << input << ": " << d.pages.size() << " pages, " << d.tdc_objects.size() << " tdc, "
            << d.tsr_objects.size() << " tsr, " << d.ocr.size() << " words, " << warnings.size() << " warnings\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bank statement table spreading"};
  app.require_subcommand(1);

  SpreadArgs spread_args;
  auto* spread = app.add_subcommand("spread", "extract transactions and check the balance");
  add_spread_options(spread, spread_args);
  bool spread_render = false;
  spread->add_flag("--render", spread_render, "also write per-table SVG and grid JSON");

  SpreadArgs render_args;
  auto* render = app.add_subcommand("render", "write per-table structure SVG and grid JSON");
  add_spread_options(render, render_args);

  std::string nb_input, nb_out;
  auto* train = app.add_subcommand("train-nb", "train the caption/header classifiers");
  train->add_option("--input", nb_input, "CSV of caption_text,header_text,category")->required()->check(CLI::ExistingFile);
  train->add_option("--out", nb_out, "model directory")->required();

  std::string gt_path, pred_path, eval_out;
  auto* eval = app.add_subcommand("eval-detect", "AP/AR and K-alpha between two ingestion files");
  eval->add_option("--gt", gt_path, "ground-truth ingestion file")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", pred_path, "prediction ingestion file")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "report path (default stdout)");

  GenConfig gen_cfg;
  std::string gen_out, gen_corpus;
  auto* gen = app.add_subcommand("gen", "generate a synthetic statement");
  gen->add_option("--seed", gen_cfg.seed, "random seed");
  gen->add_option("--pages", gen_cfg.pages, "page count")->check(CLI::PositiveNumber);
  gen->add_option("--jitter", gen_cfg.jitter_px, "uniform detection jitter in px")->check(CLI::NonNegativeNumber);
  gen->add_option("--year", gen_cfg.year, "statement year");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--nb-corpus", gen_corpus, "also write the caption/header corpus CSV here");

  std::string validate_input;
  auto* validate = app.add_subcommand("validate", "parse an ingestion file and report problems");
  validate->add_option("--input", validate_input, "ingestion file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (spread->parsed()) return run_spread(spread_args, spread_render);
    if (render->parsed()) return run_spread(render_args, true);
    if (train->parsed()) return run_train_nb(nb_input, nb_out);
    if (eval->parsed()) return run_eval_detect(gt_path, pred_path, eval_out);
    if (gen->parsed()) return run_gen(gen_cfg, gen_out, gen_corpus);
    if (validate->parsed()) return run_validate(validate_input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
