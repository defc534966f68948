// Command-line front end: pretrain, finetune, eval, sweep, gen-synthetic,
// inspect. Errors go to stderr as one-line JSON and a nonzero exit code.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptdgnn/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&args](std::uint64_t s) { args.seed = s; }, "override the master seed");
  cmd->add_option_function<std::string>(
      "--out", [&args](const std::string& o) { args.out = o; }, "override the output directory");
}

ptdgnn::RunConfig load(const CommonArgs& args) {
  ptdgnn::RunConfig cfg = ptdgnn::RunConfig::from_file(args.config_path);
  if (args.seed) {
    cfg.seed = *args.seed;
    cfg.raw["seed"] = *args.seed;
  }
  if (args.out) cfg.out_dir = *args.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-aware graph pre-training and link-prediction pipeline"};
  app.require_subcommand(1);

  CommonArgs pretrain_args, ft_args, eval_args, sweep_args, gen_args, inspect_args;
  std::string checkpoint_path, eval_checkpoint_path, sweep_axis;

  CLI::App* cmd_pretrain = app.add_subcommand("pretrain", "run the pre-training stage");
  add_common(cmd_pretrain, pretrain_args);

  CLI::App* cmd_finetune =
      app.add_subcommand("finetune", "fine-tune on link prediction and evaluate");
  add_common(cmd_finetune, ft_args);
  cmd_finetune->add_option("--checkpoint", checkpoint_path,
                           "pre-trained checkpoint (omit for the no-pre-training baseline)");

  CLI::App* cmd_eval = app.add_subcommand("eval", "alias of finetune (fine-tune + evaluate)");
  add_common(cmd_eval, eval_args);
  cmd_eval->add_option("--checkpoint", eval_checkpoint_path, "pre-trained checkpoint");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "grid-run the pipeline over one axis");
  add_common(cmd_sweep, sweep_args);
  cmd_sweep->add_option("--axis", sweep_axis, "one of sample_depth, sample_width, "
                                              "pretrain_fraction, mask_ratio, sampler_kind, "
                                              "base_model")
      ->required();

  CLI::App* cmd_gen = app.add_subcommand("gen-synthetic", "write a synthetic edge list");
  add_common(cmd_gen, gen_args);

  CLI::App* cmd_inspect = app.add_subcommand("inspect", "print dataset and split statistics");
  add_common(cmd_inspect, inspect_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_pretrain->parsed()) {
      const auto cfg = load(pretrain_args);
      const auto art = ptdgnn::cmd_pretrain(cfg, cfg.out_dir);
      std::cout << "checkpoint: " << art.checkpoint_path << "\n"
                << "loss trace: " << art.loss_csv_path << "\n";
    } else if (cmd_finetune->parsed() || cmd_eval->parsed()) {
      const auto& args = cmd_finetune->parsed() ? ft_args : eval_args;
      const std::string& ckpt = cmd_finetune->parsed() ? checkpoint_path : eval_checkpoint_path;
      const auto cfg = load(args);
      std::optional<std::string> ck;
      if (!ckpt.empty()) ck = ckpt;
      const auto art = ptdgnn::cmd_finetune_eval(cfg, ck, cfg.out_dir);
      std::cout << "eval report: " << art.eval_csv_path << "\n"
                << "validation trace: " << art.valtrace_csv_path << "\n";
    } else if (cmd_sweep->parsed()) {
      const auto cfg = load(sweep_args);
      const auto art = ptdgnn::cmd_sweep(cfg, sweep_axis, cfg.out_dir);
      std::cout << "sweep matrix: " << art.sweep_csv_path << "\n";
    } else if (cmd_gen->parsed()) {
      const auto cfg = load(gen_args);
      std::cout << "edge list: " << ptdgnn::cmd_gen_synthetic(cfg, cfg.out_dir) << "\n";
    } else if (cmd_inspect->parsed()) {
      const auto cfg = load(inspect_args);
      std::cout << ptdgnn::cmd_inspect(cfg).dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
