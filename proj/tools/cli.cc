#include "cli.h"

#include <CLI11.hpp>

#include <string>

#include "auxst/corpus.h"
#include "auxst/errors.h"
#include "auxst/experiment.h"
#include "auxst/gradcheck_suite.h"
#include "auxst/graph.h"
#include "auxst/model.h"

namespace auxst {

namespace {

std::optional<Op> parse_op(const std::string& name) {
  for (Op op : differentiable_ops()) {
    if (op_name(op) == name) return op;
  }
  throw ConfigError("unknown operator '" + name + "'");
}

int cmd_tag(const std::string& model_path, const std::string& input_path,
            const std::string& task, std::ostream& out) {
  const ModelParams model = ModelParams::deserialize(read_text_file(model_path));
  if (!model.find_task(task)) {
    std::string names;
    for (const auto& t : model.tasks()) names += (names.empty() ? "" : ", ") + t.name();
    throw ConfigError("model has no task '" + task + "'; available: " + names);
  }
  const Corpus input = parse_token_lines(read_text_file(input_path), input_path);
  out << write_tagged_tsv(tag_corpus(model, input, task), task);
  return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, const std::string& fault, std::ostream& out) {
  if (!fault.empty()) testing::set_backward_fault(parse_op(fault), 1.5);
  const GradcheckReport report = run_gradient_checks(seed);
  testing::set_backward_fault(std::nullopt);
  out << format_gradcheck(report);
  return report.ok() ? kExitOk : kExitNumerical;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Auxiliary-task self-training for sequence labelling", "auxst"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "Run every cell of an experiment config");
  experiment->add_option("config", config_path, "Experiment config file")->required();

  std::string model_path, input_path, task;
  auto* tag = app.add_subcommand("tag", "Tag tokens with a trained model, tagged TSV to stdout");
  tag->add_option("model", model_path, "Serialized model")->required();
  tag->add_option("input", input_path, "One token per line, blank line between sentences")
      ->required();
  tag->add_option("task", task, "Task head to use")->required();

  std::uint64_t seed = 1;
  std::string fault;
  auto* gradcheck = app.add_subcommand("gradcheck", "Check autodiff against finite differences");
  gradcheck->add_option("--seed", seed, "Random seed")->capture_default_str();
  gradcheck->add_option("--inject-fault", fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "auxst: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*experiment) {
      const ExperimentConfig config = load_experiment_config(config_path);
      const ExperimentOutcome result = run_experiment(config, &err);
      out << read_text_file(result.report_path);
      return kExitOk;
    }
    if (*tag) return cmd_tag(model_path, input_path, task, out);
    return cmd_gradcheck(seed, fault, out);
  } catch (const ConfigError& e) {
    err << "auxst: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "auxst: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    err << "auxst: numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "auxst: internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace auxst
