#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "grab/datakit.hpp"
#include "grab/error.hpp"
#include "grab/miner.hpp"
#include "grab/model.hpp"

namespace grab::cli {

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ContractError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsageError;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kDataError;
  } catch (const std::ios_base::failure& e) {
    fmt::print(err, "I/O error: {}\n", e.what());
    return kDataError;
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::vector<std::string> load_names(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open names file '" + path + "'");
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    names.push_back(line);
  }
  return names;
}

std::vector<double> load_weights(const std::string& path, std::size_t expected) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open weights file '" + path + "'");
  std::vector<double> weights;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    double w = 0.0;
    if (!(fields >> w)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("expected a real number", line_no);
    }
    if (!std::isfinite(w)) throw ParseError("weights must be finite", line_no);
    weights.push_back(w);
  }
  if (weights.size() != expected) {
    throw DataError(fmt::format("{} weights for {} transactions", weights.size(), expected));
  }
  return weights;
}

std::string_view stop_name(StopReason reason) {
  switch (reason) {
    case StopReason::Suboptimality:
      return "suboptimality";
    case StopReason::NoCandidates:
      return "no-candidates";
    case StopReason::IterationCap:
      return "iteration-cap";
  }
  return "unknown";
}

std::string signed_label(int y) { return y > 0 ? "+1" : "-1"; }

}  // namespace

int cmd_binarize(const BinarizeOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto data = load_real_dataset(options.input);
    Binarizer binarizer;
    if (!options.bins_from.empty()) {
      std::ifstream in(options.bins_from);
      if (!in) throw DataError("cannot open '" + options.bins_from + "'");
      binarizer = Binarizer::deserialize(in);
    } else {
      binarizer = fit_binarizer(data.rows, options.bins);
    }
    const auto db = binarizer.apply(data);
    write_file(options.output, render_libsvm(db));
    if (options.bins_from.empty()) write_file(options.output + ".bins", binarizer.serialize());
    fmt::print(out, "rows\t{}\ncolumns\t{}\nattributes\t{}\n", db.size(), binarizer.input_columns(),
               binarizer.output_dim());
    return int{kOk};
  });
}

int cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    options.config.validate();
    const auto db = load_libsvm(options.data, options.dim);
    const auto result = train(db, options.config);
    fmt::print(out, "iter\tactive\tV\tobjective\n");
    for (const auto& row : result.trace.rows) {
      fmt::print(out, "{}\t{}\t{:.10g}\t{:.10g}\n", row.iteration, row.active, row.suboptimality, row.objective);
    }
    if (!options.model_out.empty()) save_model(result.model, options.model_out);
    const auto iterations = result.trace.rows.back().iteration;
    fmt::print(err, "stop: {} after {} iterations\n", stop_name(result.trace.stop), iterations);
    if (result.trace.warning) fmt::print(err, "warning: iteration cap reached before convergence\n");
    fmt::print(err, "features: {}\n", result.model.size());
    fmt::print(err, "training accuracy: {:.6f}\n", accuracy(result.model, db));
    return int{kOk};
  });
}

int cmd_predict(const PredictOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto model = load_model(options.model);
    const auto db = load_libsvm(options.data);
    if (db.d > model.d()) {
      fmt::print(err, "warning: data has {} attributes, model was trained on {}\n", db.d, model.d());
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < db.size(); ++i) {
      const double score = predict_score(model, db.transactions[i]);
      const int label = label_of_score(score);
      correct += label == db.labels[i] ? 1 : 0;
      fmt::print(out, "{} {:.17g}\n", signed_label(label), score);
    }
    if (!db.empty()) {
      fmt::print(err, "accuracy: {:.6f} ({}/{})\n",
                 static_cast<double>(correct) / static_cast<double>(db.size()), correct, db.size());
    }
    return int{kOk};
  });
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.top < 1) throw ContractError("--top must be at least 1");
    const auto model = load_model(options.model);
    std::vector<std::string> names;
    if (!options.names.empty()) names = load_names(options.names);
    for (const auto& row : top_weights(model, options.top, names)) {
      std::string label;
      if (row.itemset.empty()) {
        label = "(bias)";
      } else {
        for (std::size_t i = 0; i < row.itemset.size(); ++i) {
          if (i) label += " & ";
          label += row.names.empty() ? std::to_string(row.itemset[i]) : row.names[i];
        }
      }
      fmt::print(out, "{:.6g}\t{}\n", row.weight, label);
    }
    return int{kOk};
  });
}

int cmd_mine(const MineOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(options.theta > 0.0)) throw ContractError("--theta must be positive");
    const auto db = load_libsvm(options.data);
    const auto alpha = options.weights == "uniform" ? std::vector<double>(db.size(), 1.0)
                                                    : load_weights(options.weights, db.size());
    auto result = mine_signed(db, alpha, options.theta, options.k);
    rank_candidates(result.candidates);
    for (const auto& c : result.candidates) {
      fmt::print(out, "{:.17g}\t{}\n", c.weighted_frequency, format_itemset(c.itemset));
    }
    return int{kOk};
  });
}

int cmd_grid(const GridOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.C_values.empty()) throw ContractError("--C-grid needs at least one value");
    auto train_db = load_libsvm(options.train);
    auto test_db = load_libsvm(options.test, train_db.d);
    train_db.d = test_db.d;
    fmt::print(out, "C\tfeatures\ttrain_accuracy\ttest_accuracy\tseconds\n");
    double best_accuracy = -1.0;
    double best_C = 0.0;
    for (const double C : options.C_values) {
      auto config = options.config;
      config.C = C;
      const auto result = train(train_db, config);
      const double test_accuracy = accuracy(result.model, test_db);
      fmt::print(out, "{:g}\t{}\t{:.6f}\t{:.6f}\t{:.3f}\n", C, result.model.size(),
                 accuracy(result.model, train_db), test_accuracy, result.trace.rows.back().seconds);
      if (test_accuracy > best_accuracy) {
        best_accuracy = test_accuracy;
        best_C = C;
      }
    }
    fmt::print(err, "best C: {:g} test accuracy: {:.6f}\n", best_C, best_accuracy);
    return int{kOk};
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse conjunction-feature classifiers trained by mining-driven grafting"};
  app.name("grab");
  app.require_subcommand(1);

  std::string loss_name = "logistic";
  std::string k_text = "inf";
  const auto add_config_flags = [&](CLI::App* cmd, GrabConfig& config) {
    cmd->add_option("--loss", loss_name, "logistic or l2hinge")->capture_default_str();
    cmd->add_option("--k", k_text, "maximum conjunction size, or 'inf'")->capture_default_str();
    cmd->add_option("--K", config.batch_size, "features added per round")->capture_default_str();
    cmd->add_option("--epsilon", config.epsilon, "relative suboptimality tolerance")->capture_default_str();
    cmd->add_option("--max-iters", config.max_iterations, "outer iteration cap")->capture_default_str();
    cmd->add_option("--emission-cap", config.emission_cap, "mining output cap per round (0 = 100*K)");
    cmd->add_option("--solver-tol", config.solver.tolerance, "inner solver tolerance")->capture_default_str();
  };

  BinarizeOptions binarize;
  auto* bin_cmd = app.add_subcommand("binarize", "equal-width one-hot binarization");
  bin_cmd->add_option("input", binarize.input, "CSV (label,v1,...) or real-valued LIBSVM")->required();
  bin_cmd->add_option("output", binarize.output, "binary LIBSVM output")->required();
  bin_cmd->add_option("--bins", binarize.bins, "cells per column")->capture_default_str()->check(CLI::PositiveNumber);
  bin_cmd->add_option("--bins-from", binarize.bins_from, "reuse a saved .bins sidecar");

  TrainOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "train a model; trace TSV on stdout");
  train_cmd->add_option("data", train_opts.data, "binary LIBSVM training data")->required();
  train_cmd->add_option("--model", train_opts.model_out, "where to write the model");
  train_cmd->add_option("--C", train_opts.config.C, "loss weight")->capture_default_str();
  train_cmd->add_option("--dim", train_opts.dim, "force at least this many attributes");
  add_config_flags(train_cmd, train_opts.config);

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "score data with a model");
  predict_cmd->add_option("model", predict.model)->required();
  predict_cmd->add_option("data", predict.data)->required();

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "largest weights of a model");
  report_cmd->add_option("model", report.model)->required();
  report_cmd->add_option("--top", report.top, "rows to print")->capture_default_str();
  report_cmd->add_option("--names", report.names, "attribute names, one per line");

  MineOptions mine;
  std::string mine_k = "inf";
  auto* mine_cmd = app.add_subcommand("mine", "weighted frequent itemset mining");
  mine_cmd->add_option("data", mine.data)->required();
  mine_cmd->add_option("--weights", mine.weights, "weights file or 'uniform'")->capture_default_str();
  mine_cmd->add_option("--theta", mine.theta, "threshold on |weighted frequency|")->capture_default_str();
  mine_cmd->add_option("--k", mine_k, "maximum itemset size, or 'inf'")->capture_default_str();

  GridOptions grid;
  std::string grid_C = "1e-3,1e-2,1e-1,1,1e1,1e2,1e3";
  auto* grid_cmd = app.add_subcommand("grid", "train over a C grid and evaluate on test data");
  grid_cmd->add_option("train", grid.train)->required();
  grid_cmd->add_option("test", grid.test)->required();
  grid_cmd->add_option("--C-grid", grid_C, "comma-separated C values")->capture_default_str();
  add_config_flags(grid_cmd, grid.config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kUsageError;
  }

  const auto resolve_config = [&](GrabConfig& config) {
    config.loss = parse_loss_kind(loss_name);
    config.k = DegreeCap::parse(k_text);
  };
  const auto configure = [&](auto&& fn) {
    return guarded(err, [&] { return fn(); });
  };

  if (*bin_cmd) return cmd_binarize(binarize, out, err);
  if (*train_cmd) {
    return configure([&] {
      resolve_config(train_opts.config);
      return cmd_train(train_opts, out, err);
    });
  }
  if (*predict_cmd) return cmd_predict(predict, out, err);
  if (*report_cmd) return cmd_report(report, out, err);
  if (*mine_cmd) {
    return configure([&] {
      mine.k = DegreeCap::parse(mine_k);
      return cmd_mine(mine, out, err);
    });
  }
  if (*grid_cmd) {
    return configure([&] {
      resolve_config(grid.config);
      std::stringstream list(grid_C);
      std::string item;
      while (std::getline(list, item, ',')) {
        try {
          grid.C_values.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw ContractError("bad --C-grid value '" + item + "'");
        }
      }
      return cmd_grid(grid, out, err);
    });
  }
  return kUsageError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("grab");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace grab::cli
