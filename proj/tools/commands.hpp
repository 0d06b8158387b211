#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "grab/trainer.hpp"

namespace grab::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
};

struct BinarizeOptions {
  std::string input;
  std::string output;
  std::size_t bins = 30;
  /// Reuse a saved `.bins` sidecar instead of fitting.
  std::string bins_from;
};

struct TrainOptions {
  std::string data;
  std::string model_out;
  /// Forces at least this many attributes.
  std::size_t dim = 0;
  GrabConfig config;
};

struct PredictOptions {
  std::string model;
  std::string data;
};

struct ReportOptions {
  std::string model;
  std::size_t top = 10;
  std::string names;
};

struct MineOptions {
  std::string data;
  /// Path to one weight per line, or "uniform".
  std::string weights = "uniform";
  double theta = 1.0;
  DegreeCap k;
};

struct GridOptions {
  std::string train;
  std::string test;
  std::vector<double> C_values;
  GrabConfig config;
};

int cmd_binarize(const BinarizeOptions& options, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err);
int cmd_predict(const PredictOptions& options, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);
int cmd_mine(const MineOptions& options, std::ostream& out, std::ostream& err);
int cmd_grid(const GridOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. 0 on success, 1 on usage errors, 2 on data errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grab::cli
