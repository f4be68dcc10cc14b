#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "specsense/eval.hpp"
#include "specsense/train.hpp"

namespace specsense {

/// rho(k) for k = 0..size()-1.
struct AcfTable {
  std::vector<double> rho;
  friend bool operator==(const AcfTable&, const AcfTable&) = default;
};

using TrainLog = std::vector<EpochLog>;

/// CSV schemas (header row, LF line endings, comma separated):
///   roc.csv       threshold,pf,pd
///   sweep.csv     snr_db,N,detector,pd,pf,trials
///   acc.csv       model,snr_db,accuracy,count
///   acf.csv       lag,rho
///   train_log.csv epoch,train_loss,val_accuracy
/// Reals are written with 6 significant digits in the "C" locale style;
/// infinite thresholds appear as inf / -inf.
///
/// The gnuplot variant holds two whitespace-separated columns per curve,
/// with "# ..." comment lines naming the curve and blank-line pairs
/// separating curves (addressable with gnuplot's `index`):
///   roc: pf pd; sweep: snr_db pd per (detector, N); acc: snr_db accuracy
///   per model; acf: lag rho; train log: epoch val_accuracy.
enum class ResultFormat { Csv, Gnuplot };

std::string format_real(double v);
double parse_real(std::string_view text);

std::string to_csv(const RocCurve& t);
std::string to_csv(const SweepTable& t);
std::string to_csv(const AccuracyTable& t);
std::string to_csv(const AcfTable& t);
std::string to_csv(const TrainLog& t);

std::string to_gnuplot(const RocCurve& t);
std::string to_gnuplot(const SweepTable& t);
std::string to_gnuplot(const AccuracyTable& t);
std::string to_gnuplot(const AcfTable& t);
std::string to_gnuplot(const TrainLog& t);

RocCurve parse_roc_csv(std::string_view text);
SweepTable parse_sweep_csv(std::string_view text);
AccuracyTable parse_accuracy_csv(std::string_view text);
AcfTable parse_acf_csv(std::string_view text);
TrainLog parse_train_log_csv(std::string_view text);

template <typename Table>
void write_results(const Table& table, const std::filesystem::path& path, ResultFormat format);

/// Reads a whole text file; IoError on failure.
std::string read_text(const std::filesystem::path& path);

}  // namespace specsense
