#include <gtest/gtest.h>

#include <clocale>
#include <filesystem>
#include <limits>
#include <locale>

#include "specsense/error.hpp"
#include "specsense/results.hpp"

using namespace specsense;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("specsense_results_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

SweepTable sample_sweep() {
  return {{-20, 100, "energy", 0.1234, 0.0987, 5000}, {-18, 100, "energy", 0.25, 0.1, 5000},
          {0, 1000, "lstm", 1, 0.0996, 5000}};
}

}  // namespace

TEST(FormatReal, SixSignificantDigits) {
  EXPECT_EQ(format_real(0.123456789), "0.123457");
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(-20.0), "-20");
  EXPECT_EQ(format_real(1234567.0), "1.23457e+06");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_real(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_THROW(format_real(std::nan("")), InvalidArgument);
}

TEST(FormatReal, ParseInverse) {
  EXPECT_EQ(parse_real("0.123457"), 0.123457);
  EXPECT_EQ(parse_real("-inf"), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_real("1,5"), FormatError);
  EXPECT_THROW(parse_real(""), FormatError);
}

TEST(FormatReal, LocaleIndependent) {
  const char* names[] = {"de_DE.UTF-8", "de_DE.utf8", "fr_FR.UTF-8", "C.UTF-8"};
  const std::string before = format_real(0.5);
  for (const char* n : names) {
    if (std::setlocale(LC_ALL, n) == nullptr) continue;
    EXPECT_EQ(format_real(0.5), "0.5") << n;
    EXPECT_EQ(parse_real("0.25"), 0.25) << n;
    EXPECT_EQ(to_csv(sample_sweep()), to_csv(sample_sweep()));
  }
  std::setlocale(LC_ALL, "C");
  EXPECT_EQ(before, "0.5");
}

TEST(Csv, EmptyTablesAreHeaderOnly) {
  EXPECT_EQ(to_csv(RocCurve{}), "threshold,pf,pd\n");
  EXPECT_EQ(to_csv(SweepTable{}), "snr_db,N,detector,pd,pf,trials\n");
  EXPECT_EQ(to_csv(AccuracyTable{}), "model,snr_db,accuracy,count\n");
  EXPECT_EQ(to_csv(AcfTable{}), "lag,rho\n");
  EXPECT_EQ(to_csv(TrainLog{}), "epoch,train_loss,val_accuracy\n");
  EXPECT_TRUE(parse_sweep_csv("snr_db,N,detector,pd,pf,trials\n").empty());
}

TEST(Csv, SweepRoundTripIsExact) {
  const auto t = sample_sweep();
  EXPECT_EQ(parse_sweep_csv(to_csv(t)), t);
  EXPECT_EQ(to_csv(t),
            "snr_db,N,detector,pd,pf,trials\n-20,100,energy,0.1234,0.0987,5000\n"
            "-18,100,energy,0.25,0.1,5000\n0,1000,lstm,1,0.0996,5000\n");
}

TEST(Csv, OtherTablesRoundTrip) {
  const RocCurve roc = {{0, 0, std::numeric_limits<double>::infinity()},
                        {0.1, 0.5, 103.25},
                        {1, 1, -std::numeric_limits<double>::infinity()}};
  EXPECT_EQ(parse_roc_csv(to_csv(roc)), roc);
  const AccuracyTable acc = {{"lstm", -12, 0.9875, 600}, {"gnb", -12, 0.61, 19200}};
  EXPECT_EQ(parse_accuracy_csv(to_csv(acc)), acc);
  const AcfTable acf = {{1, 0.987654, 0.5}};
  EXPECT_EQ(parse_acf_csv(to_csv(acf)), acf);
  const TrainLog log = {{1, 0.693147, 0.5}, {2, 0.4, 0.875}};
  EXPECT_EQ(parse_train_log_csv(to_csv(log)), log);
}

TEST(Csv, WriteParseIsIdempotentForArbitraryValues) {
  SweepTable t = {{-13.123456789, 100, "energy", 1.0 / 3.0, 2.0 / 7.0, 123}};
  const std::string once = to_csv(t);
  const std::string twice = to_csv(parse_sweep_csv(once));
  EXPECT_EQ(once, twice);
  EXPECT_NEAR(parse_sweep_csv(once)[0].pd, 1.0 / 3.0, 1e-6);
}

TEST(Csv, MalformedInputIsRejected) {
  EXPECT_THROW(parse_sweep_csv(""), FormatError);
  EXPECT_THROW(parse_sweep_csv("wrong,header\n"), FormatError);
  EXPECT_THROW(parse_sweep_csv("snr_db,N,detector,pd,pf,trials\n1,2,3\n"), FormatError);
  EXPECT_THROW(parse_sweep_csv("snr_db,N,detector,pd,pf,trials\nx,100,e,0.1,0.1,10\n"), FormatError);
  EXPECT_THROW(parse_acf_csv("lag,rho\n1,0.5\n"), FormatError);
}

TEST(Csv, RejectsNamesThatNeedQuoting) {
  const AccuracyTable bad = {{"a,b", 0, 1, 1}};
  EXPECT_THROW(to_csv(bad), InvalidArgument);
}

TEST(Gnuplot, BlocksPerCurve) {
  const auto g = to_gnuplot(sample_sweep());
  EXPECT_EQ(g.front(), '#');
  EXPECT_NE(g.find("\n\n"), std::string::npos);
  EXPECT_NE(g.find("-20 0.1234\n"), std::string::npos);
}

TEST(WriteResults, FilesMatchSerializers) {
  const auto dir = temp_dir("write");
  const auto t = sample_sweep();
  write_results(t, dir / "sweep.csv", ResultFormat::Csv);
  write_results(t, dir / "sweep.dat", ResultFormat::Gnuplot);
  EXPECT_EQ(read_text(dir / "sweep.csv"), to_csv(t));
  EXPECT_EQ(read_text(dir / "sweep.dat"), to_gnuplot(t));
  EXPECT_THROW(write_results(t, dir / "missing" / "x.csv", ResultFormat::Csv), IoError);
  EXPECT_THROW(read_text(dir / "nope.csv"), IoError);
}
