#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cli.hpp"
#include "fixtures.hpp"
#include "patent_rent/data_io.hpp"
#include "patent_rent/reporting.hpp"
#include "patent_rent/serialization.hpp"

namespace fs = std::filesystem;
using namespace patent_rent;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

fs::path params_file(const fs::path& dir) {
  const fs::path p = dir / "params.json";
  write_file(p, dump(to_json(fixtures::recovery_params())));
  return p;
}

}  // namespace

TEST(Cli, HelpAndVersionSucceed) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  const Outcome v = invoke({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_FALSE(v.out.empty());
}

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"synth", "--n", "10"}).code, 2);
}

TEST(Cli, SynthWritesRequestedRowsAndManifest) {
  const fs::path dir = fixtures::scratch_dir("cli_synth");
  const Outcome o = invoke({"synth", "--params", params_file(dir).string(), "--n", "10", "--seed", "3", "--out",
                         (dir / "run").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const ParsedRecords p = parse_records(fixtures::read_text(dir / "run" / "records.csv"));
  EXPECT_EQ(p.records.size(), 10u);
  EXPECT_TRUE(fs::exists(dir / "run" / "manifest.json"));
}

TEST(Cli, MissingColumnIsAnInputErrorNamingIt) {
  const fs::path dir = fixtures::scratch_dir("cli_missing");
  write_file(dir / "bad.csv",
             "patent_id,application_year,expiry_age,family_size,inventor_count,grant_lag_years,tech_field,"
             "ownership,censored\nA,1999,5,3,2,7,chemical,domestic,false\n");
  const Outcome o = invoke({"stats", "--records", (dir / "bad.csv").string(), "--out", (dir / "run").string()});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("tech_scope"), std::string::npos) << o.err;
}

TEST(Cli, MissingFileIsAnInputError) {
  const fs::path dir = fixtures::scratch_dir("cli_nofile");
  EXPECT_EQ(invoke({"stats", "--records", (dir / "nope.csv").string(), "--out", (dir / "run").string()}).code, 2);
}

TEST(Cli, AmbiguousOrUnknownScheduleIsAnInputError) {
  const fs::path dir = fixtures::scratch_dir("cli_sched");
  EXPECT_EQ(invoke({"synth", "--params", params_file(dir).string(), "--n", "10", "--seed", "3", "--schedule",
                 "atlantis", "--out", (dir / "run").string()})
                .code,
            2);
}

TEST(Cli, EstimateValueAndReportPipeline) {
  const fs::path dir = fixtures::scratch_dir("cli_pipeline");
  ASSERT_EQ(invoke({"synth", "--params", params_file(dir).string(), "--n", "120", "--seed", "5", "--out",
                 (dir / "synth").string()})
                .code,
            0);
  const fs::path ga = dir / "ga.json";
  GaConfig g;
  g.population_size = 60;
  g.generations = 3;
  g.starts = 1;
  g.elite_size = 10;
  g.tournament_size = 4;
  write_file(ga, dump(to_json(g)));
  const fs::path records = dir / "synth" / "records.csv";
  const Outcome e = invoke({"estimate", "--records", records.string(), "--seed", "11", "--ga-config", ga.string(),
                         "--out", (dir / "est").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_TRUE(fs::exists(dir / "est" / "estimate.json"));
  EXPECT_TRUE(fs::exists(dir / "est" / "diagnostics.csv"));

  // One draw per patent is allowed but every row is flagged.
  const Outcome v = invoke({"value", "--records", records.string(), "--estimate",
                         (dir / "est" / "estimate.json").string(), "--draws", "1", "--seed", "2", "--out",
                         (dir / "val").string()});
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_NE(v.err.find("unreliable"), std::string::npos);
  const auto values = parse_value_table(fixtures::read_text(dir / "val" / "values.csv"));
  ASSERT_EQ(values.size(), 120u);
  for (const auto& x : values) EXPECT_FALSE(x.mc_reliable);
  for (const char* name : {"expiry_shares.txt", "r0_by_group.txt", "npv_by_group.txt", "npv_quantiles.txt"})
    EXPECT_TRUE(fs::exists(dir / "val" / name)) << name;

  const Outcome r = invoke({"report", "--records", records.string(), "--values",
                         (dir / "val" / "values.csv").string(), "--out", (dir / "rep").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fixtures::read_text(dir / "rep" / "npv_by_group.txt"),
            fixtures::read_text(dir / "val" / "npv_by_group.txt"));
}

TEST(Cli, ReportWithMissingEstimateIsAnInputError) {
  const fs::path dir = fixtures::scratch_dir("cli_report_missing");
  ASSERT_EQ(invoke({"synth", "--params", params_file(dir).string(), "--n", "5", "--seed", "5", "--out",
                 (dir / "synth").string()})
                .code,
            0);
  write_file(dir / "values.csv", value_table_csv({}));
  const Outcome r = invoke({"report", "--records", (dir / "synth" / "records.csv").string(), "--values",
                         (dir / "values.csv").string(), "--out", (dir / "rep").string()});
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST(Cli, BinaryReportsExitCodes) {
  const fs::path dir = fixtures::scratch_dir("cli_binary");
  const std::string bin = PATENT_RENT_CLI_BINARY;
  const int ok = std::system((bin + " --version > " + (dir / "v.txt").string()).c_str());
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  const int bad = std::system((bin + " stats --records " + (dir / "none.csv").string() + " --out " +
                               (dir / "run").string() + " 2> " + (dir / "e.txt").string())
                                  .c_str());
  EXPECT_EQ(WEXITSTATUS(bad), 2);
}
