#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rrd/harness.hpp"

using namespace rrd;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rrd_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ParsesValues) {
  auto c = parse_config("# comment\nkind = cover\nn = 1e6\na3 = 1/1200  # trailing\nz = 1:2, -3, 0:-1\n");
  EXPECT_EQ(c.kind, ExperimentKind::Cover);
  EXPECT_EQ(c.integer("n", 0), 1000000);
  EXPECT_DOUBLE_EQ(c.real("a3", 0), 1.0 / 1200);
  EXPECT_EQ(c.complexes("z", {}), (std::vector<cplx>{cplx(1, 2), -3.0, cplx(0, -1)}));
  EXPECT_EQ(c.seed(), 1u);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("n = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("kind = nope\n"), ConfigError);
  EXPECT_THROW(parse_config("kind = cover\nkind = cover\n"), ConfigError);
  EXPECT_THROW(parse_config("kind = cover\njunk\n"), ConfigError);
  EXPECT_THROW(parse_config("kind = cover\nn = abc\n").integer("n", 0), ConfigError);
  EXPECT_THROW(validate_config(parse_config("kind = ell-fuzz\nn = 4\n")), ConfigError);
}

TEST(Config, Windows) {
  EXPECT_THROW(validate_config(parse_config("kind = cover\nn = 5000\n")), ConfigError);
  EXPECT_NO_THROW(validate_config(parse_config("kind = cover\nn = 5000\nsmoke = 1\n")));
  EXPECT_THROW(validate_config(parse_config("kind = uniformity\nn = 7\n")), ConfigError);
  EXPECT_THROW(validate_config(parse_config("kind = taxonomy-census\nd = 2\n")), ConfigError);
  EXPECT_THROW(validate_config(parse_config("kind = expansion\neps = 1.5\n")), ConfigError);
  EXPECT_THROW(validate_config(parse_config("kind = ell-fuzz\nfamilies = level-sets, bogus\n")), ConfigError);
  EXPECT_THROW(validate_config(parse_config("kind = cover\nn = 1e6\nv = 17\n")), ConfigError);
}

TEST(Run, EmptyFuzzRun) {
  const auto out = scratch("fuzz0");
  const std::string text = "kind = ell-fuzz\ntrials = 0\nout = " + out.string() + "\n";
  EXPECT_EQ(run(parse_config(text), text), 0);
  EXPECT_EQ(slurp(out / "trials.csv"), "family,instance,applicable,ok,failure\n");
  auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["schema"], kReportSchema);
  EXPECT_EQ(manifest["kind"], "ell-fuzz");
  EXPECT_TRUE(manifest.contains("timestamp"));
  std::filesystem::remove_all(out);
}

TEST(Run, ByteIdenticalRerun) {
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  auto text = [](const std::filesystem::path& p) { return "kind = taxonomy-census\nn = 5000\nd = 10\ntrials = 20\nseed = 4\nout = " + p.string() + "\n"; };
  ASSERT_EQ(run(parse_config(text(a)), text(a)), 0);
  ASSERT_EQ(run(parse_config(text(b)), text(b)), 0);
  EXPECT_EQ(slurp(a / "trials.csv"), slurp(b / "trials.csv"));
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
  auto ma = nlohmann::json::parse(slurp(a / "manifest.json")), mb = nlohmann::json::parse(slurp(b / "manifest.json"));
  for (auto* m : {&ma, &mb}) {
    m->erase("timestamp");
    (*m)["config"].erase("out");
  }
  EXPECT_EQ(ma, mb);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Run, WorkerCountDoesNotChangeResults) {
  auto cfg = parse_config("kind = estimator-identities\nn = 2000\nd = 20\ntrials = 4\n");
  setenv("RRD_WORKERS", "1", 1);
  auto one = run_suite(cfg);
  setenv("RRD_WORKERS", "3", 1);
  auto three = run_suite(cfg);
  unsetenv("RRD_WORKERS");
  EXPECT_EQ(one.rows, three.rows);
  EXPECT_EQ(one.summary, three.summary);
}

TEST(Suite, UniformityTable) {
  auto R = run_suite(parse_config("kind = uniformity\nn = 4\nd = 2\ndraws = 900\nmcmc_draws = 90\nmcmc_proposals = 200\nmultigraph_draws = 900\n"));
  EXPECT_EQ(R.rows.size(), 90u);
  EXPECT_EQ(R.summary["states"], 90);
  std::int64_t total = 0;
  for (const auto& r : R.rows) total += std::stoll(r[2]);
  EXPECT_EQ(total, 900);
}

TEST(Suite, ZEquivalenceSmall) {
  auto R = run_suite(parse_config("kind = z-equivalence\ndraws = 2000\n"));
  EXPECT_LT(R.summary["tv"].get<double>(), 0.1);
}

TEST(Csv, Escaping) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::ostringstream os;
  write_csv(os, {"a", "b"}, {{"1", "x,y"}});
  EXPECT_EQ(os.str(), "a,b\n1,\"x,y\"\n");
}

TEST(Csv, ShortestRoundTripDoubles) {
  for (double v : {0.1, 1.0 / 3, 1e-300, -2.5, 123456789.125}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}
