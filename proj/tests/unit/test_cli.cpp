#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "pcp/error.hpp"
#include "pcp/generators.hpp"
#include "pcp/io.hpp"
#include "pcp/linalg.hpp"
#include "pcp/pipeline.hpp"
#include "pcp/random.hpp"

using namespace pcp;
using nlohmann::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pcp_test_" + name);
}

Matrix awkward_matrix() {
  return Matrix::from_rows({{1.0 / 3.0, -2.5e-300, 1e300}, {0.0, -0.0, 123456789.123456789}});
}

}  // namespace

TEST(Io, CsvRoundTripIsExact) {
  const Matrix m = awkward_matrix();
  std::stringstream ss;
  write_csv(ss, m);
  EXPECT_EQ(read_csv(ss), m);
}

TEST(Io, CsvAcceptsWhitespaceAndComments) {
  std::istringstream in("# a comment\n1 2 3\n4,5,6\n\n");
  const Matrix m = read_csv(in);
  EXPECT_EQ(m, Matrix::from_rows({{1, 2, 3}, {4, 5, 6}}));
}

TEST(Io, CsvErrors) {
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_csv(ragged), IoError);
  std::istringstream bad("1,x\n");
  EXPECT_THROW(read_csv(bad), IoError);
  std::istringstream header("# 3 2\n1,2\n");
  EXPECT_THROW(read_csv(header), IoError);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), IoError);
}

TEST(Io, BinaryRoundTripAndMagic) {
  const Matrix m = awkward_matrix();
  std::stringstream ss;
  write_binary(ss, m);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 4u + 16u + 6u * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "PCPM");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);
  EXPECT_EQ(read_binary(ss), m);
  std::istringstream wrong("XXXX0000");
  EXPECT_THROW(read_binary(wrong), IoError);
}

TEST(Io, FilesByExtension) {
  const Matrix m = awkward_matrix();
  for (const char* name : {"m.csv", "m.pcpm"}) {
    const auto path = temp_path(name).string();
    save_matrix(path, m);
    EXPECT_EQ(load_matrix(path), m);
    std::filesystem::remove(path);
  }
  EXPECT_EQ(format_for_path("x.bin"), MatrixFormat::Binary);
  EXPECT_THROW(load_matrix("/nonexistent/dir/file.csv"), IoError);
}

TEST(Generators, ShapesAndDeterminism) {
  const GeneratorSpec s = parse_generator_spec("lowrank:n=20,d=30,rank=3,noise=0", 5);
  const Matrix a = gen_synthetic(s);
  EXPECT_EQ(a.rows(), 20u);
  EXPECT_EQ(a.cols(), 30u);
  const SvdFactorization f = svd(a);
  ASSERT_EQ(f.rank, 3u);
  EXPECT_NEAR(f.sigma[0], 3.0, 1e-10);
  EXPECT_NEAR(f.sigma[2], 1.0, 1e-10);
  EXPECT_EQ(a, gen_synthetic(s));
  EXPECT_NE(a, gen_synthetic(parse_generator_spec("lowrank:n=20,d=30,rank=3,noise=0", 6)));

  const Matrix p = gen_synthetic(parse_generator_spec("powerlaw:n=10,d=15,alpha=1", 1));
  const SvdFactorization fp = svd(p);
  EXPECT_NEAR(fp.sigma[3], 0.25, 1e-10);

  const Matrix c = gen_synthetic(parse_generator_spec("clustered:n=12,d=4,k=3,noise=0", 1));
  EXPECT_EQ(svd(c).rank, 3u);
}

TEST(Generators, InvalidSpecs) {
  EXPECT_THROW(parse_generator_spec("spiral:n=3,d=3"), ConfigError);
  EXPECT_THROW(parse_generator_spec("lowrank:n=3"), ConfigError);
  EXPECT_THROW(parse_generator_spec("lowrank:n=3,d=3,rank=5"), ConfigError);
  EXPECT_THROW(parse_generator_spec("lowrank:n=3,d=3,colour=1"), ConfigError);
  EXPECT_THROW(parse_generator_spec("lowrank:n=x,d=3"), ConfigError);
}

TEST(Cli, HelpAndUnknownCommand) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({"frobnicate"}).code, kExitError);
  EXPECT_EQ(run({}).code, kExitError);
}

TEST(Cli, CertifyReportSchema) {
  const CliRun r = run({"certify", "--gen", "powerlaw:n=12,d=40,alpha=1", "--method", "gaussian",
                        "--k", "2", "--eps", "0.5", "--m", "30", "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["method"], "gaussian");
  EXPECT_EQ(j["m"], 30);
  EXPECT_EQ(j["params"]["k"], 2);
  for (const char* key : {"se_err", "amm_tail_tail", "amm_tail_vk", "frob_tail"}) {
    EXPECT_TRUE(j["certificate_t1"]["measured"].contains(key)) << key;
  }
  EXPECT_TRUE(j["certificate_t2"]["measured"].contains("spectral_eps"));
  EXPECT_TRUE(j["certificate_t2"]["measured"].contains("lambda_used"));
}

TEST(Cli, CertifyAssertExitCodes) {
  EXPECT_EQ(run({"certify", "--gen", "powerlaw:n=10,d=30", "--method", "svd", "--k", "1", "--eps",
                 "0.5", "--assert"})
                .code,
            kExitAssertionFailed);
  EXPECT_EQ(run({"certify", "--gen", "powerlaw:n=10,d=30", "--method", "orthogonal", "--k", "1",
                 "--eps", "0.5", "--assert"})
                .code,
            kExitOk);
}

TEST(Cli, VerifyAndCsvFormat) {
  const CliRun r = run({"verify", "--gen", "lowrank:n=10,d=50,rank=3,noise=0.01", "--method",
                        "svd", "--k", "2", "--eps", "0.5", "--n-random", "5", "--exhaustive",
                        "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("key,value\n", 0), 0u);
  EXPECT_NE(r.out.find("pcp.pass,true"), std::string::npos);
  EXPECT_NE(r.out.find("pcp.per_probe.0.tag,top-A-1"), std::string::npos);
}

TEST(Cli, VerifyParallelMatchesSerial) {
  const std::vector<std::string> base = {"verify", "--gen", "powerlaw:n=10,d=40", "--method",
                                         "gaussian", "--k", "2", "--eps", "0.5", "--n-random",
                                         "5", "--trials", "4", "--no-certify"};
  std::vector<std::string> par = base;
  par.push_back("--parallel");
  json a = json::parse(run(base).out);
  json b = json::parse(run(par).out);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(a["trials"][t]["pcp"]["max_abs_rel_err"], b["trials"][t]["pcp"]["max_abs_rel_err"]);
  }
  EXPECT_EQ(a["pass_count"], b["pass_count"]);
}

TEST(Cli, VerifyFailureExitCode) {
  const CliRun r = run({"verify", "--gen", "powerlaw:n=10,d=40,alpha=0.2", "--method", "gaussian",
                        "--k", "2", "--eps", "0.05", "--m", "2", "--n-random", "5"});
  EXPECT_EQ(r.code, kExitAssertionFailed);
}

TEST(Cli, SolveTransferSection) {
  const CliRun r = run({"solve", "--gen", "clustered:n=8,d=6,k=2,sep=20", "--method", "svd",
                        "--k", "2", "--eps", "0.5", "--task", "kmeans"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["transfer"]["task"], "kmeans");
  EXPECT_EQ(j["transfer"]["gamma"], 1.0);
  EXPECT_EQ(j["transfer"]["holds"], true);
  EXPECT_LE(j["transfer"]["lhs"].get<double>(), j["transfer"]["rhs"].get<double>());
}

TEST(Cli, GenSketchRoundTripThroughFiles) {
  const auto in = temp_path("cli_in.pcpm").string();
  const auto out = temp_path("cli_out.csv").string();
  ASSERT_EQ(run({"gen", "--gen", "lowrank:n=6,d=20,rank=2", "--out", in}).code, kExitOk);
  const CliRun r = run({"sketch", "--input", in, "--method", "leverage", "--k", "2", "--eps",
                        "0.5", "--m", "8", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Matrix at = load_matrix(out);
  EXPECT_EQ(at.rows(), 6u);
  EXPECT_EQ(at.cols(), 8u);
  std::filesystem::remove(in);
  std::filesystem::remove(out);
}

TEST(Cli, SeedEnvironmentVariable) {
  const std::vector<std::string> args = {"sketch", "--gen", "lowrank:n=4,d=10,rank=2", "--method",
                                         "gaussian", "--m", "3"};
  const std::string default_out = run(args).out;
  ::setenv("PCP_SEED", "99", 1);
  const std::string env_out = run(args).out;
  std::vector<std::string> explicit_args = args;
  explicit_args.insert(explicit_args.end(), {"--seed", "99"});
  ::unsetenv("PCP_SEED");
  EXPECT_NE(default_out, env_out);
  EXPECT_EQ(env_out, run(explicit_args).out);
}

TEST(Cli, ErrorsExitOne) {
  EXPECT_EQ(run({"sketch", "--method", "gaussian"}).code, kExitError);
  EXPECT_EQ(run({"sketch", "--gen", "lowrank:n=4,d=10", "--method", "bogus"}).code, kExitError);
  EXPECT_EQ(run({"sketch", "--input", "/nonexistent.csv"}).code, kExitError);
  EXPECT_EQ(run({"certify", "--gen", "lowrank:n=4,d=10", "--eps", "2"}).code, kExitError);
  EXPECT_EQ(run({"jl-moment", "--family", "sparse"}).code, kExitError);
}

TEST(Cli, JlMomentAndBench) {
  const CliRun r = run({"jl-moment", "--m", "50", "--trials", "20000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["estimate"].get<double>(), 0.04, 0.004);
  const CliRun b = run({"bench", "--gen", "powerlaw:n=20,d=60", "--k", "2", "--methods",
                        "gaussian,svd"});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(json::parse(b.out)["methods"].size(), 2u);
}
