#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>

#include "support/cli_runner.hpp"

using nlohmann::json;

namespace {

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path.string();
}

}  // namespace

TEST(Cli, DescribeCars) {
  const auto r = cli::run("describe " + cli::data("cars.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_NEAR(doc["variables"][0]["mean"].get<double>(), 201.4687, 1e-3);
  EXPECT_EQ(doc["n"].get<int>(), 8);
  EXPECT_EQ(doc["covariances"].size(), 6u);
}

TEST(Cli, DescribeDegenerateAndMissing) {
  const auto file = temp_file("ivstat_degenerate.csv", "a_1,b_1,a_2,b_2\n3,3,4,4\n");
  const auto r = cli::run("describe '" + file + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["variables"][0]["variance"].get<double>(), 0.0);
  EXPECT_EQ(doc["variables"][1]["variance"].get<double>(), 0.0);

  const auto missing = cli::run("describe /nonexistent/file.csv");
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("cannot open"), std::string::npos);

  const auto bad = cli::run("describe '" + temp_file("ivstat_bad.csv", "a_1,b_1\n9,3\n") + "'");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("lower > upper at row 1, var 1"), std::string::npos);
}

TEST(Cli, EstimateMedicalAndCars) {
  const auto med = cli::run("estimate " + cli::data("medical.csv") + " --wishart-df 57 --method both");
  ASSERT_EQ(med.code, 0) << med.err;
  const auto doc = json::parse(med.out);
  ASSERT_EQ(doc["estimates"].size(), 2u);
  EXPECT_NEAR(doc["estimates"][0]["mu"][0].get<double>(), 74.5169, 1e-3);
  EXPECT_EQ(doc["estimates"][0]["method"], "ML");
  EXPECT_EQ(doc["estimates"][1]["method"], "Bayes");

  const auto cars = cli::run("estimate " + cli::data("cars.csv") + " --wishart-df 5 --method both");
  ASSERT_EQ(cars.code, 0) << cars.err;
  const auto c = json::parse(cars.out);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double ml = c["estimates"][0]["sigma"][i][j].get<double>();
      EXPECT_NEAR(c["estimates"][1]["sigma"][i][j].get<double>(), 2.0 * ml, 1e-12 * std::abs(2.0 * ml));
    }
}

TEST(Cli, EstimateErrorsAndCi) {
  const auto small = temp_file("ivstat_small.csv", "a_1,b_1,a_2,b_2\n1,2,3,4\n2,5,1,1\n");
  const auto bayes = cli::run("estimate '" + small + "' --wishart-df 2 --method bayes");
  EXPECT_EQ(bayes.code, 3);
  EXPECT_NE(bayes.err.find("posterior mean undefined"), std::string::npos);
  EXPECT_EQ(cli::run("estimate " + cli::data("cars.csv") + " --method ml").code, 2);  // df required
  EXPECT_EQ(cli::run("estimate " + cli::data("cars.csv") + " --wishart-df 5 --method map").code, 2);
  EXPECT_EQ(cli::run("estimate " + cli::data("cars.csv") + " --wishart-df 2").code, 2);  // df < p

  const auto ci = cli::run("estimate " + cli::data("medical.csv") + " --wishart-df 57 --method ml --ci 0.95");
  ASSERT_EQ(ci.code, 0) << ci.err;
  const auto doc = json::parse(ci.out);
  const auto& first = doc["estimates"][0]["ci"]["intervals"][0];
  EXPECT_LT(first["lower"].get<double>(), first["estimate"].get<double>());
  EXPECT_GT(first["upper"].get<double>(), first["estimate"].get<double>());
  EXPECT_EQ(doc["estimates"][0]["ci"]["intervals"].size(), 9u);

  const auto text = cli::run("estimate " + cli::data("medical.csv") + " --wishart-df 57 --out text");
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("Bayes estimation"), std::string::npos);
}

TEST(Cli, SimulateDeterministicAndValidated) {
  const std::string args = "simulate --scenario I --n 100 --reps 200 --seed 7";
  const auto a = cli::run(args), b = cli::run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(cli::run("simulate --scenario IV --n 10").code, 2);
  EXPECT_EQ(cli::run("simulate --scenario II").code, 2);

  const auto two = cli::run("simulate --scenario II --n 50 --reps 20 --seed 1 --out csv");
  ASSERT_EQ(two.code, 0) << two.err;
  for (const char* p : {"sigma1^2,", "sigma2^2,", "sigma12,", "lambda11,", "lambda22,", "lambda12,"})
    EXPECT_NE(two.out.find(std::string("\n") + p), std::string::npos) << p;
  EXPECT_EQ(two.out.substr(0, two.out.find('\n')), "parameter,estimator,mean,sd");
}

TEST(Cli, SimulateFromConfig) {
  const auto cfg = temp_file("ivstat_sim.json", R"({"scenario":"III","n":20,"reps":10,"seed":3})");
  const auto r = cli::run("simulate --config '" + cfg + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["config"]["reps"].get<int>(), 10);
  EXPECT_EQ(doc["config"]["scenario"], "III");
  const auto bad = temp_file("ivstat_sim_bad.json", "{not json");
  EXPECT_EQ(cli::run("simulate --config '" + bad + "'").code, 2);
}

TEST(Cli, GofReportsAndValidates) {
  const auto r = cli::run("gof " + cli::data("cars.csv") + " --wishart-df 5 --bootstrap 30 --seed 1");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["wishart"]["method"], "wishart-gof-boot");
  EXPECT_EQ(doc["wishart"]["config"]["seed"].get<int>(), 1);
  EXPECT_TRUE(doc.contains("mardia"));
  const auto again = cli::run("gof " + cli::data("cars.csv") + " --wishart-df 5 --bootstrap 30 --seed 1");
  EXPECT_EQ(again.out, r.out);

  const auto one = temp_file("ivstat_one.csv", "a_1,b_1\n1,2\n");
  const auto small = cli::run("gof '" + one + "' --wishart-df 2");
  EXPECT_EQ(small.code, 2);
  EXPECT_NE(small.err.find("insufficient observations"), std::string::npos);

  const auto med = cli::run("gof " + cli::data("medical.csv") + " --wishart-df 57 --bootstrap 0 --seed 1");
  ASSERT_EQ(med.code, 0) << med.err;  // a rejection is data, not an error
  EXPECT_EQ(json::parse(med.out)["wishart"]["method"], "wishart-gof");
}

TEST(Cli, RiskReport) {
  const auto r = cli::run("risk --scenario III --n 25 --reps 400 --seed 2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_NEAR(doc["closed_form"]["delta_sigma"].get<double>(), std::log(25.0 / 24.0), 1e-15);
  ASSERT_EQ(doc["comparisons"].size(), 4u);
  EXPECT_EQ(doc["comparisons"][0]["target"], "Sigma");
  EXPECT_EQ(doc["comparisons"][0]["orientation"], "risk-order");
  EXPECT_GT(doc["comparisons"][0]["gap"].get<double>(), 0.0);
  EXPECT_EQ(cli::run("risk --scenario III --reps 1").code, 2);
  EXPECT_EQ(cli::run("risk --scenario V").code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli::run("").code, 2);
  EXPECT_EQ(cli::run("frobnicate").code, 2);
  EXPECT_EQ(cli::run("--help").code, 0);
}
