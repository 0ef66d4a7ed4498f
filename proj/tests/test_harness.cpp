#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "covlab/harness.hpp"

namespace {

covlab::ExperimentConfig config_from(const std::string& text) {
  return covlab::make_experiment_config(covlab::parse_config(text));
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesSectionsAndComments) {
  const auto f = covlab::parse_config("# top\nexperiment = vacancy  # trailing\n\n[model]\n  rho = degenerate(1)\n");
  EXPECT_EQ(f.top.get_string("experiment"), "vacancy");
  EXPECT_EQ(f.section("model").get_string("rho"), "degenerate(1)");
  EXPECT_FALSE(f.section("other").has("x"));
}

TEST(Config, Errors) {
  EXPECT_THROW(covlab::parse_config("a = 1\na = 2\n"), covlab::ValidationError);
  EXPECT_THROW(covlab::parse_config("[m]\n[m]\n"), covlab::ValidationError);
  EXPECT_THROW(covlab::parse_config("[m\n"), covlab::ValidationError);
  EXPECT_THROW(covlab::parse_config("just words\n"), covlab::ValidationError);
  EXPECT_THROW(covlab::parse_config("= 3\n"), covlab::ValidationError);
}

TEST(Config, UnknownKeysAreNamed) {
  try {
    covlab::prepare_experiment(config_from("experiment = vacancy\n[model]\nintensty = 1\nintensity = 1\nrho = degenerate(1)\n"));
    FAIL() << "expected a validation error";
  } catch (const covlab::ValidationError& e) {
    EXPECT_EQ(e.field(), "intensty");
  }
  try {
    config_from("experiment = vacancy\nsede = 3\n");
    FAIL() << "expected a validation error";
  } catch (const covlab::ValidationError& e) {
    EXPECT_EQ(e.field(), "sede");
  }
  try {
    config_from("experiment = vacancy\n[extra]\nx = 1\n");
    FAIL() << "expected a validation error";
  } catch (const covlab::ValidationError& e) {
    EXPECT_EQ(e.field(), "extra");
  }
}

TEST(Config, InvalidProbabilityNamesField) {
  try {
    covlab::prepare_experiment(config_from("experiment = lattice-simulate\n[model]\np = 1.2\nrho = degenerate(1)\n"));
    FAIL() << "expected a validation error";
  } catch (const covlab::ValidationError& e) {
    EXPECT_EQ(e.field(), "p");
  }
}

TEST(Config, DistributionErrorsNameTheKey) {
  try {
    covlab::prepare_experiment(config_from("experiment = markov-table\n[model]\np01 = 0.5\np10 = 0.5\nrho = pareto(2)\n"));
    FAIL() << "expected a validation error";
  } catch (const covlab::ValidationError& e) {
    EXPECT_EQ(e.field(), "rho");
  }
  try {
    covlab::prepare_experiment(config_from("experiment = vacancy\n[model]\nintensity = 1\nrho = nonsense(1)\n"));
    FAIL() << "expected a validation error";
  } catch (const covlab::ValidationError& e) {
    EXPECT_EQ(e.field(), "rho");
  }
}

TEST(Config, UnknownKind) {
  try {
    covlab::prepare_experiment(config_from("experiment = nope\n"));
    FAIL() << "expected a validation error";
  } catch (const covlab::ValidationError& e) {
    EXPECT_EQ(e.field(), "experiment");
  }
}

TEST(Config, OverridesWin) {
  covlab::ConfigOverrides ov;
  ov.seed = 9;
  ov.replicates = 3;
  ov.format = "json";
  const auto cfg = covlab::make_experiment_config(covlab::parse_config("experiment = vacancy\nseed = 1\nreplicates = 7\n"), ov);
  EXPECT_EQ(cfg.seed, 9U);
  EXPECT_EQ(cfg.replicates, 3U);
  EXPECT_EQ(cfg.format, covlab::OutputFormat::json);
  EXPECT_THROW(covlab::parse_format("xml"), covlab::ValidationError);
}

TEST(Hash, IgnoresFormattingButNotContent) {
  const auto a = config_from("experiment = vacancy\nseed = 1\n[model]\nintensity = 1\nrho = degenerate(1)\n");
  const auto b = config_from("# c\nseed=1\nexperiment =   vacancy\n\n[model]\nrho=degenerate(1)\nintensity= 1\n");
  const auto c = config_from("experiment = vacancy\nseed = 2\n[model]\nintensity = 1\nrho = degenerate(1)\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16U);
  // out and format do not affect the result and are excluded
  const auto d = config_from("experiment = vacancy\nseed = 1\nformat = json\nout = x.json\n[model]\nintensity = 1\nrho = degenerate(1)\n");
  EXPECT_EQ(a.hash(), d.hash());
}

TEST(Hash, Fnv1aReference) {
  EXPECT_EQ(covlab::hex64(covlab::fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(covlab::hex64(covlab::fnv1a64("a")), "af63dc4c8601ec8c");
}

TEST(Registry, AllKindsListedAndPrepared) {
  const std::vector<std::string> expected{"vacancy",       "full-coverage",    "coverage-profile", "sandwich",
                                          "discretize",    "lattice-simulate", "lattice-series",   "markov-table",
                                          "markov-threshold", "markov-simulate", "cantor-simulate", "cantor-criteria",
                                          "shepp-criterion"};
  ASSERT_EQ(covlab::experiment_registry().size(), expected.size());
  for (const auto& name : expected) EXPECT_NO_THROW(covlab::find_experiment(name)) << name;
}

TEST(Run, DeterministicAcrossThreadCounts) {
  const auto cfg = config_from("experiment = vacancy\nseed = 5\nreplicates = 64\n[model]\nintensity = 2\ndimension = 2\nrho = uniform(0.1, 0.3)\n");
  const auto one = covlab::render(covlab::run_experiment(cfg, 1), covlab::OutputFormat::csv);
  const auto four = covlab::render(covlab::run_experiment(cfg, 4), covlab::OutputFormat::csv);
  const auto seven = covlab::render(covlab::run_experiment(cfg, 7), covlab::OutputFormat::json);
  EXPECT_EQ(one, four);
  EXPECT_EQ(seven, covlab::render(covlab::run_experiment(cfg, 2), covlab::OutputFormat::json));
}

TEST(Render, CsvColumns) {
  struct Case {
    std::string text;
    std::string header;
  };
  const std::vector<Case> cases{
      {"experiment = vacancy\nreplicates = 2\n[model]\nintensity = 1\ndimension = 1\nrho = degenerate(0.5)\n",
       "replicate,vacancy,covered,n_shapes,config_hash"},
      {"experiment = markov-table\n[model]\np01 = 0.6\np10 = 0.3\nrho = degenerate(1)\nK = 3\n",
       "k,P0,P1,P_stationary,config_hash"},
      {"experiment = lattice-simulate\nreplicates = 2\n[model]\np = 0.5\nrho = degenerate(1)\nn = 10\n",
       "replicate,uncovered_count,t_hat,eventually_covered,config_hash"},
      {"experiment = cantor-criteria\n[model]\nintensity = 1\nc = 0.5\ngamma = 1\n",
       "criterion,status,exponent,note,config_hash"},
  };
  for (const auto& c : cases) {
    const auto cfg = config_from(c.text);
    const auto csv = covlab::render(covlab::run_experiment(cfg, 1), covlab::OutputFormat::csv);
    EXPECT_EQ(first_line(csv), c.header);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) EXPECT_TRUE(line.ends_with("," + cfg.hash())) << line;
  }
}

TEST(Render, MarkovTableHandValues) {
  const auto cfg = config_from("experiment = markov-table\n[model]\np01 = 0.6\np10 = 0.3\nrho = degenerate(1)\nK = 3\n");
  const auto res = covlab::run_experiment(cfg, 1);
  ASSERT_EQ(res.rows.size(), 3U);
  EXPECT_NEAR(res.rows[2][1].get<double>(), 0.16, 1e-15);
  EXPECT_NEAR(res.rows[2][2].get<double>(), 0.12, 1e-15);
}

TEST(Render, MarkovThresholdJson) {
  const auto cfg = config_from("experiment = markov-threshold\n[model]\np01 = 0.6\np10 = 0.3\nrho = dpareto(c=2)\n");
  const auto doc = covlab::Json::parse(covlab::render(covlab::run_experiment(cfg, 1), covlab::OutputFormat::json));
  EXPECT_EQ(doc["experiment"], "markov-threshold");
  EXPECT_EQ(doc["provenance"]["config_hash"], cfg.hash());
  EXPECT_EQ(doc["provenance"]["version"], std::string(covlab::kVersion));
  const auto& s = doc["summary"];
  EXPECT_DOUBLE_EQ(s["l"].get<double>(), 2.0);
  EXPECT_DOUBLE_EQ(s["L"].get<double>(), 2.0);
  EXPECT_NEAR(s["pi1"].get<double>(), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(s["inv_l"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(s["inv_L"].get<double>(), 0.5);
  EXPECT_EQ(s["verdict"], "covers-a.s.");
}

TEST(Render, InfiniteValuesAreStrings) {
  const auto cfg = config_from("experiment = markov-threshold\n[model]\np01 = 0.6\np10 = 0.3\nrho = table(1:0.5, 4:0.5)\n");
  const auto doc = covlab::Json::parse(covlab::render(covlab::run_experiment(cfg, 1), covlab::OutputFormat::json));
  EXPECT_EQ(doc["summary"]["inv_l"], "inf");
  EXPECT_EQ(doc["summary"]["verdict"], "does-not-cover-a.s.");
}

TEST(WriteAtomic, ReplacesAndLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "covlab_write_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.csv";
  covlab::write_atomic(path, "first\n");
  covlab::write_atomic(path, "second\n");
  EXPECT_EQ(slurp(path), "second\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.csv.tmp"));
  EXPECT_THROW(covlab::write_atomic(dir / "missing" / "out.csv", "x"), std::runtime_error);
  EXPECT_FALSE(std::filesystem::exists(dir / "missing"));
  std::filesystem::remove_all(dir);
}
