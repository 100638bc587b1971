#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "morphgrad/cli/checkpoint.hpp"
#include "morphgrad/cli/commands.hpp"
#include "morphgrad/cli/history_csv.hpp"
#include "morphgrad/cli/plot.hpp"
#include "morphgrad/cli/run_config.hpp"

using namespace morphgrad;
namespace fs = std::filesystem;

namespace {

const char* kHopperConfig = R"(# small hopper run
[run]
env = hopper
output_dir = out

[policy]
hidden = 4

[train]
generations = 4
population_size = 6
rollouts_per_candidate = 2
master_seed = 9
eval_every = 2
eval_rollouts = 2
checkpoint_every = 2
mu_init_range = 0.3

[optimizer]
rank_shaping = true
use_baseline = false

[morphology]
thigh_length = 0.7 0.75
shin_width = 0.3 0.5

[augmentation]
enabled = true

[hopper]
max_steps = 120
)";

const char* kSphereConfig = R"([run]
env = sphere
[env]
dim = 3
[train]
generations = 1
population_size = 4
rollouts_per_candidate = 1
eval_rollouts = 1
mu_init_range = 1
)";

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("morphgrad_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const fs::path p = path_ / name;
    if (!content.empty()) std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string dir(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Captured {
  std::ostringstream out, err;
  CommandIo io() { return {out, err}; }
};

TrainState sample_state() {
  TrainState s;
  s.generation = 2;
  s.dist = SearchDistribution({0.1, -1.0 / 3.0, 1e-300}, {0.1, 0.2, std::nextafter(0.3, 1.0)});
  s.best_params = {M_PI, -M_E, 5e-324};
  s.best_avg_score = -12.345678901234567;
  s.history = {{1, -3.5, 0.25, 0.1, kUnsetScore}, {2, 1.0 / 7.0, 2.0, 0.11, -12.345678901234567}};
  return s;
}

}  // namespace

TEST(RunConfig, ParsesSectionsAndDefaults) {
  const RunConfig c = parse_run_config(kHopperConfig);
  EXPECT_EQ(c.env_id, "hopper");
  EXPECT_EQ(c.hidden, (std::vector<std::size_t>{4}));
  EXPECT_EQ(c.train.generations, 4u);
  EXPECT_EQ(c.train.master_seed, 9u);
  EXPECT_TRUE(c.optimizer.rank_shaping);
  EXPECT_EQ(c.optimizer.lr_mu, OptimizerConfig{}.lr_mu);
  ASSERT_EQ(c.morphology.size(), 2u);
  EXPECT_EQ(c.morphology.params[1].name, "shin_width");
  EXPECT_EQ(c.morphology.params[1].scale_limit, 0.5);
  EXPECT_TRUE(c.augment);
  EXPECT_EQ(c.hopper.max_steps, 120u);
}

TEST(RunConfig, RoundTripIsLossless) {
  RunConfig c = parse_run_config(kHopperConfig);
  c.optimizer.lr_mu = 0.1 + 0.2;
  c.hopper.design[2] = 1.0 / 3.0;
  c.hopper.contact_stiffness = 12345.678901234567;
  EXPECT_EQ(parse_run_config(serialize(c)), c);
  EXPECT_EQ(serialize(parse_run_config(serialize(c))), serialize(c));

  RunConfig s;
  s.env_id = "springmass";
  s.policy = PolicyKind::kReference;
  s.morphology.params = {{"leg_length", 1.0, 0.75}};
  s.springmass.drive_frequency = 0.7;
  s.hidden = {};
  EXPECT_EQ(parse_run_config(serialize(s)), s);

  RunConfig b = parse_run_config(kSphereConfig);
  EXPECT_EQ(parse_run_config(serialize(b)), b);
}

TEST(RunConfig, MissingEnvNamesTheField) {
  try {
    parse_run_config("[train]\ngenerations = 3\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "run.env");
  }
}

TEST(RunConfig, UnknownKeyReportsLine) {
  try {
    parse_run_config("[run]\nenv = sphere\n[env]\ndim = 2\n\n[train]\ngenerashuns = 3\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "train.generashuns");
    EXPECT_EQ(e.line(), 7u);
  }
}

TEST(RunConfig, BadValuesAreConfigErrors) {
  const std::string base = "[run]\nenv = sphere\n[env]\ndim = 2\n";
  EXPECT_THROW(parse_run_config(base + "[train]\ngenerations = -1\n"), ConfigError);
  EXPECT_THROW(parse_run_config(base + "[optimizer]\nlr_mu = fast\n"), ConfigError);
  EXPECT_THROW(parse_run_config(base + "[optimizer]\nrank_shaping = yes\n"), ConfigError);
  EXPECT_THROW(parse_run_config(base + "[optimizer]\nlr_mu = 0\n"), ConfigError);
  EXPECT_THROW(parse_run_config(base + "[nonsense]\n"), ConfigError);
  EXPECT_THROW(parse_run_config(base + "no equals sign\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[run]\nenv = walker\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[run]\nenv = hopper\n[morphology]\nwing = 1 0.75\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[run]\nenv = hopper\n[morphology]\nshin_width = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[run]\nenv = hopper\n[policy]\nkind = reference\n"), ConfigError);
}

TEST(RunConfig, DigestIgnoresOutputDirOnly) {
  RunConfig a = parse_run_config(kHopperConfig);
  RunConfig b = a;
  b.output_dir = "elsewhere";
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 16u);
  b.optimizer.lr_mu = std::nextafter(a.optimizer.lr_mu, 1.0);
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(RunConfig, MakeTaskDimensions) {
  const RunConfig c = parse_run_config(kHopperConfig);
  const auto task = make_task(c);
  EXPECT_EQ(task->partition().policy_len, parameter_count({8, {4}, 2}));
  EXPECT_EQ(task->partition().morph_len, 2u);
  EXPECT_EQ(make_task(parse_run_config(kSphereConfig))->dim(), 3u);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-310, 1e308, 5e-324, -0.0, M_PI, HUGE_VAL, -HUGE_VAL}) {
    const double back = parse_double(format_double(v));
    EXPECT_EQ(std::memcmp(&back, &v, sizeof v), 0) << format_double(v);
  }
  EXPECT_THROW(parse_double("1.0x"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  const RunConfig c = parse_run_config(kHopperConfig);
  const TrainState s = sample_state();
  const Checkpoint back = parse_checkpoint(format_checkpoint(c, s));
  EXPECT_EQ(back.config, c);
  EXPECT_EQ(back.state.generation, s.generation);
  EXPECT_EQ(back.state.dist.mu, s.dist.mu);
  EXPECT_EQ(back.state.dist.sigma, s.dist.sigma);
  EXPECT_EQ(back.state.best_params, s.best_params);
  EXPECT_EQ(back.state.best_avg_score, s.best_avg_score);
  EXPECT_EQ(back.state.history, s.history);
  EXPECT_EQ(format_checkpoint(back.config, back.state), format_checkpoint(c, s));
}

TEST(Checkpoint, UnsetBestSurvives) {
  const RunConfig c = parse_run_config(kSphereConfig);
  TrainState s;
  s.dist = SearchDistribution::isotropic({0.0, 0.0, 0.0}, 0.1);
  const Checkpoint back = parse_checkpoint(format_checkpoint(c, s));
  EXPECT_EQ(back.state.best_avg_score, kUnsetScore);
  EXPECT_FALSE(back.state.has_best());
  EXPECT_TRUE(back.state.history.empty());
}

TEST(Checkpoint, TamperedConfigIsDigestMismatch) {
  const RunConfig c = parse_run_config(kHopperConfig);
  std::string text = format_checkpoint(c, sample_state());
  text.replace(text.find("generations = 4"), 15, "generations = 5");
  EXPECT_THROW(parse_checkpoint(text), DigestMismatchError);
}

TEST(Checkpoint, MalformedTextIsCheckpointError) {
  const RunConfig c = parse_run_config(kHopperConfig);
  const std::string text = format_checkpoint(c, sample_state());
  EXPECT_THROW(parse_checkpoint(text.substr(0, text.size() / 2)), CheckpointError);
  EXPECT_THROW(parse_checkpoint("morphgrad-checkpoint 2\n"), CheckpointError);
  EXPECT_THROW(parse_checkpoint(""), CheckpointError);
  std::string bad = text;
  bad.replace(bad.find("sigma "), 6, "sigma x");
  EXPECT_THROW(parse_checkpoint(bad), CheckpointError);
  EXPECT_THROW(load_checkpoint("/nonexistent/ckpt.txt"), CheckpointError);
}

TEST(Checkpoint, RequireSameConfig) {
  const RunConfig c = parse_run_config(kHopperConfig);
  const Checkpoint ck{c, sample_state()};
  EXPECT_NO_THROW(require_same_config(ck, c));
  RunConfig other = c;
  other.train.master_seed = 10;
  EXPECT_THROW(require_same_config(ck, other), DigestMismatchError);
}

TEST(HistoryCsv, RoundTripAndHeader) {
  const auto rows = sample_state().history;
  const std::string text = format_history_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kHistoryHeader);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(parse_history_csv(text), rows);
}

TEST(HistoryCsv, ErrorsNameTheLine) {
  const std::string header = std::string(kHistoryHeader) + "\n";
  auto line_of = [](const std::string& text) {
    try {
      parse_history_csv(text);
    } catch (const CsvError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of(header + "1,0,0,0.1,0\n2,0,0,0.1\n"), 3u);
  EXPECT_EQ(line_of(header + "1,0,0,0.1,0\n2,a,0,0.1,0\n"), 3u);
  EXPECT_EQ(line_of(header + "x,0,0,0.1,0\n"), 2u);
  EXPECT_EQ(line_of("gen,mean\n1,2\n"), 1u);
  EXPECT_EQ(line_of(""), 1u);
  EXPECT_NE(line_of(header), 0u);  // header only
}

TEST(Plot, SingleRowGivesPointPerSeries) {
  const std::string svg = render_history_svg({{"run", {{1, -2.0, 1.0, 0.1, 0.5}}}});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("<polyline"), std::string::npos);
  std::size_t circles = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1))
    ++circles;
  EXPECT_EQ(circles, 2u);  // one per panel
}

TEST(Plot, OverlaidSeriesCarryLabels) {
  const auto rows = sample_state().history;
  const std::string svg = render_history_svg({{"joint", rows}, {"fixed<1>", rows}});
  EXPECT_NE(svg.find(">joint<"), std::string::npos);
  EXPECT_NE(svg.find(">fixed&lt;1&gt;<"), std::string::npos);
}

TEST(Commands, TrainWritesHistoryAndCheckpoints) {
  TempDir tmp;
  const std::string cfg = tmp.file("run.cfg", kHopperConfig);
  Captured cap;
  ASSERT_EQ(cmd_train(cfg, std::nullopt, tmp.dir("out"), 0, cap.io()), kExitOk) << cap.err.str();
  const auto rows = read_history_csv(tmp.dir("out/history.csv"));
  EXPECT_EQ(rows.size(), 4u);
  EXPECT_TRUE(fs::exists(tmp.dir("out/checkpoint_gen2.txt")));
  EXPECT_TRUE(fs::exists(tmp.dir("out/checkpoint_gen4.txt")));
  const Checkpoint ck = load_checkpoint(tmp.dir("out/checkpoint.txt"));
  EXPECT_EQ(ck.state.history, rows);
  EXPECT_NE(cap.out.str().find("trained 4 generations"), std::string::npos);
}

TEST(Commands, OneGenerationGivesOneRow) {
  TempDir tmp;
  Captured cap;
  ASSERT_EQ(cmd_train(tmp.file("s.cfg", kSphereConfig), std::nullopt, tmp.dir("o"), 1, cap.io()),
            kExitOk);
  const std::string csv = slurp(tmp.dir("o/history.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Commands, ResumeReproducesUninterruptedHistory) {
  TempDir tmp;
  const std::string cfg = tmp.file("run.cfg", kHopperConfig);
  Captured cap;
  ASSERT_EQ(cmd_train(cfg, std::nullopt, tmp.dir("a"), 0, cap.io()), kExitOk);
  ASSERT_EQ(cmd_train(cfg, tmp.dir("a/checkpoint_gen2.txt"), tmp.dir("b"), 3, cap.io()), kExitOk);
  EXPECT_EQ(slurp(tmp.dir("a/history.csv")), slurp(tmp.dir("b/history.csv")));
  const Checkpoint a = load_checkpoint(tmp.dir("a/checkpoint.txt"));
  const Checkpoint b = load_checkpoint(tmp.dir("b/checkpoint.txt"));
  EXPECT_EQ(format_checkpoint(a.config, a.state), format_checkpoint(a.config, b.state));
}

TEST(Commands, ExitCodes) {
  TempDir tmp;
  Captured cap;
  EXPECT_EQ(cmd_train(tmp.file("bad.cfg", "[train]\ngenerations = 1\n"), std::nullopt,
                      tmp.dir("o"), 1, cap.io()),
            kExitConfig);
  EXPECT_NE(cap.err.str().find("run.env"), std::string::npos);
  EXPECT_EQ(cmd_train(tmp.dir("missing.cfg"), std::nullopt, tmp.dir("o"), 1, cap.io()),
            kExitConfig);

  const std::string hopper = tmp.file("h.cfg", kHopperConfig);
  ASSERT_EQ(cmd_train(hopper, std::nullopt, tmp.dir("h"), 0, cap.io()), kExitOk);
  const std::string sphere = tmp.file("s.cfg", kSphereConfig);
  EXPECT_EQ(cmd_train(sphere, tmp.dir("h/checkpoint.txt"), tmp.dir("s"), 1, cap.io()), kExitDigest);
  EXPECT_EQ(cmd_train(sphere, tmp.file("junk.txt", "junk\n"), tmp.dir("s"), 1, cap.io()),
            kExitCheckpoint);

  EXPECT_EQ(cmd_eval(tmp.dir("nope.txt"), 4, 0, 1, cap.io()), kExitCheckpoint);
  EXPECT_EQ(cmd_plot({tmp.file("e.csv", std::string(kHistoryHeader) + "\n")}, tmp.dir("p.svg"),
                     cap.io()),
            kExitCsv);
  EXPECT_EQ(cmd_plot({tmp.file("m.csv", std::string(kHistoryHeader) + "\n1,2\n")},
                     tmp.dir("p.svg"), cap.io()),
            kExitCsv);
  EXPECT_NE(cap.err.str().find("line 2"), std::string::npos);
}

TEST(Commands, PlotUsesFileStems) {
  TempDir tmp;
  const auto rows = sample_state().history;
  const std::string a = tmp.file("joint.csv", format_history_csv(rows));
  const std::string b = tmp.file("fixed.csv", format_history_csv(rows));
  Captured cap;
  ASSERT_EQ(cmd_plot({a, b}, tmp.dir("p.svg"), cap.io()), kExitOk);
  const std::string svg = slurp(tmp.dir("p.svg"));
  EXPECT_NE(svg.find(">joint<"), std::string::npos);
  EXPECT_NE(svg.find(">fixed<"), std::string::npos);
}

TEST(Commands, EvalDeterministicEnvHasZeroStd) {
  TempDir tmp;
  Captured cap;
  ASSERT_EQ(cmd_train(tmp.file("s.cfg", kSphereConfig), std::nullopt, tmp.dir("o"), 1, cap.io()),
            kExitOk);
  ASSERT_EQ(cmd_eval(tmp.dir("o/checkpoint.txt"), 7, 3, 0, cap.io()), kExitOk);
  EXPECT_NE(cap.out.str().find("+- 0\n"), std::string::npos) << cap.out.str();
  EXPECT_NE(cap.out.str().find("morphology: fixed (baseline)"), std::string::npos);
}

TEST(Commands, EvalMorphologyTableAtClampFloor) {
  TempDir tmp;
  RunConfig c;
  c.env_id = "springmass";
  c.policy = PolicyKind::kReference;
  c.morphology.params = {{"leg_thickness", 8.0, 0.75}};
  TrainState s;
  s.dist = SearchDistribution({-5.0}, {0.1});
  save_checkpoint(tmp.dir("ck.txt"), c, s);
  Captured cap;
  ASSERT_EQ(cmd_eval(tmp.dir("ck.txt"), 2, 0, 1, cap.io()), kExitOk) << cap.err.str();
  const std::string out = cap.out.str();
  const auto row = out.substr(out.find("leg_thickness"));
  EXPECT_NE(row.find("8.000"), std::string::npos);
  EXPECT_NE(row.find("2.000"), std::string::npos);
  EXPECT_NE(row.find("25.0%"), std::string::npos);
}

TEST(Commands, MultirunSummary) {
  TempDir tmp;
  const std::string cfg = tmp.file("s.cfg", kSphereConfig);
  Captured cap;
  ASSERT_EQ(cmd_multirun(cfg, 1, tmp.dir("one"), 1, cap.io()), kExitOk);
  EXPECT_EQ(slurp(tmp.dir("one/summary.csv")).substr(0, 16), "run,final_score\n");
  std::string one = slurp(tmp.dir("one/summary.csv"));
  EXPECT_EQ(std::count(one.begin(), one.end(), '\n'), 2);

  ASSERT_EQ(cmd_multirun(cfg, 3, tmp.dir("three"), 1, cap.io()), kExitOk);
  std::istringstream in(slurp(tmp.dir("three/summary.csv")));
  std::string line;
  std::getline(in, line);
  std::set<std::string> scores;
  while (std::getline(in, line)) scores.insert(line.substr(line.find(',') + 1));
  EXPECT_EQ(scores.size(), 3u);
  EXPECT_TRUE(fs::exists(tmp.dir("three/run2/history.csv")));
  EXPECT_NE(cap.out.str().find("over 3 runs"), std::string::npos);
}
