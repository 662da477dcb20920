#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "latincut/config.hpp"
#include "latincut/error.hpp"
#include "latincut/output.hpp"
#include "latincut/runner.hpp"

using namespace latincut;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("latincut_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

// Small ellipse run: 8x8 base grid, one study level, reference one level finer.
const char* kTinyRun =
    "experiment = ellipse\n"
    "mesh.nx = 8\n"
    "mesh.ny = 8\n"
    "mesh.levels = 1\n"
    "mesh.reference_level = 1\n"
    "latin.it_max = 12\n"
    "run.checkpoints = 3, 12\n";

int run_cli(const std::string& args, const fs::path& stderr_file) {
  const std::string cmd = std::string(LATINCUT_CLI) + " " + args + " > /dev/null 2> " + stderr_file.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(ParseConfig, EmptyTextGivesDefaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c, RunConfig{});
  EXPECT_EQ(c.problem, ellipse_case());
  EXPECT_EQ(c.problem.latin.eta, 0.85);
  EXPECT_EQ(c.problem.latin.it_max, 200);
  EXPECT_EQ(c.problem.latin.quad_points, 2);
}

TEST(ParseConfig, CommentsAndWhitespace) {
  const RunConfig c = parse_config("# leading comment\n\n  latin.eta   =  0.85   # trailing\nlatin.it_max=30\n");
  EXPECT_EQ(c.problem.latin.eta, 0.85);
  EXPECT_EQ(c.problem.latin.it_max, 30);
}

TEST(ParseConfig, OutOfRangeValueIsAValidationError) {
  EXPECT_EQ(kind_of([] { parse_config("latin.eta = 1.5\n"); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { parse_config("latin.k_plus = 2\n"); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { parse_config("mesh.reference_level = 2\n"); }), ErrorKind::Validation);
}

TEST(ParseConfig, MalformedInputNamesTheLine) {
  const std::string unknown = message_of([] { parse_config("latin.eta = 0.5\nlatin.etta = 0.5\n"); });
  EXPECT_NE(unknown.find("line 2"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("latin.etta"), std::string::npos) << unknown;
  EXPECT_EQ(kind_of([] { parse_config("latin.etta = 0.5\n"); }), ErrorKind::Parse);

  const std::string missing = message_of([] { parse_config("# ok\n\nlatin.eta 0.5\n"); });
  EXPECT_NE(missing.find("line 3"), std::string::npos) << missing;
  EXPECT_EQ(kind_of([] { parse_config("latin.eta = 0.5\nlatin.eta = 0.6\n"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_config("latin.it_max = many\n"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_config("latin.mode = p2p2\n"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_config("geometry.levelsets = square(1)\n"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_config("experiment = sphere\n"); }), ErrorKind::Validation);
}

TEST(ParseConfig, ExperimentSelectsAPreset) {
  const RunConfig c = parse_config("mesh.nx = 12\nexperiment = two-inclusions\n");
  EXPECT_EQ(c.problem.experiment, "two-inclusions");
  EXPECT_EQ(c.problem.num_subdomains(), 3);
  EXPECT_EQ(c.problem.nx, 12);
  for (const auto& e : experiment_catalog()) EXPECT_NO_THROW(experiment_preset(e.name).validate()) << e.name;
}

TEST(ParseConfig, FreeComponentsAndTractions) {
  const RunConfig c = parse_config("bc.left.ux = 0\nbc.top.ux = free\nbc.right.tx = 0.25\n");
  EXPECT_EQ(c.problem.sides[side_index(BoundaryTag::Left)].ux, 0.0);
  EXPECT_FALSE(c.problem.sides[side_index(BoundaryTag::Top)].ux.has_value());
  EXPECT_EQ(c.problem.sides[side_index(BoundaryTag::Right)].tx, 0.25);
  EXPECT_EQ(kind_of([] { parse_config("bc.top.ty = 1\n"); }), ErrorKind::Validation);
}

TEST(RoundTrip, PresetsAreBitExact) {
  for (const auto& e : experiment_catalog()) {
    const RunConfig c = experiment_preset(e.name);
    EXPECT_EQ(parse_config(to_config_text(c)), c) << e.name;
  }
}

TEST(RoundTrip, ModifiedConfigIsBitExact) {
  RunConfig c = experiment_preset("ellipse");
  c.problem.levelsets = {LevelSetFunction::min_union({LevelSetFunction::circle({0.1, -1.0 / 3.0}, 0.123456789012345),
                                                      LevelSetFunction::ellipse(0.7, 0.3, 1.0 / 7.0, {0.2, 0.1})}),
                         LevelSetFunction::halfplane(-0.3, 1e-17, -2.0)};
  c.problem.grouping = {0, -1, 1};
  c.problem.youngs = {1.0 / 3.0, 2e5};
  c.problem.nu = 0.1 + 0.2;
  c.problem.sides[1].tx = std::nextafter(1.0, 2.0);
  c.problem.embedded.uy = -0.0;
  c.problem.body_force = {0.0, -9.81};
  c.problem.dirichlet_method = DirichletMethod::Nitsche;
  c.problem.nitsche_data_symmetry = false;
  c.problem.latin.mode = InterfaceMode::P1P0;
  c.problem.latin.law = ContactLaw::Bonded;
  c.problem.latin.normal_slope = 3.3e-7;
  c.checkpoints = {1, 2, 300};
  c.sweep_eps = {1e-300, 0.1};
  c.output_dir = "some dir/with spaces";
  c.compare_p1p0 = true;
  c.workers = 3;
  ASSERT_NO_THROW(c.validate());
  const RunConfig back = parse_config(to_config_text(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(to_config_text(back), to_config_text(c));
  EXPECT_TRUE(std::signbit(*back.problem.embedded.uy));
}

TEST(RoundTrip, EveryKeyIsWritten) {
  const std::string text = to_config_text(RunConfig{});
  std::map<std::string, int> seen;
  for (const auto& line : lines_of(text)) seen[line.substr(0, line.find(" ="))]++;
  for (const auto& k : config_keys()) EXPECT_EQ(seen[k], 1) << k;
}

TEST(Environment, OverridesApplyLast) {
  std::map<std::string, std::string> env{{"LATINCUT_LATIN_ETA", "0.5"}, {"LATINCUT_MESH_NX", " 10 "}};
  const EnvLookup lookup = [&](const std::string& k) -> std::optional<std::string> {
    auto it = env.find(k);
    return it == env.end() ? std::nullopt : std::optional(it->second);
  };
  const RunConfig c = parse_config("latin.eta = 0.7\n", lookup);
  EXPECT_EQ(c.problem.latin.eta, 0.5);
  EXPECT_EQ(c.problem.nx, 10);
  env["LATINCUT_LATIN_ETA"] = "2";
  EXPECT_EQ(kind_of([&] { parse_config("", lookup); }), ErrorKind::Validation);
  env["LATINCUT_LATIN_ETA"] = "x";
  const std::string msg = message_of([&] { parse_config("", lookup); });
  EXPECT_NE(msg.find("LATINCUT_LATIN_ETA"), std::string::npos) << msg;
  EXPECT_EQ(env_name("bc.top.uy"), "LATINCUT_BC_TOP_UY");
}

TEST(Csv, ConvergenceTableHasRatesAndHeader) {
  TempDir dir;
  std::vector<LevelResult> levels(2);
  levels[0] = {0, 0.1, 0.4, 0.3, {}};
  levels[1] = {1, 0.05, 0.2, 0.1 / 3.0, {}};
  const fs::path p = dir.path() / "convergence.csv";
  write_convergence_csv(p.string(), levels);
  const auto l = lines_of(read_file(p));
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "h,H1_error,energy_error,rate_to_previous");
  EXPECT_EQ(l[1].back(), ',');
  std::vector<double> v;
  std::stringstream row(l[2]);
  for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::strtod(cell.c_str(), nullptr));
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[2], 0.1 / 3.0);  // full round-trip precision
  EXPECT_NEAR(v[3], std::log(9.0) / std::log(2.0), 1e-14);
}

TEST(Csv, OtherTablesHaveTheirHeaders) {
  TempDir dir;
  const auto first_line = [](const fs::path& p) { return lines_of(read_file(p)).at(0); };
  write_iterations_csv((dir.path() / "a.csv").string(), std::vector<IterationSample>{{1, 0.5, 0.25}});
  EXPECT_EQ(first_line(dir.path() / "a.csv"), "it,energy_error_vs_ref,latin_indicator");
  write_profile_csv((dir.path() / "b.csv").string(), std::vector<ProfilePoint>{{0.1, -1.0, 0.2}});
  EXPECT_EQ(first_line(dir.path() / "b.csv"), "theta,traction");
  write_condition_csv((dir.path() / "c.csv").string(), std::vector<ConditionSample>{{1e-6, 0.0, 0.1, {}}});
  EXPECT_EQ(first_line(dir.path() / "c.csv"), "eps,gamma_g,kappa");
  write_scaling_csv((dir.path() / "d.csv").string(), std::vector<ConditionSample>{{0.25, 0.1, 0.1, {}}});
  EXPECT_EQ(first_line(dir.path() / "d.csv"), "h,kappa");
  EXPECT_EQ(kind_of([] { write_text("/nonexistent-dir/x.csv", "x"); }), ErrorKind::Io);
}

TEST(Vtk, UniformStrainGivesUniformStress) {
  TempDir dir;
  const auto mesh = std::make_shared<const TriMesh>(build_structured_mesh({{-1.2, -1.2}, {1.2, 1.2}}, 6, 6));
  std::vector<DiscreteLevelSet> ls{interpolate_levelset(LevelSetFunction::ellipse(1.0, 0.5, 0.654545), mesh)};
  const Geometry g = build_geometry(mesh, ls);
  const FESpace space(*mesh, g.domains[1]);
  Eigen::VectorXd u(space.num_dofs());
  for (int v = 0; v < space.num_vertices(); ++v) {
    const Vec2 p = mesh->vertex(space.vertices()[v]);
    u[2 * v] = 0.1 * p.x;
    u[2 * v + 1] = 0.0;
  }
  const fs::path p = dir.path() / "f.vtk";
  write_vtk(p.string(), space, u, "inclusion");
  const auto l = lines_of(read_file(p));
  EXPECT_EQ(l[0], "# vtk DataFile Version 3.0");
  EXPECT_EQ(l[2], "ASCII");
  EXPECT_EQ(l[3], "DATASET UNSTRUCTURED_GRID");
  const Material m;
  const double sxx = 0.1 * (m.lambda() + 2 * m.mu()), syy = 0.1 * m.lambda();
  std::map<std::string, std::vector<double>> scalars;
  std::string current;
  double area = 0.0;
  std::vector<Vec2> points;
  for (std::size_t k = 0; k < l.size(); ++k) {
    if (l[k].rfind("POINTS ", 0) == 0) {
      const int n = std::stoi(l[k].substr(7));
      for (int j = 1; j <= n; ++j) {
        std::istringstream row(l[k + j]);
        Vec2 q;
        row >> q.x >> q.y;
        points.push_back(q);
      }
    }
    if (l[k].rfind("SCALARS ", 0) == 0) {
      std::istringstream head(l[k]);
      std::string tag;
      head >> tag >> current;
      ++k;  // LOOKUP_TABLE
      continue;
    }
    if (!current.empty() && !l[k].empty() && l[k].rfind("SCALARS", 0) != 0) scalars[current].push_back(std::stod(l[k]));
  }
  for (std::size_t t = 0; t + 2 < points.size(); t += 3)
    area += 0.5 * cross(points[t + 1] - points[t], points[t + 2] - points[t]);
  EXPECT_NEAR(area, g.domains[1].area(), 1e-12);
  ASSERT_EQ(scalars["stress_xx"].size(), points.size() / 3);
  for (double s : scalars["stress_xx"]) EXPECT_NEAR(s, sxx, 1e-13);
  for (double s : scalars["stress_yy"]) EXPECT_NEAR(s, syy, 1e-13);
  for (double s : scalars["stress_xy"]) EXPECT_NEAR(s, 0.0, 1e-13);
}

TEST(Runner, OutputsAreByteStable) {
  TempDir a, b;
  RunConfig c = parse_config(kTinyRun);
  c.output_dir = a.path().string();
  std::ostringstream log;
  const auto files = run_experiment(c, log);
  c.output_dir = b.path().string();
  const auto again = run_experiment(c, log);
  ASSERT_EQ(files, again);
  // resolved config differs only in its output_dir line
  for (const auto& f : files) {
    if (f == "config.resolved") continue;
    EXPECT_EQ(read_file(a.path() / f), read_file(b.path() / f)) << f;
  }
  for (const char* expected : {"convergence.csv", "iterations.csv", "profile_3.csv", "profile_12.csv",
                               "fields_it3_sub0.vtk", "fields_it12_sub1.vtk", "config.resolved"}) {
    EXPECT_TRUE(fs::exists(a.path() / expected)) << expected;
  }
  EXPECT_EQ(lines_of(read_file(a.path() / "iterations.csv")).size(), 13u);
  EXPECT_EQ(parse_config(read_file(a.path() / "config.resolved")).problem, c.problem);
}

TEST(Runner, ConditionSweepWritesOneRowPerPair) {
  TempDir dir;
  RunConfig c = parse_config("experiment = crack-condition\nmesh.nx = 12\nmesh.ny = 12\nstudy.eps = 0.25, 1e-4\n"
                             "study.gamma_g = 0, 0.1\n");
  c.output_dir = dir.path().string();
  std::ostringstream log;
  run_experiment(c, log);
  const auto l = lines_of(read_file(dir.path() / "condition.csv"));
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[0], "eps,gamma_g,kappa");
}

TEST(Cli, ExitCodesAndErrorRecords) {
  TempDir dir;
  const fs::path err = dir.path() / "stderr.txt";
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir.path() / name) << text;
    return (dir.path() / name).string();
  };
  EXPECT_EQ(run_cli("list-experiments", err), 0);
  EXPECT_EQ(run_cli("validate " + write("ok.cfg", kTinyRun), err), 0);
  EXPECT_EQ(run_cli("run " + write("ok2.cfg", kTinyRun) + " -o " + (dir.path() / "out").string(), err), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "convergence.csv"));

  EXPECT_EQ(run_cli("validate " + write("bad.cfg", "latin.etta = 1\n"), err), 1);
  const std::string record = read_file(err);
  EXPECT_NE(record.find("\"error\":\"parse\""), std::string::npos) << record;
  EXPECT_NE(record.find("\"stage\":\"config\""), std::string::npos) << record;
  EXPECT_NE(record.find("\"exit_code\":1"), std::string::npos) << record;
  EXPECT_EQ(run_cli("validate " + write("range.cfg", "latin.eta = 1.5\n"), err), 1);
  EXPECT_EQ(run_cli("validate " + (dir.path() / "missing.cfg").string(), err), 1);
  EXPECT_EQ(run_cli("frobnicate", err), 1);

  // a level set outside the box leaves the inclusion empty: a run-stage failure
  const std::string empty = std::string(kTinyRun) + "geometry.levelsets = circle(5, 5, 0.1)\n";
  EXPECT_EQ(run_cli("run " + write("empty.cfg", empty) + " -o " + (dir.path() / "o2").string(), err), 2);
  const std::string run_record = read_file(err);
  EXPECT_NE(run_record.find("\"stage\":\"run\""), std::string::npos) << run_record;
  EXPECT_NE(run_record.find("\"exit_code\":2"), std::string::npos) << run_record;

  EXPECT_EQ(run_cli("validate " + write("env.cfg", kTinyRun), err), 0);
  const std::string with_env = "LATINCUT_LATIN_ETA=3 " + std::string(LATINCUT_CLI) + " validate " +
                               (dir.path() / "env.cfg").string() + " > /dev/null 2> " + err.string();
  const int status = std::system(with_env.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
}
