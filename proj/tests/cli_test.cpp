#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Outcome
{
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path()
           / ("c2v_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args)
  {
    fs::path o = dir_ / "stdout", e = dir_ / "stderr";
    std::string cmd = "cd '" + dir_.string() + "' && '" C2V_CLI "' " + args + " >'" + o.string() + "' 2>'"
                      + e.string() + "'";
    int st = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
  }

  std::string corpus(const std::string& stem) { return std::string("'") + C2V_CORPUS_DIR + "/" + stem + ".c'"; }

  fs::path write(const std::string& name, const std::string& text)
  {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, TranslateWritesModuleAndMap)
{
  Outcome r = run("c2v " + corpus("f32_add_wrapper") + " --entry f32_add_wrapper --unwind 64 -o f32_add.sv");
  ASSERT_EQ(r.code, 0) << r.err;
  std::string sv = slurp(dir_ / "f32_add.sv");
  EXPECT_EQ(sv.rfind("module f32_add_wrapper(\n"
                     "  input logic unsigned [31:0] x,\n"
                     "  input logic unsigned [31:0] y,\n"
                     "  output logic unsigned [31:0] res\n"
                     ");\n",
                     0),
            0u);
  auto map = nlohmann::json::parse(slurp(dir_ / "f32_add.map.json"));
  EXPECT_TRUE(map.is_array());
  EXPECT_FALSE(r.out.empty());
}

TEST_F(Cli, ImplicitSubcommandAndDefaultOutput)
{
  Outcome r = run(corpus("wrap_u8") + " --entry wrap_u8");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "wrap_u8.sv"));
  EXPECT_TRUE(fs::exists(dir_ / "wrap_u8.map.json"));
}

TEST_F(Cli, OutputIsDeterministic)
{
  ASSERT_EQ(run(corpus("control_mix") + " --entry control_mix --check all -o a.sv").code, 0);
  ASSERT_EQ(run(corpus("control_mix") + " --entry control_mix --check all -o b.sv").code, 0);
  EXPECT_EQ(slurp(dir_ / "a.sv"), slurp(dir_ / "b.sv"));
  EXPECT_EQ(slurp(dir_ / "a.map.json"), slurp(dir_ / "b.map.json"));
}

TEST_F(Cli, DiagnosticsExitOne)
{
  Outcome r = run(corpus("wrap_u8") + " --entry nosuch");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("E_NO_ENTRY"), std::string::npos) << r.err;
  r = run("c2v missing.c");
  EXPECT_EQ(r.code, 1);
  write("bad.c", "void main(void) {\n  int x = ;\n}\n");
  r = run("c2v bad.c");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.c:2:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("E_SYNTAX"), std::string::npos) << r.err;
  EXPECT_EQ(run("c2v " + corpus("wrap_u8") + " --unwind 0").code, 1);
  EXPECT_EQ(run("").code, 1);
}

TEST_F(Cli, RunPrintsOutputs)
{
  Outcome r = run("run " + corpus("punning_mask") + " --entry punning_mask xin=0x40490FDB");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "res=0x00090FDB\n");
  r = run("run " + corpus("f32_add_wrapper") + " --entry f32_add_wrapper x=0x3F800000 y=0x40000000");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "res=0x40400000\n");
  r = run("run " + corpus("wrap_u8") + " --entry wrap_u8 a=1 b=2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("c=0x2C\n"), std::string::npos) << r.out;
}

TEST_F(Cli, RunAssertFailureExitsThree)
{
  Outcome r = run("run " + corpus("assert_range") + " --entry assert_range x=200");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE((r.out + r.err).find("assert_range.c:"), std::string::npos);
  r = run("run " + corpus("assert_range") + " --entry assert_range x=5");
  EXPECT_EQ(r.code, 0);
}

TEST_F(Cli, RunMissingInputExitsOne)
{
  Outcome r = run("run " + corpus("assert_range") + " --entry assert_range");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("E_MISSING_INPUT"), std::string::npos) << r.err;
}

TEST_F(Cli, CheckExitCodes)
{
  Outcome r = run("check " + corpus("fp_dispatch") + " --entry fp_dispatch");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.find(": FAILS"), std::string::npos);
  EXPECT_NE(r.out.find("3 obligations: 3 HOLDS"), std::string::npos) << r.out;
  r = run("check " + corpus("assert_range") + " --entry assert_range");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find(": FAILS x=0x"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("x=0x"), std::string::npos) << r.out;
  write("hard.c", "#include <stdint.h>\nvoid main(void) {\n  uint32_t x, y;\n"
                  "  C2V_SAMPLE_INPUT(uint32_t, x); C2V_SAMPLE_INPUT(uint32_t, y);\n"
                  "  assert(x * y != 0x12345679u || x == 1 || y == 1);\n}\n");
  r = run("check hard.c --budget 1");
  EXPECT_EQ(r.code, 5) << r.out;
  EXPECT_NE(r.out.find("UNKNOWN"), std::string::npos);
}

TEST_F(Cli, CheckReportsDivisionObligations)
{
  Outcome r = run("check " + corpus("div_mod") + " --entry div_mod --check div,shift,bounds,null");
  EXPECT_NE(r.out.find("div"), std::string::npos) << r.out;
  EXPECT_TRUE(r.code == 0 || r.code == 4);
}

TEST_F(Cli, CheckUnwinding)
{
  Outcome r = run("check " + corpus("sum_loop") + " --entry sum_loop --unwind 2 --unwinding-assertions");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("(no inputs)"), std::string::npos) << r.out;
  r = run("check " + corpus("sum_loop") + " --entry sum_loop --unwind 4 --unwinding-assertions");
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(Cli, EquivVerdicts)
{
  for (const char* stem : {"mf8_add_norm", "mf8_add_shift", "mf8_add_flipped"})
    ASSERT_EQ(run(corpus(stem) + " --entry " + stem + " -o " + stem + ".sv").code, 0);
  Outcome r = run("equiv mf8_add_norm.sv mf8_add_norm.sv");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "HOLDS\n");
  r = run("equiv mf8_add_norm.sv mf8_add_shift.sv --dump-cnf miter.cnf");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(slurp(dir_ / "miter.cnf").rfind("p cnf ", 0), 0u);
  r = run("equiv mf8_add_shift.sv mf8_add_flipped.sv");
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(r.out.rfind("FAILS a=0x", 0), 0u) << r.out;
  r = run("equiv mf8_add_shift.sv mf8_add_flipped.sv --map a=b");
  EXPECT_EQ(r.code, 1);
  write("junk.sv", "module m(\n  input logic a\n);\n  initial a = 1;\nendmodule\n");
  r = run("equiv junk.sv junk.sv");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("E_SUBSET"), std::string::npos) << r.err;
}

TEST_F(Cli, Defines)
{
  write("d.c", "#include <stdint.h>\nvoid main(void) { uint32_t r = W; C2V_DRIVE_OUTPUT(uint32_t, r); }\n");
  Outcome r = run("run d.c -D W=42");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "r=0x0000002A\n");
}
