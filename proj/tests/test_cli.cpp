#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = MIXEDBVP_CLI_PATH;
const std::string kConfigs = MIXEDBVP_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mixedbvp_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args, const fs::path& stderr_file = {}) {
    std::string cmd = "\"" + kCli + "\" " + args;
    cmd += stderr_file.empty() ? " 2>/dev/null" : " 2>\"" + stderr_file.string() + "\"";
    cmd += " >/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json report(const fs::path& dir) { return json::parse(slurp(dir / "report.json")); }

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST(Cli, ZarembaReportsHalfExponent) {
    const fs::path out = scratch("zaremba");
    ASSERT_EQ(run("run " + kConfigs + "/zaremba.cfg zaremba --out " + out.string()), 0);
    const json r = report(out);
    EXPECT_EQ(r["command"], "zaremba");
    EXPECT_TRUE(r["solve"]["converged"].get<bool>());
    EXPECT_NEAR(r["holder_fit"]["gamma_hat"].get<double>(), 0.5, 0.05);
    EXPECT_EQ(r["theory"]["laplace_wedge_exponent"].get<double>(), 0.5);
    const std::string csv = slurp(out / "field.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,y,u,node_class");
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
    EXPECT_TRUE(fs::exists(out / "residual_history.csv"));
}

TEST(Cli, BadEllipticityExitsOneNamingField) {
    const fs::path out = scratch("bad");
    const fs::path err = out / "stderr.txt";
    EXPECT_EQ(run("run " + kConfigs + "/bad.cfg solve --out " + out.string(), err), 1);
    const json r = report(out);
    EXPECT_EQ(r["error"]["code"], "InvalidEllipticity");
    EXPECT_EQ(r["error"]["field"], "operator.A");
    EXPECT_NE(slurp(err).find("operator.A"), std::string::npos);
    EXPECT_FALSE(fs::exists(out / "field.csv"));
}

TEST(Cli, ConeCertificatePasses) {
    const fs::path out = scratch("cone");
    EXPECT_EQ(run("run " + kConfigs + "/cone.cfg certify-barriers --out " + out.string()), 0);
    const json r = report(out);
    EXPECT_TRUE(r["passed"].get<bool>());
    ASSERT_EQ(r["certificates"].size(), 3u);
    for (const auto& c : r["certificates"]) {
        EXPECT_TRUE(c["passed"].get<bool>());
        EXPECT_EQ(c["sample_count"], 10000);
        EXPECT_GT(c["min_margin_interior"].get<double>(), 0.0);
    }
}

TEST(Cli, ParseErrorExitsOneWithPosition) {
    const fs::path out = scratch("parse");
    const fs::path cfg = write_config(out, "broken.cfg", "[grid]\nh = 1/32\ndirections = many\n");
    const fs::path err = out / "stderr.txt";
    EXPECT_EQ(run("run " + cfg.string() + " solve --out " + out.string(), err), 1);
    EXPECT_NE(slurp(err).find("broken.cfg:3:14"), std::string::npos) << slurp(err);
    const json r = report(out);
    EXPECT_EQ(r["error"]["code"], "ConfigParse");
    EXPECT_EQ(r["error"]["field"], "grid.directions");
}

TEST(Cli, MissingConfigExitsOne) {
    const fs::path out = scratch("missing");
    EXPECT_EQ(run("run " + (out / "nope.cfg").string() + " solve --out " + out.string()), 1);
    EXPECT_EQ(report(out)["error"]["code"], "ConfigParse");
}

TEST(Cli, UnknownCommandExitsOne) {
    const fs::path out = scratch("unknown");
    EXPECT_EQ(run("run " + kConfigs + "/zaremba.cfg explode --out " + out.string()), 1);
}

TEST(Cli, NotConvergedExitsTwo) {
    const fs::path out = scratch("notconv");
    const fs::path cfg = write_config(out, "short.cfg", "[solver]\nmax_iters = 3\ntol = 1e-12\n[source]\nvalue = 1\n");
    EXPECT_EQ(run("run " + cfg.string() + " solve --out " + out.string()), 2);
    const json r = report(out);
    EXPECT_FALSE(r["solve"]["converged"].get<bool>());
    EXPECT_EQ(r["exit_code"], 2);
    EXPECT_TRUE(fs::exists(out / "field.csv"));
}

TEST(Cli, FlagsOverrideConfig) {
    const fs::path out = scratch("flags");
    ASSERT_EQ(run("run " + kConfigs + "/zaremba.cfg solve --h 0.125 --tol 1e-9 --seed 5 --threads 2 --out " +
                  out.string()),
              0);
    const json r = report(out);
    EXPECT_EQ(r["solve"]["h"].get<double>(), 0.125);
    EXPECT_EQ(r["solve"]["tol"].get<double>(), 1e-9);
    EXPECT_EQ(r["seed"], 5);
    const json m = json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(m["flags"]["threads"], 2);
    EXPECT_EQ(m["flags"]["h"].get<double>(), 0.125);
}

TEST(Cli, ReportsAreByteIdentical) {
    const fs::path a = scratch("repro_a"), b = scratch("repro_b");
    const std::string args = "run " + kConfigs + "/cone.cfg certify-barriers --seed 3 --out ";
    ASSERT_EQ(run(args + a.string()), 0);
    ASSERT_EQ(run(args + b.string()), 0);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));

    const std::string solve = "run " + kConfigs + "/zaremba.cfg zaremba --h 0.0625 --out ";
    ASSERT_EQ(run(solve + a.string()), 0);
    ASSERT_EQ(run(solve + b.string()), 0);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
    EXPECT_EQ(slurp(a / "field.csv"), slurp(b / "field.csv"));
}

TEST(Cli, ManifestRerunReproducesReport) {
    const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
    ASSERT_EQ(run("run " + kConfigs + "/zaremba.cfg zaremba --h 0.0625 --seed 11 --out " + a.string()), 0);
    ASSERT_EQ(run("rerun " + (a / "manifest.json").string() + " --out " + b.string()), 0);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
    EXPECT_EQ(slurp(a / "field.csv"), slurp(b / "field.csv"));
    EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
}

TEST(Cli, CompareAndRefine) {
    const fs::path out = scratch("compare");
    ASSERT_EQ(run("run " + kConfigs + "/compare.cfg compare --h 0.0625 --out " + out.string()), 0);
    json r = report(out);
    EXPECT_TRUE(r["passed"].get<bool>());
    EXPECT_EQ(r["pairs"].size(), 4u);
    EXPECT_LE(r["max_gap"].get<double>(), 1e-10);

    ASSERT_EQ(run("run " + kConfigs + "/zaremba.cfg refine --out " + out.string()), 0);
    r = report(out);
    EXPECT_TRUE(r["refinement"]["complete"].get<bool>());
    EXPECT_TRUE(r["refinement"]["cauchy_shrinking"].get<bool>());
    EXPECT_EQ(r["refinement"]["rows"].size(), 3u);
}
