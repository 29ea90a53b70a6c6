#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string cli = BUBBLE_TOWER_CLI;
const std::string config = BUBBLE_TOWER_CONFIG;

fs::path fresh_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("bubble_tower_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

int run(const std::string& args, const std::string& env = {})
{
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + cli + "' " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST(Cli, ProfileArtifacts)
{
    const auto dir = fresh_dir("profile");
    ASSERT_EQ(run("-c '" + config + "' -o '" + dir.string() + "' profile"), 0);
    ASSERT_TRUE(fs::exists(dir / "profile.csv"));
    const auto side = nlohmann::json::parse(slurp(dir / "profile.json"));
    EXPECT_EQ(side["N"].get<int>(), 3);
    EXPECT_GT(side["C0"].get<double>(), 0.0);
    const auto record = nlohmann::json::parse(slurp(dir / "profile_run.json"));
    EXPECT_EQ(record["command"].get<std::string>(), "profile");
    std::ifstream csv(dir / "profile.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "r,U,U1,U2");
    fs::remove_all(dir);
}

TEST(Cli, ModelFlagsOverrideConfig)
{
    const auto dir = fresh_dir("flags");
    ASSERT_EQ(run("-c '" + config + "' -o '" + dir.string() + "' --N 4 --p 2 coeffs"), 0);
    const auto j = nlohmann::json::parse(slurp(dir / "coefficients.json"));
    EXPECT_EQ(j["N"].get<int>(), 4);
    EXPECT_EQ(j["p"].get<double>(), 2.0);
    fs::remove_all(dir);
}

TEST(Cli, InvalidDecayExponentIsConfigError)
{
    const auto dir = fresh_dir("badm");
    EXPECT_EQ(run("-c '" + config + "' -o '" + dir.string() + "' --m 1 critical-point"), 2);
    fs::remove_all(dir);
}

TEST(Cli, MissingConfigIsIoError)
{
    EXPECT_EQ(run("-c /nonexistent/bubble_tower.cfg profile"), 4);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("no-such-command"), 2);
    EXPECT_EQ(run("--set nonsense profile"), 2);
}

TEST(Cli, EnvironmentOutputDirectory)
{
    const auto dir = fresh_dir("env");
    ASSERT_EQ(run("-c '" + config + "' coeffs", "BUBBLE_TOWER_OUT='" + dir.string() + "'"), 0);
    EXPECT_TRUE(fs::exists(dir / "coefficients.json"));
    // An explicit --out wins over the environment.
    const auto other = fresh_dir("env_override");
    ASSERT_EQ(run("-c '" + config + "' -o '" + other.string() + "' coeffs", "BUBBLE_TOWER_OUT='" + dir.string() + "'"), 0);
    EXPECT_TRUE(fs::exists(other / "coefficients.json"));
    fs::remove_all(dir);
    fs::remove_all(other);
}

TEST(Cli, RerunsAreByteIdentical)
{
    const auto a = fresh_dir("rerun_a"), b = fresh_dir("rerun_b");
    for (const auto& dir : {a, b}) {
        ASSERT_EQ(run("-c '" + config + "' -o '" + dir.string() + "' critical-point"), 0);
        ASSERT_EQ(run("-c '" + config + "' -o '" + dir.string() + "' spectrum"), 0);
    }
    for (const char* f : {"critical_points.csv", "critical_points.json", "spectrum.json", "spectrum_mode_l1.csv"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, SpectrumVerdict)
{
    const auto dir = fresh_dir("spectrum");
    ASSERT_EQ(run("-c '" + config + "' -o '" + dir.string() + "' spectrum"), 0);
    const auto j = nlohmann::json::parse(slurp(dir / "spectrum.json"));
    EXPECT_TRUE(j["pass"].get<bool>()) << j.dump();
    fs::remove_all(dir);
}
