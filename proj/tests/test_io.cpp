#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "bubble_tower/io.hpp"
#include "fixtures.hpp"

using namespace bubble_tower;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("bubble_tower_io_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST(Format, RoundTrips)
{
    for (double x : {0.1, 1.0 / 3.0, 4.337387679975667, -2.5e-300, 1e300, 0.0}) {
        EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
    }
    EXPECT_EQ(io::format_double(NAN), "nan");
    EXPECT_EQ(io::format_double(INFINITY), "inf");
    EXPECT_EQ(io::format_double(-INFINITY), "-inf");
}

TEST(Table, Csv)
{
    io::Table t{{"a", "b"}, {}};
    t.add({1.0, 0.5});
    t.add({-2.0, NAN});
    EXPECT_EQ(t.csv(), "a,b\n1,0.5\n-2,nan\n");
}

TEST(Json, NonFiniteBecomesNull)
{
    EXPECT_TRUE(io::number(NAN).is_null());
    EXPECT_TRUE(io::number(INFINITY).is_null());
    EXPECT_EQ(io::number(2.5).get<double>(), 2.5);
    const auto v = io::vector_json({1.0, NAN});
    EXPECT_TRUE(v[1].is_null());
}

TEST(Json, BalanceSentinel)
{
    BalanceRatios b;
    b.layer = NAN;
    b.layer_defined = false;
    const auto j = io::to_json(b);
    EXPECT_TRUE(j["layer"].is_null());
    EXPECT_FALSE(j["layer_defined"].get<bool>());
}

TEST(Json, ModelKeysInOrder)
{
    const auto j = io::to_json(ModelParams{});
    std::string keys;
    for (const auto& [k, v] : j.items()) keys += k + ",";
    EXPECT_EQ(keys, "N,p,a1,a2,m,tau,");
}

TEST(Json, ProfileSidecar)
{
    const auto j = io::profile_sidecar(fixtures::cubic3());
    EXPECT_EQ(j["N"].get<int>(), 3);
    EXPECT_DOUBLE_EQ(j["C0"].get<double>(), fixtures::cubic3().C0);
    EXPECT_DOUBLE_EQ(j["spacing"].get<double>(), 0.01);
}

TEST(Files, WriteCreatesDirectories)
{
    const auto dir = scratch_dir("write");
    const auto path = dir / "nested" / "x.json";
    io::write_json(path, io::Json{{"a", 1}});
    EXPECT_EQ(slurp(path), "{\n  \"a\": 1\n}\n");
    io::write_file(path, "second");
    EXPECT_EQ(slurp(path), "second");
    fs::remove_all(dir);
}

TEST(Files, UnwritablePathIsIoError)
{
    const auto dir = scratch_dir("blocked");
    fs::create_directories(dir);
    io::write_file(dir / "file", "x");
    try {
        io::write_file(dir / "file" / "child.csv", "y");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::io);
        EXPECT_EQ(e.exit_status(), 4);
    }
    fs::remove_all(dir);
}

TEST(Tables, ProfileTableShape)
{
    const auto t = io::profile_table(fixtures::cubic3());
    EXPECT_EQ(t.columns.size(), 4u);
    EXPECT_EQ(t.rows.size(), fixtures::cubic3().grid.size());
}
