#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli_app.hpp"
#include "splitrec/series_io.hpp"

using namespace splitrec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("splitrec-test-" + name);
}

}  // namespace

TEST_CASE("complex series CSV format is exact") {
    const GridFunction one(1, {cx{1.0, 0.0}});
    REQUIRE(complex_series_csv(one) == "k,re,im,abs,phase_rad\n1,1,0,1,0\n");
}

TEST_CASE("empty series are rejected") {
    REQUIRE_THROWS_AS(real_series_csv(1, {}), EmptySeries);
    REQUIRE_THROWS_WITH(real_series_csv(1, {}), "empty series");
}

TEST_CASE("real series CSV keeps the absolute index") {
    REQUIRE(real_series_csv(5, {0.5, -1.0}) == "k,value\n5,0.5\n6,-1\n");
}

TEST_CASE("number formatting round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.0221407599999996e23, -0.0003}) {
        const std::string s = format_number(v);
        REQUIRE(std::stod(s) == v);
    }
}

TEST_CASE("table CSV lines up columns") {
    REQUIRE(real_table_csv(1, {{"g", {1.0, 2.0}}, {"u", {0.5, 0.25}}}) ==
            "k,g,u\n1,1,0.5\n2,2,0.25\n");
    REQUIRE_THROWS_AS(real_table_csv(1, {{"g", {1.0}}, {"u", {0.5, 0.25}}}), Error);
}

TEST_CASE("complex literal parsing") {
    using cli::parse_complex;
    REQUIRE(parse_complex("3+0.03i") == cx{3.0, 0.03});
    REQUIRE(parse_complex("3-0.03i") == cx{3.0, -0.03});
    REQUIRE(parse_complex("-2.5") == cx{-2.5, 0.0});
    REQUIRE(parse_complex("0.9") == cx{0.9, 0.0});
    REQUIRE(parse_complex("2i") == cx{0.0, 2.0});
    REQUIRE(parse_complex("-1e-3+4e2i") == cx{-1e-3, 4e2});
    REQUIRE_THROWS(parse_complex("3 + 2i"));
    REQUIRE_THROWS(parse_complex("abc"));
}

TEST_CASE("CLI exit codes") {
    SECTION("unknown subcommand is a usage error") {
        REQUIRE(cli::run_cli({"frobnicate"}) == 2);
    }
    SECTION("missing subcommand is a usage error") {
        REQUIRE(cli::run_cli({}) == 2);
    }
    SECTION("domain errors exit with 1") {
        REQUIRE(cli::run_cli({"slab-smatrix", "--n1", "50", "--n2", "20", "--output",
                              temp_file("never.csv").string()}) == 1);
    }
    SECTION("valid run exits with 0") {
        const fs::path f = temp_file("ok.csv");
        REQUIRE(cli::run_cli({"slab-exact", "--output", f.string()}) == 0);
        fs::remove(f);
    }
}

TEST_CASE("closed-form CLI run emits the reference values as JSON") {
    const fs::path f = temp_file("exact.json");
    REQUIRE(cli::run_cli({"slab-exact", "--eps2", "3+0.03i", "--xi1", "6.2831853",
                          "--xi2", "69.115038", "--output", f.string()}) == 0);
    const ordered_json j = ordered_json::parse(slurp(f));
    REQUIRE(j["R"]["re"].get<double>() == Catch::Approx(-0.3207).margin(5e-4));
    REQUIRE(j["R"]["im"].get<double>() == Catch::Approx(-0.065787).margin(5e-4));
    REQUIRE(j["T"]["re"].get<double>() == Catch::Approx(-0.2185).margin(5e-4));
    REQUIRE(j["T"]["im"].get<double>() == Catch::Approx(0.4836).margin(5e-4));
    fs::remove(f);
}

TEST_CASE("reference slab CSV starts at |1 + R|") {
    const fs::path f = temp_file("field.csv");
    REQUIRE(cli::run_cli({"slab-smatrix", "--defaults-paper", "--output", f.string()}) ==
            0);
    const std::string text = slurp(f);
    REQUIRE(text.rfind("k,re,im,abs,phase_rad\n", 0) == 0);

    // First data row: node 1, |Y_1| should sit near |1 + R| with the
    // reference reflection R ~ -0.318 - 0.0519i.
    std::istringstream lines(text);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    std::istringstream cells(row);
    std::string k, re, im, abs_txt;
    std::getline(cells, k, ',');
    std::getline(cells, re, ',');
    std::getline(cells, im, ',');
    std::getline(cells, abs_txt, ',');
    REQUIRE(k == "1");
    const double y1_abs = std::stod(abs_txt);
    REQUIRE(y1_abs == Catch::Approx(std::abs(cx{1.0 - 0.318, -0.051929})).margin(2e-3));
    fs::remove(f);
}

TEST_CASE("repeated CLI runs are byte-identical") {
    const fs::path f1 = temp_file("det1.csv");
    const fs::path f2 = temp_file("det2.csv");
    for (const fs::path& f : {f1, f2})
        REQUIRE(cli::run_cli({"cavity-backward", "--u1", "0.1", "--cells", "100",
                              "--output", f.string()}) == 0);
    REQUIRE(slurp(f1) == slurp(f2));
    REQUIRE_FALSE(slurp(f1).empty());
    fs::remove(f1);
    fs::remove(f2);
}

TEST_CASE("cavity design CLI emits g and u columns") {
    const fs::path f = temp_file("design.csv");
    REQUIRE(cli::run_cli({"cavity-design", "--u1", "0.03", "--phi", "2.0943951", "--q",
                          "10000", "--cells", "10", "--output", f.string()}) == 0);
    const std::string text = slurp(f);
    REQUIRE(text.rfind("k,g,u\n", 0) == 0);
    REQUIRE(std::count(text.begin(), text.end(), '\n') == 11);  // header + 10 rows
    fs::remove(f);
}

TEST_CASE("JSON output of the ramp run flags the transfer overflow") {
    const fs::path f = temp_file("ramp.json");
    REQUIRE(cli::run_cli({"slab-ramp", "--format", "json", "--output", f.string()}) == 0);
    const ordered_json j = ordered_json::parse(slurp(f));
    REQUIRE(j["transfer_overflow_at"].is_number_integer());
    REQUIRE(j["scatter_completed"].get<bool>());
    fs::remove(f);
}
