#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "solwalk/io.hpp"
#include "solwalk/pisot.hpp"
#include "test_util.hpp"

using namespace solwalk;

namespace {

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() /
              ("solwalk_io_" + std::to_string(Rng(std::random_device{}()).next()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("measure json round-trip") {
    SECTION("product form") {
        StepMeasure mu = make_solomyak(std::log(2.0), 0.7, YRule::IndependentSign);
        MeasureFile back = measure_from_json(measure_to_json(mu));
        REQUIRE(back.step.product_form.has_value());
        CHECK(back.step.product_form->gamma == mu.product_form->gamma);
        REQUIRE(back.step.atoms.size() == mu.atoms.size());
        for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
            CHECK(close_elem(back.step.atoms[i].first, mu.atoms[i].first, 1e-15));
            CHECK_THAT(back.step.atoms[i].second,
                       Catch::Matchers::WithinRel(mu.atoms[i].second, 1e-14));
        }
        CHECK(!back.spec.has_value());
        CHECK(!back.lattice.has_value());
    }

    SECTION("pisot polynomial is retained") {
        PisotCertificate cert = certify_pisot({1, -3, 1});
        StepMeasure mu = make_erdos(cert, {{1, 0.7}, {-1, 0.3}}, 0.6, 0.2);
        MeasureFile back = measure_from_json(measure_to_json(mu));
        CHECK(back.step.pisot_poly == std::vector<long long>{1, -3, 1});
        CHECK(back.step.product_form.has_value());
    }

    SECTION("raw atoms") {
        StepMeasure mu;
        mu.atoms = {{{0.5, 1.25, -3.0}, 0.375}, {{-0.25, 0.0, 7.0}, 0.625}};
        MeasureFile back = measure_from_json(measure_to_json(mu));
        CHECK(!back.step.product_form.has_value());
        REQUIRE(back.step.atoms.size() == 2);
        CHECK(back.step.atoms[0].first.x == 1.25);
        CHECK(back.step.atoms[0].second == 0.375);
        CHECK(back.step.atoms[1].first.y == 7.0);
    }

    SECTION("lattice measure with exact coordinates and recomputed spec") {
        LatticeSpec spec = make_lattice({{{2, 1}, {1, 1}}});
        LatticeMeasure lm;
        lm.atoms = {{{1, bigint(0), bigint(0)}, 0.5}, {{0, bigint(1), bigint(0)}, 0.5}};
        MeasureFile back = measure_from_json(measure_to_json(spec, lm));
        REQUIRE(back.spec.has_value());
        CHECK(back.spec->T == spec.T);
        CHECK(back.spec->gamma == spec.gamma);  // recomputed from T, same arithmetic
        REQUIRE(back.lattice.has_value());
        REQUIRE(back.lattice->atoms.size() == 2);
        CHECK(back.lattice->atoms[0].first == LatticeElement{0, bigint(1), bigint(0)});
        CHECK(back.lattice->atoms[1].first == LatticeElement{1, bigint(0), bigint(0)});
        REQUIRE(back.step.atoms.size() == 2);
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(close_elem(back.step.atoms[i].first,
                             embed(spec, back.lattice->atoms[i].first), 1e-15));
    }
}

TEST_CASE("measure json validation") {
    SECTION("weights near 1 are renormalized, further off rejected") {
        nlohmann::json j = {{"kind", "atoms"},
                            {"atoms",
                             {{{"z", 1.0}, {"x", 0.0}, {"y", 0.0}, {"w", 0.5 + 2e-10}},
                              {{"z", -1.0}, {"x", 1.0}, {"y", 0.0}, {"w", 0.5}}}}};
        MeasureFile mf = measure_from_json(j);  // inside 1e-9, loads
        double total = mf.step.atoms[0].second + mf.step.atoms[1].second;
        CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-15));

        j["atoms"][0]["w"] = 0.5 + 1e-8;
        CHECK_THROWS_AS(measure_from_json(j), validation_error);
    }

    SECTION("structural errors") {
        CHECK_THROWS_AS(measure_from_json(nlohmann::json{{"gamma", 1.0}}), validation_error);
        CHECK_THROWS_AS(measure_from_json(nlohmann::json{{"kind", "mystery"}}), validation_error);
        nlohmann::json no_atoms = {{"kind", "atoms"}};
        CHECK_THROWS_AS(measure_from_json(no_atoms), validation_error);
        nlohmann::json bad_t = {{"kind", "lattice"}, {"T", {1, 2, 3, 4}}, {"atoms", nlohmann::json::array()}};
        CHECK_THROWS_AS(measure_from_json(bad_t), validation_error);
        nlohmann::json bad_product = {{"kind", "product"}, {"gamma", 0.5}};
        CHECK_THROWS_AS(measure_from_json(bad_product), validation_error);
    }

    SECTION("lattice spec validation propagates") {
        nlohmann::json j = {{"kind", "lattice"},
                            {"T", {{1, 1}, {0, 1}}},  // trace 2: not hyperbolic
                            {"atoms", {{{"r", 1}, {"p", 0}, {"q", 0}, {"w", 1.0}}}}};
        CHECK_THROWS_AS(measure_from_json(j), validation_error);
    }
}

TEST_CASE("sample files") {
    TempDir tmp;
    std::vector<double> v = {0.0,     -1.5,        3.141592653589793, 1e-300,
                             -1e300,  0.1,         2.0 / 3.0,         5e-324,
                             1.0 / 3.0, -0.7223341608918601};

    SECTION("binary round-trip is bit-exact") {
        std::string p = tmp.path("s.bin");
        write_samples(p, v, SampleFormat::Binary);
        std::vector<double> back = read_samples(p);
        REQUIRE(back.size() == v.size());
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
    }

    SECTION("binary layout is magic, LE count, LE payload") {
        std::string p = tmp.path("s.bin");
        write_samples(p, {1.0}, SampleFormat::Binary);
        std::ifstream in(p, std::ios::binary);
        std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        REQUIRE(data.size() == 24);
        CHECK(data.substr(0, 8) == "SOLXI001");
        CHECK(data[8] == 1);  // count 1, little-endian
        for (int i = 9; i < 16; ++i) CHECK(data[i] == 0);
        CHECK(static_cast<unsigned char>(data[23]) == 0x3f);  // 1.0 = 0x3ff0..0, LE tail
        CHECK(static_cast<unsigned char>(data[22]) == 0xf0);
    }

    SECTION("csv round-trips doubles through 17 significant digits") {
        std::string p = tmp.path("s.csv");
        write_samples(p, v, SampleFormat::Csv);
        std::vector<double> back = read_samples(p);
        REQUIRE(back.size() == v.size());
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
    }

    SECTION("empty sample sets survive both formats") {
        std::string p = tmp.path("e.bin");
        write_samples(p, {}, SampleFormat::Binary);
        CHECK(read_samples(p).empty());
        std::string q = tmp.path("e.csv");
        write_samples(q, {}, SampleFormat::Csv);
        CHECK(read_samples(q).empty());
    }

    SECTION("corrupt files are rejected") {
        std::string p = tmp.path("bad.bin");
        {
            std::ofstream out(p, std::ios::binary);
            out << "SOLXI001";
            char n[8] = {5, 0, 0, 0, 0, 0, 0, 0};  // claims 5 doubles, provides none
            out.write(n, 8);
        }
        CHECK_THROWS_AS(read_samples(p), validation_error);

        std::string q = tmp.path("bad.csv");
        {
            std::ofstream out(q);
            out << "1.5\nnot-a-number\n";
        }
        CHECK_THROWS_AS(read_samples(q), validation_error);

        CHECK_THROWS_AS(read_samples(tmp.path("missing.bin")), validation_error);
    }
}

TEST_CASE("measure files on disk") {
    TempDir tmp;
    std::string p = tmp.path("m.json");
    StepMeasure mu = make_solomyak(1.0, 0.8);
    save_json(p, measure_to_json(mu));
    MeasureFile back = load_measure(p);
    CHECK(back.step.product_form->gamma == 1.0);
    CHECK(back.step.atoms.size() == 4);

    std::string bad = tmp.path("bad.json");
    {
        std::ofstream out(bad);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_measure(bad), validation_error);
    CHECK_THROWS_AS(load_measure(tmp.path("missing.json")), validation_error);
}

TEST_CASE("parse_poly") {
    CHECK(parse_poly("1,-1,-1") == std::vector<long long>{1, -1, -1});
    CHECK(parse_poly("1, -3, 1") == std::vector<long long>{1, -3, 1});
    CHECK(parse_poly("7") == std::vector<long long>{7});
    CHECK_THROWS_AS(parse_poly(""), validation_error);
    CHECK_THROWS_AS(parse_poly("1,a,2"), validation_error);
    CHECK_THROWS_AS(parse_poly("1,,2"), validation_error);
    CHECK_THROWS_AS(parse_poly("1.5,2"), validation_error);
}
