#include "etadist/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace etadist;

namespace {

std::string temp_path(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / "etadist_test_io";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

template<class T>
T round_trip(const T& value)
{
    std::string path = temp_path("round_trip.json");
    write_json(path, document(metadata("test", json::object(), json::object()), value));
    return read_json(path).at("result").get<T>();
}

} // namespace

TEST(Json, ModelTypesRoundTrip)
{
    ModelPoint mp{0.65, 2, -0.3};
    auto back = round_trip(mp);
    EXPECT_EQ(back.sigma, mp.sigma);
    EXPECT_EQ(back.m, mp.m);
    EXPECT_EQ(back.alpha, mp.alpha);

    MCSample s = sample_p_my(mp, sieve(50), 4, 10);
    auto s2 = round_trip(s);
    EXPECT_EQ(s2.values, s.values);
    EXPECT_EQ(s2.seed, s.seed);

    auto cv = cumulant({0.75, 0, 0}, 12.5);
    auto cv2 = round_trip(cv);
    EXPECT_EQ(cv2.f, cv.f);
    EXPECT_EQ(cv2.f2, cv.f2);
    EXPECT_EQ(cv2.quadrature_primes, cv.quadrature_primes);

    auto k = model_constants(0.7, 1);
    EXPECT_EQ(round_trip(k).C_m, k.C_m);
    auto g = gn_quadrature(0.7, 3);
    EXPECT_EQ(round_trip(g).values, g.values);
}

TEST(Json, PipelineResultsRoundTrip)
{
    SaddleOptions opt;
    opt.min_kappa = 1;
    auto sr = tail_saddle({0.75, 0, 0}, 2.0, opt);
    auto sr2 = round_trip(sr);
    EXPECT_EQ(sr2.tail_main, sr.tail_main);
    EXPECT_EQ(sr2.kappa, sr.kappa);
    EXPECT_EQ(sr2.mp.sigma, 0.75);

    auto md = marginal_density({0.8, 0, 0.2}, {-1.0, 0.0, 0.5});
    auto md2 = round_trip(md);
    EXPECT_EQ(md2.values, md.values);
    EXPECT_EQ(md2.mp.alpha, 0.2);

    auto em = empirical_measure({0.8, 0, 0}, sieve(100), 1e3, 1000);
    auto em2 = round_trip(em);
    EXPECT_EQ(em2.samples, em.samples);
    EXPECT_EQ(em2.t_step, em.t_step);

    DiscrepancyReport rep;
    rep.value = 0.0123;
    rep.argmax = {-1, 0.5, -0.25, 2};
    rep.family_size = 17;
    auto rep2 = round_trip(rep);
    EXPECT_EQ(rep2.argmax.d2, 2);
    EXPECT_EQ(rep2.family_size, 17u);

    auto rf = default_rectangle_family(1e4, 5);
    EXPECT_EQ(round_trip(rf).rectangles.size(), rf.rectangles.size());

    MellinBracket mb{0.1, 0.2, 0.3, 0.4, 1e-9};
    EXPECT_EQ(round_trip(mb).second, 0.4);
}

TEST(Json, MetadataAndErrors)
{
    auto meta = metadata("density", json{{"sigma", 0.75}}, json{{"tol", 1e-6}});
    EXPECT_EQ(meta.at("version"), version);
    EXPECT_EQ(meta.at("parameters").at("sigma"), 0.75);
    std::string ts = meta.at("timestamp");
    EXPECT_EQ(ts.size(), 20u);
    EXPECT_EQ(ts.back(), 'Z');
    // keys are sorted, so the dump is reproducible
    std::string dumped = meta.dump();
    EXPECT_LT(dumped.find("command"), dumped.find("error_budgets"));

    auto e = error_document(CapacityError("too many"));
    EXPECT_EQ(e.at("error").at("kind"), "capacity");
    EXPECT_EQ(e.at("error").at("exit_code"), 3);
    auto n = error_document(NumericError("no bracket", "f'(1)=2"));
    EXPECT_EQ(n.at("error").at("diagnostics"), "f'(1)=2");
}

TEST(Csv, ExactRoundTripAndSidecar)
{
    CsvTable t({"x", "y"});
    t.row({0.1, 1.0 / 3});
    t.row({-2.5e-300, 6.02e23});
    std::string path = temp_path("table.csv");
    write_csv(path, t, metadata("test", json::object(), json::object()));
    auto d = read_csv(path);
    ASSERT_EQ(d.header, (std::vector<std::string>{"x", "y"}));
    ASSERT_EQ(d.rows.size(), 2u);
    EXPECT_EQ(d.rows[0][1], 1.0 / 3);
    EXPECT_EQ(d.rows[1][0], -2.5e-300);
    auto meta = read_json(sidecar_path(path));
    EXPECT_EQ(meta.at("metadata").at("command"), "test");
    EXPECT_THROW(t.row({1.0}), InternalError);
}

TEST(Csv, EmpiricalMeasureColumns)
{
    auto em = empirical_measure({0.8, 0, 0}, sieve(100), 1e3, 1000);
    std::string path = temp_path("em.csv");
    write_csv(path, to_csv(em), metadata("empirical", json::object(), json::object()));
    auto d = read_csv(path);
    EXPECT_EQ(d.header, (std::vector<std::string>{"t", "re", "im"}));
    ASSERT_EQ(d.rows.size(), em.samples.size());
    EXPECT_EQ(d.rows[500][0], em.t_at(500));
    EXPECT_EQ(d.rows[500][2], em.samples[500].imag());
}
