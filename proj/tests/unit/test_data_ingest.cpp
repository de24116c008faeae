#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "capexp/data_ingest.hpp"
#include "capexp/error.hpp"

using namespace capexp;

namespace {

TimeSeriesBundle random_bundle(int T, unsigned seed, bool csp = true)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TimeSeriesBundle b;
    b.horizon_hours = T;
    b.has_csp = csp;
    for (int t = 0; t < T; ++t) {
        b.demand_electric.push_back(500.0 + 300.0 * u(rng));
        b.demand_heat.push_back(200.0 * u(rng));
        b.cf_wind.push_back(u(rng));
        b.cf_pv.push_back(u(rng) / 3.0);
        b.cf_csp.push_back(csp ? u(rng) : 0.0);
        b.dni.push_back(csp ? 1.1 * u(rng) : 0.0);
    }
    return b;
}

std::string csv_rows(int rows, int bad_row = -1, const char* bad_wind = "1.2")
{
    std::ostringstream s;
    s << kBundleHeader << "\r\n";
    for (int t = 0; t < rows; ++t)
        s << t << ",600,100," << (t + 1 == bad_row ? bad_wind : "0.4") << ",0.2,0.3,0.8\r\n";
    return s.str();
}

ErrorKind kind_of(const std::string& text, int horizon, std::string* what = nullptr)
{
    std::istringstream in(text);
    try {
        load_bundle(in, horizon);
    } catch (const Error& e) {
        if (what)
            *what = e.what();
        return e.kind();
    }
    ADD_FAILURE() << "load_bundle accepted bad input";
    return ErrorKind::IoError;
}

}  // namespace

TEST(DataIngest, FullYearLoads)
{
    std::istringstream in(csv_rows(8760));
    const TimeSeriesBundle b = load_bundle(in, 8760);
    EXPECT_EQ(b.horizon_hours, 8760);
    EXPECT_TRUE(b.has_csp);
    EXPECT_DOUBLE_EQ(b.cf_wind[8759], 0.4);
    EXPECT_DOUBLE_EQ(b.dni[0], 0.8);
}

TEST(DataIngest, ShortFileIsRowCountMismatch)
{
    EXPECT_EQ(kind_of(csv_rows(8759), 8760), ErrorKind::RowCountMismatch);
}

TEST(DataIngest, OutOfRangeFactorNamesRowAndColumn)
{
    std::string what;
    EXPECT_EQ(kind_of(csv_rows(24, 17), 24, &what), ErrorKind::ValueOutOfRange);
    EXPECT_NE(what.find("row 17"), std::string::npos) << what;
    EXPECT_NE(what.find("cf_wind"), std::string::npos) << what;
}

TEST(DataIngest, NonNumericAndMissingValues)
{
    EXPECT_EQ(kind_of(csv_rows(4, 2, "abc"), 4), ErrorKind::NonNumeric);
    EXPECT_EQ(kind_of(csv_rows(4, 2, ""), 4), ErrorKind::NonNumeric);
    EXPECT_EQ(kind_of(csv_rows(4, 2, "nan"), 4), ErrorKind::NonNumeric);
    EXPECT_EQ(kind_of(csv_rows(4, 2, "0,5"), 4), ErrorKind::ValueOutOfRange);  // shifted columns
}

TEST(DataIngest, MissingRequiredColumn)
{
    std::string what;
    EXPECT_EQ(kind_of("hour,demand_e_mw,cf_wind,cf_pv\n0,1,0.1,0.1\n", 1, &what), ErrorKind::MissingColumn);
    EXPECT_NE(what.find("demand_h_mw"), std::string::npos);
    EXPECT_EQ(kind_of("hour,demand_e_mw,demand_h_mw,cf_wind,cf_pv,cf_csp\n0,1,1,0.1,0.1,0.2\n", 1),
              ErrorKind::MissingColumn);
}

TEST(DataIngest, CspColumnsOptionalAndOrderFree)
{
    std::istringstream in("cf_pv,hour,cf_wind,demand_h_mw,demand_e_mw\n0.25,0,0.5,10,20\n0,1,1,0,30\n");
    const TimeSeriesBundle b = load_bundle(in, 0);
    EXPECT_EQ(b.horizon_hours, 2);
    EXPECT_FALSE(b.has_csp);
    EXPECT_EQ(b.cf_csp, std::vector<double>(2, 0.0));
    EXPECT_DOUBLE_EQ(b.demand_electric[1], 30.0);
    EXPECT_DOUBLE_EQ(b.cf_pv[0], 0.25);
}

TEST(DataIngest, NegativeDemandRejected)
{
    EXPECT_EQ(kind_of("hour,demand_e_mw,demand_h_mw,cf_wind,cf_pv\n0,-1,0,0.1,0.1\n", 1),
              ErrorKind::ValueOutOfRange);
}

TEST(DataIngest, RoundTripIsValueIdentical)
{
    for (bool csp : {true, false}) {
        const TimeSeriesBundle b = random_bundle(200, csp ? 5 : 6, csp);
        std::stringstream buf;
        write_bundle(b, buf);
        const TimeSeriesBundle r = load_bundle(buf, 200);
        EXPECT_EQ(r, b);
        std::stringstream again;
        write_bundle(r, again);
        EXPECT_EQ(again.str(), buf.str());
    }
}

TEST(DataIngest, ValidateRejectsBrokenBundle)
{
    TimeSeriesBundle b = random_bundle(5, 1);
    b.cf_pv.pop_back();
    EXPECT_THROW(b.validate(), Error);
    b = random_bundle(5, 1);
    b.dni[2] = -0.1;
    EXPECT_THROW(b.validate(), Error);
    b = random_bundle(5, 1);
    b.demand_heat[0] = std::nan("");
    EXPECT_THROW(b.validate(), Error);
}

TEST(ProjectDemand, GrowthExamples)
{
    const std::vector<double> base{100.0, 50.0};
    const auto one = project_demand(base, 1, 0.035);
    EXPECT_NEAR(one[0], 103.5, 1e-12);
    EXPECT_NEAR(one[1], 51.75, 1e-12);
    EXPECT_EQ(project_demand(base, 0, 0.035), base);
    const std::vector<double> two{200.0};
    EXPECT_NEAR(project_demand(two, 2, 0.035)[0], 214.245, 1e-9);
    EXPECT_THROW(project_demand(two, 1, -1.0), Error);
    EXPECT_THROW(project_demand(two, -1, 0.035), Error);
}

TEST(SliceBundle, Examples)
{
    const TimeSeriesBundle year = random_bundle(8760, 9);
    const TimeSeriesBundle week = slice_bundle(year, 0, 168);
    EXPECT_EQ(week.horizon_hours, 168);
    EXPECT_EQ(week.cf_wind[167], year.cf_wind[167]);
    try {
        slice_bundle(year, 8700, 168);
        FAIL() << "expected OutOfRange";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
    }
    const TimeSeriesBundle day = random_bundle(24, 10);
    EXPECT_EQ(slice_bundle(day, 0, 24), day);
    const TimeSeriesBundle mid = slice_bundle(year, 4000, 48);
    EXPECT_EQ(mid.demand_heat.front(), year.demand_heat[4000]);
}
