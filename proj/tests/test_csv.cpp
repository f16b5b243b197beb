#include "hybev/csv.hpp"
#include "hybev/errors.hpp"
#include "hybev/preprocess.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hybev;

namespace {

CsvSchema tum_schema() {
    CsvSchema s;
    s.columns = {
        {"Time", "time"},
        {"Trip.id", "trip_id"},
        {"Seasonality", "seasonality"},
        {"Weather", "weather"},
        {"Velocity", "velocity"},
        {"Elevation", "elevation"},
        {"Battery temperature", "battery_temp"},
        {"Requested heating power", "heating_power"},
        {"Air conditioner power", "ac_power"},
        {"Ambient temperature", "ambient_temp"},
        {"Battery current", "battery_current"},
        {"Battery voltage", "battery_voltage"},
    };
    return s;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("hybev_test_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_SUITE("csv") {

TEST_CASE("three rows parse into a trip of length three") {
    std::istringstream in("time,velocity,elevation\n0,0,500\n1,10,500\n2,20,501\n");
    const TripSeries trip = parse_trip_csv(in, CsvSchema::canonical(), "a");
    CHECK(trip.size() == 3);
    CHECK(trip.velocity == Channel{0, 10, 20});
    CHECK(trip.trip_id == "a");
}

TEST_CASE("non-monotone time is a data error") {
    std::istringstream in("time,velocity,elevation\n0,0,500\n2,10,500\n1,20,501\n");
    CHECK_THROWS_AS(parse_trip_csv(in, CsvSchema::canonical()), DataError);
}

TEST_CASE("missing mandatory column is a schema error") {
    std::istringstream in("time,velocity\n0,0\n1,10\n");
    CHECK_THROWS_AS(parse_trip_csv(in, CsvSchema::canonical()), SchemaError);
}

TEST_CASE("all twelve documented columns populate their channels") {
    std::ostringstream csv;
    csv << "Time,Trip.id,Seasonality,Weather,Velocity,Elevation,Battery temperature,"
           "Requested heating power,Air conditioner power,Ambient temperature,"
           "Battery current,Battery voltage\n";
    csv << "100.0,T7,winter,cloudy,30,510,21,2.5,0,4,12,350\n";
    csv << "100.1,T7,winter,cloudy,31,510,21,2.5,0,4,13,350\n";
    std::istringstream in(csv.str());
    const TripSeries trip = parse_trip_csv(in, tum_schema());
    CHECK(trip.trip_id == "T7");
    CHECK(trip.seasonality == "winter");
    CHECK(trip.weather == "cloudy");
    CHECK(trip.t[0] == 0.0); // rebased to trip start
    CHECK(trip.t[1] == doctest::Approx(0.1));
    CHECK(trip.battery_temp.has_value());
    CHECK(trip.heating_power.has_value());
    CHECK(trip.ac_power.has_value());
    CHECK(trip.ambient_temp == Channel{4, 4});
    CHECK(trip.battery_current == Channel{12, 13});
    CHECK(trip.battery_voltage == Channel{350, 350});
}

TEST_CASE("empty cells become gaps for imputation") {
    std::istringstream in("time,velocity,elevation,ambient_temp\n0,0,500,5\n1,10,500,\n2,20,501,7\n");
    TripSeries trip = parse_trip_csv(in, CsvSchema::canonical(), "g");
    CHECK(std::isnan((*trip.ambient_temp)[1]));
    interpolate_trip(trip);
    CHECK((*trip.ambient_temp)[1] == doctest::Approx(6.0));
}

TEST_CASE("panel round-trips through save and load") {
    TempDir dir;
    PanelDataset panel;
    for (int i = 0; i < 2; ++i) {
        TripSeries trip;
        trip.trip_id = "t" + std::to_string(i);
        trip.t = {0, 1, 2};
        trip.velocity = {0, 10.5, 20.25};
        trip.elevation = {500, 500.125, 501};
        trip.ambient_temp = Channel{3.5, 3.5, 3.5};
        trip.battery_current = Channel{1, 2, 3};
        trip.battery_voltage = Channel{350, 350, 350};
        trip.seasonality = i == 0 ? "summer" : "winter";
        trip.weather = "sunny";
        trip.route = "city";
        derive_channels(trip);
        panel.trips.push_back(trip);
    }
    save_panel(panel, dir.path);
    const PanelDataset loaded = load_panel(dir.path / "manifest.json", CsvSchema::canonical());
    REQUIRE(loaded.trips.size() == 2);
    CHECK(loaded.trips[0].trip_id == "t0");
    CHECK(loaded.trips[0].velocity == panel.trips[0].velocity);
    CHECK(loaded.trips[0].seasonality == "summer");
    CHECK(*loaded.trips[0].route == "city");
    CHECK(*loaded.trips[1].measured_energy == *panel.trips[1].measured_energy);
}

TEST_CASE("manifest without trips is rejected") {
    TempDir dir;
    std::ofstream(dir.path / "manifest.json") << "{\"trips\": []}";
    CHECK_THROWS_AS(load_panel(dir.path / "manifest.json", CsvSchema::canonical()), DataError);
}

TEST_CASE("unreadable files surface the path") {
    TempDir dir;
    try {
        load_panel(dir.path / "nope.json", CsvSchema::canonical());
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("nope.json") != std::string::npos);
    }
}

} // TEST_SUITE
