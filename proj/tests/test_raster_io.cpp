#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "odc/errors.hpp"
#include "odc/image.hpp"
#include "odc/io.hpp"
#include "odc/raster.hpp"
#include "odc/rng.hpp"

using namespace odc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "odc_raster_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Grid<std::uint16_t> random_grid(int h, int w, int maxval, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Grid<std::uint16_t> g(h, w);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    g.data()[i] = static_cast<std::uint16_t>(rng.below(static_cast<std::uint64_t>(maxval) + 1));
  }
  return g;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST(RasterContainer, RoundTripUint8WithGeo) {
  const auto dir = scratch("u8");
  RasterContainer c;
  c.width = 37;
  c.height = 21;
  c.pixels = random_grid(21, 37, 11, 1);
  c.geo_transform = GeoTransform{500000.0, 20.0, 0.0, 5300000.0, 0.0, -20.0};
  c.pixel_size_m = 20.0;
  c.raw_byte_size = 37 * 21 * 13;
  write_raster_container(dir / "scene.json", c);
  EXPECT_TRUE(fs::exists(dir / "scene.bin"));
  EXPECT_EQ(fs::file_size(dir / "scene.bin"), 37u * 21u);

  const auto back = read_raster_container(dir / "scene.json");
  EXPECT_EQ(back.width, 37);
  EXPECT_EQ(back.height, 21);
  EXPECT_EQ(back.dtype, PixelType::UInt8);
  EXPECT_TRUE((back.pixels == c.pixels).all());
  EXPECT_EQ(back.geo_transform, c.geo_transform);
  EXPECT_EQ(back.pixel_size_m, 20.0);
  EXPECT_EQ(back.raw_byte_size, c.raw_byte_size);
  EXPECT_NO_THROW(validate_raster_container(dir / "scene.json"));

  const auto scene = load_scene_raster(dir / "scene.json");
  EXPECT_EQ(scene.raw_byte_size, c.raw_byte_size);
  EXPECT_TRUE((scene.classes.cast<std::uint16_t>() == c.pixels).all());
}

TEST(RasterContainer, RoundTripUint16LittleEndian) {
  const auto dir = scratch("u16");
  RasterContainer c;
  c.width = 5;
  c.height = 3;
  c.dtype = PixelType::UInt16;
  c.semantics = "intensity";
  c.pixels = random_grid(3, 5, 65535, 2);
  c.pixels(0, 0) = 0x1234;
  c.raw_byte_size = 30;
  write_raster_container(dir / "img.json", c);
  const auto bytes = read_file_bytes(dir / "img.bin");
  ASSERT_EQ(bytes.size(), 30u);
  EXPECT_EQ(bytes[0], 0x34);
  EXPECT_EQ(bytes[1], 0x12);
  const auto back = read_raster_container(dir / "img.json");
  EXPECT_TRUE((back.pixels == c.pixels).all());

  const auto tile = depth::load_image_tile(dir / "img.json");
  EXPECT_EQ(tile.max_value, 65535.0f);
  EXPECT_EQ(tile.source_bytes, 30u);
  EXPECT_THROW(load_scene_raster(dir / "img.json"), ValidationError);
}

TEST(RasterContainer, SchemaViolationsRejected) {
  const auto dir = scratch("bad");
  write_text(dir / "data.bin", std::string(6, '\0'));
  const std::string base =
      R"("format": "odc-raster", "version": 1, "width": 3, "height": 2, "dtype": "uint8", "data_file": "data.bin")";
  write_text(dir / "ok.json", "{" + base + R"(, "raw_byte_size": 6})");
  EXPECT_NO_THROW(validate_raster_container(dir / "ok.json"));

  write_text(dir / "small_raw.json", "{" + base + R"(, "raw_byte_size": 5})");
  EXPECT_THROW(validate_raster_container(dir / "small_raw.json"), ValidationError);

  write_text(dir / "no_raw.json", "{" + base + "}");
  EXPECT_THROW(validate_raster_container(dir / "no_raw.json"), ValidationError);

  write_text(dir / "dtype.json",
             R"({"format": "odc-raster", "version": 1, "width": 3, "height": 2, "dtype": "float32", "data_file": "data.bin", "raw_byte_size": 6})");
  EXPECT_THROW(validate_raster_container(dir / "dtype.json"), ValidationError);

  write_text(dir / "size.json",
             R"({"format": "odc-raster", "version": 1, "width": 4, "height": 2, "dtype": "uint8", "data_file": "data.bin", "raw_byte_size": 8})");
  EXPECT_THROW(validate_raster_container(dir / "size.json"), ValidationError);

  write_text(dir / "geo.json", "{" + base + R"(, "raw_byte_size": 6, "geo_transform": [1, 2, 3]})");
  EXPECT_THROW(validate_raster_container(dir / "geo.json"), ValidationError);

  write_text(dir / "version.json",
             R"({"format": "odc-raster", "version": 7, "width": 3, "height": 2, "dtype": "uint8", "data_file": "data.bin", "raw_byte_size": 6})");
  EXPECT_THROW(validate_raster_container(dir / "version.json"), ValidationError);

  write_text(dir / "missing_data.json",
             R"({"format": "odc-raster", "version": 1, "width": 3, "height": 2, "dtype": "uint8", "data_file": "nope.bin", "raw_byte_size": 6})");
  EXPECT_THROW(validate_raster_container(dir / "missing_data.json"), IoError);

  write_text(dir / "garbage.json", "not json");
  EXPECT_THROW(validate_raster_container(dir / "garbage.json"), ValidationError);
}

TEST(Pgm, RoundTrip8And16Bit) {
  const auto dir = scratch("pgm");
  const auto g8 = random_grid(13, 17, 255, 3);
  write_pgm(dir / "a.pgm", g8);
  int maxval = 0;
  EXPECT_TRUE((read_pgm(dir / "a.pgm", &maxval) == g8).all());
  EXPECT_EQ(maxval, 255);

  const auto g16 = random_grid(9, 4, 65535, 4);
  write_pgm(dir / "b.pgm", g16, 65535);
  EXPECT_TRUE((read_pgm(dir / "b.pgm", &maxval) == g16).all());
  EXPECT_EQ(maxval, 65535);

  const auto scene = load_scene_raster(dir / "a.pgm");
  EXPECT_EQ(scene.raw_byte_size, 13u * 17u);
  EXPECT_THROW(load_scene_raster(dir / "b.pgm"), ValidationError);
}

TEST(Pgm, HeaderCommentsAndErrors) {
  const auto dir = scratch("pgm_hdr");
  write_text(dir / "c.pgm", std::string("P5\n# comment\n2 1\n255\n") + char(7) + char(9));
  const auto g = read_pgm(dir / "c.pgm");
  EXPECT_EQ(g(0, 0), 7);
  EXPECT_EQ(g(0, 1), 9);
  write_text(dir / "p2.pgm", "P2\n2 1\n255\n7 9\n");
  EXPECT_THROW(read_pgm(dir / "p2.pgm"), IoError);
  write_text(dir / "short.pgm", "P5\n4 4\n255\nab");
  EXPECT_THROW(read_pgm(dir / "short.pgm"), IoError);
  EXPECT_THROW(read_pgm(dir / "missing.pgm"), IoError);
}

TEST(Io, AtomicWriteLeavesNoTemporary) {
  const auto dir = scratch("atomic");
  write_file_atomic(dir / "sub" / "x.txt", std::string_view("hello"));
  write_file_atomic(dir / "sub" / "x.txt", std::string_view("world!"));
  EXPECT_EQ(read_file_text(dir / "sub" / "x.txt"), "world!");
  EXPECT_FALSE(fs::exists(dir / "sub" / "x.txt.tmp"));
}

TEST(Io, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(std::string_view("")), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64(std::string_view("a")), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}
