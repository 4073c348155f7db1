#include "iinr/image.hpp"
#include "iinr/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstring>

using namespace iinr;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header,
                                   std::initializer_list<int> payload) {
  std::vector<std::uint8_t> b(header.begin(), header.end());
  for (int v : payload) b.push_back(static_cast<std::uint8_t>(v));
  return b;
}

}  // namespace

TEST_CASE("p5 header with 0 and 255 payload decodes to [0,1]") {
  const auto img = decode_pnm(bytes_of("P5 2 1 255 ", {0, 255}));
  REQUIRE(img.width == 2);
  REQUIRE(img.height == 1);
  REQUIRE(img.channels == 1);
  REQUIRE(img.data[0] == 0.0);
  REQUIRE(img.data[1] == 1.0);
}

TEST_CASE("header comments are tolerated") {
  const auto img = decode_pnm(bytes_of("P6\n# a comment\n1 1\n255\n", {10, 20, 30}));
  REQUIRE(img.channels == 3);
  REQUIRE(img.data[1] == Catch::Approx(20.0 / 255.0));
}

TEST_CASE("truncated payload reports expected vs actual byte counts") {
  try {
    decode_pnm(bytes_of("P5 4 4 255 ", {1, 2, 3}));
    FAIL("expected PnmParseError");
  } catch (const PnmParseError& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("expected 16") != std::string::npos);
    REQUIRE(msg.find("got 3") != std::string::npos);
  }
}

TEST_CASE("malformed headers raise parse errors with offsets") {
  REQUIRE_THROWS_AS(decode_pnm(bytes_of("P7 1 1 255 ", {0})), PnmParseError);
  REQUIRE_THROWS_AS(decode_pnm(bytes_of("P5 1 1 65535 ", {0, 0})), PnmParseError);
  REQUIRE_THROWS_AS(decode_pnm(bytes_of("P5 x 1 255 ", {0})), PnmParseError);
  REQUIRE_THROWS_AS(decode_pnm(bytes_of("P5 0 1 255 ", {})), PnmParseError);
}

TEST_CASE("encode rounds half-up and clamps") {
  ImageBuffer img(3, 1, 1);
  img.data = {0.5, -0.2, 1.7};
  const auto bytes = encode_pnm(img);
  // header "P5\n3 1\n255\n" is 11 bytes
  REQUIRE(bytes.size() == 11 + 3);
  REQUIRE(bytes[11] == 128);  // round(127.5) half-up
  REQUIRE(bytes[12] == 0);
  REQUIRE(bytes[13] == 255);
}

TEST_CASE("all-zero image encodes to zero payload, channel count picks the magic") {
  ImageBuffer gray(2, 2, 1);
  const auto b1 = encode_pnm(gray);
  REQUIRE(b1[0] == 'P');
  REQUIRE(b1[1] == '5');
  for (std::size_t i = b1.size() - 4; i < b1.size(); ++i) REQUIRE(b1[i] == 0);
  ImageBuffer rgb(2, 2, 3);
  REQUIRE(encode_pnm(rgb)[1] == '6');
}

TEST_CASE("encode(decode(x)) is the identity on valid files") {
  Rng rng(41);
  ImageBuffer img(7, 5, 3);
  for (auto& v : img.data) v = rng.uniform();
  const auto original = encode_pnm(img);
  const auto round_tripped = encode_pnm(decode_pnm(original));
  REQUIRE(original == round_tripped);
}

TEST_CASE("box downsample is a block mean") {
  ImageBuffer img(2, 2, 1);
  img.data = {0.0, 0.0, 1.0, 1.0};
  const auto out = box_downsample(img, 2);
  REQUIRE(out.width == 1);
  REQUIRE(out.height == 1);
  REQUIRE(out.data[0] == 0.5);
  REQUIRE(box_downsample(img, 1).data == img.data);
  REQUIRE_THROWS_AS(box_downsample(img, 3), std::invalid_argument);
}

TEST_CASE("box downsample preserves the global mean") {
  Rng rng(42);
  ImageBuffer img(16, 12, 3);
  for (auto& v : img.data) v = rng.uniform();
  const auto out = box_downsample(img, 4);
  double m_in = 0.0, m_out = 0.0;
  for (double v : img.data) m_in += v;
  for (double v : out.data) m_out += v;
  m_in /= static_cast<double>(img.data.size());
  m_out /= static_cast<double>(out.data.size());
  REQUIRE(std::abs(m_in - m_out) < 1e-12);
}

TEST_CASE("box downsample commutes with affine intensity maps") {
  Rng rng(43);
  ImageBuffer img(8, 8, 1);
  for (auto& v : img.data) v = rng.uniform();
  const double a = 0.7, b = 0.1;
  ImageBuffer mapped = img;
  for (auto& v : mapped.data) v = a * v + b;
  const auto down_then_map = [&] {
    auto d = box_downsample(img, 2);
    for (auto& v : d.data) v = a * v + b;
    return d;
  }();
  const auto map_then_down = box_downsample(mapped, 2);
  for (std::size_t i = 0; i < down_then_map.data.size(); ++i)
    REQUIRE(std::abs(down_then_map.data[i] - map_then_down.data[i]) < 1e-12);
}

TEST_CASE("pnm file round-trip through disk") {
  Rng rng(44);
  ImageBuffer img(9, 4, 3);
  for (auto& v : img.data) v = rng.uniform();
  const std::string path = "/tmp/iinr_test_roundtrip.pnm";
  save_pnm(path, img);
  const ImageBuffer back = load_pnm(path);
  REQUIRE(back.width == img.width);
  REQUIRE(back.height == img.height);
  REQUIRE(back.channels == img.channels);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    REQUIRE(std::abs(back.data[i] - img.data[i]) <= 0.5 / 255.0 + 1e-12);
}
