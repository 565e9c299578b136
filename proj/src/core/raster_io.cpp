// Copyright 2026 The mitodg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mitodg/core/raster_io.hpp"

#include "mitodg/core/error.hpp"

#include <png.h>
#include <tiffio.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

// jpeglib.h needs size_t and FILE declared first.
#include <jpeglib.h>

namespace mitodg {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_fail(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::kIoError, path.string() + ": " + what);
}

std::vector<std::uint8_t> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- PNG -------------------------------------------------------------------

struct PngReadBuffer {
  const std::vector<std::uint8_t>* bytes;
  std::size_t offset = 0;
};

void png_read_from_buffer(png_structp png, png_bytep out, png_size_t length) {
  auto* buf = static_cast<PngReadBuffer*>(png_get_io_ptr(png));
  if (buf->offset + length > buf->bytes->size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, buf->bytes->data() + buf->offset, length);
  buf->offset += length;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

Rgb8Image decode_png_impl(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::kIoError, name + ": not a PNG stream");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIoError, name + ": corrupt PNG stream");
  }
  PngReadBuffer source{&bytes};
  png_set_read_fn(png, &source, png_read_from_buffer);
  png_read_info(png, info);

  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIoError, name + ": unsupported PNG layout");
  }
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * 3);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = data.data() + static_cast<std::size_t>(y) * width * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return Rgb8Image(width, height, std::move(data));
}

// --- JPEG ------------------------------------------------------------------

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_quiet(j_common_ptr, int) {}

// --- TIFF ------------------------------------------------------------------

void tiff_silent(const char*, const char*, va_list) {}

Rgb8Image read_tiff(const fs::path& path) {
  TIFFSetWarningHandler(tiff_silent);
  TIFFSetErrorHandler(tiff_silent);
  std::unique_ptr<TIFF, void (*)(TIFF*)> tif(TIFFOpen(path.c_str(), "r"), TIFFClose);
  if (!tif) io_fail(path, "cannot open TIFF");
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
  if (width == 0 || height == 0) io_fail(path, "TIFF has no raster");

  std::uint16_t bits = 8;
  std::uint16_t spp = 1;
  std::uint16_t planar = PLANARCONFIG_CONTIG;
  std::uint16_t photometric = PHOTOMETRIC_RGB;
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bits);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
  TIFFGetField(tif.get(), TIFFTAG_PHOTOMETRIC, &photometric);
  const bool scanline_path = !TIFFIsTiled(tif.get()) && planar == PLANARCONFIG_CONTIG &&
                             (bits == 8 || bits == 16) &&
                             ((photometric == PHOTOMETRIC_RGB && spp >= 3) ||
                              (photometric == PHOTOMETRIC_MINISBLACK && spp <= 2));
  if (scanline_path) {
    // Direct sample access so 16-bit data is reduced by a plain right shift.
    std::vector<std::uint8_t> line(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * 3);
    for (std::uint32_t y = 0; y < height; ++y) {
      if (TIFFReadScanline(tif.get(), line.data(), y, 0) < 0) io_fail(path, "TIFF read failed");
      for (std::uint32_t x = 0; x < width; ++x) {
        for (int c = 0; c < 3; ++c) {
          const std::size_t sample = static_cast<std::size_t>(x) * spp +
                                     (photometric == PHOTOMETRIC_RGB ? c : 0);
          std::uint8_t v;
          if (bits == 16) {
            std::uint16_t wide;
            std::memcpy(&wide, line.data() + 2 * sample, 2);
            v = static_cast<std::uint8_t>(wide >> 8);
          } else {
            v = line[sample];
          }
          data[(static_cast<std::size_t>(y) * width + x) * 3 + c] = v;
        }
      }
    }
    return Rgb8Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
  }

  std::vector<std::uint32_t> rgba(static_cast<std::size_t>(width) * height);
  if (!TIFFReadRGBAImageOriented(tif.get(), width, height, rgba.data(), ORIENTATION_TOPLEFT, 0)) {
    io_fail(path, "unsupported TIFF layout");
  }
  std::vector<std::uint8_t> data(rgba.size() * 3);
  for (std::size_t i = 0; i < rgba.size(); ++i) {
    data[3 * i] = static_cast<std::uint8_t>(TIFFGetR(rgba[i]));
    data[3 * i + 1] = static_cast<std::uint8_t>(TIFFGetG(rgba[i]));
    data[3 * i + 2] = static_cast<std::uint8_t>(TIFFGetB(rgba[i]));
  }
  return Rgb8Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

bool has_magic(const std::vector<std::uint8_t>& b, std::initializer_list<std::uint8_t> magic) {
  if (b.size() < magic.size()) return false;
  return std::equal(magic.begin(), magic.end(), b.begin());
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Rgb8Image& image) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIoError, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixel(0, y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Rgb8Image decode_png(const std::vector<std::uint8_t>& bytes) {
  return decode_png_impl(bytes, "<memory>");
}

void write_png(const Rgb8Image& image, const fs::path& path) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_fail(path, "cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) io_fail(path, "write failed");
}

std::vector<std::uint8_t> encode_jpeg(const Rgb8Image& image, int quality) {
  jpeg_compress_struct cinfo{};
  JpegError err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  err.mgr.emit_message = jpeg_quiet;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw Error(ErrorCode::kIoError, std::string("JPEG encoding failed: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width());
  cinfo.image_height = static_cast<JDIMENSION>(image.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPROW>(image.pixel(0, static_cast<int>(cinfo.next_scanline)));
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::vector<std::uint8_t> out(buffer, buffer + size);
  std::free(buffer);
  return out;
}

Rgb8Image decode_jpeg(const std::vector<std::uint8_t>& bytes) {
  jpeg_decompress_struct cinfo{};
  JpegError err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  err.mgr.emit_message = jpeg_quiet;
  std::vector<std::uint8_t> data;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorCode::kIoError, std::string("JPEG decoding failed: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int width = static_cast<int>(cinfo.output_width);
  const int height = static_cast<int>(cinfo.output_height);
  data.resize(static_cast<std::size_t>(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = data.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return Rgb8Image(width, height, std::move(data));
}

void write_tiff(const Rgb8Image& image, const fs::path& path) {
  std::unique_ptr<TIFF, void (*)(TIFF*)> tif(TIFFOpen(path.c_str(), "w"), TIFFClose);
  if (!tif) io_fail(path, "cannot open TIFF for writing");
  TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(image.width()));
  TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(image.height()));
  TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, 3);
  TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, 8);
  TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_RGB);
  TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, 16);
  for (int y = 0; y < image.height(); ++y) {
    if (TIFFWriteScanline(tif.get(), const_cast<std::uint8_t*>(image.pixel(0, y)),
                          static_cast<std::uint32_t>(y), 0) < 0) {
      io_fail(path, "TIFF scanline write failed");
    }
  }
}

Rgb8Image read_image(const fs::path& path) {
  if (!fs::exists(path)) io_fail(path, "no such file");
  const auto bytes = slurp(path);
  if (has_magic(bytes, {0x89, 'P', 'N', 'G'})) return decode_png_impl(bytes, path.string());
  if (has_magic(bytes, {0xFF, 0xD8, 0xFF})) {
    try {
      return decode_jpeg(bytes);
    } catch (const Error& e) {
      io_fail(path, e.what());
    }
  }
  if (has_magic(bytes, {'I', 'I', 42, 0}) || has_magic(bytes, {'M', 'M', 0, 42})) {
    return read_tiff(path);
  }
  io_fail(path, "unrecognized raster format (expected PNG, JPEG or TIFF)");
}

}  // namespace mitodg
