#include <sys/stat.h>

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "revguard/errors.hpp"
#include "revguard/pdf/writer.hpp"
#include "revguard/pdf_model.hpp"
#include "revguard/raster.hpp"

using namespace revguard;
namespace fs = std::filesystem;

namespace {

std::string write_script(const std::string& body) {
  static int counter = 0;
  std::string path = (fs::temp_directory_path() /
                      ("revguard_ocr_stub_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter++) + ".sh"))
                         .string();
  std::ofstream f(path);
  f << "#!/bin/sh\n" << body;
  f.close();
  ::chmod(path.c_str(), 0755);
  return path;
}

PdfDocument one_block_doc() {
  pdf::DocumentBuilder b;
  b.add_text(72, 700, 10, "F1", "visible words here");
  return load_document(b.build());
}

struct FileCleanup {
  std::string path;
  ~FileCleanup() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("rasterize_region: geometry, background, and ink") {
  PdfDocument doc = one_block_doc();
  const Page& page = doc.pages[0];
  Rect region{70, 690, 190, 712};
  Image img = rasterize_region(page, region, 300);
  CHECK(img.width == 500);   // 120 pt at 300 dpi
  CHECK(img.height == 92);   // 22 pt at 300 dpi, rounded

  long dark = 0;
  for (std::size_t i = 0; i + 2 < img.pixels.size(); i += 3) {
    if (img.pixels[i] < 128) ++dark;
  }
  CHECK(dark > 0);  // glyphs left ink
  CHECK(dark < static_cast<long>(img.pixels.size() / 3));  // on a white page

  CHECK_THROWS_AS(rasterize_region(page, Rect{}, 300), RenderFailure);
}

TEST_CASE("rasterize_region: white text leaves no ink") {
  pdf::DocumentBuilder b;
  b.add_text(72, 700, 10, "F1", "ghost", Rgb{1, 1, 1});
  PdfDocument doc = load_document(b.build());
  Image img = rasterize_region(doc.pages[0], Rect{60, 690, 200, 712}, 300);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) CHECK(img.pixels[i] == 255);
}

TEST_CASE("encode_png: emits a well-formed signature and chunks") {
  Image img;
  img.width = 4;
  img.height = 2;
  img.pixels.assign(4 * 2 * 3, 200);
  std::string png = encode_png(img);
  CHECK(png.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0);
  CHECK(png.find("IHDR") != std::string::npos);
  CHECK(png.find("IDAT") != std::string::npos);
  CHECK(png.find("IEND") != std::string::npos);
}

TEST_CASE("ocr backend: stub command output becomes the render view") {
  std::string script = write_script("echo \"visible words here\"\n");
  FileCleanup cleanup{script};
  PdfDocument doc = one_block_doc();
  auto blocks = segment_blocks(doc);
  REQUIRE(blocks.size() == 1);

  OcrRenderBackend backend(script);
  CHECK(extract_render_view(doc, blocks[0], backend) == "visible words here");
}

TEST_CASE("ocr backend: {png} placeholder receives an existing file") {
  std::string script = write_script("test -s \"$1\" || exit 3\necho ok\n");
  FileCleanup cleanup{script};
  PdfDocument doc = one_block_doc();
  auto blocks = segment_blocks(doc);

  OcrRenderBackend backend(script + " {png}");
  CHECK(extract_render_view(doc, blocks[0], backend) == "ok");
}

TEST_CASE("ocr backend: nonzero exit raises OcrUnavailable") {
  std::string script = write_script("exit 1\n");
  FileCleanup cleanup{script};
  PdfDocument doc = one_block_doc();
  auto blocks = segment_blocks(doc);

  OcrRenderBackend backend(script);
  CHECK_THROWS_AS(extract_render_view(doc, blocks[0], backend), OcrUnavailable);

  OcrRenderBackend missing("/nonexistent/ocr-binary");
  CHECK_THROWS_AS(extract_render_view(doc, blocks[0], missing), OcrUnavailable);
}

TEST_CASE("ocr backend: fully off-page block renders to nothing without ocr") {
  pdf::DocumentBuilder b;
  b.add_text(72, 700, 10, "F1", "anchor text");
  b.add_text(800, 700, 10, "F1", "beyond the page edge");
  PdfDocument doc = load_document(b.build());
  OcrRenderBackend backend("/definitely/not/needed");
  for (const auto& blk : segment_blocks(doc)) {
    if (blk.bbox.x0 > doc.pages[0].media_box.x1) {
      CHECK(extract_render_view(doc, blk, backend) == "");
    }
  }
}
