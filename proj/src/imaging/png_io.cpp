#include "irisval/png_io.hpp"

#include <png.h>

#include <cstring>

namespace irisval {

RasterImage read_png(const std::filesystem::path& path)
{
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw IoError("cannot read PNG " + path.string() + ": " + image.message);
    }
    const bool colour = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = colour ? PNG_FORMAT_RGBA : PNG_FORMAT_GA;
    const int in_ch = colour ? 4 : 2;
    std::vector<png_byte> raw(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError("corrupt PNG " + path.string() + ": " + msg);
    }

    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    const int out_ch = colour ? 3 : 1;
    RasterImage img(w, h, out_ch);
    auto out = img.data();
    const std::size_t n = static_cast<std::size_t>(w) * h;
    for (std::size_t i = 0; i < n; ++i) {
        const png_byte* px = raw.data() + i * in_ch;
        const int alpha = px[in_ch - 1];
        for (int c = 0; c < out_ch; ++c) {
            out[i * out_ch + c] = alpha == 255 ? px[c] : clamp_round(px[c] * (alpha / 255.0));
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const RasterImage& img)
{
    if (img.empty()) throw IoError("write_png: empty image");
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.is_gray() ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.data().data(), 0, nullptr)) {
        throw IoError("cannot write PNG " + path.string() + ": " + image.message);
    }
}

} // namespace irisval
