#ifndef TUBAL_IMAGE_HPP
#define TUBAL_IMAGE_HPP

#include <string>

#include "tubal/tensor.hpp"

namespace tubal {

/// Color image as an n1 x n2 x 3 tensor with values in [0,1], tagged with
/// where it came from (file path or synthetic recipe).
struct ImageTensor {
    Tensor3d tensor;
    std::string provenance;
};

/// Load a binary PPM (P6, maxval 255); byte b maps to b/255.
/// Malformed headers or short payloads raise ParseError with a byte offset.
ImageTensor load_image(const std::string& path);

/// Save as binary PPM (P6, maxval 255); value v is stored as
/// round(clamp(v,0,1) * 255), so byte-representable values round-trip exactly.
void save_image(const ImageTensor& img, const std::string& path);

}  // namespace tubal

#endif
