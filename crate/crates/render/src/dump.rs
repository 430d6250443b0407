use std::io::Write;
use std::path::Path;

use crate::error::RenderError;
use crate::view::RenderedView;

/// Saves the RGB channels as an 8-bit PNG.
pub fn save_rgb_png(view: &RenderedView, path: &Path) -> Result<(), RenderError> {
    let res = view.resolution as u32;
    let mut img = image::RgbImage::new(res, res);
    for (px, chunk) in view.rgb.chunks_exact(3).enumerate() {
        let x = (px % view.resolution) as u32;
        let y = (px / view.resolution) as u32;
        img.put_pixel(x, y, image::Rgb([to_u8(chunk[0]), to_u8(chunk[1]), to_u8(chunk[2])]));
    }
    img.save(path).map_err(|e| RenderError::Png(e.to_string()))
}

/// Saves normalized depth as an 8-bit grayscale PNG (near = white, far = black,
/// so geometry stands out against the background).
pub fn save_depth_png(view: &RenderedView, path: &Path) -> Result<(), RenderError> {
    let res = view.resolution as u32;
    let mut img = image::GrayImage::new(res, res);
    for (px, &d) in view.depth_norm.iter().enumerate() {
        let x = (px % view.resolution) as u32;
        let y = (px / view.resolution) as u32;
        img.put_pixel(x, y, image::Luma([to_u8(1.0 - d)]));
    }
    img.save(path).map_err(|e| RenderError::Png(e.to_string()))
}

/// Saves the RGB channels as a binary PPM (P6), handy when PNG support is
/// unavailable downstream.
pub fn save_rgb_ppm(view: &RenderedView, path: &Path) -> Result<(), RenderError> {
    let mut out = Vec::with_capacity(view.rgb.len() + 32);
    write!(out, "P6\n{} {}\n255\n", view.resolution, view.resolution)?;
    for chunk in view.rgb.chunks_exact(3) {
        out.extend_from_slice(&[to_u8(chunk[0]), to_u8(chunk[1]), to_u8(chunk[2])]);
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Dumps all seven feature channels as raw little-endian `f32`, CHW order
/// (`[7, res, res]`), for lossless inspection.
pub fn save_channels_raw(view: &RenderedView, path: &Path) -> Result<(), RenderError> {
    let chw = view.to_chw();
    let mut bytes = Vec::with_capacity(chw.len() * 4);
    for v in chw {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

fn to_u8(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
