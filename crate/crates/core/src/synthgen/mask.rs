//! Ground-truth masks from black-background renders, and background compositing.

use image::imageops::{self, FilterType};

use crate::error::Result;
use crate::image::{ensure_same_dims, BinaryMask, GrayImage};

/// Tolerates low-level renderer noise on the black background.
pub const DEFAULT_MASK_THRESHOLD: u8 = 10;

/// Foreground where `pixel > threshold`.
pub fn extract_mask(render_on_black: &GrayImage, threshold: u8) -> BinaryMask {
    let (w, h) = render_on_black.dimensions();
    BinaryMask::new(w, h, render_on_black.data().iter().map(|&v| v > threshold).collect())
        .expect("same shape as a valid image")
}

/// Scales `background` to cover `width × height` without distortion, then
/// centre-crops it to exactly that size.
pub fn fit_background(background: &GrayImage, width: u32, height: u32) -> GrayImage {
    let (bw, bh) = background.dimensions();
    if (bw, bh) == (width, height) {
        return background.clone();
    }
    let scale = f64::max(width as f64 / bw as f64, height as f64 / bh as f64);
    let sw = ((bw as f64 * scale).ceil() as u32).max(width);
    let sh = ((bh as f64 * scale).ceil() as u32).max(height);
    let scaled = if (sw, sh) == (bw, bh) {
        background.to_buffer()
    } else {
        imageops::resize(&background.to_buffer(), sw, sh, FilterType::Triangle)
    };
    let (x0, y0) = ((sw - width) / 2, (sh - height) / 2);
    let cropped = imageops::crop_imm(&scaled, x0, y0, width, height).to_image();
    GrayImage::from_buffer(cropped).expect("crop has the requested size")
}

/// Hard composite: render where the mask is set, fitted background elsewhere.
pub fn composite(render: &GrayImage, mask: &BinaryMask, background: &GrayImage) -> Result<GrayImage> {
    ensure_same_dims(render.dimensions(), mask.dimensions())?;
    let (w, h) = render.dimensions();
    let bg = fit_background(background, w, h);
    let data = render
        .data()
        .iter()
        .zip(mask.data())
        .zip(bg.data())
        .map(|((&r, &m), &b)| if m { r } else { b })
        .collect();
    GrayImage::new(w, h, data)
}
