//! Real-valued plane filters with replicate borders.

use crate::image::GrayImage;

#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn from_gray(image: &GrayImage) -> Self {
        Self {
            width: image.width() as usize,
            height: image.height() as usize,
            data: image.data().iter().map(|&v| v as f64).collect(),
        }
    }

    #[inline]
    fn at(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Rounds half-up and clamps to `[0, 255]`.
    pub fn to_gray(&self) -> GrayImage {
        let data = self
            .data
            .iter()
            .map(|&v| (v + 0.5).floor().clamp(0.0, 255.0) as u8)
            .collect();
        GrayImage::new(self.width as u32, self.height as u32, data)
            .expect("plane dimensions come from a valid image")
    }
}

/// Gaussian taps out to `ceil(3σ)`, normalized to sum to one.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as isize;
    let denom = 2.0 * sigma * sigma;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / denom).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / total).collect()
}

/// Separable convolution with an odd-length kernel applied along x then y.
pub fn convolve_separable(plane: &Plane, kernel: &[f64]) -> Plane {
    let r = (kernel.len() / 2) as isize;
    let (w, h) = (plane.width, plane.height);
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &t) in kernel.iter().enumerate() {
                acc += t * plane.at(x as isize + k as isize - r, y as isize);
            }
            tmp[y * w + x] = acc;
        }
    }
    let tmp = Plane { width: w, height: h, data: tmp };
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &t) in kernel.iter().enumerate() {
                acc += t * tmp.at(x as isize, y as isize + k as isize - r);
            }
            out[y * w + x] = acc;
        }
    }
    Plane { width: w, height: h, data: out }
}

pub fn gaussian_blur(plane: &Plane, sigma: f64) -> Plane {
    if sigma <= 0.0 {
        return plane.clone();
    }
    convolve_separable(plane, &gaussian_kernel(sigma))
}

/// Scharr gradient magnitude `sqrt(gx² + gy²)`.
pub fn scharr_magnitude(plane: &Plane) -> Plane {
    const SMOOTH: [f64; 3] = [3.0, 10.0, 3.0];
    let (w, h) = (plane.width, plane.height);
    let mut out = vec![0.0; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut gx = 0.0;
            let mut gy = 0.0;
            for (k, &s) in SMOOTH.iter().enumerate() {
                let d = k as isize - 1;
                gx += s * (plane.at(x + 1, y + d) - plane.at(x - 1, y + d));
                gy += s * (plane.at(x + d, y + 1) - plane.at(x + d, y - 1));
            }
            out[y as usize * w + x as usize] = (gx * gx + gy * gy).sqrt();
        }
    }
    Plane { width: w, height: h, data: out }
}

/// Averages samples along a line segment through each pixel.
///
/// `length` taps are placed at unit spacing centred on the pixel, in the
/// direction `angle_deg` (0° = horizontal), each rounded to the nearest pixel.
pub fn motion_blur(plane: &Plane, length: usize, angle_deg: f64) -> Plane {
    if length <= 1 {
        return plane.clone();
    }
    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let half = (length as f64 - 1.0) / 2.0;
    let offsets: Vec<(isize, isize)> = (0..length)
        .map(|i| {
            let t = i as f64 - half;
            ((t * cos).round() as isize, (t * sin).round() as isize)
        })
        .collect();
    let norm = 1.0 / length as f64;
    let (w, h) = (plane.width, plane.height);
    let mut out = vec![0.0; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let acc: f64 = offsets.iter().map(|&(dx, dy)| plane.at(x + dx, y + dy)).sum();
            out[y as usize * w + x as usize] = acc * norm;
        }
    }
    Plane { width: w, height: h, data: out }
}
