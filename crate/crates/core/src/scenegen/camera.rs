//! Nadir pinhole camera: pixel ↔ ground-plane conversion.
//!
//! Both image axes use the scale derived from the horizontal field of view.
//! Ground coordinates are centred on the image centre with `y` pointing up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub x: f64,
    pub y: f64,
}

impl PixelPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Position on the ground plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundPoint {
    pub x: f64,
    pub y: f64,
}

impl GroundPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::ops::Add for GroundPoint {
    type Output = GroundPoint;

    fn add(self, other: GroundPoint) -> GroundPoint {
        GroundPoint::new(self.x + other.x, self.y + other.y)
    }
}

impl std::ops::Sub for GroundPoint {
    type Output = GroundPoint;

    fn sub(self, other: GroundPoint) -> GroundPoint {
        GroundPoint::new(self.x - other.x, self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraConfig {
    pub image_width: u32,
    pub image_height: u32,
    pub fov_deg: f64,
    pub height_m: f64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            image_width: 800,
            image_height: 600,
            fov_deg: 90.0,
            height_m: 15.0,
        }
    }
}

impl CameraConfig {
    pub fn validate(&self) -> Result<()> {
        if self.image_width == 0 || self.image_height == 0 {
            return Err(Error::Config(format!(
                "camera image size must be positive, got {}x{}",
                self.image_width, self.image_height
            )));
        }
        if !(self.fov_deg > 0.0 && self.fov_deg < 180.0) {
            return Err(Error::Config(format!(
                "camera fov_deg must lie in (0, 180), got {}",
                self.fov_deg
            )));
        }
        if !(self.height_m > 0.0) || !self.height_m.is_finite() {
            return Err(Error::Config(format!(
                "camera height_m must be positive, got {}",
                self.height_m
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.image_width as f64
    }

    pub fn height(&self) -> f64 {
        self.image_height as f64
    }

    /// Ground width covered by the image: `2·h·tan(fov/2)`.
    pub fn footprint_width_m(&self) -> f64 {
        2.0 * self.height_m * (self.fov_deg.to_radians() / 2.0).tan()
    }

    pub fn footprint_height_m(&self) -> f64 {
        self.height() * self.meters_per_pixel()
    }

    pub fn meters_per_pixel(&self) -> f64 {
        self.footprint_width_m() / self.width()
    }

    /// Whether `p` lies in the closed image rectangle.
    pub fn contains(&self, p: PixelPoint) -> bool {
        (0.0..=self.width()).contains(&p.x) && (0.0..=self.height()).contains(&p.y)
    }
}

pub fn pixels_to_meters(p: PixelPoint, cam: &CameraConfig) -> Result<GroundPoint> {
    if !cam.contains(p) {
        return Err(Error::OutOfRange(format!(
            "pixel ({}, {}) outside {}x{} image",
            p.x, p.y, cam.image_width, cam.image_height
        )));
    }
    let s = cam.meters_per_pixel();
    Ok(GroundPoint::new(
        (p.x - cam.width() / 2.0) * s,
        (cam.height() / 2.0 - p.y) * s,
    ))
}

/// Inverse of [`pixels_to_meters`]; the result may fall outside the image.
pub fn meters_to_pixels(q: GroundPoint, cam: &CameraConfig) -> PixelPoint {
    let s = cam.meters_per_pixel();
    PixelPoint::new(q.x / s + cam.width() / 2.0, cam.height() / 2.0 - q.y / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn default_scale() {
        let cam = CameraConfig::default();
        assert!((cam.meters_per_pixel() - 0.0375).abs() < 1e-15);
    }

    #[test]
    fn center_and_edge() {
        let cam = CameraConfig::default();
        let c = pixels_to_meters(PixelPoint::new(400.0, 300.0), &cam).unwrap();
        assert_eq!((c.x, c.y), (0.0, 0.0));
        let e = pixels_to_meters(PixelPoint::new(800.0, 300.0), &cam).unwrap();
        assert!((e.x - 15.0).abs() < 1e-12 && e.y == 0.0);
    }

    #[test]
    fn inverse_examples() {
        let cam = CameraConfig::default();
        let o = meters_to_pixels(GroundPoint::new(0.0, 0.0), &cam);
        assert_eq!((o.x, o.y), (400.0, 300.0));
        let e = meters_to_pixels(GroundPoint::new(15.0, 0.0), &cam);
        assert!((e.x - 800.0).abs() < 1e-9 && (e.y - 300.0).abs() < 1e-9);
    }

    #[test]
    fn out_of_image_is_rejected() {
        let cam = CameraConfig::default();
        assert!(matches!(
            pixels_to_meters(PixelPoint::new(-1.0, 10.0), &cam),
            Err(Error::OutOfRange(_))
        ));
        assert!(pixels_to_meters(PixelPoint::new(10.0, 600.5), &cam).is_err());
    }

    #[test]
    fn round_trip_random_pixels() {
        let cam = CameraConfig::default();
        let mut rng = Rng::new(11);
        for _ in 0..1000 {
            let p = PixelPoint::new(rng.range(0.0, 800.0), rng.range(0.0, 600.0));
            let back = meters_to_pixels(pixels_to_meters(p, &cam).unwrap(), &cam);
            assert!((back.x - p.x).abs() <= 1e-9 && (back.y - p.y).abs() <= 1e-9);
            let rel = ((back.x - p.x) / p.x.max(1.0)).abs() + ((back.y - p.y) / p.y.max(1.0)).abs();
            assert!(rel <= 1e-9);
        }
    }

    #[test]
    fn invalid_camera() {
        let mut cam = CameraConfig {
            fov_deg: 180.0,
            ..Default::default()
        };
        assert!(cam.validate().is_err());
        cam.fov_deg = 90.0;
        cam.height_m = 0.0;
        assert!(cam.validate().is_err());
        cam.height_m = 15.0;
        cam.image_width = 0;
        assert!(cam.validate().is_err());
    }
}
