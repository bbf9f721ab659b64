use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planar point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: Point2, frac: f64) -> Point2 {
        Point2::new(
            self.x + (other.x - self.x) * frac,
            self.y + (other.y - self.y) * frac,
        )
    }

    /// Distance from `self` to the closed segment `a`–`b`.
    pub fn distance_to_segment(self, a: Point2, b: Point2) -> f64 {
        let ab = b - a;
        let len2 = ab.x * ab.x + ab.y * ab.y;
        if len2 == 0.0 {
            return self.distance(a);
        }
        let ap = self - a;
        let frac = ((ap.x * ab.x + ap.y * ab.y) / len2).clamp(0.0, 1.0);
        self.distance(a.lerp(b, frac))
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Allowed deviation of a tag from the nominal ring radius.
pub const RING_TOLERANCE_M: f64 = 1e-3;

/// Backscatter tags mounted around the receiver antenna, in the receiver body frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagLayout {
    pub tag_positions: Vec<Point2>,
    pub ring_radius_m: f64,
}

impl TagLayout {
    /// `count` tags evenly spaced on a circle, the first one on the +x axis.
    pub fn ring(count: usize, ring_radius_m: f64) -> Result<Self> {
        let tag_positions = (0..count)
            .map(|k| {
                let angle = std::f64::consts::TAU * k as f64 / count as f64;
                Point2::new(ring_radius_m * angle.cos(), ring_radius_m * angle.sin())
            })
            .collect();
        let layout = Self {
            tag_positions,
            ring_radius_m,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn len(&self) -> usize {
        self.tag_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tag_positions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tag_positions.len() < 2 {
            return Err(Error::Config(format!(
                "need at least 2 tags, got {}",
                self.tag_positions.len()
            )));
        }
        if !(self.ring_radius_m > 0.0) {
            return Err(Error::Config("ring radius must be positive".into()));
        }
        for (k, p) in self.tag_positions.iter().enumerate() {
            let off = (p.norm() - self.ring_radius_m).abs();
            if off > RING_TOLERANCE_M {
                return Err(Error::Config(format!(
                    "tag {} sits {:.4} m off the {:.3} m ring",
                    k + 1,
                    off,
                    self.ring_radius_m
                )));
            }
        }
        Ok(())
    }

    /// Tag-to-receiver-antenna distances.
    pub fn receive_distances(&self) -> Vec<f64> {
        self.tag_positions.iter().map(|p| p.norm()).collect()
    }
}
