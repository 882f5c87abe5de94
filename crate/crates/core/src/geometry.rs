//! Small 2D vector and angle helpers used by deployment and radio code.

use crate::float::Float;

/// 2D point/vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2<F> {
    pub x: F,
    pub y: F,
}

impl<F: Float> Vec2<F> {
    pub fn new(x: F, y: F) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2 {
            x: F::zero(),
            y: F::zero(),
        }
    }

    pub fn dot(self, other: Self) -> F {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> F {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> F {
        (self - other).norm()
    }

    /// Azimuth of this vector in degrees, in (-180, 180].
    pub fn azimuth_deg(self) -> F {
        self.y.atan2(self.x).to_degrees()
    }

    pub fn scale(self, k: F) -> Self {
        Vec2 {
            x: self.x * k,
            y: self.y * k,
        }
    }

    /// Unit vector for a heading angle in radians.
    pub fn from_heading(heading_rad: F) -> Self {
        Vec2 {
            x: heading_rad.cos(),
            y: heading_rad.sin(),
        }
    }
}

impl<F: Float> core::ops::Add for Vec2<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Vec2 {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
        }
    }
}

impl<F: Float> core::ops::Sub for Vec2<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Vec2 {
            x: self.x - rhs.x,
            y: self.y - rhs.y,
        }
    }
}

/// Wrap an angle in degrees to (-180, 180].
pub fn wrap_deg<F: Float>(mut a: F) -> F {
    let full = F::of(360.0);
    let half = F::of(180.0);
    while a > half {
        a -= full;
    }
    while a <= -half {
        a += full;
    }
    a
}
