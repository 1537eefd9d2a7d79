use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// `p ↦ translation + ratio · R(rotation) · F(p)` where `F` reflects across
/// the x-axis when `reflection` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similitude {
    ratio: f64,
    rotation: f64,
    reflection: bool,
    translation: Point,
}

impl Similitude {
    pub fn new(ratio: f64, rotation: f64, reflection: bool, translation: Point) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "similitude ratio must lie in (0,1), got {ratio}"
            )));
        }
        Ok(Self {
            ratio,
            rotation,
            reflection,
            translation,
        })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn reflection(&self) -> bool {
        self.reflection
    }

    pub fn translation(&self) -> Point {
        self.translation
    }

    pub fn apply(&self, p: Point) -> Point {
        let p = if self.reflection {
            Point::new(p.x, -p.y)
        } else {
            p
        };
        self.translation + p.rotate(self.rotation) * self.ratio
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SystemMaps {
    /// Explicit planar maps.
    Planar(Vec<Similitude>),
    /// Bare `(ratio, multiplicity)` pairs for zeta-function work in any dimension.
    Abstract(Vec<(f64, u32)>),
}

/// A finite set of contractive similitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarSystem {
    maps: SystemMaps,
    ambient_dim: usize,
    gkf: Option<super::GkfParams>,
}

impl SelfSimilarSystem {
    pub fn planar(maps: Vec<Similitude>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidParameter("system needs at least one map".into()));
        }
        Ok(Self {
            maps: SystemMaps::Planar(maps),
            ambient_dim: 2,
            gkf: None,
        })
    }

    pub fn from_ratios(pairs: Vec<(f64, u32)>, ambient_dim: usize) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("system needs at least one map".into()));
        }
        if ambient_dim == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
        }
        for &(r, m) in &pairs {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidParameter(format!("ratio {r} outside (0,1)")));
            }
            if m == 0 {
                return Err(Error::InvalidParameter("multiplicity must be ≥ 1".into()));
            }
        }
        Ok(Self {
            maps: SystemMaps::Abstract(pairs),
            ambient_dim,
            gkf: None,
        })
    }

    pub(super) fn with_gkf(mut self, params: super::GkfParams) -> Self {
        self.gkf = Some(params);
        self
    }

    pub fn maps(&self) -> &SystemMaps {
        &self.maps
    }

    pub fn similitudes(&self) -> Option<&[Similitude]> {
        match &self.maps {
            SystemMaps::Planar(m) => Some(m),
            SystemMaps::Abstract(_) => None,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn gkf_params(&self) -> Option<super::GkfParams> {
        self.gkf
    }

    /// One ratio per map, repeated by multiplicity, in map order.
    pub fn ratios(&self) -> Vec<f64> {
        match &self.maps {
            SystemMaps::Planar(m) => m.iter().map(Similitude::ratio).collect(),
            SystemMaps::Abstract(p) => p
                .iter()
                .flat_map(|&(r, m)| std::iter::repeat_n(r, m as usize))
                .collect(),
        }
    }

    /// Distinct ratios sorted descending with multiplicities. Ratios within a
    /// relative 1e-12 of each other are merged.
    pub fn distinct_ratios(&self) -> Vec<(f64, u32)> {
        let mut all = self.ratios();
        all.sort_by(|a, b| b.total_cmp(a));
        let mut out: Vec<(f64, u32)> = Vec::new();
        for r in all {
            match out.last_mut() {
                Some((prev, m)) if (*prev - r).abs() <= 1e-12 * *prev => *m += 1,
                _ => out.push((r, 1)),
            }
        }
        out
    }
}
