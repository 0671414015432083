use std::f64::consts::PI;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::PointCloud;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    /// Surface of an axis-aligned cube centered at the origin.
    Cube,
    /// Closed cylinder (side plus both caps) around the z axis, centered at the origin.
    Cylinder,
    /// Two squares sharing the edge on the x axis, meeting at a dihedral angle.
    Planes,
    /// Sphere centered at the origin.
    Sphere,
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cube" => Ok(ShapeKind::Cube),
            "cylinder" => Ok(ShapeKind::Cylinder),
            "planes" => Ok(ShapeKind::Planes),
            "sphere" => Ok(ShapeKind::Sphere),
            other => Err(Error::invalid(format!("unknown shape kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    /// Cube edge length.
    pub side: f64,
    pub radius: f64,
    /// Cylinder height.
    pub height: f64,
    /// Edge length of each square in `Planes`.
    pub plane_side: f64,
    /// Dihedral angle between the two squares, degrees.
    pub dihedral_deg: f64,
}

impl Default for ShapeParams {
    fn default() -> Self {
        Self {
            side: 2.0,
            radius: 1.0,
            height: 2.0,
            plane_side: 1.0,
            dihedral_deg: 90.0,
        }
    }
}

/// Samples `n_points` points uniformly (by area) on the surface of `kind`.
pub fn generate_shape(
    kind: ShapeKind,
    n_points: usize,
    params: &ShapeParams,
    seed: u64,
) -> Result<PointCloud> {
    if n_points == 0 {
        return Err(Error::invalid("n_points must be at least 1"));
    }
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("{name} must be positive, got {v}")))
        }
    };
    match kind {
        ShapeKind::Cube => positive("side", params.side)?,
        ShapeKind::Cylinder => {
            positive("radius", params.radius)?;
            positive("height", params.height)?;
        }
        ShapeKind::Planes => {
            positive("plane_side", params.plane_side)?;
            if !(params.dihedral_deg > 0.0 && params.dihedral_deg < 360.0) {
                return Err(Error::invalid("dihedral angle must lie in (0, 360) degrees"));
            }
        }
        ShapeKind::Sphere => positive("radius", params.radius)?,
    }

    let mut rng = rng::seeded(seed);
    let points: Vec<[f64; 3]> = (0..n_points)
        .map(|_| match kind {
            ShapeKind::Cube => cube_point(&mut rng, params.side / 2.0),
            ShapeKind::Cylinder => cylinder_point(&mut rng, params.radius, params.height),
            ShapeKind::Planes => planes_point(&mut rng, params.plane_side, params.dihedral_deg),
            ShapeKind::Sphere => sphere_point(&mut rng, params.radius),
        })
        .collect();
    PointCloud::from_points(&points)
}

fn cube_point<R: Rng>(rng: &mut R, half: f64) -> [f64; 3] {
    let face = rng.random_range(0..6usize);
    let axis = face / 2;
    let sign = if face % 2 == 0 { 1.0 } else { -1.0 };
    let mut p = [
        rng.random_range(-half..=half),
        rng.random_range(-half..=half),
        rng.random_range(-half..=half),
    ];
    p[axis] = sign * half;
    p
}

fn cylinder_point<R: Rng>(rng: &mut R, radius: f64, height: f64) -> [f64; 3] {
    let side_area = 2.0 * PI * radius * height;
    let cap_area = PI * radius * radius;
    let pick = rng.random_range(0.0..side_area + 2.0 * cap_area);
    let theta = rng.random_range(0.0..2.0 * PI);
    if pick < side_area {
        let z = rng.random_range(-height / 2.0..=height / 2.0);
        [radius * theta.cos(), radius * theta.sin(), z]
    } else {
        let z = if pick < side_area + cap_area {
            height / 2.0
        } else {
            -height / 2.0
        };
        let rho = radius * rng.random_range(0.0..=1.0f64).sqrt();
        [rho * theta.cos(), rho * theta.sin(), z]
    }
}

fn planes_point<R: Rng>(rng: &mut R, side: f64, dihedral_deg: f64) -> [f64; 3] {
    let u = rng.random_range(0.0..=side);
    let v = rng.random_range(0.0..=side);
    if rng.random_bool(0.5) {
        [u, v, 0.0]
    } else {
        let theta = dihedral_deg.to_radians();
        [u, v * theta.cos(), v * theta.sin()]
    }
}

fn sphere_point<R: Rng>(rng: &mut R, radius: f64) -> [f64; 3] {
    loop {
        let g: [f64; 3] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if norm > 1e-12 {
            return [radius * g[0] / norm, radius * g[1] / norm, radius * g[2] / norm];
        }
    }
}

/// Distance from a point on the surface of an origin-centered cube with
/// half-side `half` to the nearest cube edge, measured within its face.
pub fn cube_edge_distance(p: [f64; 3], half: f64) -> f64 {
    let mut a = p.map(f64::abs);
    a.sort_by(|x, y| y.total_cmp(x));
    (half - a[1]).min(half - a[2]).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_points_have_unit_max_norm() {
        let c = generate_shape(ShapeKind::Cube, 2000, &ShapeParams::default(), 3).unwrap();
        for p in c.points() {
            let m = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert_eq!(m, 1.0);
        }
    }

    #[test]
    fn cube_has_requested_size() {
        let c = generate_shape(ShapeKind::Cube, 5000, &ShapeParams::default(), 0).unwrap();
        assert_eq!(c.len(), 5000);
    }

    #[test]
    fn cylinder_surface_membership() {
        let params = ShapeParams::default();
        let c = generate_shape(ShapeKind::Cylinder, 3000, &params, 11).unwrap();
        let mut caps = 0;
        for [x, y, z] in c.points() {
            let r2 = x * x + y * y;
            let on_side = (r2 - 1.0).abs() <= 1e-12 && z.abs() <= 1.0;
            let on_cap = (z.abs() - 1.0).abs() == 0.0 && r2 <= 1.0 + 1e-12;
            if on_cap {
                caps += 1;
            }
            assert!(on_side || on_cap, "({x},{y},{z}) off surface");
        }
        // caps hold a third of the area for r = 1, h = 2
        assert!(caps > 800 && caps < 1200, "caps = {caps}");
    }

    #[test]
    fn planes_surface_membership() {
        let params = ShapeParams {
            dihedral_deg: 60.0,
            ..ShapeParams::default()
        };
        let c = generate_shape(ShapeKind::Planes, 1000, &params, 5).unwrap();
        let t = 60f64.to_radians();
        for [x, y, z] in c.points() {
            assert!((0.0..=1.0).contains(&x));
            let on_a = z == 0.0 && (0.0..=1.0).contains(&y);
            // distance to the plane spanned by x and (0, cos t, sin t)
            let off = (-t.sin() * y + t.cos() * z).abs();
            let along = t.cos() * y + t.sin() * z;
            let on_b = off <= 1e-12 && along >= -1e-12 && along <= 1.0 + 1e-12;
            assert!(on_a || on_b);
        }
    }

    #[test]
    fn sphere_on_radius() {
        let c = generate_shape(ShapeKind::Sphere, 500, &ShapeParams::default(), 1).unwrap();
        for [x, y, z] in c.points() {
            assert!(((x * x + y * y + z * z).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = ShapeParams::default();
        let a = generate_shape(ShapeKind::Cylinder, 100, &p, 42).unwrap();
        let b = generate_shape(ShapeKind::Cylinder, 100, &p, 42).unwrap();
        let c = generate_shape(ShapeKind::Cylinder, 100, &p, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = ShapeParams {
            side: -1.0,
            ..ShapeParams::default()
        };
        assert!(generate_shape(ShapeKind::Cube, 10, &bad, 0).is_err());
        assert!(generate_shape(ShapeKind::Cube, 0, &ShapeParams::default(), 0).is_err());
        assert!("torus".parse::<ShapeKind>().is_err());
    }

    #[test]
    fn edge_distance() {
        assert_eq!(cube_edge_distance([1.0, 0.0, 0.0], 1.0), 1.0);
        assert!((cube_edge_distance([0.2, 1.0, -0.9], 1.0) - 0.1).abs() < 1e-15);
        assert_eq!(cube_edge_distance([1.0, 1.0, 0.3], 1.0), 0.0);
    }
}
