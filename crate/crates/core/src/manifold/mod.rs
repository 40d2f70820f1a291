//! Explicit Riemannian surfaces.
//!
//! Sphere-like builtins (round sphere, ellipsoid, conformally perturbed
//! sphere) keep points in their ambient `R^3` embedding so no chart
//! singularity ever enters the flow. Tori use flat chart coordinates reduced
//! to a fundamental domain; displacements between chart points are always
//! taken along the shortest lattice translate.
//!
//! Tangent vectors are stored as ambient vectors (sphere-like) or chart
//! component vectors (tori, third component zero). All inner products go
//! through [`Manifold::inner`].

mod conformal;
mod connect;
mod integrate;
pub mod lattice;
mod paths;

use alloc::vec::Vec;

use nalgebra::Matrix2;

pub use connect::ShootingOptions;
pub use conformal::ConformalFactor;
pub use paths::GeodesicPath;

use crate::error::{Error, Result};
use crate::math::{self, cos, ellipse_perimeter, norm, orthogonal_unit, sin, sqrt, Vec3, PI};
use lattice::Lattice;

/// A point of the manifold: ambient coordinates for sphere-like surfaces,
/// chart coordinates `(x, y, 0)` for tori.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub coords: Vec3,
}

impl Point {
    pub const fn new(coords: Vec3) -> Self {
        Self { coords }
    }
}

/// A tangent vector at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: Point,
    pub components: Vec3,
}

impl TangentVector {
    pub const fn new(base: Point, components: Vec3) -> Self {
        Self { base, components }
    }

    pub fn zero(base: Point) -> Self {
        Self::new(base, Vec3::zeros())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.base, self.components * s)
    }
}

/// A geodesic arc parametrized on `[0, 1]` proportionally to arclength, so
/// `|initial_velocity|_g == length`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment {
    pub start: Point,
    pub end: Point,
    pub initial_velocity: TangentVector,
    /// Velocity at `end` (same parametrization).
    pub final_velocity: Vec3,
    pub length: f64,
    /// Polyline of points along the arc, first = `start`, last = `end`.
    pub samples: Vec<Point>,
}

impl GeodesicSegment {
    pub fn constant(p: Point) -> Self {
        Self {
            start: p,
            end: p,
            initial_velocity: TangentVector::zero(p),
            final_velocity: Vec3::zeros(),
            length: 0.0,
            samples: alloc::vec![p, p],
        }
    }

    pub fn is_constant(&self) -> bool {
        self.length == 0.0
    }

    /// Unit tangent at `start` pointing into the segment.
    pub fn start_direction(&self) -> Option<Vec3> {
        (self.length > 0.0).then(|| self.initial_velocity.components / self.length)
    }

    /// Unit tangent at `end` pointing back into the segment.
    pub fn end_direction(&self) -> Option<Vec3> {
        (self.length > 0.0).then(|| -self.final_velocity / self.length)
    }

    /// The same arc traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self {
            start: self.end,
            end: self.start,
            initial_velocity: TangentVector::new(self.end, -self.final_velocity),
            final_velocity: -self.initial_velocity.components,
            length: self.length,
            samples,
        }
    }
}

/// The builtin surfaces.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldKind {
    RoundSphere { radius: f64 },
    /// Semi-axes along x, y, z.
    Ellipsoid { axes: [f64; 3] },
    /// Lattice basis vectors (rows) of the chart plane.
    FlatTorus { basis: [[f64; 2]; 2] },
    /// Metric `(R + r cos v)^2 du^2 + r^2 dv^2` in angle coordinates.
    TorusOfRevolution { major: f64, minor: f64 },
    /// Metric `e^{2 phi}` times the round metric of radius `radius`.
    ConformalSphere { radius: f64, coefficients: Vec<f64> },
}

/// An explicit surface with its trusted global constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifold {
    kind: ManifoldKind,
    inj: f64,
    diam: f64,
    lattice: Option<Lattice>,
    conformal: Option<ConformalFactor>,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("{name} must be positive, got {x}")))
    }
}

impl Manifold {
    pub fn round_sphere(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self {
            kind: ManifoldKind::RoundSphere { radius },
            inj: PI * radius,
            diam: PI * radius,
            lattice: None,
            conformal: None,
        })
    }

    /// Ellipsoid with semi-axes `a, b, c`. The injectivity radius is the
    /// Klingenberg bound `pi / sqrt(K_max) = pi * a_min * a_mid / a_max`;
    /// the diameter is half the perimeter of the principal ellipse through
    /// the shortest and longest axes.
    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self> {
        for (n, x) in [("a", a), ("b", b), ("c", c)] {
            positive(n, x)?;
        }
        let mut s = [a, b, c];
        s.sort_by(|x, y| x.total_cmp(y));
        let inj = PI * s[0] * s[1] / s[2];
        let diam = 0.5 * ellipse_perimeter(s[0], s[2]);
        Ok(Self {
            kind: ManifoldKind::Ellipsoid { axes: [a, b, c] },
            inj,
            diam,
            lattice: None,
            conformal: None,
        })
    }

    pub fn flat_torus(b1: [f64; 2], b2: [f64; 2]) -> Result<Self> {
        let lattice = Lattice::new(b1, b2)
            .ok_or_else(|| Error::InvalidParameter("degenerate lattice basis".into()))?;
        Ok(Self {
            kind: ManifoldKind::FlatTorus { basis: [b1, b2] },
            inj: 0.5 * lattice.systole(),
            diam: lattice.covering_radius(),
            lattice: Some(lattice),
            conformal: None,
        })
    }

    /// Torus of revolution. Injectivity radius: `pi * min(r, R - r, sqrt(r (R + r)))`
    /// (half the shortest closed geodesic or the conjugate radius of the
    /// outer equator); diameter over-estimate `pi (R + 2 r)`.
    pub fn torus_of_revolution(major: f64, minor: f64) -> Result<Self> {
        positive("major", major)?;
        positive("minor", minor)?;
        if minor >= major {
            return Err(Error::InvalidParameter("minor radius must be below major radius".into()));
        }
        let inj = PI * minor.min(major - minor).min(sqrt(minor * (major + minor)));
        Ok(Self {
            kind: ManifoldKind::TorusOfRevolution { major, minor },
            inj,
            diam: PI * (major + 2.0 * minor),
            lattice: Lattice::new([2.0 * PI, 0.0], [0.0, 2.0 * PI]),
            conformal: None,
        })
    }

    /// Conformally perturbed sphere. `inj` and `diam` are trusted inputs;
    /// see [`Manifold::conformal_sphere_estimates`] for defaults.
    pub fn conformal_sphere(radius: f64, coefficients: Vec<f64>, inj: f64, diam: f64) -> Result<Self> {
        positive("radius", radius)?;
        positive("inj", inj)?;
        positive("diam", diam)?;
        if coefficients.len() > conformal::BASIS_LEN {
            return Err(Error::InvalidParameter(alloc::format!(
                "at most {} conformal coefficients are supported",
                conformal::BASIS_LEN
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite conformal coefficient".into()));
        }
        Ok(Self {
            kind: ManifoldKind::ConformalSphere {
                radius,
                coefficients: coefficients.clone(),
            },
            inj,
            diam,
            lattice: None,
            conformal: Some(ConformalFactor::new(radius, coefficients)),
        })
    }

    /// Conservative `(inj, diam)` for a conformal sphere, from a grid scan of
    /// the factor and of the Gaussian curvature
    /// `K = e^{-2 phi} (1/R^2 - Lap phi)`:
    /// `inj = 0.9 * min(pi / sqrt(K_max), pi R e^{phi_min})`, `diam = pi R e^{phi_max}`.
    pub fn conformal_sphere_estimates(radius: f64, coefficients: &[f64]) -> (f64, f64) {
        let f = ConformalFactor::new(radius, coefficients.to_vec());
        let (mut pmin, mut pmax, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY, 0.0_f64);
        let h = 1e-3;
        for i in 0..=48 {
            let theta = PI * i as f64 / 48.0;
            for j in 0..96 {
                let lon = 2.0 * PI * j as f64 / 96.0;
                let u = Vec3::new(sin(theta) * cos(lon), sin(theta) * sin(lon), cos(theta));
                let x = u * radius;
                let phi = f.phi(&x);
                pmin = pmin.min(phi);
                pmax = pmax.max(phi);
                // Laplacian on the sphere from second differences along two
                // orthogonal great circles.
                let e1 = orthogonal_unit(&u);
                let e2 = u.cross(&e1);
                let mut lap = 0.0;
                for e in [e1, e2] {
                    let a = h / radius;
                    let xp = (u * cos(a) + e * sin(a)) * radius;
                    let xm = (u * cos(a) - e * sin(a)) * radius;
                    lap += (f.phi(&xp) + f.phi(&xm) - 2.0 * phi) / (h * h);
                }
                let k = math::exp(-2.0 * phi) * (1.0 / (radius * radius) - lap);
                kmax = kmax.max(k);
            }
        }
        let conj = if kmax > 0.0 { PI / sqrt(kmax) } else { f64::INFINITY };
        let inj = 0.9 * conj.min(PI * radius * math::exp(pmin));
        let diam = PI * radius * math::exp(pmax);
        (inj, diam)
    }

    /// Replace the global constants with trusted external values.
    pub fn with_constants(mut self, inj: f64, diam: f64) -> Result<Self> {
        positive("inj", inj)?;
        positive("diam", diam)?;
        self.inj = inj;
        self.diam = diam;
        Ok(self)
    }

    pub fn kind(&self) -> &ManifoldKind {
        &self.kind
    }

    pub fn inj(&self) -> f64 {
        self.inj
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn dim(&self) -> usize {
        2
    }

    /// Sphere-like surfaces are embedded in `R^3` and simply connected.
    pub fn is_sphere_like(&self) -> bool {
        self.lattice.is_none()
    }

    pub fn is_torus(&self) -> bool {
        self.lattice.is_some()
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ManifoldKind::RoundSphere { .. } => "round_sphere",
            ManifoldKind::Ellipsoid { .. } => "ellipsoid",
            ManifoldKind::FlatTorus { .. } => "flat_torus",
            ManifoldKind::TorusOfRevolution { .. } => "torus_of_revolution",
            ManifoldKind::ConformalSphere { .. } => "conformal_sphere",
        }
    }

    /// Squared inverse semi-axes of the embedding, for the quadric-type
    /// surfaces.
    fn inv_axes_sq(&self) -> Option<Vec3> {
        match &self.kind {
            ManifoldKind::RoundSphere { radius } | ManifoldKind::ConformalSphere { radius, .. } => {
                let s = 1.0 / (radius * radius);
                Some(Vec3::new(s, s, s))
            }
            ManifoldKind::Ellipsoid { axes } => Some(Vec3::new(
                1.0 / (axes[0] * axes[0]),
                1.0 / (axes[1] * axes[1]),
                1.0 / (axes[2] * axes[2]),
            )),
            _ => None,
        }
    }

    /// Constraint `F(x) = (sum x_i^2 / a_i^2 - 1) / 2` and its gradient.
    fn constraint(&self, x: &Vec3) -> Option<(f64, Vec3)> {
        self.inv_axes_sq().map(|w| {
            let n = x.component_mul(&w);
            (0.5 * (x.dot(&n) - 1.0), n)
        })
    }

    /// Relative residual of the defining equation (0 for chart points).
    pub fn constraint_residual(&self, p: &Point) -> f64 {
        self.constraint(&p.coords).map_or(0.0, |(f, _)| (2.0 * f).abs())
    }

    /// Snap ambient coordinates onto the surface, or reduce chart
    /// coordinates to the fundamental domain.
    pub fn project_coords(&self, x: Vec3) -> Vec3 {
        match &self.kind {
            ManifoldKind::RoundSphere { radius } | ManifoldKind::ConformalSphere { radius, .. } => {
                x * (*radius / norm(&x))
            }
            ManifoldKind::Ellipsoid { .. } => {
                let mut y = x;
                for _ in 0..6 {
                    let (f, n) = self.constraint(&y).unwrap();
                    y -= n * (f / n.dot(&n));
                    if f.abs() < 1e-17 {
                        break;
                    }
                }
                y
            }
            _ => self.lattice.as_ref().unwrap().reduce(Vec3::new(x.x, x.y, 0.0)),
        }
    }

    /// Build a point, projecting onto the surface (sphere-like) or reducing
    /// to the fundamental domain (tori).
    pub fn point(&self, x: Vec3) -> Point {
        Point::new(self.project_coords(x))
    }

    /// Point of a sphere-like surface in the direction `u` from the origin.
    pub fn point_in_direction(&self, u: Vec3) -> Point {
        let u = u / norm(&u);
        match &self.kind {
            ManifoldKind::Ellipsoid { .. } => {
                let w = self.inv_axes_sq().unwrap();
                let rho = sqrt(u.component_mul(&w).dot(&u));
                Point::new(u / rho)
            }
            _ => self.point(u),
        }
    }

    /// Check that `p` lies on the manifold.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        let r = self.constraint_residual(p);
        if !(r <= 1e-9) || !p.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::OffManifold { residual: r });
        }
        Ok(())
    }

    /// Project an ambient vector onto the tangent plane at `x`.
    pub fn project_tangent_at(&self, x: &Vec3, v: Vec3) -> Vec3 {
        match self.constraint(x) {
            Some((_, n)) => v - n * (v.dot(&n) / n.dot(&n)),
            None => Vec3::new(v.x, v.y, 0.0),
        }
    }

    pub fn project_tangent(&self, p: &Point, v: Vec3) -> TangentVector {
        TangentVector::new(*p, self.project_tangent_at(&p.coords, v))
    }

    fn inner_at(&self, x: &Vec3, v: &Vec3, w: &Vec3) -> f64 {
        match &self.kind {
            ManifoldKind::RoundSphere { .. } | ManifoldKind::Ellipsoid { .. } => v.dot(w),
            ManifoldKind::FlatTorus { .. } => v.x * w.x + v.y * w.y,
            ManifoldKind::TorusOfRevolution { major, minor } => {
                let rho = major + minor * cos(x.y);
                rho * rho * v.x * w.x + minor * minor * v.y * w.y
            }
            ManifoldKind::ConformalSphere { .. } => {
                self.conformal.as_ref().unwrap().factor(x) * v.dot(w)
            }
        }
    }

    /// Riemannian inner product `g_p(v, w)`.
    pub fn inner(&self, p: &Point, v: &Vec3, w: &Vec3) -> f64 {
        self.inner_at(&p.coords, v, w)
    }

    pub fn norm_at(&self, p: &Point, v: &Vec3) -> f64 {
        sqrt(self.inner(p, v, v).max(0.0))
    }

    pub fn tangent_norm(&self, v: &TangentVector) -> f64 {
        self.norm_at(&v.base, &v.components)
    }

    /// Geodesic equation: acceleration at `(x, v)`.
    fn acceleration(&self, x: &Vec3, v: &Vec3) -> Vec3 {
        match &self.kind {
            ManifoldKind::RoundSphere { .. } | ManifoldKind::Ellipsoid { .. } => {
                let w = self.inv_axes_sq().unwrap();
                let n = x.component_mul(&w);
                let num = v.component_mul(&w).dot(v);
                -n * (num / n.dot(&n))
            }
            ManifoldKind::FlatTorus { .. } => Vec3::zeros(),
            ManifoldKind::TorusOfRevolution { major, minor } => {
                let (sv, cv) = (sin(x.y), cos(x.y));
                let rho = major + minor * cv;
                Vec3::new(
                    2.0 * minor * sv / rho * v.x * v.y,
                    -rho * sv / minor * v.x * v.x,
                    0.0,
                )
            }
            ManifoldKind::ConformalSphere { radius, .. } => {
                let r2 = radius * radius;
                let f = self.conformal.as_ref().unwrap();
                let g = self.project_tangent_at(x, f.grad(x));
                let vv = v.dot(v);
                -x * (vv / r2) - v * (2.0 * g.dot(v)) + g * vv
            }
        }
    }

    /// Parallel transport equation: rate of change of `w` along velocity `v`.
    fn transport_rate(&self, x: &Vec3, v: &Vec3, w: &Vec3) -> Vec3 {
        match &self.kind {
            ManifoldKind::RoundSphere { .. } | ManifoldKind::Ellipsoid { .. } => {
                let a = self.inv_axes_sq().unwrap();
                let n = x.component_mul(&a);
                -n * (w.dot(&v.component_mul(&a)) / n.dot(&n))
            }
            ManifoldKind::FlatTorus { .. } => Vec3::zeros(),
            ManifoldKind::TorusOfRevolution { major, minor } => {
                let (sv, cv) = (sin(x.y), cos(x.y));
                let rho = major + minor * cv;
                Vec3::new(
                    minor * sv / rho * (v.x * w.y + v.y * w.x),
                    -rho * sv / minor * v.x * w.x,
                    0.0,
                )
            }
            ManifoldKind::ConformalSphere { radius, .. } => {
                let f = self.conformal.as_ref().unwrap();
                let g = self.project_tangent_at(x, f.grad(x));
                -x * (w.dot(v) / (radius * radius))
                    - (w * g.dot(v) + v * g.dot(w) - g * v.dot(w))
            }
        }
    }

    /// Coordinate displacement from `p` to `q`: ambient difference, or the
    /// shortest lattice translate of the chart difference.
    pub fn displacement(&self, p: &Point, q: &Point) -> Vec3 {
        let d = q.coords - p.coords;
        match &self.lattice {
            Some(l) => l.wrap(d),
            None => d,
        }
    }

    /// Euclidean (ambient or chart) size of the displacement.
    pub fn chord(&self, p: &Point, q: &Point) -> f64 {
        norm(&self.displacement(p, q))
    }

    /// Lower bound on the Riemannian distance from the chord length.
    fn distance_lower_bound(&self, p: &Point, q: &Point) -> f64 {
        let c = self.chord(p, q);
        match &self.kind {
            ManifoldKind::RoundSphere { .. } | ManifoldKind::Ellipsoid { .. } | ManifoldKind::FlatTorus { .. } => c,
            ManifoldKind::TorusOfRevolution { major, minor } => c * minor.min(major - minor),
            ManifoldKind::ConformalSphere { .. } => c * sqrt(0.5),
        }
    }

    /// A basis of the tangent plane at `p`: Euclidean-orthonormal for
    /// embedded surfaces, the chart coordinate basis for tori.
    pub fn tangent_frame(&self, p: &Point) -> [Vec3; 2] {
        match self.constraint(&p.coords) {
            Some((_, n)) => {
                let e1 = orthogonal_unit(&n);
                let e2 = n.cross(&e1);
                [e1, e2 / norm(&e2)]
            }
            None => [Vec3::x(), Vec3::y()],
        }
    }

    /// Basis in which [`Manifold::metric_at`] is expressed. For sphere-like
    /// surfaces it is the image of an orthonormal frame of the unit sphere
    /// at `p / |p|` under the radial chart `u -> p(u)`; for tori it is the
    /// chart basis.
    pub fn coordinate_frame(&self, p: &Point) -> [Vec3; 2] {
        match self.inv_axes_sq() {
            Some(w) => {
                let u = p.coords / norm(&p.coords);
                let f1 = orthogonal_unit(&u);
                let f2 = u.cross(&f1);
                let rho = sqrt(u.component_mul(&w).dot(&u));
                let grad_rho = u.component_mul(&w) / rho;
                let d = |f: Vec3| f / rho - u * (grad_rho.dot(&f) / (rho * rho));
                [d(f1), d(f2)]
            }
            None => [Vec3::x(), Vec3::y()],
        }
    }

    /// Gram matrix of the metric in [`Manifold::coordinate_frame`].
    pub fn metric_at(&self, p: &Point) -> Result<Matrix2<f64>> {
        self.check_point(p)?;
        let [e1, e2] = self.coordinate_frame(p);
        let g12 = self.inner(p, &e1, &e2);
        Ok(Matrix2::new(self.inner(p, &e1, &e1), g12, g12, self.inner(p, &e2, &e2)))
    }

    /// Integrate the geodesic through `v` for parameter time `t`; returns
    /// the endpoint and the velocity there.
    pub fn geodesic_shoot(&self, v: &TangentVector, t: f64) -> Result<(Point, TangentVector)> {
        if t == 0.0 {
            return Ok((v.base, *v));
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter("shooting time must be nonnegative".into()));
        }
        let run = integrate::shoot(self, v, t, None, false)?;
        Ok((run.end, TangentVector::new(run.end, run.end_velocity)))
    }

    /// Minimizing geodesic between points at distance at most `inj / 2`.
    pub fn geodesic_connect(&self, p: &Point, q: &Point) -> Result<GeodesicSegment> {
        connect::connect(self, p, q, &ShootingOptions::minimizing(self))
    }

    /// Boundary-value solve with explicit options (e.g. without the
    /// `inj / 2` limit, or with a caller-supplied initial velocity).
    pub fn geodesic_connect_with(&self, p: &Point, q: &Point, opts: &ShootingOptions) -> Result<GeodesicSegment> {
        connect::connect(self, p, q, opts)
    }

    /// Parallel transport of `v` along `along` from its start to its end.
    pub fn parallel_transport(&self, v: &TangentVector, along: &GeodesicSegment) -> Result<TangentVector> {
        let miss = self.chord(&v.base, &along.start);
        if miss > 1e-9 * self.diam {
            return Err(Error::BaseMismatch { miss });
        }
        if along.is_constant() {
            return Ok(TangentVector::new(along.end, v.components));
        }
        let run = integrate::shoot(self, &along.initial_velocity, 1.0, Some(v.components), false)?;
        Ok(TangentVector::new(along.end, run.transported.unwrap()))
    }

    /// Riemannian distance. Exact closed forms for the round sphere and the
    /// flat torus; otherwise the length of the minimizing geodesic (boundary
    /// value solve below `inj / 2`, relaxed path above).
    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        match &self.kind {
            ManifoldKind::RoundSphere { radius } => {
                let a = p.coords / norm(&p.coords);
                let b = q.coords / norm(&q.coords);
                radius * math::atan2(norm(&a.cross(&b)), a.dot(&b))
            }
            ManifoldKind::FlatTorus { .. } => self.chord(p, q),
            _ => {
                if p == q {
                    return 0.0;
                }
                // canonical order makes the result exactly symmetric
                let (a, b) = if lex_less(p, q) { (p, q) } else { (q, p) };
                if self.distance_lower_bound(a, b) <= 0.5 * self.inj {
                    if let Ok(s) = self.geodesic_connect(a, b) {
                        return s.length;
                    }
                }
                paths::minimizing_path(self, a, b).map_or(f64::INFINITY, |g| g.length)
            }
        }
    }

    /// Shortest geodesic between arbitrary points, as a polyline of vertices
    /// along it with spacing at most `inj / 4`.
    pub fn minimizing_path(&self, p: &Point, q: &Point) -> Result<GeodesicPath> {
        paths::minimizing_path(self, p, q)
    }

    /// Random point, uniform in the ambient direction (sphere-like) or in the
    /// fundamental domain (tori).
    pub fn random_point<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match &self.lattice {
            Some(l) => {
                let (b1, b2) = l.basis();
                let (s, t): (f64, f64) = (rng.gen(), rng.gen());
                self.point(Vec3::new(s * b1[0] + t * b2[0], s * b1[1] + t * b2[1], 0.0))
            }
            None => loop {
                let u = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let r = norm(&u);
                if r > 1e-3 && r <= 1.0 {
                    break self.point_in_direction(u);
                }
            },
        }
    }

    /// Random tangent vector at `p` with `|v|_g = len`.
    pub fn random_tangent<R: rand::Rng + ?Sized>(&self, rng: &mut R, p: &Point, len: f64) -> TangentVector {
        let [e1, e2] = self.tangent_frame(p);
        let a = rng.gen_range(0.0..2.0 * PI);
        let v = e1 * cos(a) + e2 * sin(a);
        TangentVector::new(*p, v * (len / self.norm_at(p, &v)))
    }
}

fn lex_less(p: &Point, q: &Point) -> bool {
    for i in 0..3 {
        if p.coords[i] != q.coords[i] {
            return p.coords[i] < q.coords[i];
        }
    }
    false
}

#[cfg(test)]
pub(crate) mod tests;
