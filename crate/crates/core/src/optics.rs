//! Ray-transfer matrices and Gaussian-beam propagation for the spatially
//! separated resonator formed by two telecentric cat's-eye retroreflectors.
//!
//! The optical axis is unfolded: `z = 0` is the rear mirror M1 of the
//! transmitter retroreflector (where the SHG crystal sits), the beam passes
//! lens L1, the free-space gap, lens L2, the output coupler M2, and then the
//! receiver optics (L3 focusing onto the PV panel, L4 onto the photodiode,
//! which is the mirror image of L3 about the dichroic splitter).

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{check_non_negative, check_positive, Error, Result};

/// Boundary tolerance used when classifying `g1*g2*` against 0 and 1.
pub const MARGINAL_TOLERANCE: f64 = 1e-12;

/// 2x2 first-order ray-transfer matrix acting on `(r, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RayMatrix {
    pub const IDENTITY: RayMatrix = RayMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Free-space propagation over `length`.
    pub fn drift(length: f64) -> Self {
        Self::new(1.0, length, 0.0, 1.0)
    }

    /// Thin lens of focal length `focal_length`.
    pub fn thin_lens(focal_length: f64) -> Self {
        Self::new(1.0, 0.0, -1.0 / focal_length, 1.0)
    }

    /// Flat mirror in the unfolded frame.
    pub fn flat_mirror() -> Self {
        Self::IDENTITY
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply_ray(&self, r: f64, alpha: f64) -> (f64, f64) {
        (self.a * r + self.b * alpha, self.c * r + self.d * alpha)
    }

    /// ABCD law for the complex beam parameter.
    pub fn apply_q(&self, q: ComplexQ) -> ComplexQ {
        let q = q.0;
        ComplexQ((self.a * q + self.b) / (self.c * q + self.d))
    }

    /// `g1* = A`.
    pub fn g1(&self) -> f64 {
        self.a
    }

    /// `g2* = D`.
    pub fn g2(&self) -> f64 {
        self.d
    }

    /// `L* = B`.
    pub fn effective_length(&self) -> f64 {
        self.b
    }
}

impl Mul for RayMatrix {
    type Output = RayMatrix;

    fn mul(self, rhs: RayMatrix) -> RayMatrix {
        RayMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// Equivalent focal length `f^2 / (2 (l - f))` of a cat's-eye retroreflector.
/// Infinite for the ideal `l = f` case.
pub fn retroreflector_focal_length(f: f64, l: f64) -> f64 {
    let detune = l - f;
    if detune == 0.0 {
        f64::INFINITY
    } else {
        f * f / (2.0 * detune)
    }
}

/// Round-trip matrix of a cat's-eye retroreflector (lens, gap `l`, mirror,
/// gap `l`, lens), referenced to the pupil one focal length in front of
/// the lens. Equal to a thin lens of focal length `f_RR` composed with the
/// inversion `-I`.
pub fn retroreflector_matrix(f: f64, l: f64) -> Result<RayMatrix> {
    check_positive("f", f)?;
    check_positive("l", l)?;
    // 1/f_RR written without the division so that l = f gives exactly zero.
    let power = 2.0 * (l - f) / (f * f);
    Ok(RayMatrix::new(1.0, 0.0, -power, 1.0) * RayMatrix::new(-1.0, 0.0, 0.0, -1.0))
}

/// Where lens L1 sits on the unfolded axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AxialLayout {
    /// L1 one interval `l` from M1, i.e. the same element spacing as the
    /// single-pass ABCD matrix. The mode is then mirror-symmetric about the
    /// middle of the gap.
    #[default]
    Symmetric,
    /// L1 at `z = f`, as in the published piecewise q(z) expression. The
    /// 150 µm offset is comparable to the Rayleigh range at M1, so
    /// downstream radii shift noticeably.
    Literal,
}

/// Lens focal length, lens-mirror interval and transmission distance of
/// the symmetric two-retroreflector cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    /// Lens focal length `f` [m].
    pub focal_length: f64,
    /// Lens to rear-mirror interval `l` [m].
    pub lens_mirror_interval: f64,
    /// Distance `d` between the two retroreflector pupils [m].
    pub distance: f64,
    pub layout: AxialLayout,
}

impl CavityGeometry {
    pub fn new(focal_length: f64, lens_mirror_interval: f64, distance: f64) -> Result<Self> {
        check_positive("f", focal_length)?;
        check_positive("l", lens_mirror_interval)?;
        check_non_negative("d", distance)?;
        Ok(Self {
            focal_length,
            lens_mirror_interval,
            distance,
            layout: AxialLayout::default(),
        })
    }

    pub fn with_layout(mut self, layout: AxialLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn with_distance(mut self, distance: f64) -> Self {
        self.distance = distance;
        self
    }

    pub fn retroreflector_focal_length(&self) -> f64 {
        retroreflector_focal_length(self.focal_length, self.lens_mirror_interval)
    }

    /// Stability edge `4 f_RR`.
    pub fn max_stable_distance(&self) -> f64 {
        4.0 * self.retroreflector_focal_length()
    }

    pub fn z_l1(&self) -> f64 {
        match self.layout {
            AxialLayout::Symmetric => self.lens_mirror_interval,
            AxialLayout::Literal => self.focal_length,
        }
    }

    pub fn z_l2(&self) -> f64 {
        self.lens_mirror_interval + 2.0 * self.focal_length + self.distance
    }

    pub fn z_l3(&self) -> f64 {
        3.0 * self.lens_mirror_interval + 2.0 * self.focal_length + self.distance
    }

    /// PV panel plane; the photodiode plane mirrors it about M5.
    pub fn z_pv(&self) -> f64 {
        3.0 * self.lens_mirror_interval + 3.0 * self.focal_length + self.distance
    }

    /// Transmitter pupil, where the gain medium sits.
    pub fn z_gain(&self) -> f64 {
        self.lens_mirror_interval + self.focal_length
    }

    /// Receiver (RR2) pupil.
    pub fn z_receiver_pupil(&self) -> f64 {
        self.lens_mirror_interval + self.focal_length + self.distance
    }

    /// Output coupler M2.
    pub fn z_m2(&self) -> f64 {
        2.0 * self.lens_mirror_interval + 2.0 * self.focal_length + self.distance
    }

    fn lens_planes(&self) -> [f64; 3] {
        [self.z_l1(), self.z_l2(), self.z_l3()]
    }
}

/// Single-pass M1 -> M2 matrix of the cavity.
///
/// `A = D = -1 - d/f + d l/f^2`, `B = 2f - 2l + d - 2dl/f + dl^2/f^2`,
/// `C = d/f^2`. The entries are evaluated in the algebraically equal forms
/// `A = -1 + d (l-f)/f^2` and `B = 2(f-l) + d ((l-f)/f)^2`, which avoid the
/// cancellation of the `d/f` terms at metre-scale distances.
pub fn single_pass_abcd(geom: &CavityGeometry) -> RayMatrix {
    let f = geom.focal_length;
    let detune = geom.lens_mirror_interval - f;
    let d = geom.distance;
    let a = -1.0 + d * detune / (f * f);
    let b = 2.0 * (f - geom.lens_mirror_interval) + d * (detune / f).powi(2);
    let c = d / (f * f);
    RayMatrix::new(a, b, c, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

pub fn classify_stability(abcd: &RayMatrix) -> Stability {
    let g1 = abcd.g1();
    let g2 = abcd.g2();
    let product = g1 * g2;
    if (product - 1.0).abs() <= MARGINAL_TOLERANCE {
        Stability::Marginal
    } else if product.abs() <= MARGINAL_TOLERANCE {
        // g1 = g2 = 0 is the symmetric confocal-type point, which still
        // carries a finite mode; one-sided zeros do not.
        if (g1 - g2).abs() <= MARGINAL_TOLERANCE {
            Stability::Stable
        } else {
            Stability::Marginal
        }
    } else if product > 0.0 && product < 1.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

pub fn stability_check(geom: &CavityGeometry) -> Stability {
    classify_stability(&single_pass_abcd(geom))
}

/// Complex Gaussian beam parameter `q` [m].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexQ(pub Complex64);

impl ComplexQ {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    /// Beam parameter at a waist of radius `w0`.
    pub fn waist(w0: f64, wavelength: f64) -> Self {
        Self::new(0.0, PI * w0 * w0 / wavelength)
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn inverse(&self) -> Complex64 {
        self.0.inv()
    }

    fn drift(self, length: f64) -> Self {
        Self(self.0 + length)
    }

    fn through_lens(self, f: f64) -> Self {
        Self(self.0 / (-self.0 / f + 1.0))
    }
}

/// Self-consistent `q` at M1: `j |L*| sqrt(g2/(g1 (1 - g1 g2)))`.
pub fn q_at_mirror(abcd: &RayMatrix) -> Result<ComplexQ> {
    match classify_stability(abcd) {
        Stability::Stable => {}
        Stability::Marginal => return Err(Error::NoSelfConsistentMode("marginally stable")),
        Stability::Unstable => return Err(Error::NoSelfConsistentMode("unstable")),
    }
    let g1 = abcd.g1();
    let g2 = abcd.g2();
    let ratio = if g1 == g2 { 1.0 } else { g2 / g1 };
    let im = abcd.effective_length().abs() * (ratio / (1.0 - g1 * g2)).sqrt();
    Ok(ComplexQ::new(0.0, im))
}

/// Which side of a lens plane to report when `z` lands exactly on one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Before,
    After,
}

/// `q(z)` by piecewise drift and thin-lens transforms from `q(0)`.
/// At a lens plane the value before the lens is returned.
pub fn q_at(geom: &CavityGeometry, abcd: &RayMatrix, z: f64) -> Result<ComplexQ> {
    q_at_side(geom, abcd, z, Side::Before)
}

pub fn q_at_side(geom: &CavityGeometry, abcd: &RayMatrix, z: f64, side: Side) -> Result<ComplexQ> {
    let q0 = q_at_mirror(abcd)?;
    propagate_from_mirror(geom, q0, z, side)
}

fn propagate_from_mirror(geom: &CavityGeometry, q0: ComplexQ, z: f64, side: Side) -> Result<ComplexQ> {
    let z_max = geom.z_pv();
    if !(0.0..=z_max).contains(&z) {
        return Err(Error::PositionOutOfRange { z, z_max });
    }
    let f = geom.focal_length;
    let mut q = q0;
    let mut at = 0.0;
    for plane in geom.lens_planes() {
        let passes = match side {
            Side::Before => z > plane,
            Side::After => z >= plane,
        };
        if !passes {
            break;
        }
        q = q.drift(plane - at).through_lens(f);
        at = plane;
    }
    Ok(q.drift(z - at))
}

/// Fundamental-mode radius `sqrt(-lambda / (pi Im(1/q)))`.
pub fn fundamental_radius(q: ComplexQ, wavelength: f64) -> Result<f64> {
    let im_inv_q = q.inverse().im;
    if !(im_inv_q < 0.0) {
        return Err(Error::NonPhysicalMode { im_inv_q });
    }
    Ok((-wavelength / (PI * im_inv_q)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamProfile {
    /// TEM00 radius [m].
    pub w00: f64,
    /// Multimode radius [m].
    pub w: f64,
    /// Beam propagation factor `w / w00`, constant along the axis.
    pub propagation_factor: f64,
}

/// The resonator mode of one geometry, with the multimode radius anchored
/// to the gain aperture (`w(l + f) = a_g`).
#[derive(Debug, Clone, Copy)]
pub struct CavityMode {
    pub geometry: CavityGeometry,
    pub abcd: RayMatrix,
    pub q0: ComplexQ,
    pub wavelength: f64,
    pub propagation_factor: f64,
}

impl CavityMode {
    pub fn new(geometry: &CavityGeometry, gain_aperture: f64, wavelength: f64) -> Result<Self> {
        check_positive("a_g", gain_aperture)?;
        check_positive("lambda", wavelength)?;
        let abcd = single_pass_abcd(geometry);
        let q0 = q_at_mirror(&abcd)?;
        let q_gain = propagate_from_mirror(geometry, q0, geometry.z_gain(), Side::Before)?;
        let w00_gain = fundamental_radius(q_gain, wavelength)?;
        Ok(Self {
            geometry: *geometry,
            abcd,
            q0,
            wavelength,
            propagation_factor: gain_aperture / w00_gain,
        })
    }

    pub fn q(&self, z: f64) -> Result<ComplexQ> {
        propagate_from_mirror(&self.geometry, self.q0, z, Side::Before)
    }

    pub fn profile(&self, z: f64) -> Result<BeamProfile> {
        let w00 = fundamental_radius(self.q(z)?, self.wavelength)?;
        Ok(BeamProfile {
            w00,
            w: self.propagation_factor * w00,
            propagation_factor: self.propagation_factor,
        })
    }

    /// Rayleigh range `pi w00^2(0) / lambda` at the SHG crystal.
    pub fn rayleigh_range_at_mirror(&self) -> f64 {
        self.q0.im()
    }
}

/// Multimode beam radius at `z`, with the propagation factor fixed by
/// `w(l + f) = a_g`.
pub fn beam_radius(
    geom: &CavityGeometry,
    abcd: &RayMatrix,
    gain_aperture: f64,
    wavelength: f64,
    z: f64,
) -> Result<BeamProfile> {
    check_positive("a_g", gain_aperture)?;
    let q_gain = q_at(geom, abcd, geom.z_gain())?;
    let factor = gain_aperture / fundamental_radius(q_gain, wavelength)?;
    let w00 = fundamental_radius(q_at(geom, abcd, z)?, wavelength)?;
    Ok(BeamProfile {
        w00,
        w: factor * w00,
        propagation_factor: factor,
    })
}
