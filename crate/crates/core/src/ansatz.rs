//! Peakon and kink ansatz fields, their momenta, and distributional pairings.
//!
//! A peakon train contributes `u = Σ pᵢ e^{-|x-qᵢ|}` with momentum
//! `m = u - u_xx = Σ pᵢ δ(x-qᵢ)`. A kink train contributes
//! `u = Σ cᵢ sgn(x-pᵢ)(e^{-|x-pᵢ|} - 1)` with piecewise-constant momentum
//! `m = -Σ cᵢ sgn(x-pᵢ)` and `m_x = -2 Σ cᵢ δ(x-pᵢ)`.

use std::f64::consts::PI;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{ipow, kink_shape, sgn};
use crate::quadrature::PanelQuadrature;

/// Amplitudes and positions of one component (`u` or `v`) of the ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Train {
    amplitudes: Vec<f64>,
    positions: Vec<f64>,
}

impl Train {
    pub fn new(amplitudes: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("a train needs at least one member".into()));
        }
        if amplitudes.len() != positions.len() {
            return Err(Error::InvalidState(format!(
                "{} amplitudes but {} positions",
                amplitudes.len(),
                positions.len()
            )));
        }
        if amplitudes.iter().chain(&positions).any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude or position".into()));
        }
        Ok(Self {
            amplitudes,
            positions,
        })
    }

    /// Single-member train.
    pub fn single(amplitude: f64, position: f64) -> Result<Self> {
        Self::new(vec![amplitude], vec![position])
    }

    pub(crate) fn from_parts_unchecked(amplitudes: Vec<f64>, positions: Vec<f64>) -> Self {
        Self {
            amplitudes,
            positions,
        }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    fn is_identically_zero(&self) -> bool {
        self.amplitudes.iter().chain(&self.positions).all(|&x| x == 0.0)
    }

    pub fn total_variation(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.abs()).sum()
    }

    fn members(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.amplitudes
            .iter()
            .copied()
            .zip(self.positions.iter().copied())
    }

    /// `Σ aᵢ e^{-|x-xᵢ|}`.
    pub fn peakon_value(&self, x: f64) -> f64 {
        self.members().map(|(a, q)| a * (-(x - q).abs()).exp()).sum()
    }

    /// `-Σ aᵢ sgn(x-xᵢ) e^{-|x-xᵢ|}`; at an atom this is the mean of the one-sided slopes.
    pub fn peakon_slope(&self, x: f64) -> f64 {
        -self
            .members()
            .map(|(a, q)| a * sgn(x - q) * (-(x - q).abs()).exp())
            .sum::<f64>()
    }

    /// `Σ cᵢ sgn(x-xᵢ)(e^{-|x-xᵢ|} - 1)`.
    pub fn kink_value(&self, x: f64) -> f64 {
        self.members().map(|(c, p)| c * kink_shape(x - p)).sum()
    }

    /// Kink momentum `-Σ cᵢ sgn(x-xᵢ)`.
    pub fn kink_momentum(&self, x: f64) -> f64 {
        -self.members().map(|(c, p)| c * sgn(x - p)).sum::<f64>()
    }
}

fn check_exponent(b: u32) -> Result<()> {
    if b == 0 {
        Err(Error::InvalidExponent)
    } else {
        Ok(())
    }
}

/// Parameters of the multipeakon ansatz at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakonState {
    b: u32,
    u: Train,
    v: Train,
}

impl PeakonState {
    pub fn new(b: u32, u: Train, v: Train) -> Result<Self> {
        check_exponent(b)?;
        if u.is_identically_zero() || v.is_identically_zero() {
            return Err(Error::InvalidState(
                "amplitudes and positions of a component must not all vanish".into(),
            ));
        }
        Ok(Self { b, u, v })
    }

    /// Convenience constructor for the 1+1 case.
    pub fn pair(b: u32, p: f64, q: f64, big_p: f64, big_q: f64) -> Result<Self> {
        Self::new(b, Train::single(p, q)?, Train::single(big_p, big_q)?)
    }

    pub(crate) fn from_parts_unchecked(b: u32, u: Train, v: Train) -> Self {
        Self { b, u, v }
    }
}

/// Parameters of the multikink ansatz at one instant. Heights never evolve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinkState {
    b: u32,
    u: Train,
    v: Train,
}

impl KinkState {
    pub fn new(b: u32, u: Train, v: Train) -> Result<Self> {
        check_exponent(b)?;
        Ok(Self { b, u, v })
    }

    pub fn pair(b: u32, c: f64, p: f64, ctilde: f64, q: f64) -> Result<Self> {
        Self::new(b, Train::single(c, p)?, Train::single(ctilde, q)?)
    }

    pub(crate) fn from_parts_unchecked(b: u32, u: Train, v: Train) -> Self {
        Self { b, u, v }
    }
}

/// Additive constants on `u` and `v`, produced only by the `b = 1` boost.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldOffset {
    pub du: f64,
    pub dv: f64,
}

impl FieldOffset {
    pub fn is_zero(&self) -> bool {
        self.du == 0.0 && self.dv == 0.0
    }
}

/// Gaussian test function `exp(-(x-center)² / (2 width²))`, truncated to
/// `center ± 8 width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: f64,
    pub width: f64,
}

impl TestFunction {
    pub const SUPPORT_HALF_WIDTHS: f64 = 8.0;

    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() || !center.is_finite() {
            return Err(Error::InvalidState(format!(
                "bad test function ({center}, {width})"
            )));
        }
        Ok(Self { center, width })
    }

    pub fn value(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.width;
        (-0.5 * z * z).exp()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        -(x - self.center) / (self.width * self.width) * self.value(x)
    }

    /// `∫ φ` over the real line.
    pub fn integral(&self) -> f64 {
        self.width * (2.0 * PI).sqrt()
    }

    pub fn support(&self) -> (f64, f64) {
        let h = Self::SUPPORT_HALF_WIDTHS * self.width;
        (self.center - h, self.center + h)
    }
}

/// Which equation of the system: `m_t = v^b m_x` (U) or `n_t = u^b n_x` (V).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Peakon,
    Kink,
}

/// Common surface of the two ansatz families.
pub trait Ansatz: Clone + Debug + PartialEq + Send + Sync {
    const FAMILY: Family;

    fn exponent(&self) -> u32;
    fn u(&self) -> &Train;
    fn v(&self) -> &Train;

    /// Rebuild a state of this family, validating invariants.
    fn from_trains(b: u32, u: Train, v: Train) -> Result<Self>;

    /// `(u(x), v(x))`, including the offset.
    fn fields(&self, offset: FieldOffset, x: f64) -> (f64, f64);

    /// `⟨m, φ⟩` (U) or `⟨n, φ⟩` (V).
    fn momentum_pairing(
        &self,
        offset: FieldOffset,
        phi: &TestFunction,
        eq: Equation,
        quad: &PanelQuadrature,
    ) -> Result<f64>;

    /// `⟨v^b m_x, φ⟩` (U) or `⟨u^b n_x, φ⟩` (V).
    fn convected_pairing(&self, offset: FieldOffset, phi: &TestFunction, eq: Equation) -> f64;

    fn trains(&self, eq: Equation) -> (&Train, &Train) {
        match eq {
            Equation::U => (self.u(), self.v()),
            Equation::V => (self.v(), self.u()),
        }
    }
}

fn offsets(offset: FieldOffset, eq: Equation) -> (f64, f64) {
    match eq {
        Equation::U => (offset.du, offset.dv),
        Equation::V => (offset.dv, offset.du),
    }
}

impl Ansatz for PeakonState {
    const FAMILY: Family = Family::Peakon;

    fn exponent(&self) -> u32 {
        self.b
    }

    fn u(&self) -> &Train {
        &self.u
    }

    fn v(&self) -> &Train {
        &self.v
    }

    fn from_trains(b: u32, u: Train, v: Train) -> Result<Self> {
        Self::new(b, u, v)
    }

    fn fields(&self, offset: FieldOffset, x: f64) -> (f64, f64) {
        (
            offset.du + self.u.peakon_value(x),
            offset.dv + self.v.peakon_value(x),
        )
    }

    fn momentum_pairing(
        &self,
        offset: FieldOffset,
        phi: &TestFunction,
        eq: Equation,
        _quad: &PanelQuadrature,
    ) -> Result<f64> {
        let (own, _) = self.trains(eq);
        let (d_own, _) = offsets(offset, eq);
        let atoms: f64 = own.members().map(|(a, q)| a * phi.value(q)).sum();
        Ok(atoms + d_own * phi.integral())
    }

    fn convected_pairing(&self, offset: FieldOffset, phi: &TestFunction, eq: Equation) -> f64 {
        let (own, other) = self.trains(eq);
        let (_, d_other) = offsets(offset, eq);
        let b = self.b;
        -own.members()
            .map(|(a, q)| {
                let field = d_other + other.peakon_value(q);
                let slope = other.peakon_slope(q);
                a * (f64::from(b) * ipow(field, b - 1) * slope * phi.value(q)
                    + ipow(field, b) * phi.derivative(q))
            })
            .sum::<f64>()
    }
}

impl Ansatz for KinkState {
    const FAMILY: Family = Family::Kink;

    fn exponent(&self) -> u32 {
        self.b
    }

    fn u(&self) -> &Train {
        &self.u
    }

    fn v(&self) -> &Train {
        &self.v
    }

    fn from_trains(b: u32, u: Train, v: Train) -> Result<Self> {
        Self::new(b, u, v)
    }

    fn fields(&self, offset: FieldOffset, x: f64) -> (f64, f64) {
        (offset.du + self.u.kink_value(x), offset.dv + self.v.kink_value(x))
    }

    fn momentum_pairing(
        &self,
        offset: FieldOffset,
        phi: &TestFunction,
        eq: Equation,
        quad: &PanelQuadrature,
    ) -> Result<f64> {
        let (own, _) = self.trains(eq);
        let (d_own, _) = offsets(offset, eq);
        let (lo, hi) = phi.support();
        let scale = own.total_variation() * phi.integral();
        let kinks = quad.integrate_checked(lo, hi, own.positions(), scale, |x| {
            own.kink_momentum(x) * phi.value(x)
        })?;
        Ok(kinks + d_own * phi.integral())
    }

    fn convected_pairing(&self, offset: FieldOffset, phi: &TestFunction, eq: Equation) -> f64 {
        let (own, other) = self.trains(eq);
        let (_, d_other) = offsets(offset, eq);
        -2.0 * own
            .members()
            .map(|(c, p)| c * ipow(d_other + other.kink_value(p), self.b) * phi.value(p))
            .sum::<f64>()
    }
}

/// A one-dimensional profile with analytic one-sided derivatives.
pub trait Profile {
    fn value(&self, x: f64) -> f64;
    /// `(lim φ'(x-ε), lim φ'(x+ε))` as `ε → 0⁺`.
    fn one_sided_derivatives(&self, x: f64) -> (f64, f64);
}

/// `offset + Σ aᵢ e^{-|x-xᵢ|}`.
#[derive(Debug, Clone, Copy)]
pub struct PeakonProfile<'a> {
    pub train: &'a Train,
    pub offset: f64,
}

impl Profile for PeakonProfile<'_> {
    fn value(&self, x: f64) -> f64 {
        self.offset + self.train.peakon_value(x)
    }

    fn one_sided_derivatives(&self, x: f64) -> (f64, f64) {
        let smooth = self.train.peakon_slope(x);
        // atoms sitting exactly at x contribute ±a to the one-sided slopes
        let jump: f64 = self
            .train
            .members()
            .filter(|&(_, q)| q == x)
            .map(|(a, _)| a)
            .sum();
        (smooth + jump, smooth - jump)
    }
}

/// `offset + Σ cᵢ sgn(x-xᵢ)(e^{-|x-xᵢ|} - 1)`.
#[derive(Debug, Clone, Copy)]
pub struct KinkProfile<'a> {
    pub train: &'a Train,
    pub offset: f64,
}

impl Profile for KinkProfile<'_> {
    fn value(&self, x: f64) -> f64 {
        self.offset + self.train.kink_value(x)
    }

    fn one_sided_derivatives(&self, x: f64) -> (f64, f64) {
        // the first derivative -c e^{-|x-p|} is continuous across each centre
        let d = -self
            .train
            .members()
            .map(|(c, p)| c * (-(x - p).abs()).exp())
            .sum::<f64>();
        (d, d)
    }
}

/// True iff `f` has a peak at `x0`: finite non-zero one-sided slopes of
/// opposite sign and equal magnitude. Profiles here have finitely many
/// breakpoints, so they are smooth on both sides of `x0` close enough to it.
pub fn validate_peak_profile(f: &impl Profile, x0: f64) -> bool {
    let (left, right) = f.one_sided_derivatives(x0);
    if !left.is_finite() || !right.is_finite() || right == 0.0 {
        return false;
    }
    let tol = 1e-12 * left.abs().max(right.abs());
    (right + left).abs() <= tol
}

/// Uniform grid `[min, max]` with `points ≥ 2` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl SampleGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let grid = Self { min, max, points };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidState("grid needs at least 2 points".into()));
        }
        if !self.min.is_finite() || !self.max.is_finite() || !(self.max > self.min) {
            return Err(Error::InvalidState(
                "grid bounds must be finite with max > min".into(),
            ));
        }
        Ok(())
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.points - 1;
        let h = (self.max - self.min) / n as f64;
        (0..=n).map(move |k| if k == n { self.max } else { self.min + h * k as f64 })
    }
}

/// True iff the sampled kink field is monotone (non-strictly) on `grid` and
/// bounded by the sum of the absolute heights.
pub fn validate_kink_profile(state: &KinkState, which: Equation, grid: &SampleGrid) -> bool {
    let (train, _) = state.trains(which);
    let bound = train.total_variation();
    let samples: Vec<f64> = grid.nodes().map(|x| train.kink_value(x)).collect();
    if samples.iter().any(|s| s.abs() > bound) {
        return false;
    }
    let rising = samples.windows(2).all(|w| w[1] >= w[0]);
    let falling = samples.windows(2).all(|w| w[1] <= w[0]);
    rising || falling
}
