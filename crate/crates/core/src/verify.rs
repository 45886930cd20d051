//! Independent checks of trajectories: distributional residuals of the PDE
//! system, residuals of the parameter ODEs, conservation drift and
//! comparison against exact flows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, Equation, Family, PeakonState, TestFunction, Train};
use crate::closed_form::{kappa, ExactFlow};
use crate::dynamics::{separations, Dynamics, Trajectory};
use crate::error::{Error, Result};
use crate::math::{ipow, sgn};
use crate::quadrature::{PanelQuadrature, QuadratureConfig};

/// Minimum number of uniformly spaced samples for the five-point stencil.
pub const MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equations {
    U,
    V,
    Both,
}

impl Equations {
    fn list(self) -> &'static [Equation] {
        match self {
            Equations::U => &[Equation::U],
            Equations::V => &[Equation::V],
            Equations::Both => &[Equation::U, Equation::V],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Checker {
    Weak,
    Ode,
}

/// Settings shared by the checkers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub seed: u64,
    pub battery_size: usize,
    pub quadrature: QuadratureConfig,
    pub weak_tolerance: f64,
    pub ode_tolerance: f64,
    pub equations: Equations,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            battery_size: 20,
            quadrature: QuadratureConfig::default(),
            weak_tolerance: 1e-6,
            ode_tolerance: 1e-9,
            equations: Equations::Both,
        }
    }
}

/// Seeded collection of Gaussian test functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestBattery {
    pub seed: u64,
    pub functions: Vec<TestFunction>,
}

impl TestBattery {
    pub const MIN_WIDTH: f64 = 0.25;
    pub const MAX_WIDTH: f64 = 2.0;

    /// `count` Gaussians with centres uniform on `[lo, hi]` and widths uniform
    /// on `[0.25, 2]`.
    pub fn seeded(seed: u64, count: usize, lo: f64, hi: f64) -> Result<Self> {
        if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidState(format!("bad battery range [{lo}, {hi}]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let functions = (0..count)
            .map(|_| {
                let c: f64 = rng.random();
                let w: f64 = rng.random();
                TestFunction::new(
                    lo + (hi - lo) * c,
                    Self::MIN_WIDTH + (Self::MAX_WIDTH - Self::MIN_WIDTH) * w,
                )
            })
            .collect::<Result<_>>()?;
        Ok(Self { seed, functions })
    }

    /// Battery over the trajectory's spatial hull widened by 3 on each side.
    pub fn for_trajectory<S: Ansatz>(trajectory: &Trajectory<S>, seed: u64, count: usize) -> Result<Self> {
        let (lo, hi) = trajectory.spatial_hull();
        Self::seeded(seed, count, lo - 3.0, hi + 3.0)
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub equation: Equation,
    /// Battery index (weak checker only).
    pub test_function: Option<usize>,
    pub max_abs: f64,
    /// Sample time at which `max_abs` is attained.
    pub at_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub checker: Checker,
    pub entries: Vec<ResidualEntry>,
    pub max: f64,
    pub rms: f64,
    /// Magnitude `max_t (Σ|a| + |d|)(Σ|ã| + |d̃|)^b` of the nonlinear term,
    /// used to compare residuals of rescaled solutions.
    pub scale: f64,
    pub dt: f64,
    pub samples: usize,
    pub quadrature: Option<QuadratureConfig>,
    pub tolerance: f64,
    pub passed: bool,
}

impl ResidualReport {
    fn from_entries(
        checker: Checker,
        entries: Vec<ResidualEntry>,
        scale: f64,
        dt: f64,
        samples: usize,
        quadrature: Option<QuadratureConfig>,
        tolerance: f64,
    ) -> Self {
        let max = entries.iter().map(|e| e.max_abs).fold(0.0, f64::max);
        let rms = if entries.is_empty() {
            0.0
        } else {
            (entries.iter().map(|e| e.max_abs * e.max_abs).sum::<f64>() / entries.len() as f64).sqrt()
        };
        Self {
            checker,
            entries,
            max,
            rms,
            scale,
            dt,
            samples,
            quadrature,
            tolerance,
            passed: max <= tolerance,
        }
    }

    /// `max / scale`; invariant under amplitude rescaling of the solution.
    pub fn normalized_max(&self) -> f64 {
        if self.scale > 0.0 {
            self.max / self.scale
        } else {
            self.max
        }
    }
}

fn nonlinear_scale<S: Ansatz>(trajectory: &Trajectory<S>) -> f64 {
    let off = trajectory.offset();
    let b = trajectory.exponent();
    let term = |own: &Train, d_own: f64, other: &Train, d_other: f64| {
        (own.total_variation() + d_own.abs()) * ipow(other.total_variation() + d_other.abs(), b)
    };
    trajectory
        .samples()
        .iter()
        .map(|s| {
            let (u, v) = (s.state.u(), s.state.v());
            term(u, off.du, v, off.dv).max(term(v, off.dv, u, off.du))
        })
        .fold(0.0, f64::max)
}

fn five_point_derivative(f: [f64; 5], h: f64) -> f64 {
    (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h)
}

fn uniform_samples<S: Ansatz>(trajectory: &Trajectory<S>) -> Result<f64> {
    if trajectory.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_SAMPLES,
            got: trajectory.len(),
        });
    }
    trajectory.uniform_step()
}

/// Distributional residual `d/dt⟨m,φ⟩ - ⟨v^b m_x, φ⟩` (and its `n`
/// counterpart) at every interior sample, for every battery function.
///
/// The time derivative is a fourth-order central difference of the momentum
/// pairing over the samples; the convected term is evaluated at the centre.
pub fn weak_residual<S: Ansatz>(
    trajectory: &Trajectory<S>,
    battery: &TestBattery,
    which: Equations,
    config: &VerifyConfig,
) -> Result<ResidualReport> {
    let h = uniform_samples(trajectory)?;
    let quad = PanelQuadrature::new(config.quadrature)?;
    let offset = trajectory.offset();
    let samples = trajectory.samples();

    let mut entries = Vec::with_capacity(battery.len() * 2);
    for &eq in which.list() {
        for (index, phi) in battery.functions.iter().enumerate() {
            let pairings = samples
                .iter()
                .map(|s| s.state.momentum_pairing(offset, phi, eq, &quad))
                .collect::<Result<Vec<f64>>>()?;
            let mut worst = (0.0f64, samples[2].t);
            for k in 2..samples.len() - 2 {
                let stencil = [
                    pairings[k - 2],
                    pairings[k - 1],
                    pairings[k],
                    pairings[k + 1],
                    pairings[k + 2],
                ];
                let lhs = five_point_derivative(stencil, h);
                let rhs = samples[k].state.convected_pairing(offset, phi, eq);
                let r = (lhs - rhs).abs();
                if r > worst.0 || r.is_nan() {
                    worst = (r, samples[k].t);
                }
            }
            entries.push(ResidualEntry {
                equation: eq,
                test_function: Some(index),
                max_abs: worst.0,
                at_t: worst.1,
            });
        }
    }
    let quad_used = if S::FAMILY == Family::Kink {
        Some(config.quadrature)
    } else {
        None
    };
    Ok(ResidualReport::from_entries(
        Checker::Weak,
        entries,
        nonlinear_scale(trajectory),
        h,
        trajectory.len(),
        quad_used,
        config.weak_tolerance,
    ))
}

/// `max |finite-difference derivative - rhs|` over interior samples, per block.
pub fn ode_residual<S: Dynamics>(
    trajectory: &Trajectory<S>,
    config: &VerifyConfig,
) -> Result<ResidualReport> {
    if !trajectory.offset().is_zero() {
        return Err(Error::Precondition(
            "fields with a constant offset are checked by the weak residual only".into(),
        ));
    }
    let h = uniform_samples(trajectory)?;
    let samples = trajectory.samples();
    let n_u = samples[0].state.u().len();
    let coords: Vec<Vec<f64>> = samples.iter().map(|s| s.state.coords()).collect();
    let signs: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| separations(&s.state).into_iter().map(sgn).collect())
        .collect();

    // u block first in the coordinate layout: peakons [p, q | P, Q], kinks [p | q]
    let u_len = match S::FAMILY {
        Family::Peakon => 2 * n_u,
        Family::Kink => n_u,
    };
    let mut worst = [(0.0f64, samples[2].t), (0.0f64, samples[2].t)];
    for k in 2..samples.len() - 2 {
        let (t_lo, t_hi) = (samples[k - 2].t, samples[k + 2].t);
        if trajectory.events().iter().any(|e| e.t >= t_lo && e.t <= t_hi) {
            return Err(Error::StencilCrossesEvent { t: samples[k].t });
        }
        for pair in 0..signs[k].len() {
            let nonzero: Vec<f64> = signs[k - 2..=k + 2]
                .iter()
                .map(|row| row[pair])
                .filter(|&s| s != 0.0)
                .collect();
            if nonzero.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::StencilCrossesEvent { t: samples[k].t });
            }
        }
        let velocity = samples[k].state.coord_velocity();
        for (i, &v) in velocity.iter().enumerate() {
            let stencil = [
                coords[k - 2][i],
                coords[k - 1][i],
                coords[k][i],
                coords[k + 1][i],
                coords[k + 2][i],
            ];
            let r = (five_point_derivative(stencil, h) - v).abs();
            let block = usize::from(i >= u_len);
            if r > worst[block].0 || r.is_nan() {
                worst[block] = (r, samples[k].t);
            }
        }
    }
    let entries = [Equation::U, Equation::V]
        .iter()
        .zip(worst)
        .map(|(&equation, (max_abs, at_t))| ResidualEntry {
            equation,
            test_function: None,
            max_abs,
            at_t,
        })
        .collect();
    Ok(ResidualReport::from_entries(
        Checker::Ode,
        entries,
        nonlinear_scale(trajectory),
        h,
        trajectory.len(),
        None,
        config.ode_tolerance,
    ))
}

/// `max |p^b + P^b - κ| / max(1, |κ|)` over a 1+1 peakon trajectory, with
/// `κ` taken from the first sample.
///
/// Either every sample has `q ≠ Q`, or every sample has `q = Q` (the
/// constant-amplitude branch). A trajectory mixing the two is rejected.
pub fn conservation_drift(trajectory: &Trajectory<PeakonState>) -> Result<f64> {
    let conserved = kappa(&trajectory.first().state)?;
    let norm = conserved.kappa.abs().max(1.0);
    let coincident = !conserved.is_valid_for(&trajectory.first().state);
    let mut drift = 0.0f64;
    for s in trajectory.samples() {
        if conserved.is_valid_for(&s.state) == coincident {
            return Err(Error::ValidityViolated { t: s.t });
        }
        drift = drift.max((conserved.value_of(&s.state) - conserved.kappa).abs() / norm);
    }
    Ok(drift)
}

fn state_difference<S: Ansatz>(a: &S, b: &S) -> Result<f64> {
    if a.u().len() != b.u().len() || a.v().len() != b.v().len() {
        return Err(Error::Shape(format!(
            "{}+{} vs {}+{} members",
            a.u().len(),
            a.v().len(),
            b.u().len(),
            b.v().len()
        )));
    }
    let pairs = |s: &S| {
        [
            s.u().amplitudes(),
            s.u().positions(),
            s.v().amplitudes(),
            s.v().positions(),
        ]
        .concat()
        .into_iter()
        .collect::<Vec<_>>()
    };
    Ok(pairs(a)
        .iter()
        .zip(pairs(b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Largest absolute difference in any amplitude or position between the
/// trajectory and an exact flow sampled at the trajectory's times.
pub fn compare_to_oracle<S: Ansatz>(trajectory: &Trajectory<S>, oracle: &impl ExactFlow<S>) -> Result<f64> {
    trajectory
        .samples()
        .iter()
        .map(|s| state_difference(&s.state, &oracle.state_at(s.t)))
        .try_fold(0.0f64, |acc, d| Ok(acc.max(d?)))
}

/// Largest difference between two trajectories on a common time grid.
pub fn compare_trajectories<S: Ansatz>(a: &Trajectory<S>, b: &Trajectory<S>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("{} vs {} samples", a.len(), b.len())));
    }
    let mut worst = 0.0f64;
    for (x, y) in a.samples().iter().zip(b.samples()) {
        if (x.t - y.t).abs() > 1e-12 * x.t.abs().max(1.0) {
            return Err(Error::Shape(format!("time grids differ: {} vs {}", x.t, y.t)));
        }
        worst = worst.max(state_difference(&x.state, &y.state)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::KinkState;
    use crate::closed_form::{coincident_peakon, stationary_kink, CoincidentBranch};
    use crate::dynamics::{integrate, IntegratorConfig};

    #[test]
    fn battery_is_deterministic_and_in_range() {
        let a = TestBattery::seeded(7, 20, -4.0, 5.0).unwrap();
        let b = TestBattery::seeded(7, 20, -4.0, 5.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, TestBattery::seeded(8, 20, -4.0, 5.0).unwrap());
        for f in &a.functions {
            assert!((-4.0..=5.0).contains(&f.center));
            assert!((0.25..=2.0).contains(&f.width));
        }
    }

    #[test]
    fn stationary_kink_has_no_residual() {
        let k = stationary_kink(2, 1.0, 2.0, 0.5).unwrap();
        let traj = k.sample(0.1, 1.0).unwrap();
        let cfg = VerifyConfig::default();
        let battery = TestBattery::for_trajectory(&traj, cfg.seed, cfg.battery_size).unwrap();
        let report = weak_residual(&traj, &battery, Equations::Both, &cfg).unwrap();
        assert_eq!(report.entries.len(), 40);
        assert!(report.max <= 1e-10, "{}", report.max);
        assert!(report.passed);
    }

    #[test]
    fn insufficient_samples() {
        let k = stationary_kink(1, 1.0, 1.0, 0.0).unwrap();
        let traj = k.sample(0.5, 1.5).unwrap();
        let battery = TestBattery::seeded(1, 3, -1.0, 1.0).unwrap();
        let err = weak_residual(&traj, &battery, Equations::U, &VerifyConfig::default()).unwrap_err();
        assert_eq!(err, Error::InsufficientSamples { needed: 5, got: 4 });
    }

    #[test]
    fn coincident_flow_weak_residual_is_small() {
        let flow = coincident_peakon(2, 1.0, 0.0, CoincidentBranch::Symmetric).unwrap();
        let traj = flow.sample(1e-3, 1.0).unwrap();
        let cfg = VerifyConfig::default();
        let battery = TestBattery::for_trajectory(&traj, cfg.seed, cfg.battery_size).unwrap();
        let report = weak_residual(&traj, &battery, Equations::Both, &cfg).unwrap();
        assert!(report.max <= 1e-6, "{}", report.max);
    }

    /// Same position path as the coincident flow but moving the wrong way.
    struct WrongWay;

    impl ExactFlow<PeakonState> for WrongWay {
        fn state_at(&self, t: f64) -> PeakonState {
            PeakonState::pair(2, 1.0, t, 1.0, t).unwrap()
        }
    }

    #[test]
    fn corrupted_flow_is_detected() {
        let traj = WrongWay.sample(1e-3, 1.0).unwrap();
        let cfg = VerifyConfig::default();
        let battery = TestBattery::for_trajectory(&traj, cfg.seed, cfg.battery_size).unwrap();
        let report = weak_residual(&traj, &battery, Equations::Both, &cfg).unwrap();
        assert!(report.max >= 0.1, "{}", report.max);
        assert!(!report.passed);
    }

    #[test]
    fn drift_of_constant_branch_is_exactly_zero() {
        let s = PeakonState::pair(2, 1.0, 0.0, 1.0, 0.0).unwrap();
        let traj = integrate(&s, &IntegratorConfig::rk4(1e-2, 1.0)).unwrap();
        assert_eq!(conservation_drift(&traj).unwrap(), 0.0);
    }

    #[test]
    fn drift_rejects_isolated_coincidence() {
        let samples = [(0.0, 1.0), (0.1, 0.0), (0.2, -1.0)]
            .iter()
            .map(|&(t, q)| crate::dynamics::Sample {
                t,
                state: PeakonState::pair(1, 1.0, q, 1.0, 0.0).unwrap(),
            })
            .collect();
        let traj = Trajectory::from_samples(samples, Default::default()).unwrap();
        assert_eq!(
            conservation_drift(&traj).unwrap_err(),
            Error::ValidityViolated { t: 0.1 }
        );
    }

    #[test]
    fn oracle_comparison_of_identical_trajectory_is_zero() {
        let k = stationary_kink(1, 1.0, 1.0, 2.0).unwrap();
        let traj = k.sample(0.1, 1.0).unwrap();
        assert_eq!(compare_to_oracle(&traj, &k).unwrap(), 0.0);
        assert_eq!(compare_trajectories(&traj, &traj).unwrap(), 0.0);
        let other = KinkState::new(
            1,
            Train::new(vec![1.0, 1.0], vec![0.0, 1.0]).unwrap(),
            Train::single(1.0, 0.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(compare_to_oracle(&traj, &other), Err(Error::Shape(_))));
    }
}
