//! Composite Gauss-Legendre quadrature with mandatory breakpoints.
//!
//! Integrands handled here are smooth between a known set of breakpoints
//! (kink centres), so every sub-interval is covered by a fixed number of
//! equal panels of a fixed-order rule. The panel count does not depend on
//! where the breakpoints sit, which keeps the result smooth as they move.

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    /// Nodes per panel.
    pub order: usize,
    /// Panels per smooth sub-interval (the refinement check doubles this).
    pub panels: usize,
    /// Relative tolerance between the two refinement levels.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            order: 20,
            panels: 4,
            tolerance: 1e-8,
        }
    }
}

/// A ready-to-use panel rule built from a [`QuadratureConfig`].
#[derive(Debug, Clone)]
pub struct PanelQuadrature {
    config: QuadratureConfig,
    rule: GaussLegendre,
}

impl PanelQuadrature {
    pub fn new(config: QuadratureConfig) -> Result<Self> {
        if config.panels == 0 {
            return Err(Error::ConfigInvalid("quadrature panels must be >= 1".into()));
        }
        if !(config.tolerance > 0.0) {
            return Err(Error::ConfigInvalid("quadrature tolerance must be > 0".into()));
        }
        let rule = GaussLegendre::new(config.order).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        Ok(Self { config, rule })
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    /// Integrate `f` over `[a, b]` with `panels` equal panels.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        if b <= a {
            return 0.0;
        }
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                let hi = if k + 1 == panels {
                    b
                } else {
                    a + h * (k + 1) as f64
                };
                self.rule.integrate(lo, hi, &mut f)
            })
            .sum()
    }

    /// Integrate over `[a, b]`, splitting at every breakpoint strictly inside,
    /// at the configured panel count.
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, breaks: &[f64], f: F) -> f64 {
        self.integrate_level(a, b, breaks, self.config.panels, f)
    }

    fn integrate_level<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        breaks: &[f64],
        panels: usize,
        mut f: F,
    ) -> f64 {
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        let mut lo = a;
        for &c in cuts.iter().chain(std::iter::once(&b)) {
            total += self.integrate_panels(lo, c, panels, &mut f);
            lo = c;
        }
        total
    }

    /// Integrate at two refinement levels and return the finer estimate.
    ///
    /// `scale` sets the magnitude the tolerance is relative to; pass a bound
    /// on `∫|f|` so that integrals near zero are judged absolutely.
    pub fn integrate_checked<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        breaks: &[f64],
        scale: f64,
        mut f: F,
    ) -> Result<f64> {
        let coarse = self.integrate_level(a, b, breaks, self.config.panels, &mut f);
        let fine = self.integrate_level(a, b, breaks, 2 * self.config.panels, &mut f);
        let tolerance = self.config.tolerance * scale.abs().max(fine.abs()).max(f64::MIN_POSITIVE);
        if (coarse - fine).abs() > tolerance {
            return Err(Error::QuadratureNonconvergence {
                coarse,
                fine,
                tolerance,
            });
        }
        Ok(fine)
    }
}
