use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicial::EndSpectra;
use crate::jet::Jet;
use crate::link_spectrum::LinkSpectrum;

/// Warp functions `w(t)` for metrics `dt² + w(t)² g_M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warp {
    /// `w = t` on `[1, ∞)`.
    ExactCone,
    /// `w = √(1 + t²)` on `R`; two ends.
    SmoothedNeck,
    /// `w = t (1 + amp · t² · ψ(t/t0))` on `[0, ∞)` with the bump
    /// `ψ(s) = exp(−1/(1 − s²))` for `|s| < 1`, zero beyond. Odd in `t`, `w'(0) = 1`.
    CappedCone { t0: f64, amp: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileTopology {
    ExactCone,
    OneEndedCap,
    TwoEndedNeck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcProfile {
    pub warp: Warp,
    /// Link spectra; the neck carries one entry per end (`t → −∞` first).
    pub ends: EndSpectra,
}

impl AcProfile {
    pub fn new(warp: Warp, ends: EndSpectra) -> Result<Self> {
        let want = match warp {
            Warp::SmoothedNeck => 2,
            _ => 1,
        };
        if ends.s() != want {
            return Err(Error::validation(
                "/ends",
                format!("profile needs {want} link spectra, got {}", ends.s()),
            ));
        }
        if want == 2 && ends.ends[0].pairs != ends.ends[1].pairs {
            return Err(Error::validation(
                "/ends/1",
                "a separated neck needs the same link on both ends",
            ));
        }
        if let Warp::CappedCone { t0, amp } = warp {
            if !(t0 > 0.0) || !(amp >= 0.0) || !t0.is_finite() || !amp.is_finite() {
                return Err(Error::Argument(format!(
                    "capped cone needs t0 > 0 and amp >= 0, got t0 = {t0}, amp = {amp}"
                )));
            }
        }
        let p = Self { warp, ends };
        p.check_asymptotics()?;
        Ok(p)
    }

    pub fn exact_cone(n: usize, link: LinkSpectrum) -> Result<Self> {
        Self::new(Warp::ExactCone, EndSpectra::new(n, vec![link])?)
    }

    pub fn smoothed_neck(n: usize, link: LinkSpectrum) -> Result<Self> {
        Self::new(Warp::SmoothedNeck, EndSpectra::new(n, vec![link.clone(), link])?)
    }

    pub fn capped_cone(n: usize, link: LinkSpectrum, t0: f64, amp: f64) -> Result<Self> {
        Self::new(Warp::CappedCone { t0, amp }, EndSpectra::new(n, vec![link])?)
    }

    pub fn n(&self) -> usize {
        self.ends.n
    }

    pub fn topology(&self) -> ProfileTopology {
        match self.warp {
            Warp::ExactCone => ProfileTopology::ExactCone,
            Warp::SmoothedNeck => ProfileTopology::TwoEndedNeck,
            Warp::CappedCone { .. } => ProfileTopology::OneEndedCap,
        }
    }

    /// Left end of the parameter domain (`−∞` for the neck).
    pub fn t_min(&self) -> f64 {
        match self.warp {
            Warp::ExactCone => 1.0,
            Warp::SmoothedNeck => f64::NEG_INFINITY,
            Warp::CappedCone { .. } => 0.0,
        }
    }

    /// `w(t)` with exact first and second derivatives in slot 0.
    pub fn w_jet(&self, t: f64) -> Jet {
        let tj = Jet::var(t, 0);
        match self.warp {
            Warp::ExactCone => tj,
            Warp::SmoothedNeck => (tj * tj + 1.0).sqrt(),
            Warp::CappedCone { t0, amp } => {
                let s = t / t0;
                if s.abs() >= 1.0 || amp == 0.0 {
                    tj
                } else {
                    let sj = tj * (1.0 / t0);
                    let psi = ((sj * sj).scale(-1.0) + 1.0).recip().scale(-1.0).exp();
                    tj * (tj * tj * psi * amp + 1.0)
                }
            }
        }
    }

    pub fn w(&self, t: f64) -> f64 {
        self.w_jet(t).v
    }

    /// `(w, w', w'')`
    pub fn w_derivs(&self, t: f64) -> (f64, f64, f64) {
        let j = self.w_jet(t);
        (j.v, j.g[0], j.h[0][0])
    }

    /// Positivity and `w/|t| → 1`, checked on samples.
    pub fn check_asymptotics(&self) -> Result<()> {
        let lo = match self.warp {
            Warp::SmoothedNeck => -1e6,
            _ => self.t_min(),
        };
        for i in 1..=400 {
            let s = i as f64 / 400.0;
            let t = if lo < 0.0 { lo * (1.0 - 2.0 * s) } else { lo + (1e6 - lo) * s * s };
            if !(self.w(t) > 0.0) {
                return Err(Error::Internal(format!("warp is not positive at t = {t}")));
            }
        }
        for t in [1e5, 1e6] {
            for sgn in [1.0, -1.0] {
                let tt = sgn * t;
                if tt < self.t_min() {
                    continue;
                }
                if (self.w(tt) / tt.abs() - 1.0).abs() > 1e-4 {
                    return Err(Error::Internal(format!("warp is not asymptotically conical at t = {tt}")));
                }
            }
        }
        Ok(())
    }
}
