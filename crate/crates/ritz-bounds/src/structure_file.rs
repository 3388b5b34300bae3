//! The on-disk structure format consumed by the CLI's one-shot `bound` mode.
//!
//! A structure file carries exactly the information available after an
//! extraction, without any matrices: the approximate values, the per-index
//! residual norms, and optionally the tail spectrum and the block spectral
//! norms. JSON, self-describing:
//!
//! ```json
//! {
//!   "kind": "symmetric",
//!   "theta": [1.0, 2.0],
//!   "residual_norms_e": [0.01, 0.02],
//!   "tail_spectrum": [4.0]
//! }
//! ```
//!
//! `kind` is `"symmetric"` or `"svd"`. For `"svd"`, `residual_norms_f` is
//! required and `theta` is descending; for `"symmetric"`, `theta` is
//! ascending. `tail_spectrum` (any order) enables exact gap mode. The
//! optional `norm_e` / `norm_f` fields carry the spectral norms of the full
//! residual blocks; when absent, the norm-wise comparison bounds fall back to
//! the Frobenius norm of the column norms (a valid upper bound, so every
//! reported bound stays a bound).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    bound_asymptotic_symmetric, bound_asymptotic_svd, bound_lili_with_norm,
    bound_offdiag_with_norm, bound_thm_cluster, bound_thm_main, bound_thm_svd, bound_weyl,
    detect_clusters, gaps_svd, gaps_symmetric, match_and_report, BoundReport, BoundTable, GapMode,
    ReportInputs,
};
use crate::extraction::{SvdPerturbation, SymmetricPerturbation, Tail};
use crate::linalg::{Matrix, Spectrum, SpectrumOrder};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    Symmetric,
    Svd,
}

/// The "available information" of an extraction, serializable as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub kind: StructureKind,
    pub theta: Vec<f64>,
    pub residual_norms_e: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_norms_f: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_spectrum: Option<Vec<f64>>,
    /// Spectral norm of the full E block, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_e: Option<f64>,
    /// Spectral norm of the full F block, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_f: Option<f64>,
}

impl StructureFile {
    /// Captures the available information of a symmetric extraction.
    pub fn from_symmetric(p: &SymmetricPerturbation) -> Self {
        let tail_spectrum = p.tail_spectrum().ok().map(|(s, _)| s.values().to_vec());
        StructureFile {
            kind: StructureKind::Symmetric,
            theta: p.theta().to_vec(),
            residual_norms_e: p.residual_norms(),
            residual_norms_f: None,
            tail_spectrum,
            norm_e: Some(p.residual_norm_full()),
            norm_f: None,
        }
    }

    /// Captures the available information of a singular-value extraction.
    pub fn from_svd(p: &SvdPerturbation) -> Self {
        let tail_spectrum = p.tail_spectrum().ok().map(|(s, _)| s.values().to_vec());
        StructureFile {
            kind: StructureKind::Svd,
            theta: p.theta().to_vec(),
            residual_norms_e: p.residual_norms_e(),
            residual_norms_f: Some(p.residual_norms_f()),
            tail_spectrum,
            norm_e: Some(p.norm_e()),
            norm_f: Some(p.norm_f()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.theta.len();
        if k == 0 {
            return Err(Error::Structure("theta is empty".into()));
        }
        let finite = |name: &str, v: &[f64]| -> Result<()> {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Structure(format!("{name} has a non-finite entry")));
            }
            Ok(())
        };
        finite("theta", &self.theta)?;
        finite("residual_norms_e", &self.residual_norms_e)?;
        if self.residual_norms_e.len() != k {
            return Err(Error::Structure(format!(
                "residual_norms_e has {} entries for {k} theta values",
                self.residual_norms_e.len()
            )));
        }
        if self.residual_norms_e.iter().any(|&x| x < 0.0) {
            return Err(Error::Structure("residual norms must be nonnegative".into()));
        }
        match self.kind {
            StructureKind::Symmetric => {
                if !self.theta.windows(2).all(|w| w[0] <= w[1]) {
                    return Err(Error::Structure(
                        "symmetric structures list theta in ascending order".into(),
                    ));
                }
                if self.residual_norms_f.is_some() {
                    return Err(Error::Structure(
                        "residual_norms_f is only meaningful for kind = svd".into(),
                    ));
                }
            }
            StructureKind::Svd => {
                if !self.theta.windows(2).all(|w| w[0] >= w[1]) {
                    return Err(Error::Structure(
                        "svd structures list theta in descending order".into(),
                    ));
                }
                let f = self
                    .residual_norms_f
                    .as_ref()
                    .ok_or_else(|| Error::Structure("kind = svd requires residual_norms_f".into()))?;
                finite("residual_norms_f", f)?;
                if f.len() != k {
                    return Err(Error::Structure(format!(
                        "residual_norms_f has {} entries for {k} theta values",
                        f.len()
                    )));
                }
                if f.iter().any(|&x| x < 0.0) {
                    return Err(Error::Structure("residual norms must be nonnegative".into()));
                }
            }
        }
        if let Some(tail) = &self.tail_spectrum {
            finite("tail_spectrum", tail)?;
        }
        for (name, norm) in [("norm_e", self.norm_e), ("norm_f", self.norm_f)] {
            if let Some(v) = norm {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Structure(format!("{name} must be finite and >= 0")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("structure files always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: StructureFile =
            serde_json::from_str(text).map_err(|e| Error::Structure(e.to_string()))?;
        parsed.validate()?;
        Ok(parsed)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|source| Error::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn has_tail(&self) -> bool {
        self.tail_spectrum.is_some()
    }

    /// Frobenius norm of the listed column norms: the fallback upper bound
    /// for the block spectral norm.
    fn frobenius(norms: &[f64]) -> f64 {
        norms.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Evaluates every bound computable from the stored information and
    /// returns one report per index.
    ///
    /// Exact gap mode requires `tail_spectrum`. The classical bound is never
    /// available (it needs the full spectrum of the original matrix), and the
    /// norm-wise bounds use `norm_e` / `norm_f` when present, else the
    /// Frobenius fallback.
    pub fn evaluate(&self, mode: GapMode) -> Result<Vec<BoundReport>> {
        self.validate()?;
        if mode == GapMode::Exact && !self.has_tail() {
            return Err(Error::TailRequired);
        }
        let k = self.theta.len();
        match self.kind {
            StructureKind::Symmetric => {
                // Norms-only representation: a single-row block whose column
                // norms are the given residual norms.
                let mut e = Matrix::zeros(1, k);
                for (j, v) in self.residual_norms_e.iter().enumerate() {
                    e[(0, j)] = *v;
                }
                let tail = match &self.tail_spectrum {
                    Some(t) => Some(Tail::Spectrum(Spectrum::from_unsorted(
                        t.clone(),
                        SpectrumOrder::Ascending,
                    )?)),
                    None => None,
                };
                let p = SymmetricPerturbation::new(self.theta.clone(), e, tail, None)?;
                let g = gaps_symmetric(&p, mode)?;
                let e_norm = self.norm_e.unwrap_or_else(|| Self::frobenius(&self.residual_norms_e));
                let clusters = detect_clusters(&self.theta, None);
                let table = BoundTable {
                    thm_main: Some(bound_thm_main(&p, &g)),
                    thm_cluster: Some(bound_thm_cluster(&p, &clusters, &g)?),
                    weyl: Some(bound_weyl(&self.residual_norms_e, None)),
                    lili: Some(bound_lili_with_norm(e_norm, &g)),
                    asymptotic: Some(bound_asymptotic_symmetric(&p, &g)),
                    ..Default::default()
                };
                let scale = scale_estimate(&self.theta, self.tail_spectrum.as_deref());
                match_and_report(
                    ReportInputs {
                        theta: &self.theta,
                        residual_e: self.residual_norms_e.clone(),
                        residual_f: None,
                        gap_mode: mode,
                        tail_approximate: false,
                        square_augmented: false,
                    },
                    None,
                    scale,
                    table,
                )
            }
            StructureKind::Svd => {
                let f_norms = self.residual_norms_f.clone().unwrap();
                let mut e = Matrix::zeros(1, k);
                let mut f = Matrix::zeros(1, k);
                for j in 0..k {
                    e[(0, j)] = self.residual_norms_e[j];
                    f[(0, j)] = f_norms[j];
                }
                let tail = match &self.tail_spectrum {
                    Some(t) => Some(Tail::Spectrum(Spectrum::from_unsorted(
                        t.clone(),
                        SpectrumOrder::Descending,
                    )?)),
                    None => None,
                };
                let p = SvdPerturbation::new(
                    self.theta.clone(),
                    e,
                    f,
                    tail,
                    None,
                    None,
                    false,
                )?;
                let g = gaps_svd(&p, mode)?;
                let e_norm = self.norm_e.unwrap_or_else(|| Self::frobenius(&self.residual_norms_e));
                let f_norm = self.norm_f.unwrap_or_else(|| Self::frobenius(&f_norms));
                let m = e_norm.max(f_norm);
                let table = BoundTable {
                    thm_svd: Some(bound_thm_svd(&p, &g)),
                    weyl: Some(bound_weyl(&self.residual_norms_e, Some(&f_norms))),
                    lili: Some(bound_lili_with_norm(m, &g)),
                    offdiag_quadratic: Some(bound_offdiag_with_norm(m, &g)),
                    asymptotic: Some(bound_asymptotic_svd(&p, &g)),
                    ..Default::default()
                };
                let scale = scale_estimate(&self.theta, self.tail_spectrum.as_deref());
                match_and_report(
                    ReportInputs {
                        theta: &self.theta,
                        residual_e: self.residual_norms_e.clone(),
                        residual_f: Some(f_norms),
                        gap_mode: mode,
                        tail_approximate: false,
                        square_augmented: false,
                    },
                    None,
                    scale,
                    table,
                )
            }
        }
    }
}

fn scale_estimate(theta: &[f64], tail: Option<&[f64]>) -> f64 {
    let t = theta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tl = tail
        .map(|t| t.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .unwrap_or(0.0);
    t.max(tl)
}
