//! Singular spectra of embedding matrices and their summary statistics.
//!
//! Singular values are obtained through the Gram route: the eigenvalues of
//! the d×d matrix XᵀX are the squared singular values of X. For embedding
//! matrices n ≫ d, so this is far cheaper than a full SVD of X.

use serde::{Deserialize, Serialize};

use crate::numfmt::f64_17;
use crate::{EmbeddingSpace, Error, Exec, Result};

/// Relative floor (times σ₁) at or below which a singular value counts as
/// zero for condition numbers and log-spectra.
pub const SINGULAR_FLOOR: f64 = 1e-12;

/// Relative slack applied before flooring e^H, absorbing round-off when e^H
/// sits on an integer (e.g. a uniform spectrum).
const ERANK_SLACK: f64 = 1e-10;

/// Descending singular values of one space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRecord", into = "SpectrumRecord")]
pub struct Spectrum {
    lang: String,
    sigma: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRecord {
    lang: String,
    d: usize,
    sigma: Vec<f64>,
}

impl TryFrom<SpectrumRecord> for Spectrum {
    type Error = Error;

    fn try_from(r: SpectrumRecord) -> Result<Self> {
        if r.d != r.sigma.len() {
            return Err(Error::invalid(format!(
                "spectrum declares d = {} but lists {} values",
                r.d,
                r.sigma.len()
            )));
        }
        Spectrum::new(r.lang, r.sigma)
    }
}

impl From<Spectrum> for SpectrumRecord {
    fn from(s: Spectrum) -> Self {
        SpectrumRecord {
            d: s.sigma.len(),
            lang: s.lang,
            sigma: s.sigma,
        }
    }
}

/// Per-space statistics derived from a spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumStats {
    /// Entropy of the normalized spectrum, in nats.
    pub entropy: f64,
    pub erank: usize,
    /// Count of σᵢ above the numerical rank tolerance.
    pub numerical_rank: usize,
    pub kappa: f64,
    pub kappa_ecn: f64,
}

impl Spectrum {
    /// Validates that `sigma` is nonempty, finite, nonnegative and sorted
    /// descending.
    pub fn new(lang: impl Into<String>, sigma: Vec<f64>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::invalid("empty spectrum"));
        }
        if let Some(v) = sigma.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(format!("singular value {v} is negative or non-finite")));
        }
        if sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("singular values must be sorted descending"));
        }
        Ok(Spectrum {
            lang: lang.into(),
            sigma,
        })
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn d(&self) -> usize {
        self.sigma.len()
    }

    pub fn max(&self) -> f64 {
        self.sigma[0]
    }

    fn total(&self) -> f64 {
        self.sigma.iter().sum()
    }

    /// σᵢ / Σⱼσⱼ.
    pub fn normalized(&self) -> Result<Vec<f64>> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::invalid(format!("all-zero spectrum for {:?}", self.lang)));
        }
        Ok(self.sigma.iter().map(|s| s / total).collect())
    }

    /// Shannon entropy (nats) of the normalized spectrum, with 0·ln 0 = 0.
    pub fn entropy(&self) -> Result<f64> {
        let h: f64 = self
            .normalized()?
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum();
        Ok(h.max(0.0))
    }

    /// ⌊e^H⌋ clamped to [1, d].
    pub fn effective_rank(&self) -> Result<usize> {
        let e = self.entropy()?.exp() * (1.0 + ERANK_SLACK);
        Ok((e.floor() as usize).clamp(1, self.d()))
    }

    /// Number of singular values ≥ `eps`.
    pub fn eps_numerical_rank(&self, eps: f64) -> Result<usize> {
        if !(eps > 0.0) {
            return Err(Error::invalid(format!("eps must be positive, got {eps}")));
        }
        Ok(self.sigma.iter().filter(|&&s| s >= eps).count())
    }

    /// Count of σᵢ > d·ε_mach·σ₁.
    pub fn numerical_rank(&self) -> usize {
        let tol = self.d() as f64 * f64::EPSILON * self.max();
        self.sigma.iter().filter(|&&s| s > tol).count()
    }

    /// Absolute floor for this spectrum: `SINGULAR_FLOOR · σ₁`.
    pub fn floor(&self) -> f64 {
        SINGULAR_FLOOR * self.max()
    }

    fn ratio_to(&self, index: usize) -> Result<f64> {
        if self.max() <= 0.0 {
            return Err(Error::invalid(format!("all-zero spectrum for {:?}", self.lang)));
        }
        let s = self.sigma[index];
        let floor = self.floor();
        if s <= floor {
            return Err(Error::Singular {
                index: index + 1,
                value: s,
                floor,
            });
        }
        Ok(self.max() / s)
    }

    /// κ = σ₁ / σ_d.
    pub fn condition_number(&self) -> Result<f64> {
        self.ratio_to(self.d() - 1)
    }

    /// κ_ecn = σ₁ / σ_erank.
    pub fn effective_condition_number(&self) -> Result<f64> {
        self.ratio_to(self.effective_rank()? - 1)
    }

    pub fn stats(&self) -> Result<SpectrumStats> {
        let stats = SpectrumStats {
            entropy: self.entropy()?,
            erank: self.effective_rank()?,
            numerical_rank: self.numerical_rank(),
            kappa: self.condition_number()?,
            kappa_ecn: self.effective_condition_number()?,
        };
        debug_assert!(
            1 <= stats.erank && stats.erank <= stats.numerical_rank && stats.numerical_rank <= self.d(),
            "rank chain violated: erank {} rank {} d {}",
            stats.erank,
            stats.numerical_rank,
            self.d()
        );
        Ok(stats)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectrum serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One-line CSV: `lang,d,sigma_1,...,sigma_d` with 17 significant digits.
    pub fn to_csv_line(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut rec = vec![self.lang.clone(), self.d().to_string()];
        rec.extend(self.sigma.iter().map(|&s| f64_17(s)));
        w.write_record(&rec).expect("in-memory write");
        let mut out = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
        out.pop();
        out
    }

    pub fn from_csv_line(line: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(line.as_bytes());
        let rec = r
            .records()
            .next()
            .ok_or_else(|| Error::invalid("empty spectrum line"))??;
        let bad = |m: &str| Error::invalid(format!("spectrum line: {m}"));
        let lang = rec.get(0).ok_or_else(|| bad("missing lang"))?.to_string();
        let d: usize = rec
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad d"))?;
        let sigma = rec
            .iter()
            .skip(2)
            .map(|s| s.parse::<f64>().map_err(|_| bad(&format!("bad value {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Spectrum::try_from(SpectrumRecord { lang, d, sigma })
    }
}

/// Singular values of the space's matrix, descending.
pub fn singular_values(space: &EmbeddingSpace) -> Result<Spectrum> {
    singular_values_with(space, Exec::default())
}

pub fn singular_values_with(space: &EmbeddingSpace, exec: Exec) -> Result<Spectrum> {
    if !space.is_mean_centered() {
        log::warn!("computing the spectrum of {:?}, which is not mean-centered", space.lang());
    }
    let g = crate::linalg::gram(space.matrix(), exec);
    let ev = crate::linalg::sym_eigenvalues_desc(g.as_ref())?;
    // Eigenvalues of XᵀX are only resolved to about d·ε·λ₁; anything below
    // that (including small negatives) is round-off and maps to σ = 0.
    let cutoff = ev.first().copied().unwrap_or(0.0).max(0.0) * space.d() as f64 * f64::EPSILON;
    let sigma = ev
        .into_iter()
        .map(|l| if l <= cutoff { 0.0 } else { l.sqrt() })
        .collect();
    Spectrum::new(space.lang(), sigma)
}
