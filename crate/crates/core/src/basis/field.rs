use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::{CompensatedSum, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub n: usize,
    pub l: usize,
    pub m: i64,
}

impl ModeIndex {
    pub fn new(n: usize, l: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > l {
            return domain(format!("mode ({n},{l},{m}) has |m| > l"));
        }
        Ok(Self { n, l, m })
    }

    /// Whether the mode spans the null space (`n + l ≤ 1`).
    pub fn is_null(&self) -> bool {
        self.n + self.l <= 1
    }

    /// Oscillator degree `2n + l`.
    pub fn degree(&self) -> usize {
        2 * self.n + self.l
    }

    /// Every mode with `n ≤ nmax`, `l ≤ lmax`, in index order.
    pub fn all_up_to(nmax: usize, lmax: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for n in 0..=nmax {
            for l in 0..=lmax {
                for m in -(l as i64)..=(l as i64) {
                    out.push(Self { n, l, m });
                }
            }
        }
        out
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.l, self.m)
    }
}

/// Finitely many amplitudes in the orthonormal eigenbasis; absent modes are zero.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpectralField<T> {
    coeffs: BTreeMap<ModeIndex, Complex<T>>,
    label: String,
}

/// One serialized amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRow {
    pub n: usize,
    pub l: usize,
    pub m: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldFile {
    label: String,
    rows: Vec<FieldRow>,
}

impl<T: Real> SpectralField<T> {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            label: label.into(),
        }
    }

    pub fn from_modes<I>(label: impl Into<String>, modes: I) -> Self
    where
        I: IntoIterator<Item = (ModeIndex, Complex<T>)>,
    {
        let mut f = Self::new(label);
        for (k, v) in modes {
            f.set(k, v);
        }
        f
    }

    /// Field with real amplitudes given as `(n, l, m, value)`.
    pub fn from_real(label: impl Into<String>, modes: &[(usize, usize, i64, T)]) -> Result<Self> {
        let mut f = Self::new(label);
        for &(n, l, m, v) in modes {
            f.set(ModeIndex::new(n, l, m)?, Complex::new(v, T::zero()));
        }
        Ok(f)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Sets an amplitude; a zero amplitude removes the mode.
    pub fn set(&mut self, mode: ModeIndex, value: Complex<T>) {
        if value == Complex::new(T::zero(), T::zero()) {
            self.coeffs.remove(&mode);
        } else {
            self.coeffs.insert(mode, value);
        }
    }

    pub fn get(&self, mode: &ModeIndex) -> Complex<T> {
        self.coeffs.get(mode).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeIndex, &Complex<T>)> {
        self.coeffs.iter()
    }

    pub fn modes(&self) -> impl Iterator<Item = &ModeIndex> {
        self.coeffs.keys()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Keeps the modes satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&ModeIndex) -> bool) -> Self {
        Self {
            coeffs: self.coeffs.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (*k, *v)).collect(),
            label: self.label.clone(),
        }
    }

    /// Multiplies each amplitude by `factor(mode)`.
    pub fn scale_modes(&self, mut factor: impl FnMut(&ModeIndex) -> T) -> Self {
        let mut out = Self::new(self.label.clone());
        for (k, v) in &self.coeffs {
            out.set(*k, *v * factor(k));
        }
        out
    }

    /// Mode-wise sum; the label of `self` is kept.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.set(*k, out.get(k) + *v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.set(*k, out.get(k) - *v);
        }
        out
    }

    /// `⟨self, other⟩ = Σ a_k conj(b_k)`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (k, a) in &self.coeffs {
            if let Some(b) = other.coeffs.get(k) {
                let p = *a * b.conj();
                re.add(p.re);
                im.add(p.im);
            }
        }
        Complex::new(re.value(), im.value())
    }

    /// `Σ w(mode) |c|²`, summed with compensation.
    pub fn weighted_sum_sq(&self, mut weight: impl FnMut(&ModeIndex) -> Result<T>) -> Result<T> {
        let mut acc = CompensatedSum::new();
        for (k, v) in &self.coeffs {
            acc.add(weight(k)? * v.norm_sqr());
        }
        Ok(acc.value())
    }

    /// Euclidean norm of the amplitudes, which is the `L²` norm of the function.
    pub fn l2_norm(&self) -> T {
        let mut acc = CompensatedSum::new();
        for v in self.coeffs.values() {
            acc.add(v.norm_sqr());
        }
        acc.value().sqrt()
    }

    /// Whether the represented function is real-valued.
    ///
    /// With `Y_l^{-m} = conj(Y_l^m)` and real radial factors this holds iff
    /// `c_{n,l,-m} = conj(c_{n,l,m})` for every mode, within `tol`.
    pub fn is_real(&self, tol: T) -> bool {
        self.coeffs.keys().chain(self.coeffs.keys()).all(|k| {
            let mirror = ModeIndex { m: -k.m, ..*k };
            (self.get(&mirror) - self.get(k).conj()).norm() <= tol
        })
    }

    pub fn to_rows(&self) -> Vec<FieldRow> {
        self.coeffs
            .iter()
            .map(|(k, v)| FieldRow {
                n: k.n,
                l: k.l,
                m: k.m,
                re: v.re.to_f64_lossy(),
                im: v.im.to_f64_lossy(),
            })
            .collect()
    }

    pub fn from_rows(label: impl Into<String>, rows: &[FieldRow]) -> Result<Self> {
        let mut f = Self::new(label);
        for r in rows {
            let k = ModeIndex::new(r.n, r.l, r.m)?;
            if f.coeffs.contains_key(&k) {
                return Err(Error::Parse(format!("mode {k} listed twice")));
            }
            f.set(k, Complex::new(T::lit(r.re), T::lit(r.im)));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&FieldFile {
            label: self.label.clone(),
            rows: self.to_rows(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FieldFile = serde_json::from_str(text)?;
        Self::from_rows(file.label, &file.rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullPart {
    /// The projection `P g` onto the five null modes.
    Null,
    /// The complement `(I - P) g`.
    Orthogonal,
}

/// Splits a field along the null space `{n + l ≤ 1}` of the linearized operator.
pub fn project_null<T: Real>(field: &SpectralField<T>, keep: NullPart) -> SpectralField<T> {
    match keep {
        NullPart::Null => field.filter(|k| k.is_null()),
        NullPart::Orthogonal => field.filter(|k| !k.is_null()),
    }
}
