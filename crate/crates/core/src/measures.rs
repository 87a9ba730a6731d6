//! Compactly supported spectral measures represented as finite atom lists.
//!
//! Every limiting eigenvalue law that enters a solver (factor spectra,
//! channel marginals, power laws) is a [`SpectralMeasure`]. Continuous laws
//! are brought in through quantile-midpoint discretization
//! ([`SpectralMeasure::discretize`]), which keeps every expectation an exact
//! finite sum. Joint laws of several channel gains live in
//! [`JointChannelMeasure`].

use std::cmp::Ordering;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Relative tolerance under which two atom locations are merged.
const MERGE_REL_TOL: f64 = 1e-12;

/// Largest accepted deviation of user-supplied weights from a unit total;
/// anything within it is renormalized.
const WEIGHT_SUM_SLACK: f64 = 1e-6;

/// Upper quantile at which the exponential family is truncated.
const EXPONENTIAL_TRUNCATION: f64 = 1e-8;

/// Default cap on the number of atoms of a tensor-product joint measure.
pub const DEFAULT_JOINT_CAP: usize = 1_000_000;

/// A probability measure with finitely many atoms on the real line.
///
/// Locations are strictly increasing, weights positive and summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure<T: Real = f64> {
    locations: Vec<T>,
    weights: Vec<T>,
    support_bound: T,
}

/// Named continuous or two-point families that can be discretized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family<T: Real = f64> {
    /// Exponential law with the given mean.
    Exponential { mean: T },
    /// Uniform law on `[a, b]`.
    Uniform { a: T, b: T },
    /// Wigner semicircle centred at zero with the given variance.
    Semicircle { variance: T },
    /// `hi` with probability `p`, `lo` otherwise.
    Bernoulli { p: T, lo: T, hi: T },
}

fn same_location<T: Real>(a: T, b: T) -> bool {
    a == b || (a - b).abs() <= T::lit(MERGE_REL_TOL) * a.abs().max(b.abs())
}

impl<T: Real> SpectralMeasure<T> {
    /// Builds a measure from `(location, weight)` pairs.
    ///
    /// Weights must be positive and sum to one up to `1e-6`; the total is
    /// renormalized exactly. Coincident locations are merged.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, T)>,
    {
        let mut atoms: Vec<(T, T)> = atoms.into_iter().collect();
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for &(x, w) in &atoms {
            if !x.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite location {x}")));
            }
            if !(w.is_finite() && w > T::zero()) {
                return Err(Error::InvalidMeasure(format!("weight {w} at {x} is not positive")));
            }
        }
        let total: T = atoms.iter().map(|a| a.1).sum();
        if (total - T::one()).abs() > T::lit(WEIGHT_SUM_SLACK) {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

        let mut locations: Vec<T> = Vec::with_capacity(atoms.len());
        let mut weights: Vec<T> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match locations.last() {
                Some(&last) if same_location(last, x) => *weights.last_mut().unwrap() += w,
                _ => {
                    locations.push(x);
                    weights.push(w);
                }
            }
        }
        let total: T = weights.iter().copied().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let support_bound = locations.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        Ok(Self { locations, weights, support_bound })
    }

    pub fn point_mass(a: T) -> Result<Self> {
        Self::from_atoms([(a, T::one())])
    }

    /// Empirical distribution of `values`: one atom per distinct value with
    /// weight equal to its relative multiplicity.
    pub fn from_samples(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidMeasure("empty sample".into()));
        }
        let w = T::one() / T::from_usize(values.len()).unwrap();
        Self::from_atoms(values.iter().map(|&x| (x, w)))
    }

    /// Discretizes a named family onto `atom_count` equal-weight atoms at the
    /// quantile midpoints `q((k - 1/2) / M)`.
    ///
    /// The exponential law is first truncated at its `1 - 1e-8` quantile.
    /// Bernoulli laws are represented exactly and ignore `atom_count`.
    pub fn discretize(family: &Family<T>, atom_count: usize) -> Result<Self> {
        family.validate()?;
        if atom_count == 0 {
            return Err(Error::InvalidMeasure("atom_count must be positive".into()));
        }
        if let Family::Bernoulli { p, lo, hi } = *family {
            let mut atoms = Vec::with_capacity(2);
            if p < T::one() {
                atoms.push((lo, T::one() - p));
            }
            if p > T::zero() {
                atoms.push((hi, p));
            }
            return Self::from_atoms(atoms);
        }
        let m = T::from_usize(atom_count).unwrap();
        let w = T::one() / m;
        let atoms = (1..=atom_count).map(|k| {
            let u = (T::from_usize(k).unwrap() - T::lit(0.5)) / m;
            (family.quantile(u), w)
        });
        Self::from_atoms(atoms)
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[T] {
        &self.locations
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.locations.iter().copied().zip(self.weights.iter().copied())
    }

    /// `max |location|`.
    pub fn support_bound(&self) -> T {
        self.support_bound
    }

    pub fn min_location(&self) -> T {
        self.locations[0]
    }

    pub fn max_location(&self) -> T {
        *self.locations.last().unwrap()
    }

    pub fn mean(&self) -> T {
        self.atoms().map(|(x, w)| w * x).sum()
    }

    pub fn second_moment(&self) -> T {
        self.atoms().map(|(x, w)| w * x * x).sum()
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: T) -> T {
        let end = self.locations.partition_point(|&l| l <= x);
        self.weights[..end].iter().copied().sum()
    }

    /// True when every atom sits at zero.
    pub fn is_degenerate(&self) -> bool {
        self.locations.iter().all(|&x| x == T::zero())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.min_location() >= T::zero()
    }

    /// `E[f(X)]` for a complex-valued `f`.
    #[inline]
    pub fn expect(&self, mut f: impl FnMut(T) -> C<T>) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for (x, w) in self.atoms() {
            acc += f(x) * w;
        }
        acc
    }

    /// Law of `X + c`.
    pub fn shifted(&self, c: T) -> Result<Self> {
        Self::from_atoms(self.atoms().map(|(x, w)| (x + c, w)))
    }

    /// Law of `c X`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::from_atoms(self.atoms().map(|(x, w)| (c * x, w)))
    }

    /// Converts to another precision.
    pub fn cast<U: Real>(&self) -> Result<SpectralMeasure<U>> {
        SpectralMeasure::from_atoms(self.atoms().map(|(x, w)| (U::lit(x.as_f64()), U::lit(w.as_f64()))))
    }
}

impl<T: Real> Family<T> {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMeasure(msg));
        match *self {
            Family::Exponential { mean } if !(mean.is_finite() && mean > T::zero()) => {
                bad(format!("exponential mean {mean} must be positive"))
            }
            Family::Uniform { a, b } if !(a.is_finite() && b.is_finite() && a < b) => {
                bad(format!("uniform bounds [{a}, {b}] must satisfy a < b"))
            }
            Family::Semicircle { variance } if !(variance.is_finite() && variance > T::zero()) => {
                bad(format!("semicircle variance {variance} must be positive"))
            }
            Family::Bernoulli { p, lo, hi }
                if !(p >= T::zero() && p <= T::one() && lo.is_finite() && hi.is_finite()) =>
            {
                bad(format!("bernoulli({p}, {lo}, {hi}) needs p in [0, 1] and finite outcomes"))
            }
            _ => Ok(()),
        }
    }

    /// Quantile function (of the truncated law for the exponential family).
    pub fn quantile(&self, u: T) -> T {
        match *self {
            Family::Exponential { mean } => {
                let keep = T::one() - T::lit(EXPONENTIAL_TRUNCATION);
                -mean * (-(u * keep)).ln_1p()
            }
            Family::Uniform { a, b } => a + (b - a) * u,
            Family::Semicircle { variance } => semicircle_quantile(variance, u),
            Family::Bernoulli { p, lo, hi } => {
                if u <= T::one() - p {
                    lo
                } else {
                    hi
                }
            }
        }
    }

    /// Mean of the (untruncated) law.
    pub fn mean(&self) -> T {
        match *self {
            Family::Exponential { mean } => mean,
            Family::Uniform { a, b } => (a + b) / T::lit(2.0),
            Family::Semicircle { .. } => T::zero(),
            Family::Bernoulli { p, lo, hi } => lo + p * (hi - lo),
        }
    }
}

/// CDF of the centred semicircle law with radius `r`.
pub(crate) fn semicircle_cdf<T: Real>(r: T, x: T) -> T {
    if x <= -r {
        return T::zero();
    }
    if x >= r {
        return T::one();
    }
    let half = T::lit(0.5);
    half + x * (r * r - x * x).sqrt() / (T::PI() * r * r) + (x / r).asin() / T::PI()
}

fn semicircle_quantile<T: Real>(variance: T, u: T) -> T {
    let r = T::lit(2.0) * variance.sqrt();
    let (mut lo, mut hi) = (-r, r);
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if semicircle_cdf(r, mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    T::lit(0.5) * (lo + hi)
}

/// Joint law of the nonnegative channel gains `(h_1, ..., h_J)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointChannelMeasure<T: Real = f64> {
    dimension: usize,
    /// Row-major `atoms x dimension`.
    points: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> JointChannelMeasure<T> {
    pub fn from_atoms<I>(dimension: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<T>, T)>,
    {
        if dimension == 0 {
            return Err(Error::InvalidMeasure("joint measure dimension must be positive".into()));
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (h, w) in atoms {
            if h.len() != dimension {
                return Err(Error::InvalidMeasure(format!(
                    "joint atom has {} coordinates, expected {dimension}",
                    h.len()
                )));
            }
            if h.iter().any(|&x| !(x.is_finite() && x >= T::zero())) {
                return Err(Error::InvalidMeasure("joint atom coordinates must be finite and >= 0".into()));
            }
            if !(w.is_finite() && w > T::zero()) {
                return Err(Error::InvalidMeasure(format!("joint weight {w} is not positive")));
            }
            points.extend_from_slice(&h);
            weights.push(w);
        }
        if weights.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(WEIGHT_SUM_SLACK) {
            return Err(Error::InvalidMeasure(format!("joint weights sum to {total}, not 1")));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { dimension, points, weights })
    }

    /// A single joint atom carrying all the mass.
    pub fn point_mass(h: &[T]) -> Result<Self> {
        Self::from_atoms(h.len(), [(h.to_vec(), T::one())])
    }

    /// Tensor product of independent marginals, with the default atom cap.
    pub fn independent(marginals: &[SpectralMeasure<T>]) -> Result<Self> {
        Self::independent_capped(marginals, DEFAULT_JOINT_CAP)
    }

    /// Tensor product of independent marginals: atoms are all tuples of
    /// marginal atoms, weighted by the product of marginal weights.
    pub fn independent_capped(marginals: &[SpectralMeasure<T>], cap: usize) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::InvalidMeasure("no marginals".into()));
        }
        if let Some(m) = marginals.iter().find(|m| !m.is_nonnegative()) {
            return Err(Error::InvalidMeasure(format!("channel marginal has negative atom {}", m.min_location())));
        }
        let count = marginals.iter().map(|m| m.len() as u128).product::<u128>();
        if count > cap as u128 {
            return Err(Error::MeasureTooLarge { atoms: count, cap });
        }
        let dimension = marginals.len();
        let count = count as usize;
        let mut points = Vec::with_capacity(count * dimension);
        let mut weights = Vec::with_capacity(count);
        let mut index = vec![0usize; dimension];
        for _ in 0..count {
            let mut w = T::one();
            for (m, &k) in marginals.iter().zip(&index) {
                points.push(m.locations[k]);
                w *= m.weights[k];
            }
            weights.push(w);
            // odometer, last coordinate fastest
            for d in (0..dimension).rev() {
                index[d] += 1;
                if index[d] < marginals[d].len() {
                    break;
                }
                index[d] = 0;
            }
        }
        Ok(Self { dimension, points, weights })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Coordinates of atom `k`.
    pub fn point(&self, k: usize) -> &[T] {
        &self.points[k * self.dimension..(k + 1) * self.dimension]
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        self.points.chunks_exact(self.dimension).zip(self.weights.iter().copied())
    }

    /// Law of coordinate `j`.
    pub fn marginal(&self, j: usize) -> Result<SpectralMeasure<T>> {
        if j >= self.dimension {
            return Err(Error::InvalidMeasure(format!("coordinate {j} out of range")));
        }
        SpectralMeasure::from_atoms(self.atoms().map(|(h, w)| (h[j], w)))
    }

    /// `E[h_j]`.
    pub fn marginal_mean(&self, j: usize) -> T {
        self.atoms().map(|(h, w)| w * h[j]).sum()
    }

    /// `max h_j` over atoms.
    pub fn marginal_max(&self, j: usize) -> T {
        self.atoms().fold(T::zero(), |m, (h, _)| m.max(h[j]))
    }

    pub fn cast<U: Real>(&self) -> Result<JointChannelMeasure<U>> {
        JointChannelMeasure::from_atoms(
            self.dimension,
            self.atoms().map(|(h, w)| (h.iter().map(|x| U::lit(x.as_f64())).collect(), U::lit(w.as_f64()))),
        )
    }
}

/// JSON form of a [`SpectralMeasure`]: either explicit atoms or a named
/// family to discretize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpec {
    Atoms { atoms: Vec<(f64, f64)> },
    Family(FamilySpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Exponential { mean: f64, atom_count: usize },
    Uniform { a: f64, b: f64, atom_count: usize },
    Semicircle { variance: f64, atom_count: usize },
    Bernoulli { p: f64, lo: f64, hi: f64 },
    PointMass { value: f64 },
}

impl MeasureSpec {
    pub fn build<T: Real>(&self) -> Result<SpectralMeasure<T>> {
        match self {
            MeasureSpec::Atoms { atoms } => {
                SpectralMeasure::from_atoms(atoms.iter().map(|&(x, w)| (T::lit(x), T::lit(w))))
            }
            MeasureSpec::Family(f) => f.build(),
        }
    }
}

impl FamilySpec {
    pub fn build<T: Real>(&self) -> Result<SpectralMeasure<T>> {
        let t = T::lit;
        match *self {
            FamilySpec::Exponential { mean, atom_count } => {
                SpectralMeasure::discretize(&Family::Exponential { mean: t(mean) }, atom_count)
            }
            FamilySpec::Uniform { a, b, atom_count } => {
                SpectralMeasure::discretize(&Family::Uniform { a: t(a), b: t(b) }, atom_count)
            }
            FamilySpec::Semicircle { variance, atom_count } => {
                SpectralMeasure::discretize(&Family::Semicircle { variance: t(variance) }, atom_count)
            }
            FamilySpec::Bernoulli { p, lo, hi } => {
                SpectralMeasure::discretize(&Family::Bernoulli { p: t(p), lo: t(lo), hi: t(hi) }, 2)
            }
            FamilySpec::PointMass { value } => SpectralMeasure::point_mass(t(value)),
        }
    }
}

impl<T: Real> From<&SpectralMeasure<T>> for MeasureSpec {
    fn from(m: &SpectralMeasure<T>) -> Self {
        MeasureSpec::Atoms { atoms: m.atoms().map(|(x, w)| (x.as_f64(), w.as_f64())).collect() }
    }
}

impl<T: Real> Serialize for SpectralMeasure<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureSpec::from(self).serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for SpectralMeasure<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = MeasureSpec::deserialize(deserializer)?;
        spec.build().map_err(serde::de::Error::custom)
    }
}

/// JSON form of a [`JointChannelMeasure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JointChannelSpec {
    Independent { independent: Vec<MeasureSpec> },
    Atoms { atoms: Vec<(Vec<f64>, f64)> },
}

impl JointChannelSpec {
    pub fn build<T: Real>(&self) -> Result<JointChannelMeasure<T>> {
        match self {
            JointChannelSpec::Independent { independent } => {
                let marginals = independent.iter().map(MeasureSpec::build).collect::<Result<Vec<_>>>()?;
                JointChannelMeasure::independent(&marginals)
            }
            JointChannelSpec::Atoms { atoms } => {
                let dim = atoms.first().map_or(0, |a| a.0.len());
                JointChannelMeasure::from_atoms(
                    dim,
                    atoms.iter().map(|(h, w)| (h.iter().map(|&x| T::lit(x)).collect(), T::lit(*w))),
                )
            }
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            JointChannelSpec::Independent { independent } => independent.len(),
            JointChannelSpec::Atoms { atoms } => atoms.first().map_or(0, |a| a.0.len()),
        }
    }
}
