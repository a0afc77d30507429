//! Exact polynomial scalar fields over named chart coordinates.
//!
//! A [`ScalarField`] is a multivariate polynomial with arbitrary-precision
//! rational coefficients, stored canonically: exponent vectors ordered
//! lexicographically by coordinate index, no zero coefficients, fully reduced
//! rationals. Equality of polynomials is therefore structural equality.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational scalar.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoordKind {
    Base,
    Fiber,
}

/// A named chart coordinate. Its index is its position in the chart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coordinate {
    pub name: String,
    pub kind: CoordKind,
}

impl Coordinate {
    pub fn base(name: &str) -> Self {
        Coordinate { name: name.to_string(), kind: CoordKind::Base }
    }

    pub fn fiber(name: &str) -> Self {
        Coordinate { name: name.to_string(), kind: CoordKind::Fiber }
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct ChartInner {
    coords: Vec<Coordinate>,
    n_base: usize,
}

/// An ordered coordinate system. Base coordinates precede fiber coordinates;
/// fiber coordinates, when present, are exactly `(w1, w2)`.
///
/// Cloning is cheap; equality compares coordinate lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart(Arc<ChartInner>);

impl Chart {
    /// Chart of a base manifold (or any plain manifold): base coordinates only.
    pub fn base(names: &[&str]) -> Self {
        let coords: Vec<Coordinate> = names.iter().map(|n| Coordinate::base(n)).collect();
        assert_unique(&coords);
        let n = coords.len();
        Chart(Arc::new(ChartInner { coords, n_base: n }))
    }

    /// Total-space chart: the given base coordinates followed by `(w1, w2)`.
    pub fn total(base_names: &[&str]) -> Self {
        let mut coords: Vec<Coordinate> =
            base_names.iter().map(|n| Coordinate::base(n)).collect();
        coords.push(Coordinate::fiber("w1"));
        coords.push(Coordinate::fiber("w2"));
        assert_unique(&coords);
        let n = base_names.len();
        Chart(Arc::new(ChartInner { coords, n_base: n }))
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    /// Number of base coordinates.
    pub fn n_base(&self) -> usize {
        self.0.n_base
    }

    pub fn has_fiber(&self) -> bool {
        self.0.n_base < self.dim()
    }

    pub fn coord(&self, i: usize) -> &Coordinate {
        &self.0.coords[i]
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.0.coords
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.coords.iter().position(|c| c.name == name)
    }

    pub fn describe(&self) -> String {
        let names: Vec<&str> = self.0.coords.iter().map(|c| c.name.as_str()).collect();
        format!("({})", names.join(","))
    }

    pub fn same(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch(format!(
                "{} vs {}",
                self.describe(),
                other.describe()
            )))
        }
    }
}

fn assert_unique(coords: &[Coordinate]) {
    for (i, c) in coords.iter().enumerate() {
        assert!(
            !coords[..i].iter().any(|d| d.name == c.name),
            "duplicate coordinate name `{}`",
            c.name
        );
    }
}

/// Exact multivariate polynomial over the coordinates of a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarField {
    chart: Chart,
    // exponent vector (length = chart dim) -> nonzero reduced rational
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl ScalarField {
    pub fn zero(chart: &Chart) -> Self {
        ScalarField { chart: chart.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(chart: &Chart, c: Rat) -> Self {
        let mut f = Self::zero(chart);
        if !c.is_zero() {
            f.terms.insert(vec![0; chart.dim()], c);
        }
        f
    }

    pub fn one(chart: &Chart) -> Self {
        Self::constant(chart, Rat::one())
    }

    /// The coordinate function for position `idx`.
    pub fn coordinate(chart: &Chart, idx: usize) -> Self {
        assert!(idx < chart.dim());
        let mut exps = vec![0u32; chart.dim()];
        exps[idx] = 1;
        let mut f = Self::zero(chart);
        f.terms.insert(exps, Rat::one());
        f
    }

    pub fn monomial(chart: &Chart, exps: Vec<u32>, coeff: Rat) -> Self {
        assert_eq!(exps.len(), chart.dim());
        let mut f = Self::zero(chart);
        if !coeff.is_zero() {
            f.terms.insert(exps, coeff);
        }
        f
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        assert_eq!(self.chart, other.chart, "scalar chart mismatch");
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        ScalarField { chart: self.chart.clone(), terms }
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ScalarField {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        ScalarField { chart: self.chart.clone(), terms }
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        assert_eq!(self.chart, other.chart, "scalar chart mismatch");
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
                *entry += c1 * c2;
                if entry.is_zero() {
                    terms.remove(&e);
                }
            }
        }
        ScalarField { chart: self.chart.clone(), terms }
    }

    pub fn scale(&self, c: &Rat) -> ScalarField {
        if c.is_zero() {
            return Self::zero(&self.chart);
        }
        let terms = self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect();
        ScalarField { chart: self.chart.clone(), terms }
    }

    /// Integer power, exact.
    pub fn pow(&self, n: u32) -> ScalarField {
        let mut acc = Self::one(&self.chart);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact partial derivative with respect to a named coordinate of the
    /// owning chart.
    pub fn diff(&self, c: &Coordinate) -> Result<ScalarField> {
        match self.chart.index_of(&c.name) {
            Some(i) if self.chart.coord(i) == c => Ok(self.diff_idx(i)),
            _ => Err(Error::UnknownCoordinate(
                c.name.clone(),
                self.chart.describe(),
            )),
        }
    }

    /// Partial derivative by coordinate position.
    pub fn diff_idx(&self, idx: usize) -> ScalarField {
        assert!(idx < self.chart.dim());
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[idx] -= 1;
            let coeff = c * Rat::from_integer(BigInt::from(e[idx]));
            let entry = terms.entry(e2.clone()).or_insert_with(Rat::zero);
            *entry += coeff;
            if entry.is_zero() {
                terms.remove(&e2);
            }
        }
        ScalarField { chart: self.chart.clone(), terms }
    }

    /// Exact evaluation at a rational point (one value per chart coordinate).
    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.chart.dim(),
                got: point.len(),
            });
        }
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    m *= &point[i];
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Decides `self == other` via the canonical representation.
    pub fn equal(&self, other: &ScalarField) -> Result<bool> {
        self.chart.same(&other.chart)?;
        Ok(self.terms == other.terms)
    }

    /// Re-expresses a base-chart polynomial on the total chart that extends it.
    pub fn promote(&self, total: &Chart) -> ScalarField {
        assert!(total.dim() >= self.chart.dim());
        for i in 0..self.chart.dim() {
            assert_eq!(self.chart.coord(i), total.coord(i), "chart prefix mismatch");
        }
        let pad = total.dim() - self.chart.dim();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2.extend(std::iter::repeat(0).take(pad));
                (e2, c.clone())
            })
            .collect();
        ScalarField { chart: total.clone(), terms }
    }

    /// Restricts a total-chart polynomial to the base chart; errors if it
    /// depends on a fiber coordinate.
    pub fn restrict(&self, base: &Chart) -> Result<ScalarField> {
        let nb = base.dim();
        assert!(self.chart.dim() >= nb);
        for i in 0..nb {
            assert_eq!(base.coord(i), self.chart.coord(i), "chart prefix mismatch");
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            for (i, &k) in e.iter().enumerate().skip(nb) {
                if k != 0 {
                    return Err(Error::NotProjectable {
                        component: self.to_string(),
                        coordinate: self.chart.coord(i).name.clone(),
                    });
                }
            }
            terms.insert(e[..nb].to_vec(), c.clone());
        }
        Ok(ScalarField { chart: base.clone(), terms })
    }

    /// True when no monomial involves a fiber coordinate.
    pub fn is_fiber_independent(&self) -> bool {
        let nb = self.chart.n_base();
        self.terms.keys().all(|e| e[nb..].iter().all(|&k| k == 0))
    }

    /// True when every monomial has total fiber degree exactly one.
    pub fn is_fiber_linear(&self) -> bool {
        let nb = self.chart.n_base();
        self.terms
            .keys()
            .all(|e| e[nb..].iter().sum::<u32>() == 1)
    }

    /// First fiber coordinate this polynomial depends on, if any.
    pub fn fiber_dependency(&self) -> Option<&Coordinate> {
        let nb = self.chart.n_base();
        for e in self.terms.keys() {
            for (i, &k) in e.iter().enumerate().skip(nb) {
                if k != 0 {
                    return Some(self.chart.coord(i));
                }
            }
        }
        None
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.iter().all(|&k| k == 0) {
                factors.push(mag.to_string());
            }
            for (i, &k) in e.iter().enumerate() {
                if k == 1 {
                    factors.push(self.chart.coord(i).name.clone());
                } else if k > 1 {
                    factors.push(format!("{}^{}", self.chart.coord(i).name, k));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Complex scalar stored as an exact real pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexScalar {
    pub re: ScalarField,
    pub im: ScalarField,
}

impl ComplexScalar {
    pub fn new(re: ScalarField, im: ScalarField) -> Self {
        assert_eq!(re.chart(), im.chart());
        ComplexScalar { re, im }
    }

    pub fn zero(chart: &Chart) -> Self {
        ComplexScalar { re: ScalarField::zero(chart), im: ScalarField::zero(chart) }
    }

    pub fn real(re: ScalarField) -> Self {
        let im = ScalarField::zero(re.chart());
        ComplexScalar { re, im }
    }

    pub fn chart(&self) -> &Chart {
        self.re.chart()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, other: &ComplexScalar) -> ComplexScalar {
        ComplexScalar { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn sub(&self, other: &ComplexScalar) -> ComplexScalar {
        ComplexScalar { re: self.re.sub(&other.re), im: self.im.sub(&other.im) }
    }

    pub fn neg(&self) -> ComplexScalar {
        ComplexScalar { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, other: &ComplexScalar) -> ComplexScalar {
        ComplexScalar {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    pub fn mul_real(&self, other: &ScalarField) -> ComplexScalar {
        ComplexScalar { re: self.re.mul(other), im: self.im.mul(other) }
    }

    /// Multiplication by the imaginary unit.
    pub fn mul_i(&self) -> ComplexScalar {
        ComplexScalar { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn conj(&self) -> ComplexScalar {
        ComplexScalar { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn diff_idx(&self, idx: usize) -> ComplexScalar {
        ComplexScalar { re: self.re.diff_idx(idx), im: self.im.diff_idx(idx) }
    }

    pub fn promote(&self, total: &Chart) -> ComplexScalar {
        ComplexScalar { re: self.re.promote(total), im: self.im.promote(total) }
    }

    pub fn restrict(&self, base: &Chart) -> Result<ComplexScalar> {
        Ok(ComplexScalar { re: self.re.restrict(base)?, im: self.im.restrict(base)? })
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "i*({})", self.im),
            (false, false) => write!(f, "({}) + i*({})", self.re, self.im),
        }
    }
}
