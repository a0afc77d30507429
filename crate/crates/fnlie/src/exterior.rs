//! Differential forms and tangent-valued forms on a single chart.
//!
//! Storage convention: alternating tensors are stored on strictly increasing
//! multi-indices only, the full component being defined by permutation sign,
//! with no `1/r!` normalization anywhere. The wedge follows the all-shuffles
//! convention, so `(dx ^ dy)(e_x, e_y) = 1`.
//!
//! The Frölicher-Nijenhuis bracket is implemented twice: through the
//! five-term characterization on decomposables (primary route) and through
//! the component formula summed over all index tuples of the antisymmetric
//! extensions (independent oracle). The two routes agreeing on every instance
//! is what pins the convention.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::scalar::{Chart, Rat, ScalarField};
use crate::{Error, Result};

/// Strictly increasing list of coordinate positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(indices: Vec<usize>) -> Result<Self> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::DegreeError(format!(
                    "multi-index {:?} is not strictly increasing",
                    indices
                )));
            }
        }
        Ok(MultiIndex(indices))
    }

    pub fn single(idx: usize) -> Self {
        MultiIndex(vec![idx])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.binary_search(&idx).is_ok()
    }

    /// Sorts an arbitrary tuple into increasing order; `None` on repetition.
    /// The sign is the parity of the sorting permutation.
    pub fn from_tuple(tuple: &[usize]) -> Option<(Self, i32)> {
        let mut v = tuple.to_vec();
        let mut sign = 1i32;
        // insertion sort, counting swaps
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        for w in v.windows(2) {
            if w[0] == w[1] {
                return None;
            }
        }
        Some((MultiIndex(v), sign))
    }

    /// `d^idx ^ d^self` reduced to increasing order: `None` if `idx` repeats.
    pub fn prepend(&self, idx: usize) -> Option<(Self, i32)> {
        if self.contains(idx) {
            return None;
        }
        let pos = self.0.partition_point(|&j| j < idx);
        let mut v = self.0.clone();
        v.insert(pos, idx);
        let sign = if pos % 2 == 0 { 1 } else { -1 };
        Some((MultiIndex(v), sign))
    }

    /// `d^self ^ d^other` reduced to increasing order with shuffle sign.
    pub fn merge(&self, other: &MultiIndex) -> Option<(Self, i32)> {
        let (a, b) = (&self.0, &other.0);
        let mut v = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0usize, 0usize);
        let mut sign = 1i32;
        while i < a.len() && j < b.len() {
            if a[i] == b[j] {
                return None;
            }
            if a[i] < b[j] {
                v.push(a[i]);
                i += 1;
            } else {
                // b[j] hops over the remaining a-entries
                if (a.len() - i) % 2 == 1 {
                    sign = -sign;
                }
                v.push(b[j]);
                j += 1;
            }
        }
        v.extend_from_slice(&a[i..]);
        v.extend_from_slice(&b[j..]);
        Some((MultiIndex(v), sign))
    }

    /// Removes the entry at `pos`; the sign moves that slot to the front.
    pub fn remove_at(&self, pos: usize) -> (Self, i32) {
        let mut v = self.0.clone();
        v.remove(pos);
        let sign = if pos % 2 == 0 { 1 } else { -1 };
        (MultiIndex(v), sign)
    }

    pub fn position_of(&self, idx: usize) -> Option<usize> {
        self.0.binary_search(&idx).ok()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

pub(crate) fn parity_sign(k: usize) -> i32 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn rat_sign(s: i32) -> Rat {
    if s >= 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Alternating covariant `r`-tensor on a chart, increasing-index storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    chart: Chart,
    degree: usize,
    comps: BTreeMap<MultiIndex, ScalarField>,
}

impl Form {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Form { chart: chart.clone(), degree, comps: BTreeMap::new() }
    }

    /// 0-form from a scalar field.
    pub fn from_scalar(f: ScalarField) -> Self {
        let chart = f.chart().clone();
        let mut form = Form::zero(&chart, 0);
        form.insert_add(MultiIndex::empty(), f);
        form
    }

    /// The basis covector `d^idx`.
    pub fn covector(chart: &Chart, idx: usize) -> Self {
        assert!(idx < chart.dim());
        let mut form = Form::zero(chart, 1);
        form.insert_add(MultiIndex::single(idx), ScalarField::one(chart));
        form
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn comps(&self) -> impl Iterator<Item = (&MultiIndex, &ScalarField)> {
        self.comps.iter()
    }

    pub fn comp(&self, mi: &MultiIndex) -> ScalarField {
        self.comps
            .get(mi)
            .cloned()
            .unwrap_or_else(|| ScalarField::zero(&self.chart))
    }

    pub fn insert_add(&mut self, mi: MultiIndex, f: ScalarField) {
        assert_eq!(mi.degree(), self.degree, "multi-index degree mismatch");
        if f.is_zero() {
            return;
        }
        let entry = self
            .comps
            .entry(mi.clone())
            .or_insert_with(|| ScalarField::zero(&self.chart));
        *entry = entry.add(&f);
        if entry.is_zero() {
            self.comps.remove(&mi);
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.chart, other.chart);
        assert_eq!(self.degree, other.degree, "form degree mismatch in add");
        let mut out = self.clone();
        for (mi, f) in &other.comps {
            out.insert_add(mi.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        let comps = self.comps.iter().map(|(m, f)| (m.clone(), f.neg())).collect();
        Form { chart: self.chart.clone(), degree: self.degree, comps }
    }

    pub fn scale(&self, c: &Rat) -> Form {
        let mut out = Form::zero(&self.chart, self.degree);
        for (mi, f) in &self.comps {
            out.insert_add(mi.clone(), f.scale(c));
        }
        out
    }

    pub fn scale_field(&self, g: &ScalarField) -> Form {
        let mut out = Form::zero(&self.chart, self.degree);
        for (mi, f) in &self.comps {
            out.insert_add(mi.clone(), f.mul(g));
        }
        out
    }

    fn scale_sign(&self, s: i32) -> Form {
        if s >= 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// Alternating product under the all-shuffles convention.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.chart.same(&other.chart)?;
        let mut out = Form::zero(&self.chart, self.degree + other.degree);
        for (m1, f) in &self.comps {
            for (m2, g) in &other.comps {
                if let Some((m, sign)) = m1.merge(m2) {
                    out.insert_add(m, f.mul(g).scale(&rat_sign(sign)));
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative; satisfies `d(d(a)) = 0` and the antiderivation law.
    pub fn ext_d(&self) -> Form {
        let mut out = Form::zero(&self.chart, self.degree + 1);
        for (mi, f) in &self.comps {
            for c in 0..self.chart.dim() {
                let df = f.diff_idx(c);
                if df.is_zero() {
                    continue;
                }
                if let Some((m, sign)) = mi.prepend(c) {
                    out.insert_add(m, df.scale(&rat_sign(sign)));
                }
            }
        }
        out
    }

    /// Contraction of the basis vector `∂_mu` into the first slot.
    /// Zero on 0-forms.
    pub fn contract_basis(&self, mu: usize) -> Form {
        if self.degree == 0 {
            return Form::zero(&self.chart, 0);
        }
        let mut out = Form::zero(&self.chart, self.degree - 1);
        for (mi, f) in &self.comps {
            if let Some(pos) = mi.position_of(mu) {
                let (m, sign) = mi.remove_at(pos);
                out.insert_add(m, f.scale(&rat_sign(sign)));
            }
        }
        out
    }

    /// Full antisymmetric component for an arbitrary index tuple.
    pub fn component_full(&self, tuple: &[usize]) -> ScalarField {
        assert_eq!(tuple.len(), self.degree);
        match MultiIndex::from_tuple(tuple) {
            Some((mi, sign)) => self.comp(&mi).scale(&rat_sign(sign)),
            None => ScalarField::zero(&self.chart),
        }
    }

    /// Alternating multilinear evaluation at a point.
    pub fn eval_on_vectors(&self, vectors: &[Vec<Rat>], point: &[Rat]) -> Result<Rat> {
        if vectors.len() != self.degree {
            return Err(Error::ArityMismatch { degree: self.degree, got: vectors.len() });
        }
        for v in vectors {
            if v.len() != self.chart.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.chart.dim(),
                    got: v.len(),
                });
            }
        }
        let mut acc = Rat::zero();
        for (mi, f) in &self.comps {
            let idx = mi.indices();
            let det = det_minor(vectors, idx);
            if det.is_zero() {
                continue;
            }
            acc += f.eval(point)? * det;
        }
        Ok(acc)
    }

    pub fn promote(&self, total: &Chart) -> Form {
        let comps = self
            .comps
            .iter()
            .map(|(m, f)| (m.clone(), f.promote(total)))
            .collect();
        Form { chart: total.clone(), degree: self.degree, comps }
    }

    pub fn restrict(&self, base: &Chart) -> Result<Form> {
        let nb = base.dim();
        let mut out = Form::zero(base, self.degree);
        for (mi, f) in &self.comps {
            if mi.indices().iter().any(|&i| i >= nb) {
                return Err(Error::NotProjectable {
                    component: format!("d{}", mi),
                    coordinate: self.chart.coord(*mi.indices().last().unwrap()).name.clone(),
                });
            }
            out.insert_add(mi.clone(), f.restrict(base)?);
        }
        Ok(out)
    }
}

/// Determinant of the minor `[vectors[i][idx[j]]]` by permutation expansion.
fn det_minor(vectors: &[Vec<Rat>], idx: &[usize]) -> Rat {
    let k = idx.len();
    if k == 0 {
        return Rat::one();
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut acc = Rat::zero();
    permute(&mut perm, 0, 1, &mut |p, sign| {
        let mut prod = rat_sign(sign);
        for (i, &pi) in p.iter().enumerate() {
            prod *= &vectors[i][idx[pi]];
        }
        acc += prod;
    });
    acc
}

/// Visits all permutations of `v[start..]`, tracking parity.
pub(crate) fn permute<F: FnMut(&[usize], i32)>(v: &mut Vec<usize>, start: usize, sign: i32, visit: &mut F) {
    if start == v.len() {
        visit(v, sign);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        let s = if i == start { sign } else { -sign };
        permute(v, start + 1, s, visit);
        v.swap(start, i);
    }
}

/// Tangent-valued `r`-form: a `Form` per output direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tvf {
    chart: Chart,
    degree: usize,
    comps: BTreeMap<(MultiIndex, usize), ScalarField>,
}

impl Tvf {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Tvf { chart: chart.clone(), degree, comps: BTreeMap::new() }
    }

    /// Degree-0 case: a vector field with the given components.
    pub fn vector_field(chart: &Chart, comps: Vec<ScalarField>) -> Self {
        assert_eq!(comps.len(), chart.dim());
        let mut out = Tvf::zero(chart, 0);
        for (mu, f) in comps.into_iter().enumerate() {
            out.insert_add(MultiIndex::empty(), mu, f);
        }
        out
    }

    pub fn basis_vector(chart: &Chart, mu: usize) -> Self {
        let mut out = Tvf::zero(chart, 0);
        out.insert_add(MultiIndex::empty(), mu, ScalarField::one(chart));
        out
    }

    /// The identity tangent-valued 1-form `Σ_λ d^λ ⊗ ∂_λ`.
    pub fn identity(chart: &Chart) -> Self {
        let mut out = Tvf::zero(chart, 1);
        for mu in 0..chart.dim() {
            out.insert_add(MultiIndex::single(mu), mu, ScalarField::one(chart));
        }
        out
    }

    /// Decomposable `ξ ⊗ X` for a general degree-0 field `X`.
    pub fn tensor(xi: &Form, field: &Tvf) -> Result<Tvf> {
        xi.chart().same(field.chart())?;
        assert_eq!(field.degree(), 0, "tensor expects a vector field");
        let mut out = Tvf::zero(xi.chart(), xi.degree());
        for (mi, f) in xi.comps() {
            for ((_, mu), g) in &field.comps {
                out.insert_add(mi.clone(), *mu, f.mul(g));
            }
        }
        Ok(out)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn comps(&self) -> impl Iterator<Item = (&(MultiIndex, usize), &ScalarField)> {
        self.comps.iter()
    }

    pub fn comp(&self, mi: &MultiIndex, mu: usize) -> ScalarField {
        self.comps
            .get(&(mi.clone(), mu))
            .cloned()
            .unwrap_or_else(|| ScalarField::zero(&self.chart))
    }

    pub fn insert_add(&mut self, mi: MultiIndex, mu: usize, f: ScalarField) {
        assert_eq!(mi.degree(), self.degree);
        assert!(mu < self.chart.dim());
        if f.is_zero() {
            return;
        }
        let key = (mi, mu);
        let entry = self
            .comps
            .entry(key.clone())
            .or_insert_with(|| ScalarField::zero(&self.chart));
        *entry = entry.add(&f);
        if entry.is_zero() {
            self.comps.remove(&key);
        }
    }

    pub fn add(&self, other: &Tvf) -> Tvf {
        assert_eq!(self.chart, other.chart);
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for ((mi, mu), f) in &other.comps {
            out.insert_add(mi.clone(), *mu, f.clone());
        }
        out
    }

    pub fn sub(&self, other: &Tvf) -> Tvf {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Tvf {
        let comps = self
            .comps
            .iter()
            .map(|(k, f)| (k.clone(), f.neg()))
            .collect();
        Tvf { chart: self.chart.clone(), degree: self.degree, comps }
    }

    pub fn scale(&self, c: &Rat) -> Tvf {
        let mut out = Tvf::zero(&self.chart, self.degree);
        for ((mi, mu), f) in &self.comps {
            out.insert_add(mi.clone(), *mu, f.scale(c));
        }
        out
    }

    fn scale_sign(&self, s: i32) -> Tvf {
        if s >= 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// The output-direction form column for direction `mu`.
    pub fn direction_form(&self, mu: usize) -> Form {
        let mut out = Form::zero(&self.chart, self.degree);
        for ((mi, m), f) in &self.comps {
            if *m == mu {
                out.insert_add(mi.clone(), f.clone());
            }
        }
        out
    }

    /// Canonical basis decomposition: one decomposable per stored entry.
    pub fn canonical_decomposition(&self) -> Vec<(Form, Tvf)> {
        self.comps
            .iter()
            .map(|((mi, mu), f)| {
                let mut xi = Form::zero(&self.chart, self.degree);
                xi.insert_add(mi.clone(), f.clone());
                (xi, Tvf::basis_vector(&self.chart, *mu))
            })
            .collect()
    }

    pub fn component_full(&self, tuple: &[usize], mu: usize) -> ScalarField {
        assert_eq!(tuple.len(), self.degree);
        match MultiIndex::from_tuple(tuple) {
            Some((mi, sign)) => self.comp(&mi, mu).scale(&rat_sign(sign)),
            None => ScalarField::zero(&self.chart),
        }
    }

    /// Interior product `i(Ξ)α`, degree `r + s - 1`; errors on 0-forms.
    pub fn interior(&self, alpha: &Form) -> Result<Form> {
        self.chart.same(alpha.chart())?;
        if alpha.degree() == 0 {
            return Err(Error::DegreeError(
                "interior product of a 0-form is undefined".into(),
            ));
        }
        let mut out = Form::zero(&self.chart, self.degree + alpha.degree() - 1);
        for ((mi, mu), f) in &self.comps {
            let contracted = alpha.contract_basis(*mu);
            let mut xi = Form::zero(&self.chart, self.degree);
            xi.insert_add(mi.clone(), f.clone());
            out = out.add(&xi.wedge(&contracted)?);
        }
        Ok(out)
    }

    /// Lie derivative `L(Ξ)α`, degree `r + s`; on decomposables
    /// `L(ξ⊗X)α = ξ ∧ L(X)α − (−1)^{r−1} dξ ∧ i(X)α`.
    pub fn lie_form(&self, alpha: &Form) -> Result<Form> {
        self.chart.same(alpha.chart())?;
        let r = self.degree;
        let mut out = Form::zero(&self.chart, r + alpha.degree());
        for ((mi, mu), f) in &self.comps {
            let mut xi = Form::zero(&self.chart, r);
            xi.insert_add(mi.clone(), f.clone());
            let lie = lie_along_basis(alpha, *mu);
            out = out.add(&xi.wedge(&lie)?);
            if alpha.degree() >= 1 {
                let term = xi
                    .ext_d()
                    .wedge(&alpha.contract_basis(*mu))?
                    .scale_sign(-parity_sign(r + 1)); // −(−1)^{r−1}
                out = out.add(&term);
            }
        }
        Ok(out)
    }

    /// FN bracket, primary route: bilinear extension of the five-term
    /// formula over the canonical basis decomposition.
    pub fn fn_bracket(&self, other: &Tvf) -> Result<Tvf> {
        self.chart.same(&other.chart)?;
        fn_bracket_decomposables(
            &self.canonical_decomposition(),
            &other.canonical_decomposition(),
            &self.chart,
            self.degree,
            other.degree,
        )
    }

    /// FN bracket, oracle route: the component formula, reading the index
    /// sums over all tuples of the antisymmetric extensions and re-expressing
    /// the result in increasing-index storage.
    pub fn fn_bracket_coord(&self, other: &Tvf) -> Result<Tvf> {
        self.chart.same(&other.chart)?;
        let n = self.chart.dim();
        let (r, s) = (self.degree, other.degree);
        let k = r + s;
        let mut out = Tvf::zero(&self.chart, k);
        if k > n {
            return Ok(out);
        }
        let sign_rs = parity_sign(r * s);
        // the tuple expression is already antisymmetric within Ξ's r slots
        // and Σ's s slots, so the permutation sum counts every shuffle class
        // r!·s! times
        let normalization = crate::scalar::ratio(1, (factorial(r) * factorial(s)) as i64);
        for m in combinations(n, k) {
            let mi = MultiIndex::new(m.clone()).expect("combinations are increasing");
            for mu in 0..n {
                let mut acc = ScalarField::zero(&self.chart);
                let mut t = m.clone();
                permute(&mut t, 0, 1, &mut |tup, tsign| {
                    let term = coord_bracket_term(self, other, tup, mu, r, s, sign_rs, n);
                    if !term.is_zero() {
                        acc = acc.add(&term.scale(&rat_sign(tsign)));
                    }
                });
                out.insert_add(mi.clone(), mu, acc.scale(&normalization));
            }
        }
        Ok(out)
    }

    /// Alternating multilinear evaluation at a point; one value per direction.
    pub fn eval_on_vectors(&self, vectors: &[Vec<Rat>], point: &[Rat]) -> Result<Vec<Rat>> {
        if vectors.len() != self.degree {
            return Err(Error::ArityMismatch { degree: self.degree, got: vectors.len() });
        }
        let mut out = vec![Rat::zero(); self.chart.dim()];
        for mu in 0..self.chart.dim() {
            out[mu] = self.direction_form(mu).eval_on_vectors(vectors, point)?;
        }
        Ok(out)
    }

    pub fn promote(&self, total: &Chart) -> Tvf {
        let mut out = Tvf::zero(total, self.degree);
        for ((mi, mu), f) in &self.comps {
            out.insert_add(mi.clone(), *mu, f.promote(total));
        }
        out
    }
}

/// `L(∂_mu)α = i(∂_mu) dα + d i(∂_mu) α` (Cartan).
fn lie_along_basis(alpha: &Form, mu: usize) -> Form {
    let t1 = alpha.ext_d().contract_basis(mu);
    if alpha.degree() == 0 {
        t1
    } else {
        t1.add(&alpha.contract_basis(mu).ext_d())
    }
}

/// Lie derivative of a form along a general vector field, via Cartan.
pub fn lie_along_field(alpha: &Form, field: &Tvf) -> Result<Form> {
    assert_eq!(field.degree(), 0);
    field.lie_form(alpha)
}

/// Commutator of two vector fields (degree-0 tangent-valued forms).
pub fn commutator(x: &Tvf, y: &Tvf) -> Result<Tvf> {
    assert_eq!(x.degree(), 0);
    assert_eq!(y.degree(), 0);
    x.chart().same(y.chart())?;
    let chart = x.chart();
    let mut out = Tvf::zero(chart, 0);
    for mu in 0..chart.dim() {
        let mut comp = ScalarField::zero(chart);
        for rho in 0..chart.dim() {
            let xr = x.comp(&MultiIndex::empty(), rho);
            let yr = y.comp(&MultiIndex::empty(), rho);
            comp = comp.add(&xr.mul(&y.comp(&MultiIndex::empty(), mu).diff_idx(rho)));
            comp = comp.sub(&yr.mul(&x.comp(&MultiIndex::empty(), mu).diff_idx(rho)));
        }
        out.insert_add(MultiIndex::empty(), mu, comp);
    }
    Ok(out)
}

/// Contraction of a general vector field into the first slot of a form.
/// Zero on 0-forms.
pub fn contract_field(alpha: &Form, field: &Tvf) -> Form {
    assert_eq!(field.degree(), 0);
    let chart = alpha.chart();
    if alpha.degree() == 0 {
        return Form::zero(chart, 0);
    }
    let mut out = Form::zero(chart, alpha.degree() - 1);
    for ((_, mu), f) in field.comps() {
        out = out.add(&alpha.contract_basis(*mu).scale_field(f));
    }
    out
}

/// The five-term FN bracket on explicit decomposable lists. Each entry is
/// `(ξ, X)` with `ξ` of the stated degree and `X` a general vector field;
/// the bracket does not depend on the chosen decomposition.
pub fn fn_bracket_decomposables(
    left: &[(Form, Tvf)],
    right: &[(Form, Tvf)],
    chart: &Chart,
    r: usize,
    s: usize,
) -> Result<Tvf> {
    let mut out = Tvf::zero(chart, r + s);
    let sign_rs = parity_sign(r * s);
    for (xi, x) in left {
        assert_eq!(xi.degree(), r, "left decomposable degree mismatch");
        for (sigma, y) in right {
            assert_eq!(sigma.degree(), s, "right decomposable degree mismatch");
            // ξ ∧ σ ⊗ [X, Y]
            let t1 = Tvf::tensor(&xi.wedge(sigma)?, &commutator(x, y)?)?;
            // ξ ∧ L(X)σ ⊗ Y
            let t2 = Tvf::tensor(&xi.wedge(&x.lie_form(sigma)?)?, y)?;
            // −(−1)^{rs} σ ∧ L(Y)ξ ⊗ X
            let t3 = Tvf::tensor(&sigma.wedge(&y.lie_form(xi)?)?, x)?.scale_sign(-sign_rs);
            out = out.add(&t1).add(&t2).add(&t3);
            // (−1)^r dξ ∧ i(X)σ ⊗ Y
            if s >= 1 {
                let t4 = Tvf::tensor(&xi.ext_d().wedge(&contract_field(sigma, x))?, y)?
                    .scale_sign(parity_sign(r));
                out = out.add(&t4);
            }
            // −(−1)^{s+rs} dσ ∧ i(Y)ξ ⊗ X
            if r >= 1 {
                let t5 = Tvf::tensor(&sigma.ext_d().wedge(&contract_field(xi, y))?, x)?
                    .scale_sign(-parity_sign(s + r * s));
                out = out.add(&t5);
            }
        }
    }
    Ok(out)
}

fn coord_bracket_term(
    xi: &Tvf,
    sigma: &Tvf,
    tuple: &[usize],
    mu: usize,
    r: usize,
    s: usize,
    sign_rs: i32,
    n: usize,
) -> ScalarField {
    let chart = xi.chart();
    let mut acc = ScalarField::zero(chart);
    for rho in 0..n {
        // Ξ^ρ_{λ1..λr} ∂_ρ Σ^μ_{λ(r+1)..}
        let a = xi.component_full(&tuple[..r], rho);
        if !a.is_zero() {
            acc = acc.add(&a.mul(&sigma.component_full(&tuple[r..], mu).diff_idx(rho)));
        }
        // −(−1)^{rs} Σ^ρ_{λ1..λs} ∂_ρ Ξ^μ_{λ(s+1)..}
        let b = sigma.component_full(&tuple[..s], rho);
        if !b.is_zero() {
            let term = b.mul(&xi.component_full(&tuple[s..], mu).diff_idx(rho));
            acc = acc.sub(&term.scale(&rat_sign(sign_rs)));
        }
        // −r Ξ^μ_{λ1..λ(r−1) ρ} ∂_{λr} Σ^ρ_{λ(r+1)..}
        if r >= 1 {
            let mut idx: Vec<usize> = tuple[..r - 1].to_vec();
            idx.push(rho);
            let c = xi.component_full(&idx, mu);
            if !c.is_zero() {
                let d = sigma.component_full(&tuple[r..], rho).diff_idx(tuple[r - 1]);
                acc = acc.sub(&c.mul(&d).scale(&crate::scalar::rat(r as i64)));
            }
        }
        // +(−1)^{rs} s Σ^μ_{λ1..λ(s−1) ρ} ∂_{λs} Ξ^ρ_{λ(s+1)..}
        if s >= 1 {
            let mut idx: Vec<usize> = tuple[..s - 1].to_vec();
            idx.push(rho);
            let c = sigma.component_full(&idx, mu);
            if !c.is_zero() {
                let d = xi.component_full(&tuple[s..], rho).diff_idx(tuple[s - 1]);
                acc = acc.add(
                    &c.mul(&d)
                        .scale(&crate::scalar::rat(s as i64))
                        .scale(&rat_sign(sign_rs)),
                );
            }
        }
    }
    acc
}

pub(crate) fn factorial(k: usize) -> u64 {
    (1..=k as u64).product::<u64>().max(1)
}

/// All strictly increasing `k`-subsets of `0..n`.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Complex-valued form stored as an exact real pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexForm {
    pub re: Form,
    pub im: Form,
}

impl ComplexForm {
    pub fn new(re: Form, im: Form) -> Self {
        assert_eq!(re.chart(), im.chart());
        assert_eq!(re.degree(), im.degree());
        ComplexForm { re, im }
    }

    pub fn zero(chart: &Chart, degree: usize) -> Self {
        ComplexForm { re: Form::zero(chart, degree), im: Form::zero(chart, degree) }
    }

    pub fn real(re: Form) -> Self {
        let im = Form::zero(re.chart(), re.degree());
        ComplexForm { re, im }
    }

    pub fn imaginary(im: Form) -> Self {
        let re = Form::zero(im.chart(), im.degree());
        ComplexForm { re, im }
    }

    pub fn chart(&self) -> &Chart {
        self.re.chart()
    }

    pub fn degree(&self) -> usize {
        self.re.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, other: &ComplexForm) -> ComplexForm {
        ComplexForm { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn sub(&self, other: &ComplexForm) -> ComplexForm {
        ComplexForm { re: self.re.sub(&other.re), im: self.im.sub(&other.im) }
    }

    pub fn neg(&self) -> ComplexForm {
        ComplexForm { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul_i(&self) -> ComplexForm {
        ComplexForm { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn ext_d(&self) -> ComplexForm {
        ComplexForm { re: self.re.ext_d(), im: self.im.ext_d() }
    }

    pub fn wedge(&self, other: &ComplexForm) -> Result<ComplexForm> {
        Ok(ComplexForm {
            re: self.re.wedge(&other.re)?.sub(&self.im.wedge(&other.im)?),
            im: self.re.wedge(&other.im)?.add(&self.im.wedge(&other.re)?),
        })
    }

    pub fn scale_complex(&self, c: &crate::scalar::ComplexScalar) -> ComplexForm {
        ComplexForm {
            re: self.re.scale_field(&c.re).sub(&self.im.scale_field(&c.im)),
            im: self.re.scale_field(&c.im).add(&self.im.scale_field(&c.re)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ScalarField};

    fn r2() -> Chart {
        Chart::base(&["x", "y"])
    }

    fn r3() -> Chart {
        Chart::base(&["x", "y", "z"])
    }

    fn coord(ch: &Chart, i: usize) -> ScalarField {
        ScalarField::coordinate(ch, i)
    }

    fn basis(ch: &Chart, i: usize) -> Vec<Rat> {
        let mut v = vec![rat(0); ch.dim()];
        v[i] = rat(1);
        v
    }

    #[test]
    fn wedge_antisymmetry_and_degeneracy() {
        let ch = r2();
        let dx = Form::covector(&ch, 0);
        let dy = Form::covector(&ch, 1);
        assert_eq!(dx.wedge(&dy).unwrap(), dy.wedge(&dx).unwrap().neg());
        assert!(dx.wedge(&dx).unwrap().is_zero());
    }

    #[test]
    fn wedge_shuffle_oracle() {
        // (x dy) ^ dz evaluated on (e_y, e_z) = x, checked against the
        // explicit shuffle sum over all basis pairs.
        let ch = r3();
        let xdy = Form::covector(&ch, 1).scale_field(&coord(&ch, 0));
        let dz = Form::covector(&ch, 2);
        let w = xdy.wedge(&dz).unwrap();
        let p = vec![rat(3), rat(0), rat(0)];
        for i in 0..3 {
            for j in 0..3 {
                let vi = basis(&ch, i);
                let vj = basis(&ch, j);
                // shuffle sum: α(v_i)β(v_j) − α(v_j)β(v_i)
                let a = |v: &Vec<Rat>| xdy.eval_on_vectors(std::slice::from_ref(v), &p).unwrap();
                let b = |v: &Vec<Rat>| dz.eval_on_vectors(std::slice::from_ref(v), &p).unwrap();
                let expect = a(&vi) * b(&vj) - a(&vj) * b(&vi);
                let got = w.eval_on_vectors(&[vi, vj], &p).unwrap();
                assert_eq!(got, expect);
            }
        }
        assert_eq!(
            w.eval_on_vectors(&[basis(&ch, 1), basis(&ch, 2)], &p).unwrap(),
            rat(3)
        );
    }

    #[test]
    fn ext_d_examples() {
        let ch = r2();
        // d(x dy) = dx ^ dy
        let xdy = Form::covector(&ch, 1).scale_field(&coord(&ch, 0));
        let dxdy = Form::covector(&ch, 0).wedge(&Form::covector(&ch, 1)).unwrap();
        assert_eq!(xdy.ext_d(), dxdy);
        // d(d(f)) = 0 for f = x^2 y
        let f = Form::from_scalar(coord(&ch, 0).pow(2).mul(&coord(&ch, 1)));
        assert!(f.ext_d().ext_d().is_zero());
    }

    #[test]
    fn ext_d_volume_example() {
        // d(x dy ^ dz) on R^3 = dx ^ dy ^ dz, eval on (e_x, e_y, e_z) = 1
        let ch = r3();
        let a = Form::covector(&ch, 1)
            .wedge(&Form::covector(&ch, 2))
            .unwrap()
            .scale_field(&coord(&ch, 0));
        let da = a.ext_d();
        let val = da
            .eval_on_vectors(&[basis(&ch, 0), basis(&ch, 1), basis(&ch, 2)], &vec![rat(0), rat(0), rat(0)])
            .unwrap();
        assert_eq!(val, rat(1));
    }

    #[test]
    fn interior_examples() {
        let ch = r3();
        let dy_dz = Form::covector(&ch, 1).wedge(&Form::covector(&ch, 2)).unwrap();
        // i(e_y)(dy ^ dz) = dz
        let ey = Tvf::basis_vector(&ch, 1);
        assert_eq!(ey.interior(&dy_dz).unwrap(), Form::covector(&ch, 2));
        // i(dx ⊗ e_y)(dy ^ dz) = dx ^ dz (decomposable rule)
        let mut xi = Tvf::zero(&ch, 1);
        xi.insert_add(MultiIndex::single(0), 1, ScalarField::one(&ch));
        let got = xi.interior(&dy_dz).unwrap();
        let expect = Form::covector(&ch, 0).wedge(&Form::covector(&ch, 2)).unwrap();
        assert_eq!(got, expect);
        // degree-0 target errors
        let f = Form::from_scalar(coord(&ch, 0));
        assert!(xi.interior(&f).is_err());
    }

    #[test]
    fn lie_form_examples() {
        let ch = r3();
        // L(e_x)(x dy) = dy
        let ex = Tvf::basis_vector(&ch, 0);
        let xdy = Form::covector(&ch, 1).scale_field(&coord(&ch, 0));
        assert_eq!(ex.lie_form(&xdy).unwrap(), Form::covector(&ch, 1));
        // L(dx ⊗ e_y)(y dz) = dx ^ dz
        let mut xi = Tvf::zero(&ch, 1);
        xi.insert_add(MultiIndex::single(0), 1, ScalarField::one(&ch));
        let ydz = Form::covector(&ch, 2).scale_field(&coord(&ch, 1));
        let expect = Form::covector(&ch, 0).wedge(&Form::covector(&ch, 2)).unwrap();
        assert_eq!(xi.lie_form(&ydz).unwrap(), expect);
        // L(Ξ, 0) = 0
        assert!(xi.lie_form(&Form::zero(&ch, 1)).unwrap().is_zero());
    }

    #[test]
    fn fn_bracket_degree0_commutator() {
        // [x ∂_y, y ∂_x] = x ∂_x − y ∂_y
        let ch = r2();
        let x_dy = Tvf::vector_field(&ch, vec![ScalarField::zero(&ch), coord(&ch, 0)]);
        let y_dx = Tvf::vector_field(&ch, vec![coord(&ch, 1), ScalarField::zero(&ch)]);
        let got = x_dy.fn_bracket(&y_dx).unwrap();
        let expect = Tvf::vector_field(&ch, vec![coord(&ch, 0), coord(&ch, 1).neg()]);
        assert_eq!(got, expect);
        assert_eq!(got, commutator(&x_dy, &y_dx).unwrap());
        assert_eq!(got, x_dy.fn_bracket_coord(&y_dx).unwrap());
    }

    #[test]
    fn fn_bracket_self_degree1_zero() {
        // [dx ⊗ ∂_y, dx ⊗ ∂_y] = 0 on R^2
        let ch = r2();
        let mut xi = Tvf::zero(&ch, 1);
        xi.insert_add(MultiIndex::single(0), 1, ScalarField::one(&ch));
        assert!(xi.fn_bracket(&xi).unwrap().is_zero());
        assert!(xi.fn_bracket_coord(&xi).unwrap().is_zero());
    }

    #[test]
    fn fn_bracket_with_identity() {
        // [Ξ, δ] = 0 for constant-coefficient Ξ
        let ch = r3();
        let delta = Tvf::identity(&ch);
        let mut xi = Tvf::zero(&ch, 1);
        xi.insert_add(MultiIndex::single(0), 2, ScalarField::constant(&ch, rat(5)));
        xi.insert_add(MultiIndex::single(1), 0, ScalarField::constant(&ch, rat(-3)));
        assert!(xi.fn_bracket(&delta).unwrap().is_zero());
        assert!(xi.fn_bracket_coord(&delta).unwrap().is_zero());
    }

    #[test]
    fn eval_on_vectors_convention() {
        let ch = r2();
        let dxdy = Form::covector(&ch, 0).wedge(&Form::covector(&ch, 1)).unwrap();
        let p = vec![rat(0), rat(0)];
        assert_eq!(
            dxdy.eval_on_vectors(&[basis(&ch, 0), basis(&ch, 1)], &p).unwrap(),
            rat(1)
        );
        assert_eq!(
            dxdy.eval_on_vectors(&[basis(&ch, 1), basis(&ch, 0)], &p).unwrap(),
            rat(-1)
        );
        let xdy = Form::covector(&ch, 1).scale_field(&coord(&ch, 0));
        assert_eq!(
            xdy.eval_on_vectors(&[basis(&ch, 1)], &[rat(3), rat(0)]).unwrap(),
            rat(3)
        );
        // arity mismatch
        assert!(dxdy.eval_on_vectors(&[basis(&ch, 0)], &p).is_err());
    }

    #[test]
    fn degree_overflow_is_zero() {
        let ch = r2();
        let vol = Form::covector(&ch, 0).wedge(&Form::covector(&ch, 1)).unwrap();
        let over = vol.wedge(&Form::covector(&ch, 0)).unwrap();
        assert!(over.is_zero());
        assert_eq!(over.degree(), 3);
    }
}
