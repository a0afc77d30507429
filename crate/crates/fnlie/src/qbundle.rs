//! The Hermitian line bundle `Q -> E` in adapted coordinates `(x^λ, w1, w2)`.
//!
//! Projectable tangent-valued forms carry base-form legs only; their base
//! components live on `E` by construction, which is exactly projectability.
//! On top of that sit the real-linear / complex-linear / Hermitian
//! classification, the metric, the Liouville fields and the vertical Lie
//! derivative.

use std::collections::BTreeMap;
use std::fmt;

use crate::exterior::{ComplexForm, Form, MultiIndex, Tvf};
use crate::scalar::{Chart, ComplexScalar, ScalarField};
use crate::{Error, Result};

/// Which Liouville field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiouvilleKind {
    /// `I = w1 ∂_1 + w2 ∂_2`, the identity endomorphism of the fibres.
    Real,
    /// `iI = w1 ∂_2 − w2 ∂_1`, multiplication by `i`.
    Imaginary,
}

/// Adapted chart pair: base chart of dimension `n` and the total chart of
/// dimension `n + 2` extending it with the fibre coordinates `(w1, w2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QChart {
    base: Chart,
    total: Chart,
}

impl QChart {
    pub fn new(base_names: &[&str]) -> Self {
        QChart { base: Chart::base(base_names), total: Chart::total(base_names) }
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn total(&self) -> &Chart {
        &self.total
    }

    /// Base dimension `n`.
    pub fn n(&self) -> usize {
        self.base.dim()
    }

    /// Position of the fibre coordinate `w^(a+1)` on the total chart.
    pub fn w_index(&self, a: usize) -> usize {
        debug_assert!(a < 2);
        self.n() + a
    }

    pub fn same(&self, other: &QChart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch(format!(
                "{} vs {}",
                self.base.describe(),
                other.base.describe()
            )))
        }
    }
}

/// Projectable tangent-valued `r`-form on `Q` with base-form legs only.
///
/// Base components (`Ξ^μ`) are scalar fields on `E`; fibre components
/// (`Ξ^a`) are scalar fields on `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjTvf {
    qchart: QChart,
    degree: usize,
    base_comps: BTreeMap<(MultiIndex, usize), ScalarField>,
    fiber_comps: BTreeMap<(MultiIndex, usize), ScalarField>,
}

impl ProjTvf {
    pub fn zero(qchart: &QChart, degree: usize) -> Self {
        ProjTvf {
            qchart: qchart.clone(),
            degree,
            base_comps: BTreeMap::new(),
            fiber_comps: BTreeMap::new(),
        }
    }

    pub fn qchart(&self) -> &QChart {
        &self.qchart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.base_comps.is_empty() && self.fiber_comps.is_empty()
    }

    pub fn is_vertical(&self) -> bool {
        self.base_comps.is_empty()
    }

    pub fn insert_base(&mut self, mi: MultiIndex, mu: usize, f: ScalarField) {
        assert_eq!(mi.degree(), self.degree);
        assert!(mu < self.qchart.n());
        assert_eq!(f.chart(), self.qchart.base(), "base component must live on E");
        if f.is_zero() {
            return;
        }
        let key = (mi, mu);
        let entry = self
            .base_comps
            .entry(key.clone())
            .or_insert_with(|| ScalarField::zero(self.qchart.base()));
        *entry = entry.add(&f);
        if entry.is_zero() {
            self.base_comps.remove(&key);
        }
    }

    pub fn insert_fiber(&mut self, mi: MultiIndex, a: usize, f: ScalarField) {
        assert_eq!(mi.degree(), self.degree);
        assert!(a < 2);
        assert_eq!(f.chart(), self.qchart.total(), "fiber component must live on Q");
        if f.is_zero() {
            return;
        }
        let key = (mi, a);
        let entry = self
            .fiber_comps
            .entry(key.clone())
            .or_insert_with(|| ScalarField::zero(self.qchart.total()));
        *entry = entry.add(&f);
        if entry.is_zero() {
            self.fiber_comps.remove(&key);
        }
    }

    pub fn base_comps(&self) -> impl Iterator<Item = (&(MultiIndex, usize), &ScalarField)> {
        self.base_comps.iter()
    }

    pub fn fiber_comps(&self) -> impl Iterator<Item = (&(MultiIndex, usize), &ScalarField)> {
        self.fiber_comps.iter()
    }

    pub fn base_comp(&self, mi: &MultiIndex, mu: usize) -> ScalarField {
        self.base_comps
            .get(&(mi.clone(), mu))
            .cloned()
            .unwrap_or_else(|| ScalarField::zero(self.qchart.base()))
    }

    pub fn fiber_comp(&self, mi: &MultiIndex, a: usize) -> ScalarField {
        self.fiber_comps
            .get(&(mi.clone(), a))
            .cloned()
            .unwrap_or_else(|| ScalarField::zero(self.qchart.total()))
    }

    pub fn add(&self, other: &ProjTvf) -> ProjTvf {
        assert_eq!(self.qchart, other.qchart);
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for ((mi, mu), f) in &other.base_comps {
            out.insert_base(mi.clone(), *mu, f.clone());
        }
        for ((mi, a), f) in &other.fiber_comps {
            out.insert_fiber(mi.clone(), *a, f.clone());
        }
        out
    }

    pub fn sub(&self, other: &ProjTvf) -> ProjTvf {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ProjTvf {
        ProjTvf {
            qchart: self.qchart.clone(),
            degree: self.degree,
            base_comps: self.base_comps.iter().map(|(k, f)| (k.clone(), f.neg())).collect(),
            fiber_comps: self.fiber_comps.iter().map(|(k, f)| (k.clone(), f.neg())).collect(),
        }
    }

    /// The projection `Ξ̲`, a tangent-valued form on `E`.
    pub fn underline(&self) -> Tvf {
        let mut out = Tvf::zero(self.qchart.base(), self.degree);
        for ((mi, mu), f) in &self.base_comps {
            out.insert_add(mi.clone(), *mu, f.clone());
        }
        out
    }

    /// Inclusion into the tangent-valued forms of the total space.
    pub fn embed(&self) -> Tvf {
        let total = self.qchart.total();
        let mut out = Tvf::zero(total, self.degree);
        for ((mi, mu), f) in &self.base_comps {
            out.insert_add(mi.clone(), *mu, f.promote(total));
        }
        for ((mi, a), f) in &self.fiber_comps {
            out.insert_add(mi.clone(), self.qchart.w_index(*a), f.clone());
        }
        out
    }

    /// Reads a tangent-valued form on `Q` back as a projectable one. Errors
    /// when a form leg involves a fibre covector or a base component depends
    /// on a fibre coordinate, naming the offending component.
    pub fn project(tvf: &Tvf, qchart: &QChart) -> Result<ProjTvf> {
        qchart.total().same(tvf.chart())?;
        let n = qchart.n();
        let mut out = ProjTvf::zero(qchart, tvf.degree());
        for ((mi, mu), f) in tvf.comps() {
            if let Some(&bad) = mi.indices().iter().find(|&&i| i >= n) {
                return Err(Error::NotProjectable {
                    component: format!("component with form leg d{}", qchart.total().coord(bad).name),
                    coordinate: qchart.total().coord(bad).name.clone(),
                });
            }
            if *mu < n {
                if let Some(c) = f.fiber_dependency() {
                    return Err(Error::NotProjectable {
                        component: format!(
                            "base component ({}, direction {})",
                            mi,
                            qchart.total().coord(*mu).name
                        ),
                        coordinate: c.name.clone(),
                    });
                }
                out.insert_base(mi.clone(), *mu, f.restrict(qchart.base())?);
            } else {
                out.insert_fiber(mi.clone(), *mu - n, f.clone());
            }
        }
        Ok(out)
    }

    /// FN bracket of projectable forms, computed through the total space.
    /// Closure is a theorem; a non-projectable result is an internal error.
    pub fn fn_bracket(&self, other: &ProjTvf) -> Result<ProjTvf> {
        self.qchart.same(&other.qchart)?;
        let bracket = self.embed().fn_bracket(&other.embed())?;
        ProjTvf::project(&bracket, &self.qchart)
            .map_err(|e| Error::Internal(format!("projectable closure violated: {e}")))
    }

    /// The flat horizontal lift `χ[b](Ξ̲)`: zero fibre components.
    pub fn flat_lift(qchart: &QChart, underline: &Tvf) -> Result<ProjTvf> {
        qchart.base().same(underline.chart())?;
        let mut out = ProjTvf::zero(qchart, underline.degree());
        for ((mi, mu), f) in underline.comps() {
            out.insert_base(mi.clone(), *mu, f.clone());
        }
        Ok(out)
    }

    /// `i ξ ⊗ I` for a real base form `ξ`: fibre components
    /// `Ξ^1 = −ξ w2`, `Ξ^2 = ξ w1`.
    pub fn i_form_liouville(qchart: &QChart, xi: &Form) -> Result<ProjTvf> {
        qchart.base().same(xi.chart())?;
        let total = qchart.total();
        let w1 = ScalarField::coordinate(total, qchart.w_index(0));
        let w2 = ScalarField::coordinate(total, qchart.w_index(1));
        let mut out = ProjTvf::zero(qchart, xi.degree());
        for (mi, f) in xi.comps() {
            let fq = f.promote(total);
            out.insert_fiber(mi.clone(), 0, fq.mul(&w2).neg());
            out.insert_fiber(mi.clone(), 1, fq.mul(&w1));
        }
        Ok(out)
    }

    /// `ξ ⊗ I` for a real base form `ξ`.
    pub fn form_liouville(qchart: &QChart, xi: &Form) -> Result<ProjTvf> {
        qchart.base().same(xi.chart())?;
        let total = qchart.total();
        let w1 = ScalarField::coordinate(total, qchart.w_index(0));
        let w2 = ScalarField::coordinate(total, qchart.w_index(1));
        let mut out = ProjTvf::zero(qchart, xi.degree());
        for (mi, f) in xi.comps() {
            let fq = f.promote(total);
            out.insert_fiber(mi.clone(), 0, fq.mul(&w1));
            out.insert_fiber(mi.clone(), 1, fq.mul(&w2));
        }
        Ok(out)
    }

    /// The Liouville (`I`) or imaginary Liouville (`iI`) vector field.
    pub fn liouville(qchart: &QChart, kind: LiouvilleKind) -> ProjTvf {
        let one = Form::from_scalar(ScalarField::one(qchart.base()));
        match kind {
            LiouvilleKind::Real => Self::form_liouville(qchart, &one).unwrap(),
            LiouvilleKind::Imaginary => Self::i_form_liouville(qchart, &one).unwrap(),
        }
    }

    /// Fibre coefficient `Ξ^a_{M b} = ∂_b Ξ^a_M`, meaningful for real-linear
    /// forms, returned as a scalar field on `E`.
    pub fn fiber_coeff(&self, mi: &MultiIndex, a: usize, b: usize) -> Result<ScalarField> {
        let d = self.fiber_comp(mi, a).diff_idx(self.qchart.w_index(b));
        d.restrict(self.qchart.base())
            .map_err(|_| Error::NotRealLinear(format!("Xi^{}_{}", a + 1, mi)))
    }

    /// Real linearity: every fibre component is `Ξ^a_{M b} w^b` with base
    /// coefficients, i.e. homogeneous of degree one in `(w1, w2)`.
    pub fn is_real_linear(&self) -> bool {
        self.fiber_comps.values().all(|f| {
            f.is_fiber_linear() && {
                let n = self.qchart.n();
                f.diff_idx(n).is_fiber_independent() && f.diff_idx(n + 1).is_fiber_independent()
            }
        })
    }

    /// Complex linearity: real linear with
    /// `Ξ^1_{M1} = Ξ^2_{M2}` and `Ξ^2_{M1} = −Ξ^1_{M2}`.
    pub fn is_complex_linear(&self) -> bool {
        if !self.is_real_linear() {
            return false;
        }
        for mi in self.fiber_multi_indices() {
            let c11 = self.fiber_coeff(&mi, 0, 0).unwrap();
            let c12 = self.fiber_coeff(&mi, 0, 1).unwrap();
            let c21 = self.fiber_coeff(&mi, 1, 0).unwrap();
            let c22 = self.fiber_coeff(&mi, 1, 1).unwrap();
            if c11 != c22 || c21 != c12.neg() {
                return false;
            }
        }
        true
    }

    /// Hermitianity through the coordinate characterization:
    /// `Ξ^1_{M1} = Ξ^2_{M2} = 0` and `Ξ^2_{M1} = −Ξ^1_{M2}`.
    pub fn is_hermitian_coords(&self) -> bool {
        if !self.is_real_linear() {
            return false;
        }
        for mi in self.fiber_multi_indices() {
            let c11 = self.fiber_coeff(&mi, 0, 0).unwrap();
            let c12 = self.fiber_coeff(&mi, 0, 1).unwrap();
            let c21 = self.fiber_coeff(&mi, 1, 0).unwrap();
            let c22 = self.fiber_coeff(&mi, 1, 1).unwrap();
            if !c11.is_zero() || !c22.is_zero() || c21 != c12.neg() {
                return false;
            }
        }
        true
    }

    /// Hermitianity through the defining condition `L(Ξ)h = 0`.
    pub fn is_hermitian_metric(&self) -> bool {
        if !self.is_real_linear() {
            return false;
        }
        lie_metric(self).map(|v| v.is_zero()).unwrap_or(false)
    }

    /// Hermitian tangent-valued form: real linear with `L(Ξ)h = 0`.
    pub fn is_hermitian(&self) -> bool {
        self.is_hermitian_coords()
    }

    fn fiber_multi_indices(&self) -> Vec<MultiIndex> {
        let mut v: Vec<MultiIndex> = self.fiber_comps.keys().map(|(m, _)| m.clone()).collect();
        v.dedup();
        v
    }

    /// Splits a Hermitian form into `(Ξ̲, Ξ̄)` with
    /// `Ξ = χ[b](Ξ̲) + i Ξ̄ ⊗ I`.
    pub fn hermitian_decompose(&self) -> Result<(Tvf, Form)> {
        if !self.is_hermitian() {
            return Err(Error::NotHermitian(
                "hermitian_decompose requires a Hermitian input".into(),
            ));
        }
        let underline = self.underline();
        let mut bar = Form::zero(self.qchart.base(), self.degree);
        for mi in self.fiber_multi_indices() {
            // Ξ̄_M = Ξ^2_{M 1}
            bar.insert_add(mi.clone(), self.fiber_coeff(&mi, 1, 0)?);
        }
        Ok((underline, bar))
    }
}

impl fmt::Display for ProjTvf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.embed().direction_summary())
    }
}

impl Tvf {
    fn direction_summary(&self) -> String {
        let mut parts = Vec::new();
        for ((mi, mu), comp) in self.comps() {
            parts.push(format!("({}) d{} (x) @{}", comp, mi, self.chart().coord(*mu).name));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// `Λ^r T*E ⊗ V*Q`-valued object with complex values: the home of `h` and of
/// `L(Ξ)h`. Degree 0 with a single leg-free multi-index is a vertical
/// covector field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerticalDualForm {
    qchart: QChart,
    degree: usize,
    comps: BTreeMap<(MultiIndex, usize), ComplexScalar>,
}

impl VerticalDualForm {
    pub fn zero(qchart: &QChart, degree: usize) -> Self {
        VerticalDualForm { qchart: qchart.clone(), degree, comps: BTreeMap::new() }
    }

    pub fn qchart(&self) -> &QChart {
        &self.qchart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn insert_add(&mut self, mi: MultiIndex, a: usize, c: ComplexScalar) {
        assert_eq!(mi.degree(), self.degree);
        assert!(a < 2);
        assert_eq!(c.chart(), self.qchart.total());
        if c.is_zero() {
            return;
        }
        let key = (mi, a);
        let entry = self
            .comps
            .entry(key.clone())
            .or_insert_with(|| ComplexScalar::zero(self.qchart.total()));
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.comps.remove(&key);
        }
    }

    pub fn comp(&self, mi: &MultiIndex, a: usize) -> ComplexScalar {
        self.comps
            .get(&(mi.clone(), a))
            .cloned()
            .unwrap_or_else(|| ComplexScalar::zero(self.qchart.total()))
    }

    pub fn comps(&self) -> impl Iterator<Item = (&(MultiIndex, usize), &ComplexScalar)> {
        self.comps.iter()
    }

    pub fn add(&self, other: &VerticalDualForm) -> VerticalDualForm {
        assert_eq!(self.qchart, other.qchart);
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for ((mi, a), c) in &other.comps {
            out.insert_add(mi.clone(), *a, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &VerticalDualForm) -> VerticalDualForm {
        let mut out = self.clone();
        for ((mi, a), c) in &other.comps {
            out.insert_add(mi.clone(), *a, c.neg());
        }
        out
    }
}

/// The Hermitian metric as a complex vertical-valued form:
/// `h = (w1 d1 + w2 d2) + i (w1 d2 − w2 d1)`.
pub fn metric(qchart: &QChart) -> VerticalDualForm {
    let total = qchart.total();
    let w1 = ScalarField::coordinate(total, qchart.w_index(0));
    let w2 = ScalarField::coordinate(total, qchart.w_index(1));
    let mut h = VerticalDualForm::zero(qchart, 0);
    h.insert_add(MultiIndex::empty(), 0, ComplexScalar::new(w1.clone(), w2.neg()));
    h.insert_add(MultiIndex::empty(), 1, ComplexScalar::new(w2, w1));
    h
}

/// Vertical Lie derivative of a vertical covector field along a projectable
/// tangent-valued form:
/// `L(Ξ)α = (Ξ^μ_M ∂_μ α_a + Ξ^b_M ∂_b α_a + α_b ∂_a Ξ^b_M) d^M ⊗ d^a`.
///
/// Well defined although `α` is vertical valued; extension independence is
/// exercised in the tests.
pub fn vertical_lie(xi: &ProjTvf, alpha: &VerticalDualForm) -> Result<VerticalDualForm> {
    xi.qchart().same(alpha.qchart())?;
    if alpha.degree() != 0 {
        return Err(Error::DegreeError(
            "vertical_lie expects a vertical covector field (degree 0)".into(),
        ));
    }
    let qc = xi.qchart();
    let total = qc.total();
    let mut out = VerticalDualForm::zero(qc, xi.degree());
    let empty = MultiIndex::empty();
    let mut multi_indices: Vec<MultiIndex> = xi
        .base_comps()
        .map(|((m, _), _)| m.clone())
        .chain(xi.fiber_comps().map(|((m, _), _)| m.clone()))
        .collect();
    multi_indices.sort();
    multi_indices.dedup();
    for mi in multi_indices {
        for a in 0..2 {
            let mut acc = ComplexScalar::zero(total);
            let alpha_a = alpha.comp(&empty, a);
            for mu in 0..qc.n() {
                let x = xi.base_comp(&mi, mu).promote(total);
                acc = acc.add(&alpha_a.diff_idx(mu).mul_real(&x));
            }
            for b in 0..2 {
                let xb = xi.fiber_comp(&mi, b);
                acc = acc.add(&alpha_a.diff_idx(qc.w_index(b)).mul_real(&xb));
                let alpha_b = alpha.comp(&empty, b);
                acc = acc.add(&alpha_b.mul_real(&xb.diff_idx(qc.w_index(a))));
            }
            out.insert_add(mi.clone(), a, acc);
        }
    }
    Ok(out)
}

/// `L(Ξ)h` for a real-linear `Ξ`, by the closed-form coordinate expression.
///
/// The alternative route `vertical_lie(Ξ, h)` must agree; tests compare them.
pub fn lie_metric(xi: &ProjTvf) -> Result<VerticalDualForm> {
    if !xi.is_real_linear() {
        return Err(Error::NotRealLinear("lie_metric requires a real-linear input".into()));
    }
    let qc = xi.qchart();
    let total = qc.total();
    let w1 = ScalarField::coordinate(total, qc.w_index(0));
    let w2 = ScalarField::coordinate(total, qc.w_index(1));
    let mut out = VerticalDualForm::zero(qc, xi.degree());
    let mut multi_indices: Vec<MultiIndex> =
        xi.fiber_comps().map(|((m, _), _)| m.clone()).collect();
    multi_indices.sort();
    multi_indices.dedup();
    for mi in multi_indices {
        let c11 = xi.fiber_coeff(&mi, 0, 0)?.promote(total);
        let c12 = xi.fiber_coeff(&mi, 0, 1)?.promote(total);
        let c21 = xi.fiber_coeff(&mi, 1, 0)?.promote(total);
        let c22 = xi.fiber_coeff(&mi, 1, 1)?.promote(total);
        let trace = c11.add(&c22);
        let cross = c21.add(&c12);
        // (2 Ξ^1_{M1} w1 + (Ξ^2_{M1} + Ξ^1_{M2}) w2 − i Ξ^a_{Ma} w2) ⊗ d^1
        let re1 = c11.mul(&w1).scale(&crate::scalar::rat(2)).add(&cross.mul(&w2));
        let im1 = trace.mul(&w2).neg();
        out.insert_add(mi.clone(), 0, ComplexScalar::new(re1, im1));
        // (2 Ξ^2_{M2} w2 + (Ξ^2_{M1} + Ξ^1_{M2}) w1 + i Ξ^a_{Ma} w1) ⊗ d^2
        let re2 = c22.mul(&w2).scale(&crate::scalar::rat(2)).add(&cross.mul(&w1));
        let im2 = trace.mul(&w1);
        out.insert_add(mi.clone(), 1, ComplexScalar::new(re2, im2));
    }
    Ok(out)
}

/// `L(Ξ)h` computed as `vertical_lie` applied to the components of `h`.
pub fn lie_metric_via_vertical_lie(xi: &ProjTvf) -> Result<VerticalDualForm> {
    vertical_lie(xi, &metric(xi.qchart()))
}

/// Complex trace of a complex-linear vertical-valued form:
/// `tr(ξ ⊗ I) = ξ`, `tr(i ξ ⊗ I) = i ξ`.
pub fn complex_trace(theta: &ProjTvf) -> Result<ComplexForm> {
    if !theta.is_vertical() {
        return Err(Error::NotComplexLinear(
            "complex_trace expects a vertical-valued form".into(),
        ));
    }
    if !theta.is_complex_linear() {
        return Err(Error::NotComplexLinear(
            "complex_trace requires complex-linear fiber dependence".into(),
        ));
    }
    let base = theta.qchart().base();
    let mut re = Form::zero(base, theta.degree());
    let mut im = Form::zero(base, theta.degree());
    let mut multi_indices: Vec<MultiIndex> =
        theta.fiber_comps().map(|((m, _), _)| m.clone()).collect();
    multi_indices.sort();
    multi_indices.dedup();
    for mi in multi_indices {
        // Θ^z_{Mz} = Θ^1_{M1} + i Θ^2_{M1}
        re.insert_add(mi.clone(), theta.fiber_coeff(&mi, 0, 0)?);
        im.insert_add(mi.clone(), theta.fiber_coeff(&mi, 1, 0)?);
    }
    Ok(ComplexForm::new(re, im))
}

/// Section of `Q -> E` in the fixed quantum basis `b`: `Ψ = ψ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    qchart: QChart,
    psi: ComplexScalar,
}

impl Section {
    pub fn new(qchart: &QChart, psi: ComplexScalar) -> Result<Section> {
        qchart.base().same(psi.chart())?;
        Ok(Section { qchart: qchart.clone(), psi })
    }

    pub fn qchart(&self) -> &QChart {
        &self.qchart
    }

    pub fn psi(&self) -> &ComplexScalar {
        &self.psi
    }

    /// The section regarded as the vertical vector field `Ψ^a ∂_a`.
    pub fn as_vertical_field(&self) -> Tvf {
        let total = self.qchart.total();
        let mut out = Tvf::zero(total, 0);
        out.insert_add(MultiIndex::empty(), self.qchart.w_index(0), self.psi.re.promote(total));
        out.insert_add(MultiIndex::empty(), self.qchart.w_index(1), self.psi.im.promote(total));
        out
    }
}

/// `h(Φ, Ψ) = conj(φ) ψ`.
pub fn h_pairing(phi: &Section, psi: &Section) -> ComplexScalar {
    assert_eq!(phi.qchart, psi.qchart);
    phi.psi.conj().mul(&psi.psi)
}

/// Lie derivative of a section along a real-linear vector field:
/// the commutator `[Y, Ψ̃]` read back as a section.
pub fn lie_section(y: &ProjTvf, psi: &Section) -> Result<Section> {
    y.qchart().same(psi.qchart())?;
    if y.degree() != 0 {
        return Err(Error::DegreeError("lie_section expects a vector field".into()));
    }
    if !y.is_real_linear() {
        return Err(Error::NotRealLinear(
            "lie_section requires a real-linear vector field".into(),
        ));
    }
    let qc = y.qchart();
    let bracket = crate::exterior::commutator(&y.embed(), &psi.as_vertical_field())?;
    // projectable over zero; vertical components are base functions for linear Y
    for mu in 0..qc.n() {
        let c = bracket.comp(&MultiIndex::empty(), mu);
        if !c.is_zero() {
            return Err(Error::NotSection(format!(
                "commutator has base component along {}",
                qc.total().coord(mu).name
            )));
        }
    }
    let re = bracket
        .comp(&MultiIndex::empty(), qc.w_index(0))
        .restrict(qc.base())
        .map_err(|_| Error::NotSection("result depends on fiber coordinates".into()))?;
    let im = bracket
        .comp(&MultiIndex::empty(), qc.w_index(1))
        .restrict(qc.base())
        .map_err(|_| Error::NotSection("result depends on fiber coordinates".into()))?;
    Section::new(qc, ComplexScalar::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn qc1() -> QChart {
        QChart::new(&["x"])
    }

    fn qc2() -> QChart {
        QChart::new(&["x", "y"])
    }

    #[test]
    fn liouville_components() {
        let qc = qc1();
        let total = qc.total();
        let w1 = ScalarField::coordinate(total, 1);
        let w2 = ScalarField::coordinate(total, 2);
        let i_field = ProjTvf::liouville(&qc, LiouvilleKind::Real);
        assert_eq!(i_field.fiber_comp(&MultiIndex::empty(), 0), w1);
        assert_eq!(i_field.fiber_comp(&MultiIndex::empty(), 1), w2);
        let ii = ProjTvf::liouville(&qc, LiouvilleKind::Imaginary);
        assert_eq!(ii.fiber_comp(&MultiIndex::empty(), 0), w2.neg());
        assert_eq!(ii.fiber_comp(&MultiIndex::empty(), 1), w1);
        // I at (w1=1, w2=0) is the vertical vector (1, 0)
        let v = i_field
            .embed()
            .eval_on_vectors(&[], &vec![rat(0), rat(1), rat(0)])
            .unwrap();
        assert_eq!(v, vec![rat(0), rat(1), rat(0)]);
    }

    #[test]
    fn embed_project_roundtrip() {
        let qc = qc1();
        let i_field = ProjTvf::liouville(&qc, LiouvilleKind::Real);
        let back = ProjTvf::project(&i_field.embed(), &qc).unwrap();
        assert_eq!(back, i_field);
    }

    #[test]
    fn project_rejects_fiber_dependent_base_component() {
        // d^x ⊗ (w1 ∂_x) is not projectable
        let qc = qc1();
        let total = qc.total();
        let mut tvf = Tvf::zero(total, 1);
        tvf.insert_add(MultiIndex::single(0), 0, ScalarField::coordinate(total, 1));
        let err = ProjTvf::project(&tvf, &qc).unwrap_err();
        match err {
            Error::NotProjectable { coordinate, .. } => assert_eq!(coordinate, "w1"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn project_reads_off_components() {
        // d^x ⊗ (∂_x + x w1 ∂_1)
        let qc = qc1();
        let total = qc.total();
        let mut tvf = Tvf::zero(total, 1);
        tvf.insert_add(MultiIndex::single(0), 0, ScalarField::one(total));
        let xw1 = ScalarField::coordinate(total, 0).mul(&ScalarField::coordinate(total, 1));
        tvf.insert_add(MultiIndex::single(0), 1, xw1.clone());
        let p = ProjTvf::project(&tvf, &qc).unwrap();
        assert_eq!(p.base_comp(&MultiIndex::single(0), 0), ScalarField::one(qc.base()));
        assert_eq!(p.fiber_comp(&MultiIndex::single(0), 0), xw1);
    }

    #[test]
    fn bracket_of_liouville_fields() {
        let qc = qc2();
        let i_field = ProjTvf::liouville(&qc, LiouvilleKind::Real);
        let ii = ProjTvf::liouville(&qc, LiouvilleKind::Imaginary);
        assert!(i_field.fn_bracket(&i_field).unwrap().is_zero());
        assert!(ii.fn_bracket(&ii).unwrap().is_zero());
        // I and iI commute as well: both are constant-matrix linear fields
        // with commuting matrices (identity and rotation).
        assert!(i_field.fn_bracket(&ii).unwrap().is_zero());
    }

    #[test]
    fn linearity_checks() {
        let qc = qc1();
        let total = qc.total();
        let i_field = ProjTvf::liouville(&qc, LiouvilleKind::Real);
        assert!(i_field.is_real_linear());
        assert!(i_field.is_complex_linear());
        // d^x ⊗ (w1)^2 ∂_1 is not linear
        let mut q = ProjTvf::zero(&qc, 1);
        q.insert_fiber(MultiIndex::single(0), 0, ScalarField::coordinate(total, 1).pow(2));
        assert!(!q.is_real_linear());
        // d^x ⊗ (w1 ∂_1 − w2 ∂_2) is real but not complex linear
        let mut r = ProjTvf::zero(&qc, 1);
        r.insert_fiber(MultiIndex::single(0), 0, ScalarField::coordinate(total, 1));
        r.insert_fiber(MultiIndex::single(0), 1, ScalarField::coordinate(total, 2).neg());
        assert!(r.is_real_linear());
        assert!(!r.is_complex_linear());
    }

    #[test]
    fn metric_pairing_values() {
        let qc = qc1();
        let h = metric(&qc);
        // pairing of h at (w1=1, w2=0) with vertical vector (1,0):
        // component a=1 evaluated there
        let c = h.comp(&MultiIndex::empty(), 0);
        let p = vec![rat(0), rat(1), rat(0)];
        assert_eq!(c.re.eval(&p).unwrap(), rat(1));
        assert_eq!(c.im.eval(&p).unwrap(), rat(0));
    }

    #[test]
    fn h_pairing_examples() {
        let qc = qc1();
        let base = qc.base();
        let one = ComplexScalar::real(ScalarField::one(base));
        let i = ComplexScalar::new(ScalarField::zero(base), ScalarField::one(base));
        let phi = Section::new(&qc, one).unwrap();
        let psi = Section::new(&qc, i.clone()).unwrap();
        // h(1, i) = i
        assert_eq!(h_pairing(&phi, &psi), i);
        // h(Ψ, Ψ) real
        let z = ComplexScalar::new(
            ScalarField::coordinate(base, 0),
            ScalarField::one(base),
        );
        let s = Section::new(&qc, z).unwrap();
        assert!(h_pairing(&s, &s).im.is_zero());
    }

    #[test]
    fn vertical_lie_of_liouville() {
        // L(I) d^1 = d^1 (plug Ξ^1=w1, Ξ^2=w2, α=(1,0) into the formula)
        let qc = qc1();
        let total = qc.total();
        let i_field = ProjTvf::liouville(&qc, LiouvilleKind::Real);
        let mut alpha = VerticalDualForm::zero(&qc, 0);
        alpha.insert_add(
            MultiIndex::empty(),
            0,
            ComplexScalar::real(ScalarField::one(total)),
        );
        let out = vertical_lie(&i_field, &alpha).unwrap();
        assert_eq!(out, alpha);
        // linearity: L(0)α = 0
        let zero = ProjTvf::zero(&qc, 0);
        assert!(vertical_lie(&zero, &alpha).unwrap().is_zero());
    }

    #[test]
    fn lie_metric_examples() {
        let qc = qc1();
        let base = qc.base();
        let dx = Form::covector(base, 0);
        // horizontal flat lift has zero fiber part -> L h = 0
        let mut chi = Tvf::zero(base, 1);
        chi.insert_add(MultiIndex::single(0), 0, ScalarField::one(base));
        let lift = ProjTvf::flat_lift(&qc, &chi).unwrap();
        assert!(lie_metric(&lift).unwrap().is_zero());
        // d^x ⊗ I: nonzero, first component 2 w1
        let dxi = ProjTvf::form_liouville(&qc, &dx).unwrap();
        let lh = lie_metric(&dxi).unwrap();
        let c = lh.comp(&MultiIndex::single(0), 0);
        let w1 = ScalarField::coordinate(qc.total(), 1);
        assert_eq!(c.re, w1.scale(&rat(2)));
        // d^x ⊗ iI: zero
        let dxii = ProjTvf::i_form_liouville(&qc, &dx).unwrap();
        assert!(lie_metric(&dxii).unwrap().is_zero());
        // both routes agree
        assert_eq!(lh, lie_metric_via_vertical_lie(&dxi).unwrap());
    }

    #[test]
    fn hermitian_examples() {
        let qc = qc2();
        let base = qc.base();
        // i ξ ⊗ I is Hermitian for any base form ξ
        let xi = Form::covector(base, 0).scale_field(&ScalarField::coordinate(base, 1));
        let v = ProjTvf::i_form_liouville(&qc, &xi).unwrap();
        assert!(v.is_hermitian());
        assert!(v.is_hermitian_metric());
        // d^x ⊗ I is not Hermitian
        let dxi = ProjTvf::form_liouville(&qc, &Form::covector(base, 0)).unwrap();
        assert!(!dxi.is_hermitian());
        assert!(!dxi.is_hermitian_metric());
        // d^x ⊗ (∂_x + i x I) is Hermitian
        let mut base_part = Tvf::zero(base, 1);
        base_part.insert_add(MultiIndex::single(0), 0, ScalarField::one(base));
        let mut herm = ProjTvf::flat_lift(&qc, &base_part).unwrap();
        let x_dx = Form::covector(base, 0).scale_field(&ScalarField::coordinate(base, 0));
        herm = herm.add(&ProjTvf::i_form_liouville(&qc, &x_dx).unwrap());
        assert!(herm.is_hermitian());
        assert!(herm.is_hermitian_metric());
        // hermitian implies complex linear
        assert!(herm.is_complex_linear());
    }

    #[test]
    fn hermitian_decompose_examples() {
        let qc = qc1();
        let base = qc.base();
        let dx = Form::covector(base, 0);
        // i dx ⊗ I -> (0, dx)
        let v = ProjTvf::i_form_liouville(&qc, &dx).unwrap();
        let (u, b) = v.hermitian_decompose().unwrap();
        assert!(u.is_zero());
        assert_eq!(b, dx);
        // d^x ⊗ ∂_x -> (d^x ⊗ ∂_x, 0)
        let mut chi = Tvf::zero(base, 1);
        chi.insert_add(MultiIndex::single(0), 0, ScalarField::one(base));
        let lift = ProjTvf::flat_lift(&qc, &chi).unwrap();
        let (u2, b2) = lift.hermitian_decompose().unwrap();
        assert_eq!(u2, chi);
        assert!(b2.is_zero());
        // d^x ⊗ (∂_x + i x I) -> (d^x ⊗ ∂_x, x dx)
        let x_dx = dx.scale_field(&ScalarField::coordinate(base, 0));
        let herm = lift.add(&ProjTvf::i_form_liouville(&qc, &x_dx).unwrap());
        let (u3, b3) = herm.hermitian_decompose().unwrap();
        assert_eq!(u3, chi);
        assert_eq!(b3, x_dx);
        // reconstruction is exact
        let rebuilt = ProjTvf::flat_lift(&qc, &u3)
            .unwrap()
            .add(&ProjTvf::i_form_liouville(&qc, &b3).unwrap());
        assert_eq!(rebuilt, herm);
        // non-Hermitian input errors
        let bad = ProjTvf::form_liouville(&qc, &dx).unwrap();
        assert!(bad.hermitian_decompose().is_err());
    }

    #[test]
    fn complex_trace_examples() {
        let qc = qc2();
        let base = qc.base();
        let xi = Form::covector(base, 1).scale_field(&ScalarField::coordinate(base, 0));
        let t1 = complex_trace(&ProjTvf::form_liouville(&qc, &xi).unwrap()).unwrap();
        assert_eq!(t1.re, xi);
        assert!(t1.im.is_zero());
        let t2 = complex_trace(&ProjTvf::i_form_liouville(&qc, &xi).unwrap()).unwrap();
        assert!(t2.re.is_zero());
        assert_eq!(t2.im, xi);
        // −i tr (i ξ ⊗ I) = ξ
        let minus_i_t2 = t2.mul_i().neg();
        assert_eq!(minus_i_t2.re, xi);
        assert!(minus_i_t2.im.is_zero());
        // zero input
        let z = complex_trace(&ProjTvf::zero(&qc, 1)).unwrap();
        assert!(z.is_zero());
        // non-complex-linear input errors
        let mut bad = ProjTvf::zero(&qc, 1);
        bad.insert_fiber(
            MultiIndex::single(0),
            0,
            ScalarField::coordinate(qc.total(), qc.w_index(0)).pow(2),
        );
        assert!(complex_trace(&bad).is_err());
    }

    #[test]
    fn lie_section_examples() {
        let qc = qc1();
        let base = qc.base();
        let psi = Section::new(
            &qc,
            ComplexScalar::new(ScalarField::coordinate(base, 0), ScalarField::one(base)),
        )
        .unwrap();
        // L(I)Ψ = −Ψ
        let i_field = ProjTvf::liouville(&qc, LiouvilleKind::Real);
        let out = lie_section(&i_field, &psi).unwrap();
        assert_eq!(out.psi(), &psi.psi().neg());
        // flat horizontal lift of ∂_x: components ∂_x ψ
        let ex = Tvf::basis_vector(base, 0);
        let lift = ProjTvf::flat_lift(&qc, &ex).unwrap();
        let out2 = lie_section(&lift, &psi).unwrap();
        assert_eq!(out2.psi().re, ScalarField::one(base));
        assert!(out2.psi().im.is_zero());
        // L(Y, 0) = 0
        let zero = Section::new(&qc, ComplexScalar::zero(base)).unwrap();
        assert!(lie_section(&i_field, &zero).unwrap().psi().is_zero());
        // nonlinear Y rejected
        let mut bad = ProjTvf::zero(&qc, 0);
        bad.insert_fiber(
            MultiIndex::empty(),
            0,
            ScalarField::coordinate(qc.total(), 1).pow(2),
        );
        assert!(lie_section(&bad, &psi).is_err());
    }
}
