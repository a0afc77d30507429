//! Global classification of Hermitian tangent-valued forms through a
//! Hermitian connection: the mutually inverse maps `h[c]`, `j[c]`, the
//! Φ-twisted graded Lie bracket on pairs, and the Jacobi-defect diagnostic.

use crate::connection::HermitianConnection;
use crate::exterior::{contract_field, parity_sign, rat_sign, Form, MultiIndex, Tvf};
use crate::qbundle::{complex_trace, ProjTvf};
use crate::scalar::ratio;
use crate::{Error, Result};

/// A pair `(Ξ̲, Ξ̄)` of a tangent-valued `r`-form and an `r`-form on `E`,
/// the classification data of a Hermitian tangent-valued form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianPair {
    pub underline: Tvf,
    pub bar: Form,
}

impl HermitianPair {
    pub fn new(underline: Tvf, bar: Form) -> Result<Self> {
        underline.chart().same(bar.chart())?;
        if underline.degree() != bar.degree() {
            return Err(Error::DegreeError(format!(
                "pair components must share a degree ({} vs {})",
                underline.degree(),
                bar.degree()
            )));
        }
        Ok(HermitianPair { underline, bar })
    }

    pub fn degree(&self) -> usize {
        self.underline.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.underline.is_zero() && self.bar.is_zero()
    }

    pub fn add(&self, other: &HermitianPair) -> HermitianPair {
        HermitianPair {
            underline: self.underline.add(&other.underline),
            bar: self.bar.add(&other.bar),
        }
    }

    pub fn scale_sign(&self, sign: i32) -> HermitianPair {
        HermitianPair {
            underline: self.underline.scale(&rat_sign(sign)),
            bar: self.bar.scale(&rat_sign(sign)),
        }
    }
}

/// `j[c] : (Ξ̲, Ξ̄) ↦ c(Ξ̲) + i Ξ̄ ⊗ I`.
pub fn j_map(c: &HermitianConnection, pair: &HermitianPair) -> Result<ProjTvf> {
    c.qchart().base().same(pair.underline.chart())?;
    let lifted = c.connection().horizontal_lift(&pair.underline)?;
    let vertical = ProjTvf::i_form_liouville(c.qchart(), &pair.bar)?;
    Ok(lifted.add(&vertical))
}

/// `h[c] : Ξ ↦ (Ξ̲, −i tr(ν[c](Ξ)))`, the inverse of [`j_map`] on Hermitian
/// forms.
pub fn h_map(c: &HermitianConnection, xi: &ProjTvf) -> Result<HermitianPair> {
    c.qchart().same(xi.qchart())?;
    if !xi.is_hermitian() {
        return Err(Error::NotHermitian("h_map requires a Hermitian input".into()));
    }
    let nu_xi = c.connection().nu(xi)?;
    let traced = complex_trace(&nu_xi)?.mul_i().neg();
    if !traced.im.is_zero() {
        return Err(Error::Internal("−i tr(ν[c](Ξ)) is not real".into()));
    }
    HermitianPair::new(xi.underline(), traced.re)
}

/// Coordinate route for the second slot of `h[c]`:
/// `Ξ̄_M − A_ρ Ξ^ρ_M`, kept as an oracle for the trace route.
pub fn h_map_coord(c: &HermitianConnection, xi: &ProjTvf) -> Result<HermitianPair> {
    c.qchart().same(xi.qchart())?;
    let (underline, bar) = xi.hermitian_decompose()?;
    let mut out = bar;
    for ((mi, rho), f) in underline.comps() {
        out.insert_add(mi.clone(), c.potential_comp(*rho).mul(f).neg());
    }
    HermitianPair::new(underline, out)
}

/// The curvature 2-form in the bracket-pairing normalization:
/// `Φ[c]/2 = dA`. `Φ[c] = 2dA` doubles the classical curvature together
/// with `R[c] = −[c,c]`; under the full (determinant) evaluation convention
/// used by [`phi_pair`], the form that `j[c]` intertwines is this half.
pub fn twist_form(c: &HermitianConnection) -> Form {
    c.phi_form().scale(&ratio(1, 2))
}

/// `Φ(Ξ̲₁, Ξ̲₂)`: bilinear extension of `Φ(ξ⊗X, σ⊗Y) = (ξ∧σ) Φ(X,Y)`
/// over the given decompositions, with `Φ(X,Y)` the full (determinant)
/// evaluation.
pub fn phi_pair_with(
    phi: &Form,
    left: &[(Form, Tvf)],
    right: &[(Form, Tvf)],
    degree: usize,
) -> Result<Form> {
    if phi.degree() != 2 {
        return Err(Error::DegreeError("the twist must be a 2-form".into()));
    }
    let mut out = Form::zero(phi.chart(), degree);
    for (xi, x_field) in left {
        for (sigma, y_field) in right {
            let value = contract_field(&contract_field(phi, x_field), y_field)
                .comp(&MultiIndex::empty());
            out = out.add(&xi.wedge(sigma)?.scale_field(&value));
        }
    }
    Ok(out)
}

/// `Φ(Ξ̲₁, Ξ̲₂)` over the canonical decompositions.
pub fn phi_pair(phi: &Form, left: &Tvf, right: &Tvf) -> Result<Form> {
    phi.chart().same(left.chart())?;
    phi.chart().same(right.chart())?;
    phi_pair_with(
        phi,
        &left.canonical_decomposition(),
        &right.canonical_decomposition(),
        left.degree() + right.degree(),
    )
}

/// The Φ-twisted bracket on pairs:
/// `[(Ξ̲₁,Ξ̄₁), (Ξ̲₂,Ξ̄₂)]_Φ = ([Ξ̲₁,Ξ̲₂], Φ(Ξ̲₁,Ξ̲₂) + L(Ξ̲₁)Ξ̄₂ − (−1)^{rs} L(Ξ̲₂)Ξ̄₁)`.
pub fn phi_bracket(
    phi: &Form,
    p1: &HermitianPair,
    p2: &HermitianPair,
) -> Result<HermitianPair> {
    phi.chart().same(p1.underline.chart())?;
    phi.chart().same(p2.underline.chart())?;
    let r = p1.degree();
    let s = p2.degree();
    let underline = p1.underline.fn_bracket(&p2.underline)?;
    let mut bar = phi_pair(phi, &p1.underline, &p2.underline)?;
    bar = bar.add(&p1.underline.lie_form(&p2.bar)?);
    let sign_rs = parity_sign(r * s);
    bar = bar.sub(&p2.underline.lie_form(&p1.bar)?.scale(&rat_sign(sign_rs)));
    HermitianPair::new(underline, bar)
}

/// The graded cyclic Jacobi sum of the Φ-bracket:
/// `[P₁,[P₂,P₃]] + (−1)^{r₁(r₂+r₃)}[P₂,[P₃,P₁]] + (−1)^{r₃(r₁+r₂)}[P₃,[P₁,P₂]]`.
///
/// The underline part always vanishes (FN Jacobi); the bar part equals
/// `dΦ(X₁,X₂,X₃) ξ₁∧ξ₂∧ξ₃` on decomposables and vanishes for closed `Φ`.
pub fn jacobi_defect(
    phi: &Form,
    p1: &HermitianPair,
    p2: &HermitianPair,
    p3: &HermitianPair,
) -> Result<HermitianPair> {
    let (r1, r2, r3) = (p1.degree(), p2.degree(), p3.degree());
    let t1 = phi_bracket(phi, p1, &phi_bracket(phi, p2, p3)?)?;
    let t2 = phi_bracket(phi, p2, &phi_bracket(phi, p3, p1)?)?
        .scale_sign(parity_sign(r1 * (r2 + r3)));
    let t3 = phi_bracket(phi, p3, &phi_bracket(phi, p1, p2)?)?
        .scale_sign(parity_sign(r3 * (r1 + r2)));
    Ok(t1.add(&t2).add(&t3))
}
