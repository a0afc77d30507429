//! Seeded random instances for the verification suites.
//!
//! Everything is generated from an explicit `ChaCha8Rng` so that suites are
//! reproducible; per-trial generators are derived from `(seed, trial)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::connection::{Connection, HermitianConnection};
use crate::exterior::{combinations, Form, MultiIndex, Tvf};
use crate::qbundle::{ProjTvf, QChart, Section};
use crate::scalar::{rat, Chart, ComplexScalar, Rat, ScalarField};

/// Independent generator for trial `trial` of a suite seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn coefficient(rng: &mut ChaCha8Rng) -> Rat {
    let mut c = rng.gen_range(-3..=3);
    if c == 0 {
        c = 1;
    }
    rat(c)
}

/// Random polynomial on the base coordinates of `chart`, of total degree at
/// most `coeff_degree`, with a couple of terms.
pub fn scalar(rng: &mut ChaCha8Rng, chart: &Chart, coeff_degree: u32) -> ScalarField {
    let n = chart.n_base();
    let terms = rng.gen_range(1..=2);
    let mut out = ScalarField::zero(chart);
    for _ in 0..terms {
        let mut exps = vec![0u32; chart.dim()];
        let mut budget = rng.gen_range(0..=coeff_degree);
        while budget > 0 {
            let i = rng.gen_range(0..n);
            exps[i] += 1;
            budget -= 1;
        }
        out = out.add(&ScalarField::monomial(chart, exps, coefficient(rng)));
    }
    out
}

/// Random polynomial on `Q` that is homogeneous of degree one in the fibre
/// coordinates: `g_1(x) w1 + g_2(x) w2`.
pub fn fiber_linear_scalar(rng: &mut ChaCha8Rng, qchart: &QChart, coeff_degree: u32) -> ScalarField {
    let total = qchart.total();
    let mut out = ScalarField::zero(total);
    for b in 0..2 {
        if rng.gen_bool(0.8) {
            let g = scalar(rng, total, coeff_degree);
            out = out.add(&g.mul(&ScalarField::coordinate(total, qchart.w_index(b))));
        }
    }
    out
}

/// Random polynomial on `Q` with fibre degree up to 2 (not linear in
/// general).
pub fn total_scalar(rng: &mut ChaCha8Rng, qchart: &QChart, coeff_degree: u32) -> ScalarField {
    let total = qchart.total();
    let mut out = scalar(rng, total, coeff_degree);
    for _ in 0..rng.gen_range(0..=2) {
        let mut term = scalar(rng, total, coeff_degree);
        for _ in 0..rng.gen_range(1..=2) {
            let b = rng.gen_range(0..2);
            term = term.mul(&ScalarField::coordinate(total, qchart.w_index(b)));
        }
        out = out.add(&term);
    }
    out
}

/// Random `degree`-form with polynomial components.
pub fn form(rng: &mut ChaCha8Rng, chart: &Chart, degree: usize, coeff_degree: u32) -> Form {
    let mut out = Form::zero(chart, degree);
    for combo in combinations(chart.dim(), degree) {
        if rng.gen_bool(0.7) {
            out.insert_add(MultiIndex::new(combo).unwrap(), scalar(rng, chart, coeff_degree));
        }
    }
    out
}

/// Random tangent-valued `degree`-form with polynomial components.
pub fn tvf(rng: &mut ChaCha8Rng, chart: &Chart, degree: usize, coeff_degree: u32) -> Tvf {
    let mut out = Tvf::zero(chart, degree);
    for combo in combinations(chart.dim(), degree) {
        for mu in 0..chart.dim() {
            if rng.gen_bool(0.5) {
                out.insert_add(
                    MultiIndex::new(combo.clone()).unwrap(),
                    mu,
                    scalar(rng, chart, coeff_degree),
                );
            }
        }
    }
    out
}

/// Random projectable tangent-valued form: base components on `E`, fibre
/// components arbitrary polynomials on `Q`.
pub fn proj_tvf(rng: &mut ChaCha8Rng, qchart: &QChart, degree: usize, coeff_degree: u32) -> ProjTvf {
    let mut out = ProjTvf::zero(qchart, degree);
    for combo in combinations(qchart.n(), degree) {
        let mi = MultiIndex::new(combo).unwrap();
        for mu in 0..qchart.n() {
            if rng.gen_bool(0.5) {
                out.insert_base(mi.clone(), mu, scalar(rng, qchart.base(), coeff_degree));
            }
        }
        for a in 0..2 {
            if rng.gen_bool(0.6) {
                out.insert_fiber(mi.clone(), a, total_scalar(rng, qchart, coeff_degree));
            }
        }
    }
    out
}

/// Random real-linear projectable form: fibre components linear in `w`.
pub fn linear_proj_tvf(
    rng: &mut ChaCha8Rng,
    qchart: &QChart,
    degree: usize,
    coeff_degree: u32,
) -> ProjTvf {
    let mut out = ProjTvf::zero(qchart, degree);
    for combo in combinations(qchart.n(), degree) {
        let mi = MultiIndex::new(combo).unwrap();
        for mu in 0..qchart.n() {
            if rng.gen_bool(0.5) {
                out.insert_base(mi.clone(), mu, scalar(rng, qchart.base(), coeff_degree));
            }
        }
        for a in 0..2 {
            out.insert_fiber(mi.clone(), a, fiber_linear_scalar(rng, qchart, coeff_degree));
        }
    }
    out
}

/// Random complex-linear projectable form: fibre coefficients satisfy the
/// complex-linearity relations.
pub fn complex_linear_proj_tvf(
    rng: &mut ChaCha8Rng,
    qchart: &QChart,
    degree: usize,
    coeff_degree: u32,
) -> ProjTvf {
    let total = qchart.total();
    let w1 = ScalarField::coordinate(total, qchart.w_index(0));
    let w2 = ScalarField::coordinate(total, qchart.w_index(1));
    let mut out = ProjTvf::zero(qchart, degree);
    for combo in combinations(qchart.n(), degree) {
        let mi = MultiIndex::new(combo).unwrap();
        for mu in 0..qchart.n() {
            if rng.gen_bool(0.5) {
                out.insert_base(mi.clone(), mu, scalar(rng, qchart.base(), coeff_degree));
            }
        }
        // Ξ^1 = p w1 − q w2, Ξ^2 = q w1 + p w2
        let p = scalar(rng, total, coeff_degree);
        let q = scalar(rng, total, coeff_degree);
        out.insert_fiber(mi.clone(), 0, p.mul(&w1).sub(&q.mul(&w2)));
        out.insert_fiber(mi.clone(), 1, q.mul(&w1).add(&p.mul(&w2)));
    }
    out
}

/// Random Hermitian tangent-valued form, built as `χ[b](Ξ̲) + i Ξ̄ ⊗ I`.
pub fn hermitian_proj_tvf(
    rng: &mut ChaCha8Rng,
    qchart: &QChart,
    degree: usize,
    coeff_degree: u32,
) -> ProjTvf {
    let underline = tvf(rng, qchart.base(), degree, coeff_degree);
    let bar = form(rng, qchart.base(), degree, coeff_degree);
    ProjTvf::flat_lift(qchart, &underline)
        .unwrap()
        .add(&ProjTvf::i_form_liouville(qchart, &bar).unwrap())
}

/// Random section `Ψ = ψ b` with polynomial complex component.
pub fn section(rng: &mut ChaCha8Rng, qchart: &QChart, coeff_degree: u32) -> Section {
    let base = qchart.base();
    let psi = ComplexScalar::new(
        scalar(rng, base, coeff_degree),
        scalar(rng, base, coeff_degree),
    );
    Section::new(qchart, psi).unwrap()
}

/// Random general real-linear connection (not Hermitian in general).
pub fn linear_connection(rng: &mut ChaCha8Rng, qchart: &QChart, coeff_degree: u32) -> Connection {
    let mut c = Connection::flat(qchart);
    for lambda in 0..qchart.n() {
        for a in 0..2 {
            c.set_comp(a, lambda, fiber_linear_scalar(rng, qchart, coeff_degree));
        }
    }
    c
}

/// Random Hermitian connection with polynomial potential.
pub fn hermitian_connection(
    rng: &mut ChaCha8Rng,
    qchart: &QChart,
    coeff_degree: u32,
) -> HermitianConnection {
    let a = form(rng, qchart.base(), 1, coeff_degree);
    HermitianConnection::new(qchart, a).unwrap()
}

/// Random closed 2-form, as the differential of a random 1-form.
pub fn closed_2form(rng: &mut ChaCha8Rng, chart: &Chart, coeff_degree: u32) -> Form {
    form(rng, chart, 1, coeff_degree).ext_d()
}

/// Random 2-form with nonzero differential (requires dimension >= 3).
pub fn non_closed_2form(rng: &mut ChaCha8Rng, chart: &Chart, coeff_degree: u32) -> Form {
    assert!(chart.n_base() >= 3, "non-closed 2-forms need at least three dimensions");
    loop {
        let phi = form(rng, chart, 2, coeff_degree.max(1));
        if !phi.ext_d().is_zero() {
            return phi;
        }
    }
}

/// A decomposition of `t` that differs from the canonical one: entries are
/// randomly split and canceling pairs are inserted. The sum is unchanged,
/// so operations defined "via decomposables" must agree on it.
pub fn perturbed_decomposition(
    rng: &mut ChaCha8Rng,
    t: &Tvf,
    coeff_degree: u32,
) -> Vec<(Form, Tvf)> {
    let chart = t.chart();
    let mut out = Vec::new();
    for (leg, field) in t.canonical_decomposition() {
        if rng.gen_bool(0.5) {
            // split the scalar weight: ξ⊗X = (gξ)⊗X + ((1−g)ξ)⊗X
            let g = scalar(rng, chart, coeff_degree);
            let one_minus_g = ScalarField::one(chart).sub(&g);
            out.push((leg.scale_field(&g), field.clone()));
            out.push((leg.scale_field(&one_minus_g), field));
        } else {
            out.push((leg, field));
        }
    }
    // a canceling pair contributes zero to the sum
    let eta = form(rng, chart, t.degree(), coeff_degree);
    let y = tvf(rng, chart, 0, coeff_degree);
    out.push((eta.clone(), y.clone()));
    out.push((eta.neg(), y));
    out
}

/// Fresh adapted chart of base dimension `dim` with coordinate names
/// `x1, x2, ...`.
pub fn qchart(dim: usize) -> QChart {
    let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    QChart::new(&refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let qc = qchart(2);
        let a = proj_tvf(&mut trial_rng(7, 3), &qc, 1, 2);
        let b = proj_tvf(&mut trial_rng(7, 3), &qc, 1, 2);
        assert_eq!(a, b);
        let c = proj_tvf(&mut trial_rng(7, 4), &qc, 1, 2);
        assert_ne!(a, c);
    }

    #[test]
    fn generators_satisfy_their_invariants() {
        let qc = qchart(2);
        let mut rng = trial_rng(11, 0);
        for degree in 0..=2 {
            assert!(linear_proj_tvf(&mut rng, &qc, degree, 2).is_real_linear());
            assert!(complex_linear_proj_tvf(&mut rng, &qc, degree, 2).is_complex_linear());
            assert!(hermitian_proj_tvf(&mut rng, &qc, degree, 2).is_hermitian());
        }
        assert!(linear_connection(&mut rng, &qc, 2).is_real_linear());
        assert!(closed_2form(&mut rng, qc.base(), 2).ext_d().is_zero());
        let qc3 = qchart(3);
        assert!(!non_closed_2form(&mut rng, qc3.base(), 2).ext_d().is_zero());
    }

    #[test]
    fn perturbed_decomposition_preserves_the_sum() {
        let qc = qchart(2);
        let mut rng = trial_rng(5, 1);
        let t = tvf(&mut rng, qc.base(), 1, 2);
        let decomp = perturbed_decomposition(&mut rng, &t, 2);
        let mut sum = Tvf::zero(qc.base(), 1);
        for (leg, field) in &decomp {
            sum = sum.add(&Tvf::tensor(leg, field).unwrap());
        }
        assert_eq!(sum, t);
    }
}
